//! Discrete Zak transform between MN-periodic sequences and quasi-periodic
//! delay-Doppler arrays, and the matching orthonormal basis pair.

use crate::error::{Error, Result};
use crate::grid::{unit_root, GridParams, PeriodicSequence, QuasiPeriodicArray, C64};

/// `X[k,l] = N^{-1/2} sum_p x[k + pM] exp(-j2pi p l / N)` on the fundamental domain.
///
/// Evaluated by the direct sum over `p`.
pub fn dzt(x: &PeriodicSequence) -> QuasiPeriodicArray {
    let grid = *x.grid();
    let (m, n) = (grid.m(), grid.n());
    let scale = 1.0 / (n as f64).sqrt();
    let twiddle: Vec<C64> = (0..n as i64).map(|i| unit_root(-i, n)).collect();
    QuasiPeriodicArray::from_fn(grid, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..n {
            acc += x.samples()[k + p * m] * twiddle[(p * l) % n];
        }
        acc * scale
    })
}

/// Inverse transform: `x[k + pM] = N^{-1/2} sum_l X[k,l] exp(+j2pi p l / N)`.
pub fn idzt(x: &QuasiPeriodicArray) -> PeriodicSequence {
    let grid = *x.grid();
    let (m, n) = (grid.m(), grid.n());
    let scale = 1.0 / (n as f64).sqrt();
    let twiddle: Vec<C64> = (0..n as i64).map(|i| unit_root(i, n)).collect();
    let mut out = vec![C64::new(0.0, 0.0); grid.mn()];
    for k in 0..m {
        for p in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..n {
                acc += x.fundamental(k, l) * twiddle[(p * l) % n];
            }
            out[k + p * m] = acc * scale;
        }
    }
    PeriodicSequence::from_fn(grid, |i| out[i])
}

/// Index of a Zak-OTFS carrier: block `r in [0, N)`, tone `s in [0, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub r: usize,
    pub s: usize,
}

impl BasisIndex {
    pub fn new(r: usize, s: usize) -> Self {
        Self { r, s }
    }

    fn check(&self, grid: &GridParams) -> Result<()> {
        if self.r >= grid.n() || self.s >= grid.m() {
            return Err(Error::IndexOutOfRange { r: self.r, s: self.s, m: grid.m(), n: grid.n() });
        }
        Ok(())
    }

    /// All `N * M` indices, `r` major.
    pub fn all(grid: &GridParams) -> impl Iterator<Item = BasisIndex> {
        let (m, n) = (grid.m(), grid.n());
        (0..n).flat_map(move |r| (0..m).map(move |s| BasisIndex { r, s }))
    }
}

/// Time-domain carrier: a length-M tone burst in block `r`, zero elsewhere.
pub fn basis_td(grid: &GridParams, idx: BasisIndex) -> Result<PeriodicSequence> {
    idx.check(grid)?;
    let m = grid.m();
    let amp = 1.0 / (m as f64).sqrt();
    Ok(PeriodicSequence::from_fn(*grid, |n| {
        if n / m == idx.r {
            unit_root((idx.s * n) as i64, m) * amp
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Delay-Doppler image of [`basis_td`], in closed form.
pub fn basis_dd(grid: &GridParams, idx: BasisIndex) -> Result<QuasiPeriodicArray> {
    idx.check(grid)?;
    let (m, n) = (grid.m(), grid.n());
    let amp = 1.0 / (grid.mn() as f64).sqrt();
    Ok(QuasiPeriodicArray::from_fn(*grid, |k, l| {
        // k < M, so floor(k / M) = 0
        unit_root((idx.s * k) as i64, m) * unit_root(-((idx.r * l) as i64), n) * amp
    }))
}
