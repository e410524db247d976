//! Zak grid parameters, MN-periodic sequences and M x N quasi-periodic arrays.
//!
//! A [`QuasiPeriodicArray`] stores only its fundamental domain
//! `k in [0, M)`, `l in [0, N)`. Every other index is reached through the
//! quasi-periodicity rule `X[k + nM, l + mN] = exp(j2pi n l / N) X[k, l]`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{gcd, reduce};

pub type C64 = Complex64;

/// `exp(j 2pi num / den)`, with `num` reduced first so large arguments stay exact.
#[inline]
pub fn unit_root(num: i64, den: usize) -> C64 {
    let r = reduce(num, den);
    C64::from_polar(1.0, TAU * r as f64 / den as f64)
}

/// Delay-Doppler grid: `M` delay bins and `N` Doppler bins per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParams {
    m: usize,
    n: usize,
    nu_p: f64,
}

impl GridParams {
    pub fn new(m: usize, n: usize, nu_p: f64) -> Result<Self> {
        if m.is_multiple_of(2) || n.is_multiple_of(2) {
            return Err(Error::EvenDimension { m, n });
        }
        let g = gcd(m as i64, n as i64) as usize;
        if g != 1 {
            return Err(Error::NotCoprime { m, n, gcd: g });
        }
        if !(nu_p > 0.0) || !nu_p.is_finite() {
            return Err(Error::NonPositive { what: "Doppler period", value: nu_p });
        }
        Ok(Self { m, n, nu_p })
    }

    /// Grid with unit Doppler period, for purely discrete work.
    pub fn unit(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, 1.0)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    /// Doppler period in Hz.
    pub fn nu_p(&self) -> f64 {
        self.nu_p
    }

    /// Delay period in seconds, `1 / nu_p`.
    pub fn tau_p(&self) -> f64 {
        1.0 / self.nu_p
    }

    pub fn bandwidth(&self) -> f64 {
        self.m as f64 * self.nu_p
    }

    pub fn duration(&self) -> f64 {
        self.n as f64 * self.tau_p()
    }

    /// Delay spacing of the information lattice, `tau_p / M`.
    pub fn delay_res(&self) -> f64 {
        self.tau_p() / self.m as f64
    }

    /// Doppler spacing of the information lattice, `nu_p / N`.
    pub fn doppler_res(&self) -> f64 {
        self.nu_p / self.n as f64
    }

    /// Lookup table of the MN-th roots of unity.
    pub fn roots(&self) -> RootTable {
        RootTable::new(self.mn())
    }

    pub(crate) fn ensure_same(&self, other: &GridParams) -> Result<()> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// Precomputed `exp(j 2pi i / len)` for `i in [0, len)`.
#[derive(Debug, Clone)]
pub struct RootTable {
    table: Vec<C64>,
}

impl RootTable {
    pub fn new(len: usize) -> Self {
        Self { table: (0..len as i64).map(|i| unit_root(i, len)).collect() }
    }

    #[inline]
    pub fn get(&self, idx: i64) -> C64 {
        self.table[idx.rem_euclid(self.table.len() as i64) as usize]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.table
    }
}

/// One period of an MN-periodic time-domain sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSequence {
    grid: GridParams,
    samples: Vec<C64>,
}

impl PeriodicSequence {
    pub fn new(grid: GridParams, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.mn() {
            return Err(Error::Config(format!("sequence has {} samples, grid period is {}", samples.len(), grid.mn())));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: GridParams, f: impl FnMut(usize) -> C64) -> Self {
        Self { grid, samples: (0..grid.mn()).map(f).collect() }
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    /// Value at any integer time index.
    #[inline]
    pub fn at(&self, n: i64) -> C64 {
        self.samples[n.rem_euclid(self.samples.len() as i64) as usize]
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x.norm_sqr()).sum()
    }

    /// `sum_n x[n] y*[n]` over one period.
    pub fn inner(&self, other: &PeriodicSequence) -> Result<C64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum())
    }
}

/// M x N quasi-periodic delay-Doppler array, stored on its fundamental domain
/// in row-major `(k, l)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPeriodicArray {
    grid: GridParams,
    data: Vec<C64>,
}

impl QuasiPeriodicArray {
    pub fn zeros(grid: GridParams) -> Self {
        Self { grid, data: vec![C64::new(0.0, 0.0); grid.mn()] }
    }

    pub fn new(grid: GridParams, data: Vec<C64>) -> Result<Self> {
        if data.len() != grid.mn() {
            return Err(Error::Config(format!("array has {} cells, fundamental domain has {}", data.len(), grid.mn())));
        }
        Ok(Self { grid, data })
    }

    pub fn from_fn(grid: GridParams, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(grid.mn());
        for k in 0..grid.m() {
            for l in 0..grid.n() {
                data.push(f(k, l));
            }
        }
        Self { grid, data }
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    /// Fundamental-domain cells, row-major in `k` then `l`.
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    #[inline]
    pub fn fundamental(&self, k: usize, l: usize) -> C64 {
        self.data[k * self.grid.n() + l]
    }

    #[inline]
    pub fn fundamental_mut(&mut self, k: usize, l: usize) -> &mut C64 {
        let n = self.grid.n();
        &mut self.data[k * n + l]
    }

    /// Quasi-periodic evaluation at any integer `(k, l)`.
    #[inline]
    pub fn at(&self, k: i64, l: i64) -> C64 {
        let (m, n) = (self.grid.m() as i64, self.grid.n() as i64);
        let shift = k.div_euclid(m);
        let k0 = k.rem_euclid(m);
        let l0 = l.rem_euclid(n);
        let v = self.data[(k0 * n + l0) as usize];
        if shift == 0 {
            v
        } else {
            v * unit_root(shift * l0, self.grid.n())
        }
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { grid: self.grid, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// Cellwise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self { grid: self.grid, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    /// Cellwise `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self { grid: self.grid, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }
}

/// Evaluate a quasi-periodic array at any integer index.
pub fn qp_eval(x: &QuasiPeriodicArray, k: i64, l: i64) -> C64 {
    x.at(k, l)
}

/// `sum X[k,l] Y*[k,l]` over the M x N window whose corner is `offset`.
///
/// Quasi-periodic phases cancel in `X Y*`, so the value does not depend on
/// the window position.
pub fn inner_product_qp(x: &QuasiPeriodicArray, y: &QuasiPeriodicArray, offset: (i64, i64)) -> Result<C64> {
    x.grid.ensure_same(&y.grid)?;
    let (m, n) = (x.grid.m() as i64, x.grid.n() as i64);
    let mut acc = C64::new(0.0, 0.0);
    for k in offset.0..offset.0 + m {
        for l in offset.1..offset.1 + n {
            acc += x.at(k, l) * y.at(k, l).conj();
        }
    }
    Ok(acc)
}

/// Peak-to-average power ratio over one period (linear, not dB).
pub fn papr(x: &PeriodicSequence) -> Result<f64> {
    let powers: Vec<f64> = x.samples().iter().map(|s| s.norm_sqr()).collect();
    let mean = powers.iter().sum::<f64>() / powers.len() as f64;
    if mean <= 0.0 {
        return Err(Error::ZeroSignal);
    }
    let peak = powers.iter().cloned().fold(0.0, f64::max);
    Ok(peak / mean)
}
