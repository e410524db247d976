//! Discrete ambiguity functions in the time and delay-Doppler domains.
//!
//! Both are evaluated on `(k, l) in [0, MN)^2` and are MN-periodic in each
//! lag. The two definitions agree exactly when the arrays are Zak transforms
//! of the sequences, which is what the fast path exploits: a DD surface is
//! computed as the TD surface of the inverse transforms, one `MN`-point FFT
//! per delay row. The direct double sums are kept as reference routes.

use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::cazac::CazacParams;
use crate::constellation::{Constellation, DataFrame};
use crate::error::{Error, Result};
use crate::grid::{unit_root, GridParams, PeriodicSequence, QuasiPeriodicArray, C64};
use crate::modular::{gcd, mod_inverse, reduce};
use crate::stats::{aux_rng, summarize, trial_rng};
use crate::zak::idzt;

/// Complex `A[k, l]` over the full `MN x MN` lag domain, row-major in `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySurface {
    grid: GridParams,
    values: Vec<C64>,
}

impl AmbiguitySurface {
    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Value at any integer lag, wrapped into `[0, MN)^2`.
    pub fn get(&self, k: i64, l: i64) -> C64 {
        let mn = self.grid.mn();
        self.values[reduce(k, mn) as usize * mn + reduce(l, mn) as usize]
    }

    /// `((k, l), A[k, l])` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), C64)> + '_ {
        let mn = self.grid.mn();
        self.values.iter().enumerate().map(move |(i, v)| ((i / mn, i % mn), *v))
    }

    /// Largest `|A|` deviation between two surfaces.
    pub fn max_deviation(&self, other: &AmbiguitySurface) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `(1/MN) sum_n x[k+n] y*[n] exp(-j2pi n l / MN)` at one lag, by direct summation.
pub fn td_ambiguity_at(x: &PeriodicSequence, y: &PeriodicSequence, k: i64, l: i64) -> C64 {
    let mn = x.samples().len();
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..mn as i64 {
        acc += x.at(k + n) * y.at(n).conj() * unit_root(-n * l, mn);
    }
    acc / mn as f64
}

/// Full TD surface by direct summation, `O((MN)^3)`. Reference route.
pub fn td_ambiguity_direct(x: &PeriodicSequence, y: &PeriodicSequence) -> Result<AmbiguitySurface> {
    x.grid().ensure_same(y.grid())?;
    let grid = *x.grid();
    let mn = grid.mn() as i64;
    let values = (0..mn).flat_map(|k| (0..mn).map(move |l| (k, l))).map(|(k, l)| td_ambiguity_at(x, y, k, l)).collect();
    Ok(AmbiguitySurface { grid, values })
}

/// Full TD surface: for each delay `k`, the Doppler row is `1/MN` times the
/// forward DFT of `n -> x[k+n] y*[n]`.
pub fn td_ambiguity(x: &PeriodicSequence, y: &PeriodicSequence) -> Result<AmbiguitySurface> {
    x.grid().ensure_same(y.grid())?;
    let grid = *x.grid();
    let mn = grid.mn();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(mn);
    let scale = 1.0 / mn as f64;
    let mut values = vec![C64::new(0.0, 0.0); mn * mn];
    values.par_chunks_mut(mn).enumerate().for_each(|(k, row)| {
        for (n, cell) in row.iter_mut().enumerate() {
            *cell = x.samples()[(k + n) % mn] * y.samples()[n].conj();
        }
        fft.process(row);
        for cell in row.iter_mut() {
            *cell *= scale;
        }
    });
    Ok(AmbiguitySurface { grid, values })
}

/// Delay-Doppler cross-ambiguity at one lag, straight from the definition:
/// `(1/MN) sum_{k'<M, l'<N} X[k',l'] Y*[k'-k, l'-l] exp(-j2pi (k'-k) l / MN)`.
pub fn dd_ambiguity_at(x: &QuasiPeriodicArray, y: &QuasiPeriodicArray, k: i64, l: i64) -> Result<C64> {
    x.grid().ensure_same(y.grid())?;
    let grid = x.grid();
    let (m, n, mn) = (grid.m() as i64, grid.n() as i64, grid.mn());
    let mut acc = C64::new(0.0, 0.0);
    for kp in 0..m {
        let twist = unit_root(-(kp - k) * l, mn);
        let mut row = C64::new(0.0, 0.0);
        for lp in 0..n {
            row += x.fundamental(kp as usize, lp as usize) * y.at(kp - k, lp - l).conj();
        }
        acc += row * twist;
    }
    Ok(acc / mn as f64)
}

/// Full DD surface by direct summation. Reference route for small grids.
pub fn dd_ambiguity_direct(x: &QuasiPeriodicArray, y: &QuasiPeriodicArray) -> Result<AmbiguitySurface> {
    x.grid().ensure_same(y.grid())?;
    let grid = *x.grid();
    let mn = grid.mn() as i64;
    let values =
        (0..mn * mn).into_par_iter().map(|i| dd_ambiguity_at(x, y, i / mn, i % mn).expect("grids checked")).collect();
    Ok(AmbiguitySurface { grid, values })
}

/// Full DD surface through the TD equivalence and per-row FFTs.
pub fn dd_ambiguity(x: &QuasiPeriodicArray, y: &QuasiPeriodicArray) -> Result<AmbiguitySurface> {
    x.grid().ensure_same(y.grid())?;
    td_ambiguity(&idzt(x), &idzt(y))
}

/// DD cross-ambiguity at a list of lags, via the TD equivalence.
///
/// Costs one inverse transform of each input plus `O(MN)` per lag.
pub fn dd_ambiguity_probes(x: &QuasiPeriodicArray, y: &QuasiPeriodicArray, lags: &[(i64, i64)]) -> Result<Vec<C64>> {
    x.grid().ensure_same(y.grid())?;
    let xt = idzt(x);
    let yt = idzt(y);
    Ok(td_probes(&xt, &yt, lags))
}

/// TD cross-ambiguity at a list of lags. Lags sharing a delay reuse one
/// product sequence.
pub(crate) fn td_probes(x: &PeriodicSequence, y: &PeriodicSequence, lags: &[(i64, i64)]) -> Vec<C64> {
    let mn = x.samples().len();
    let roots = x.grid().roots();
    let table = roots.as_slice();
    let xs = x.samples();
    let ys = y.samples();
    let mut order: Vec<usize> = (0..lags.len()).collect();
    order.sort_by_key(|&i| reduce(lags[i].0, mn));
    let mut out = vec![C64::new(0.0, 0.0); lags.len()];
    let mut prod = vec![C64::new(0.0, 0.0); mn];
    let mut current = None;
    let scale = 1.0 / mn as f64;
    for i in order {
        let k0 = reduce(lags[i].0, mn) as usize;
        if current != Some(k0) {
            for (n, p) in prod.iter_mut().enumerate() {
                let idx = if k0 + n >= mn { k0 + n - mn } else { k0 + n };
                *p = xs[idx] * ys[n].conj();
            }
            current = Some(k0);
        }
        let step = (mn - reduce(lags[i].1, mn) as usize) % mn;
        let mut idx = 0;
        let mut acc = C64::new(0.0, 0.0);
        for p in &prod {
            acc += p * table[idx];
            idx += step;
            if idx >= mn {
                idx -= mn;
            }
        }
        out[i] = acc * scale;
    }
    out
}

/// True when `2 alpha k - l = 0 mod MN`.
pub fn on_self_af_line(p: &CazacParams, k: i64, l: i64) -> bool {
    let mn = p.grid().mn() as i128;
    (2 * p.alpha as i128 * k as i128 - l as i128).rem_euclid(mn) == 0
}

/// Closed-form DD self-ambiguity of a CAZAC array:
/// `exp(j2pi (l k + k beta - alpha k^2)/MN)` on the line `2 alpha k = l (mod MN)`, zero off it.
pub fn self_af_closed_form(p: &CazacParams, k: i64, l: i64) -> C64 {
    if !on_self_af_line(p, k, l) {
        return C64::new(0.0, 0.0);
    }
    let mn = p.grid().mn() as i128;
    let (k, l) = (k as i128, l as i128);
    let e = (l * k + k * p.beta as i128 - p.alpha as i128 * k * k).rem_euclid(mn);
    unit_root(e as i64, mn as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossFlatness {
    /// `alpha - alpha'` is a unit mod MN.
    pub eligible: bool,
    /// Predicted constant `|A|`, `1/sqrt(MN)`; `NaN` when not eligible.
    pub magnitude: f64,
}

/// Closed-form flatness predicate for the cross-ambiguity of two CAZAC arrays.
pub fn cross_af_flatness(p: &CazacParams, q: &CazacParams) -> Result<CrossFlatness> {
    p.grid().ensure_same(q.grid())?;
    let mn = p.grid().mn() as i64;
    let eligible = gcd(p.alpha as i64 - q.alpha as i64, mn) == 1;
    let magnitude = if eligible { 1.0 / (mn as f64).sqrt() } else { f64::NAN };
    Ok(CrossFlatness { eligible, magnitude })
}

/// `max | |A[k,l]| - target |` over a surface.
pub fn max_flatness_deviation(surface: &AmbiguitySurface, target: f64) -> f64 {
    surface.values().iter().map(|v| (v.norm() - target).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnbiasednessReport {
    /// Monte-Carlo mean of `|A_{D,X}[k,l]|^2` over frames and probe lags.
    pub mean_sq_cross: f64,
    /// Standard error of `mean_sq_cross`, from the per-frame averages.
    pub std_error: f64,
    pub trials: usize,
    /// `(4M)^{-1} mod N`.
    pub psi: u64,
    /// Ensemble value `1/MN`.
    pub target: f64,
}

impl UnbiasednessReport {
    /// Distance from the target in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.mean_sq_cross - self.target) / self.std_error
    }
}

/// `(4M)^{-1} mod N`.
pub fn psi(grid: &GridParams) -> Result<u64> {
    mod_inverse(4 * grid.m() as i64, grid.n())
}

/// Number of probe lags evaluated per frame.
pub const UNBIASEDNESS_PROBES: usize = 8;

/// Monte-Carlo estimate of `E |A_{D,X}[k,l]|^2` for i.i.d. data frames `D`.
///
/// A fixed set of random lags is drawn once from `seed`; frame `t` uses the
/// generator `seed ^ t`.
pub fn unbiasedness_stat(
    x: &QuasiPeriodicArray,
    alphabet: &Constellation,
    trials: usize,
    seed: u64,
) -> Result<UnbiasednessReport> {
    if trials == 0 {
        return Err(Error::EmptyTrialSet);
    }
    let energy = alphabet.mean_energy();
    if (energy - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConstellation { energy });
    }
    let grid = *x.grid();
    let mn = grid.mn() as i64;
    let mut probe_rng = aux_rng(seed, 0);
    let lags: Vec<(i64, i64)> =
        (0..UNBIASEDNESS_PROBES).map(|_| (probe_rng.random_range(0..mn), probe_rng.random_range(0..mn))).collect();
    let per_frame: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let d = DataFrame::random(grid, alphabet, &mut trial_rng(seed, t)).to_array();
            lags.iter().map(|&(k, l)| dd_ambiguity_at(&d, x, k, l).expect("same grid").norm_sqr()).sum::<f64>()
                / lags.len() as f64
        })
        .collect();
    let s = summarize(&per_frame);
    Ok(UnbiasednessReport {
        mean_sq_cross: s.mean,
        std_error: s.std_error,
        trials,
        psi: psi(&grid)?,
        target: 1.0 / mn as f64,
    })
}

/// `| sum_{n<N} exp(j2pi a n^2 / N) |`, which equals `sqrt(N)` for odd `N` and unit `a`.
pub fn gauss_sum_magnitude(a: i64, n: usize) -> Result<f64> {
    if n.is_multiple_of(2) || gcd(a, n as i64) != 1 {
        return Err(Error::BadModulus { a, n });
    }
    let a = reduce(a, n) as u128;
    let s: C64 = (0..n as u128).map(|i| unit_root(((a * i * i) % n as u128) as i64, n)).sum();
    Ok(s.norm())
}

/// `sum_{n<N} exp(j2pi k n / N)` by direct summation.
pub fn roots_of_unity_sum(k: i64, n: usize) -> C64 {
    (0..n as i64).map(|i| unit_root(k * i, n)).sum()
}
