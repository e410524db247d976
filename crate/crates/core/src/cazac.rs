//! Quadratic-phase CAZAC sequences `x[n] = exp(j2pi (a n^2 + b n + c) / MN)`
//! and their delay-Doppler images.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{unit_root, GridParams, PeriodicSequence, QuasiPeriodicArray, C64};
use crate::modular::{mod_inverse, reduce};

/// Chirp rate, linear phase and constant phase, stored as residues mod MN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CazacParams {
    pub alpha: u64,
    pub beta: u64,
    pub gamma: u64,
    #[serde(skip)]
    grid: GridParams,
}

impl CazacParams {
    pub fn new(grid: GridParams, alpha: i64, beta: i64, gamma: i64) -> Result<Self> {
        let mn = grid.mn();
        let alpha = reduce(alpha, mn);
        if (2 * alpha).is_multiple_of(mn as u64) {
            return Err(Error::InvalidAlpha { alpha, mn });
        }
        Ok(Self { alpha, beta: reduce(beta, mn), gamma: reduce(gamma, mn), grid })
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    /// Exponent `a n^2 + b n + c` reduced mod MN.
    #[inline]
    fn exponent(&self, n: i64) -> i64 {
        let mn = self.grid.mn() as i128;
        let n = n as i128;
        let e = self.alpha as i128 * (n * n).rem_euclid(mn) + self.beta as i128 * n + self.gamma as i128;
        e.rem_euclid(mn) as i64
    }

    pub fn td(&self) -> PeriodicSequence {
        cazac_td(self)
    }

    pub fn dd(&self) -> QuasiPeriodicArray {
        cazac_dd(self)
    }
}

/// Named members of the quadratic family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTag {
    GeneralQuadratic {
        alpha: i64,
        beta: i64,
        gamma: i64,
    },
    /// `alpha = beta = u / 2`, read as `u * 2^{-1} mod MN`; `gamma = 0`.
    ZadoffChu {
        u: i64,
    },
    /// `gamma = 0`.
    Gaussian {
        alpha: i64,
        beta: i64,
    },
    /// `beta = gamma = 0`.
    Wiener {
        alpha: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CazacFamily {
    pub tag: FamilyTag,
    pub resolved: CazacParams,
}

pub fn resolve_family(tag: FamilyTag, grid: &GridParams) -> Result<CazacFamily> {
    let resolved = match tag {
        FamilyTag::GeneralQuadratic { alpha, beta, gamma } => CazacParams::new(*grid, alpha, beta, gamma)?,
        FamilyTag::ZadoffChu { u } => {
            // MN is odd, so 2 is always invertible.
            let half = mod_inverse(2, grid.mn())? as i128;
            let a = (u as i128 * half).rem_euclid(grid.mn() as i128) as i64;
            CazacParams::new(*grid, a, a, 0)?
        }
        FamilyTag::Gaussian { alpha, beta } => CazacParams::new(*grid, alpha, beta, 0)?,
        FamilyTag::Wiener { alpha } => CazacParams::new(*grid, alpha, 0, 0)?,
    };
    Ok(CazacFamily { tag, resolved })
}

pub fn cazac_td(p: &CazacParams) -> PeriodicSequence {
    let mn = p.grid.mn();
    PeriodicSequence::from_fn(p.grid, |n| unit_root(p.exponent(n as i64), mn))
}

/// Closed-form delay-Doppler array,
/// `X[k,l] = exp(j2pi (c + k b)/MN) / sqrt(N) * sum_p exp(j2pi (a (k+pM)^2 + pM (b - l)) / MN)`.
pub fn cazac_dd(p: &CazacParams) -> QuasiPeriodicArray {
    let grid = p.grid;
    let (m, n, mn) = (grid.m() as i64, grid.n() as i64, grid.mn() as i64);
    let roots = grid.roots();
    let scale = 1.0 / (n as f64).sqrt();
    let (a, b, c) = (p.alpha as i64, p.beta as i64, p.gamma as i64);
    QuasiPeriodicArray::from_fn(grid, |k, l| {
        let (k, l) = (k as i64, l as i64);
        let mut acc = C64::new(0.0, 0.0);
        for q in 0..n {
            let t = k + q * m;
            let e = (a * ((t * t) % mn)) % mn + (q * m * (b - l)) % mn;
            acc += roots.get(e);
        }
        roots.get(c + k * b) * acc * scale
    })
}

/// Constant amplitude: `max |x[n]| - 1` within `tol`.
pub fn verify_ca(x: &PeriodicSequence, tol: f64) -> bool {
    x.samples().iter().all(|s| (s.norm() - 1.0).abs() <= tol)
}

/// Periodic autocorrelation `(1/MN) sum_n x[n+k] x*[n]` at every lag, by direct summation.
pub fn periodic_autocorrelation(x: &PeriodicSequence) -> Vec<C64> {
    let len = x.samples().len();
    (0..len as i64)
        .map(|k| {
            let s: C64 = (0..len as i64).map(|n| x.at(n + k) * x.at(n).conj()).sum();
            s / len as f64
        })
        .collect()
}

/// Zero autocorrelation: unit value at lag 0, `|.| <= tol` at every other lag.
pub fn verify_zac(x: &PeriodicSequence, tol: f64) -> bool {
    let acf = periodic_autocorrelation(x);
    (acf[0] - C64::new(1.0, 0.0)).norm() <= tol && acf[1..].iter().all(|v| v.norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zak::dzt;

    fn g(m: usize, n: usize) -> GridParams {
        GridParams::unit(m, n).unwrap()
    }

    #[test]
    fn td_first_samples() {
        let p = CazacParams::new(g(3, 5), 1, 0, 0).unwrap();
        let x = cazac_td(&p);
        assert!((x.samples()[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((x.samples()[1] - unit_root(1, 15)).norm() < 1e-15);
        // exp(j 8pi / 15) = exp(j2pi 4/15)
        assert!((x.samples()[2] - unit_root(4, 15)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_alpha() {
        assert!(matches!(CazacParams::new(g(3, 5), 0, 1, 0), Err(Error::InvalidAlpha { .. })));
        assert!(matches!(CazacParams::new(g(3, 5), 15, 1, 0), Err(Error::InvalidAlpha { .. })));
        assert!(CazacParams::new(g(3, 5), -1, 0, 0).is_ok());
    }

    #[test]
    fn zadoff_chu_roots() {
        let grid = GridParams::new(31, 37, 30_000.0).unwrap();
        let zc14 = resolve_family(FamilyTag::ZadoffChu { u: 14 }, &grid).unwrap().resolved;
        assert_eq!((zc14.alpha, zc14.beta, zc14.gamma), (7, 7, 0));
        let zc11 = resolve_family(FamilyTag::ZadoffChu { u: 11 }, &grid).unwrap().resolved;
        assert_eq!((zc11.alpha, zc11.beta, zc11.gamma), (579, 579, 0));
        assert_eq!((2 * 579) % 1147, 11);
    }

    #[test]
    fn even_root_halves_exactly() {
        for mn in [(3, 5), (5, 7), (7, 11)] {
            let grid = g(mn.0, mn.1);
            for u in (2..grid.mn() as i64).step_by(2) {
                let p = resolve_family(FamilyTag::ZadoffChu { u }, &grid).unwrap().resolved;
                assert_eq!(p.alpha as i64, u / 2);
            }
        }
    }

    #[test]
    fn named_families() {
        let grid = g(3, 5);
        let w = resolve_family(FamilyTag::Wiener { alpha: 2 }, &grid).unwrap().resolved;
        assert_eq!((w.alpha, w.beta, w.gamma), (2, 0, 0));
        let ga = resolve_family(FamilyTag::Gaussian { alpha: 4, beta: 7 }, &grid).unwrap().resolved;
        assert_eq!((ga.alpha, ga.beta, ga.gamma), (4, 7, 0));
        assert!(resolve_family(FamilyTag::Wiener { alpha: 0 }, &grid).is_err());
    }

    #[test]
    fn closed_form_matches_transform() {
        let p = CazacParams::new(g(3, 5), 1, 0, 0).unwrap();
        let closed = cazac_dd(&p);
        let via = dzt(&cazac_td(&p));
        for (a, b) in closed.data().iter().zip(via.data()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((closed.energy() - 15.0).abs() < 1e-10);
    }

    #[test]
    fn ca_zac_checks() {
        let grid = g(3, 5);
        let p = CazacParams::new(grid, 4, 2, 9).unwrap();
        let x = cazac_td(&p);
        assert!(verify_ca(&x, 1e-10) && verify_zac(&x, 1e-10));
        let ones = PeriodicSequence::from_fn(grid, |_| C64::new(1.0, 0.0));
        assert!(verify_ca(&ones, 1e-10));
        assert!(!verify_zac(&ones, 1e-10));
        let delta = PeriodicSequence::from_fn(grid, |n| C64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0));
        assert!(!verify_ca(&delta, 1e-10));
    }

    #[test]
    fn acf_is_delta() {
        let p = CazacParams::new(g(3, 5), 1, 0, 0).unwrap();
        let acf = periodic_autocorrelation(&cazac_td(&p));
        assert!((acf[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(acf[1..].iter().all(|v| v.norm() < 1e-12));
    }
}
