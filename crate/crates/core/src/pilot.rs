//! Twisted convolution, point pilots, 2-D quadratic DD filters and spread pilots.

use crate::error::{Error, Result};
use crate::grid::{unit_root, GridParams, QuasiPeriodicArray, C64};
use crate::modular::{gcd, mod_inverse, reduce};

/// One `MN x MN` period of a doubly MN-periodic array, row-major in `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicArray2D {
    grid: GridParams,
    data: Vec<C64>,
}

impl PeriodicArray2D {
    pub fn from_fn(grid: GridParams, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mn = grid.mn();
        let mut data = Vec::with_capacity(mn * mn);
        for k in 0..mn {
            for l in 0..mn {
                data.push(f(k, l));
            }
        }
        Self { grid, data }
    }

    /// Periodized unit impulse at `(k0, l0)`.
    pub fn delta(grid: GridParams, k0: i64, l0: i64) -> Self {
        let (k0, l0) = (reduce(k0, grid.mn()) as usize, reduce(l0, grid.mn()) as usize);
        Self::from_fn(grid, |k, l| C64::new(if (k, l) == (k0, l0) { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn at(&self, k: i64, l: i64) -> C64 {
        let mn = self.grid.mn();
        self.data[reduce(k, mn) as usize * mn + reduce(l, mn) as usize]
    }
}

/// `c[k,l] = sum_{k',l' in [0,MN)} a[k',l'] b[k-k', l-l'] exp(j2pi l'(k-k')/MN)`,
/// evaluated on the fundamental domain by the full double sum.
pub fn twisted_conv(a: &PeriodicArray2D, b: &QuasiPeriodicArray) -> Result<QuasiPeriodicArray> {
    a.grid.ensure_same(b.grid())?;
    let grid = *b.grid();
    let mn = grid.mn() as i64;
    let roots = grid.roots();
    Ok(QuasiPeriodicArray::from_fn(grid, |k, l| {
        let (k, l) = (k as i64, l as i64);
        let mut acc = C64::new(0.0, 0.0);
        for kp in 0..mn {
            for lp in 0..mn {
                let av = a.data[(kp * mn + lp) as usize];
                if av.norm_sqr() == 0.0 {
                    continue;
                }
                acc += av * b.at(k - kp, l - lp) * roots.get(lp * (k - kp));
            }
        }
        acc
    }))
}

/// Position of a point pilot, reduced to the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotSpec {
    k_p: usize,
    l_p: usize,
    grid: GridParams,
}

impl PilotSpec {
    pub fn new(grid: GridParams, k_p: i64, l_p: i64) -> Self {
        Self { k_p: reduce(k_p, grid.m()) as usize, l_p: reduce(l_p, grid.n()) as usize, grid }
    }

    pub fn k_p(&self) -> usize {
        self.k_p
    }

    pub fn l_p(&self) -> usize {
        self.l_p
    }
}

/// Unit point pulse at `(k_p, l_p)` with its quasi-periodic extension.
pub fn point_pilot(spec: PilotSpec) -> QuasiPeriodicArray {
    let mut x = QuasiPeriodicArray::zeros(spec.grid);
    *x.fundamental_mut(spec.k_p, spec.l_p) = C64::new(1.0, 0.0);
    x
}

/// Parameters of `W[k,l] = exp(j2pi (a1 k^2 + b1 k + a2 l^2 + b2 l + c) / MN)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cazac2DParams {
    pub alpha1: u64,
    pub beta1: u64,
    pub alpha2: u64,
    pub beta2: u64,
    pub gamma: u64,
    grid: GridParams,
}

impl Cazac2DParams {
    /// Both chirp rates must satisfy `gcd(2 alpha, MN) = 1`.
    pub fn new(grid: GridParams, alpha1: i64, beta1: i64, alpha2: i64, beta2: i64, gamma: i64) -> Result<Self> {
        let mn = grid.mn();
        for a in [alpha1, alpha2] {
            let r = reduce(a, mn);
            if gcd(2 * r as i64, mn as i64) != 1 {
                return Err(Error::InvalidAlpha { alpha: r, mn });
            }
        }
        Ok(Self {
            alpha1: reduce(alpha1, mn),
            beta1: reduce(beta1, mn),
            alpha2: reduce(alpha2, mn),
            beta2: reduce(beta2, mn),
            gamma: reduce(gamma, mn),
            grid,
        })
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }
}

pub fn cazac_filter_2d(p: &Cazac2DParams) -> PeriodicArray2D {
    let mn = p.grid.mn() as u64;
    let roots = p.grid.roots();
    PeriodicArray2D::from_fn(p.grid, |k, l| {
        let (k, l) = (k as u64, l as u64);
        let e = (p.alpha1 * (k * k % mn) + p.beta1 * k + p.alpha2 * (l * l % mn) + p.beta2 * l + p.gamma) % mn;
        roots.get(e as i64)
    })
}

/// `W (twisted) x_p` for the point pilot at `spec`, scaled by `1/sqrt(MN)`.
///
/// Only the `MN` lattice translates of the pilot contribute, so the sum is
/// `O(MN)` per cell instead of `O((MN)^2)`.
pub fn spread_pilot_with_filter(w: &PeriodicArray2D, spec: PilotSpec) -> Result<QuasiPeriodicArray> {
    w.grid.ensure_same(&spec.grid)?;
    let grid = spec.grid;
    let (m, n, mn) = (grid.m() as i64, grid.n() as i64, grid.mn());
    let roots = grid.roots();
    let (kp, lp) = (spec.k_p as i64, spec.l_p as i64);
    let scale = 1.0 / (mn as f64).sqrt();
    Ok(QuasiPeriodicArray::from_fn(grid, |k, l| {
        let (k, l) = (k as i64, l as i64);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let dk = kp + i * m;
            let qp = unit_root(i * lp, n as usize);
            for j in 0..m {
                let dl = lp + j * n;
                acc += w.at(k - dk, l - dl) * qp * roots.get((l - dl) * dk);
            }
        }
        acc * scale
    }))
}

/// Spread pilot with the 2-D quadratic filter of `p`, unit cell-average energy.
pub fn spread_pilot(p: &Cazac2DParams, spec: PilotSpec) -> Result<QuasiPeriodicArray> {
    spread_pilot_with_filter(&cazac_filter_2d(p), spec)
}

/// Support lattice of a spread pilot's self-ambiguity:
/// `2 a1 k - l = 0 (mod M)` and `k - theta l = 0 (mod N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeDescriptor {
    pub theta: u64,
    two_alpha1: u64,
    m: u64,
    n: u64,
}

impl LatticeDescriptor {
    /// `theta = (2 a1)^{-1} - 2 a2 (mod MN)`.
    pub fn new(grid: &GridParams, alpha1: i64, alpha2: i64) -> Result<Self> {
        let mn = grid.mn();
        let inv = mod_inverse(2 * alpha1, mn)? as i128;
        let theta = (inv - 2 * alpha2 as i128).rem_euclid(mn as i128) as u64;
        Ok(Self { theta, two_alpha1: reduce(2 * alpha1, mn), m: grid.m() as u64, n: grid.n() as u64 })
    }

    pub fn contains(&self, k: i64, l: i64) -> bool {
        let (m, n) = (self.m as i128, self.n as i128);
        let (k, l) = (k as i128, l as i128);
        (self.two_alpha1 as i128 * k - l).rem_euclid(m) == 0 && (k - self.theta as i128 * l).rem_euclid(n) == 0
    }
}

pub fn lattice_descriptor(p: &Cazac2DParams) -> Result<LatticeDescriptor> {
    LatticeDescriptor::new(&p.grid, p.alpha1 as i64, p.alpha2 as i64)
}

pub fn lattice_support(p: &Cazac2DParams, k: i64, l: i64) -> Result<bool> {
    Ok(lattice_descriptor(p)?.contains(k, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::dd_ambiguity;
    use crate::grid::qp_eval;

    fn g(m: usize, n: usize) -> GridParams {
        GridParams::unit(m, n).unwrap()
    }

    fn test_array(grid: GridParams) -> QuasiPeriodicArray {
        QuasiPeriodicArray::from_fn(grid, |k, l| C64::new(k as f64 + 0.5, l as f64 * 0.25 - 1.0))
    }

    #[test]
    fn twisted_conv_identity_and_shifts() {
        let grid = g(3, 5);
        let b = test_array(grid);
        let c = twisted_conv(&PeriodicArray2D::delta(grid, 0, 0), &b).unwrap();
        assert_eq!(c, b);
        let c = twisted_conv(&PeriodicArray2D::delta(grid, 1, 0), &b).unwrap();
        for k in 0..3 {
            for l in 0..5 {
                assert!((c.fundamental(k, l) - b.at(k as i64 - 1, l as i64)).norm() < 1e-12);
            }
        }
        let c = twisted_conv(&PeriodicArray2D::delta(grid, 0, 1), &b).unwrap();
        for k in 0..3 {
            for l in 0..5 {
                let want = b.at(k as i64, l as i64 - 1) * unit_root(k as i64, 15);
                assert!((c.fundamental(k, l) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn point_pilot_examples() {
        let grid = g(3, 5);
        let x = point_pilot(PilotSpec::new(grid, 0, 0));
        assert_eq!(x.fundamental(0, 0), C64::new(1.0, 0.0));
        assert_eq!(x.data().iter().filter(|v| v.norm() > 0.0).count(), 1);
        assert!((qp_eval(&x, 3, 0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((x.energy() - 1.0).abs() < 1e-15);
        let s = PilotSpec::new(grid, 4, -1);
        assert_eq!((s.k_p(), s.l_p()), (1, 4));
    }

    #[test]
    fn filter_is_unimodular_and_periodic() {
        let grid = g(3, 5);
        let p = Cazac2DParams::new(grid, 2, 3, 4, 1, 7).unwrap();
        let w = cazac_filter_2d(&p);
        assert!(w.data().iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
        for k in -3..3 {
            for l in -3..3 {
                assert_eq!(w.at(k + 15, l), w.at(k, l));
                assert_eq!(w.at(k, l - 15), w.at(k, l));
            }
        }
        let chirp = Cazac2DParams::new(grid, 2, 0, 2, 0, 0).unwrap();
        let w = cazac_filter_2d(&chirp);
        assert!((w.at(1, 2) - unit_root(2 + 8, 15)).norm() < 1e-14);
        assert!(matches!(Cazac2DParams::new(grid, 3, 0, 1, 0, 0), Err(Error::InvalidAlpha { .. })));
    }

    #[test]
    fn spread_pilot_matches_reference_paths() {
        let grid = g(3, 5);
        let p = Cazac2DParams::new(grid, 1, 2, 1, 4, 3).unwrap();
        let w = cazac_filter_2d(&p);
        let scale = 1.0 / 15f64.sqrt();
        for (kp, lp) in [(0, 0), (1, 3), (2, 4)] {
            let spec = PilotSpec::new(grid, kp, lp);
            let fast = spread_pilot(&p, spec).unwrap();
            let slow = twisted_conv(&w, &point_pilot(spec)).unwrap().scaled(scale);
            for (a, b) in fast.data().iter().zip(slow.data()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        // (0,0) pilot: sum_{n<N, m<M} W[k - nM, l - mN] exp(j2pi n l / N)
        let x = spread_pilot(&p, PilotSpec::new(grid, 0, 0)).unwrap();
        for k in 0..3i64 {
            for l in 0..5i64 {
                let mut s = C64::new(0.0, 0.0);
                for n in 0..5 {
                    for m in 0..3 {
                        s += w.at(k - n * 3, l - m * 5) * unit_root(n * l, 5);
                    }
                }
                assert!((x.fundamental(k as usize, l as usize) - s * scale).norm() < 1e-12);
            }
        }
        assert!((x.energy() - 15.0).abs() < 1e-9);
    }

    #[test]
    fn all_ones_filter() {
        let grid = g(3, 5);
        let ones = PeriodicArray2D::from_fn(grid, |_, _| C64::new(1.0, 0.0));
        let x = spread_pilot_with_filter(&ones, PilotSpec::new(grid, 0, 0)).unwrap();
        // Brute force of the (0,0) sum with W = 1: M * sum_n exp(j2pi n l / N).
        for k in 0..3 {
            for l in 0..5 {
                let want = if l == 0 { 15.0 / 15f64.sqrt() } else { 0.0 };
                assert!((x.fundamental(k, l) - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lattice_examples() {
        let grid = g(3, 5);
        let p = Cazac2DParams::new(grid, 1, 0, 1, 0, 0).unwrap();
        assert_eq!(lattice_descriptor(&p).unwrap().theta, 6);
        assert!(lattice_support(&p, 0, 0).unwrap());
        assert!(lattice_support(&p, 1, 11).unwrap());
        assert!(!lattice_support(&p, 1, 1).unwrap());
        assert!(matches!(LatticeDescriptor::new(&grid, 3, 1), Err(Error::NoInverse { .. })));
    }

    #[test]
    fn spread_pilot_af_on_lattice() {
        let grid = g(3, 5);
        let p = Cazac2DParams::new(grid, 1, 0, 1, 0, 0).unwrap();
        let x = spread_pilot(&p, PilotSpec::new(grid, 0, 0)).unwrap();
        let s = dd_ambiguity(&x, &x).unwrap();
        let lat = lattice_descriptor(&p).unwrap();
        let mut count = 0;
        for ((k, l), v) in s.iter() {
            if lat.contains(k as i64, l as i64) {
                count += 1;
                assert!((v.norm() - 1.0).abs() < 1e-9);
            } else {
                assert!(v.norm() < 1e-9);
            }
        }
        assert_eq!(count, 15);
    }
}
