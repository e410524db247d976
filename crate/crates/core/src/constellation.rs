//! Symbol alphabets and information-symbol frames.

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{GridParams, QuasiPeriodicArray, C64};

/// Finite alphabet; point `i` carries the bit label `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<C64>,
    bits_per_symbol: u32,
}

impl Constellation {
    /// The alphabet must have a power-of-two size and unit mean energy.
    pub fn new(points: Vec<C64>) -> Result<Self> {
        if points.is_empty() || !points.len().is_power_of_two() {
            return Err(Error::Config(format!("alphabet size {} is not a power of two", points.len())));
        }
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
        if (energy - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConstellation { energy });
        }
        let bits_per_symbol = points.len().trailing_zeros();
        Ok(Self { points, bits_per_symbol })
    }

    /// Gray-labelled 4-QAM: bit 0 is the sign of the real part, bit 1 of the imaginary part.
    pub fn qam4() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let points =
            (0..4).map(|i| C64::new(if i & 1 == 0 { a } else { -a }, if i & 2 == 0 { a } else { -a })).collect();
        Self { points, bits_per_symbol: 2 }
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Index of the nearest point.
    pub fn slice(&self, z: C64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// `E[x | z]` for a uniform prior and circular Gaussian noise of variance `v`.
    pub fn posterior_mean(&self, z: C64, v: f64) -> C64 {
        let d: Vec<f64> = self.points.iter().map(|p| (z - p).norm_sqr()).collect();
        let dmin = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let v = v.max(1e-12);
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for (p, di) in self.points.iter().zip(&d) {
            let w = (-(di - dmin) / v).exp();
            num += p * w;
            den += w;
        }
        num / den
    }
}

impl Default for Constellation {
    fn default() -> Self {
        Self::qam4()
    }
}

/// One frame of `M x N` information symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct DataFrame {
    grid: GridParams,
    labels: Vec<usize>,
    symbols: Vec<C64>,
}

impl DataFrame {
    pub fn random<R: Rng + ?Sized>(grid: GridParams, alphabet: &Constellation, rng: &mut R) -> Self {
        let labels: Vec<usize> = (0..grid.mn()).map(|_| rng.random_range(0..alphabet.points.len())).collect();
        Self::from_labels(grid, alphabet, labels)
    }

    pub fn from_labels(grid: GridParams, alphabet: &Constellation, labels: Vec<usize>) -> Self {
        let symbols = labels.iter().map(|&i| alphabet.points[i]).collect();
        Self { grid, labels, symbols }
    }

    /// Hard decisions on soft estimates, one per fundamental-domain cell.
    pub fn sliced(grid: GridParams, alphabet: &Constellation, soft: &[C64]) -> Self {
        Self::from_labels(grid, alphabet, soft.iter().map(|&z| alphabet.slice(z)).collect())
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn symbols(&self) -> &[C64] {
        &self.symbols
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// The symbols as point pulses on the fundamental domain.
    pub fn to_array(&self) -> QuasiPeriodicArray {
        QuasiPeriodicArray::new(self.grid, self.symbols.clone()).expect("frame sized to its grid")
    }

    pub fn bit_errors(&self, other: &DataFrame) -> u64 {
        self.labels.iter().zip(&other.labels).map(|(a, b)| (a ^ b).count_ones() as u64).sum()
    }

    pub fn bit_error_rate(&self, other: &DataFrame, alphabet: &Constellation) -> f64 {
        self.bit_errors(other) as f64 / (self.labels.len() as f64 * alphabet.bits_per_symbol() as f64)
    }
}
