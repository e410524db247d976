//! Doubly-spread multipath channels, their sampled delay-Doppler tap images,
//! superimposed pilot/data frames and additive noise.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constellation::{Constellation, DataFrame};
use crate::error::{Error, Result};
use crate::grid::{GridParams, PeriodicSequence, QuasiPeriodicArray, C64};
use crate::pilot::{twisted_conv, PeriodicArray2D};
use crate::zak::{dzt, idzt};

pub const VEH_A_DELAYS_NS: [f64; 6] = [0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0];
pub const VEH_A_POWERS_DB: [f64; 6] = [0.0, -1.0, -9.0, -10.0, -15.0, -20.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub delays_ns: Vec<f64>,
    pub powers_db: Vec<f64>,
    /// Maximum Doppler shift in Hz.
    pub nu_max: f64,
    /// Draw every path with unit mean power instead of following `powers_db`.
    pub equal_power: bool,
}

impl ChannelConfig {
    pub fn veh_a(nu_max: f64) -> Self {
        Self { delays_ns: VEH_A_DELAYS_NS.to_vec(), powers_db: VEH_A_POWERS_DB.to_vec(), nu_max, equal_power: false }
    }

    pub fn num_paths(&self) -> usize {
        self.delays_ns.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.delays_ns.is_empty() {
            return Err(Error::EmptyProfile);
        }
        if self.delays_ns.len() != self.powers_db.len() {
            return Err(Error::Config(format!(
                "{} path delays but {} path powers",
                self.delays_ns.len(),
                self.powers_db.len()
            )));
        }
        if !(self.nu_max >= 0.0) || !self.nu_max.is_finite() {
            return Err(Error::Config(format!("nu_max must be finite and >= 0, got {}", self.nu_max)));
        }
        if self.delays_ns.iter().chain(&self.powers_db).any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite path delay or power".into()));
        }
        Ok(())
    }
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self::veh_a(6000.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Path {
    pub gain: C64,
    /// Seconds.
    pub delay: f64,
    /// Hz.
    pub doppler: f64,
    /// Angle of arrival in `[-pi, pi)`.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRealization {
    pub paths: Vec<Path>,
}

impl ChannelRealization {
    pub fn single(gain: C64, delay: f64, doppler: f64) -> Self {
        Self { paths: vec![Path { gain, delay, doppler, theta: 0.0 }] }
    }
}

/// Circular complex Gaussian sample of the given variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Complex Gaussian gains with `sum |h_i|^2 = 1`, Dopplers `nu_max cos(theta_i)`.
pub fn sample_channel<R: Rng + ?Sized>(cfg: &ChannelConfig, rng: &mut R) -> Result<ChannelRealization> {
    cfg.validate()?;
    let mut paths: Vec<Path> = cfg
        .delays_ns
        .iter()
        .zip(&cfg.powers_db)
        .map(|(&d, &p)| {
            let power = if cfg.equal_power { 1.0 } else { 10f64.powf(p / 10.0) };
            let gain = complex_normal(rng, power);
            let theta = rng.random_range(-PI..PI);
            Path { gain, delay: d * 1e-9, doppler: cfg.nu_max * theta.cos(), theta }
        })
        .collect();
    let total: f64 = paths.iter().map(|p| p.gain.norm_sqr()).sum();
    if total <= 0.0 {
        return Err(Error::ZeroSignal);
    }
    let s = 1.0 / total.sqrt();
    for p in &mut paths {
        p.gain *= s;
    }
    Ok(ChannelRealization { paths })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseShapeConfig {
    pub beta_tau: f64,
    pub beta_nu: f64,
    pub tap_halfwidth: usize,
}

impl Default for PulseShapeConfig {
    fn default() -> Self {
        Self { beta_tau: 0.6, beta_nu: 0.6, tap_halfwidth: 8 }
    }
}

impl PulseShapeConfig {
    pub fn validate(&self) -> Result<()> {
        for b in [self.beta_tau, self.beta_nu] {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::Config(format!("roll-off {b} outside [0, 1]")));
            }
        }
        if self.tap_halfwidth == 0 {
            return Err(Error::Config("tap_halfwidth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Unit-energy root-raised-cosine impulse response with unit symbol time.
pub fn rrc(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if beta > 0.0 && (t.abs() - 1.0 / (4.0 * beta)).abs() < 1e-9 {
        let a = PI / (4.0 * beta);
        return beta * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
    num / den
}

/// RRC sampled at `i - x` for integer `i` in `round(x) +- halfwidth`, scaled to
/// unit energy. Returns the first index and the samples.
pub fn rrc_taps(x: f64, beta: f64, halfwidth: usize) -> (i64, Vec<f64>) {
    let c = x.round() as i64;
    let start = c - halfwidth as i64;
    let mut v: Vec<f64> = (0..=2 * halfwidth as i64).map(|i| rrc((start + i) as f64 - x, beta)).collect();
    let e = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= e;
    }
    (start, v)
}

/// Delay-Doppler taps on the window `[k_lo, k_hi] x [l_lo, l_hi]`, applied
/// MN-periodized by twisted convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    grid: GridParams,
    k_lo: i64,
    k_hi: i64,
    l_lo: i64,
    l_hi: i64,
    taps: Vec<C64>,
}

impl EffectiveChannel {
    pub fn zeros(grid: GridParams, k: (i64, i64), l: (i64, i64)) -> Result<Self> {
        Self::from_fn(grid, k, l, |_, _| C64::new(0.0, 0.0))
    }

    pub fn from_fn(
        grid: GridParams,
        (k_lo, k_hi): (i64, i64),
        (l_lo, l_hi): (i64, i64),
        mut f: impl FnMut(i64, i64) -> C64,
    ) -> Result<Self> {
        if k_hi < k_lo || l_hi < l_lo || k_hi - k_lo >= grid.m() as i64 || l_hi - l_lo >= grid.n() as i64 {
            return Err(Error::SpreadTooLarge { k_w: k_hi - k_lo, l_w: l_hi - l_lo, m: grid.m(), n: grid.n() });
        }
        let mut taps = Vec::with_capacity(((k_hi - k_lo + 1) * (l_hi - l_lo + 1)) as usize);
        for k in k_lo..=k_hi {
            for l in l_lo..=l_hi {
                taps.push(f(k, l));
            }
        }
        Ok(Self { grid, k_lo, k_hi, l_lo, l_hi, taps })
    }

    /// A single tap `h` at `(k0, l0)`.
    pub fn single_tap(grid: GridParams, k0: i64, l0: i64, h: C64) -> Result<Self> {
        Self::from_fn(grid, (k0, k0), (l0, l0), |_, _| h)
    }

    pub fn identity(grid: GridParams) -> Self {
        Self::single_tap(grid, 0, 0, C64::new(1.0, 0.0)).expect("one tap always fits")
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn k_range(&self) -> (i64, i64) {
        (self.k_lo, self.k_hi)
    }

    pub fn l_range(&self) -> (i64, i64) {
        (self.l_lo, self.l_hi)
    }

    fn width(&self) -> i64 {
        self.l_hi - self.l_lo + 1
    }

    /// Tap at `(k, l)`, zero outside the window.
    pub fn get(&self, k: i64, l: i64) -> C64 {
        if k < self.k_lo || k > self.k_hi || l < self.l_lo || l > self.l_hi {
            return C64::new(0.0, 0.0);
        }
        self.taps[((k - self.k_lo) * self.width() + (l - self.l_lo)) as usize]
    }

    pub fn get_mut(&mut self, k: i64, l: i64) -> Option<&mut C64> {
        if k < self.k_lo || k > self.k_hi || l < self.l_lo || l > self.l_hi {
            return None;
        }
        let w = self.width();
        Some(&mut self.taps[((k - self.k_lo) * w + (l - self.l_lo)) as usize])
    }

    /// `((k, l), tap)` over the window, `k` major.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), C64)> + '_ {
        let w = self.width();
        self.taps.iter().enumerate().map(move |(i, &v)| ((self.k_lo + i as i64 / w, self.l_lo + i as i64 % w), v))
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }

    /// True when the only nonzero tap is exactly 1 at the origin.
    pub fn is_identity(&self) -> bool {
        self.iter().all(|((k, l), v)| v == if (k, l) == (0, 0) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            && self.covers(0, 0)
    }

    /// `sum |self - other|^2` over the union of both windows.
    pub fn distance_sq(&self, other: &EffectiveChannel) -> f64 {
        let own: f64 = self.iter().map(|((k, l), v)| (v - other.get(k, l)).norm_sqr()).sum();
        let rest: f64 = other.iter().filter(|((k, l), _)| !self.covers(*k, *l)).map(|(_, v)| v.norm_sqr()).sum();
        own + rest
    }

    fn covers(&self, k: i64, l: i64) -> bool {
        (self.k_lo..=self.k_hi).contains(&k) && (self.l_lo..=self.l_hi).contains(&l)
    }

    /// One MN x MN period of the periodized taps.
    pub fn periodized(&self) -> PeriodicArray2D {
        let mn = self.grid.mn() as i64;
        let mut dense = vec![C64::new(0.0, 0.0); (mn * mn) as usize];
        for ((k, l), v) in self.iter() {
            dense[(k.rem_euclid(mn) * mn + l.rem_euclid(mn)) as usize] += v;
        }
        PeriodicArray2D::from_fn(self.grid, |k, l| dense[k * mn as usize + l])
    }

    /// Time-domain form of the operator, for repeated application.
    pub fn operator(&self) -> ChannelOperator {
        ChannelOperator::new(self)
    }
}

/// Taps of a realization sampled through RRC pulses:
/// `sum_i h_i rrc(k - tau_i/dtau) rrc(l - nu_i/dnu)`.
pub fn effective_channel(
    ch: &ChannelRealization,
    grid: &GridParams,
    ps: &PulseShapeConfig,
) -> Result<EffectiveChannel> {
    ps.validate()?;
    if ch.paths.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let hw = ps.tap_halfwidth as i64;
    let xs: Vec<(f64, f64)> =
        ch.paths.iter().map(|p| (p.delay / grid.delay_res(), p.doppler / grid.doppler_res())).collect();
    let k_w = xs.iter().map(|x| x.0.abs().ceil() as i64).max().unwrap_or(0) + hw;
    let l_w = xs.iter().map(|x| x.1.abs().ceil() as i64).max().unwrap_or(0) + hw;
    if k_w > (grid.m() as i64 - 1) / 2 || l_w > (grid.n() as i64 - 1) / 2 {
        return Err(Error::SpreadTooLarge { k_w, l_w, m: grid.m(), n: grid.n() });
    }
    let mut out = EffectiveChannel::zeros(*grid, (-k_w, k_w), (-l_w, l_w))?;
    for (p, &(xk, xl)) in ch.paths.iter().zip(&xs) {
        let (k0, tk) = rrc_taps(xk, ps.beta_tau, ps.tap_halfwidth);
        let (l0, tl) = rrc_taps(xl, ps.beta_nu, ps.tap_halfwidth);
        for (i, a) in tk.iter().enumerate() {
            for (j, b) in tl.iter().enumerate() {
                *out.get_mut(k0 + i as i64, l0 + j as i64).expect("window covers path") += p.gain * (a * b);
            }
        }
    }
    Ok(out)
}

/// Fails with `SpreadTooLarge` when the widest realization of `cfg` would
/// not fit in the grid.
pub fn check_spread(cfg: &ChannelConfig, grid: &GridParams, ps: &PulseShapeConfig) -> Result<()> {
    cfg.validate()?;
    let widest = ChannelRealization {
        paths: cfg
            .delays_ns
            .iter()
            .map(|&d| Path { gain: C64::new(1.0, 0.0), delay: d * 1e-9, doppler: cfg.nu_max, theta: 0.0 })
            .collect(),
    };
    effective_channel(&widest, grid, ps).map(|_| ())
}

/// Twisted convolution by a tap window, acting on the time-domain side of
/// the Zak transform.
///
/// Row `k'` of the taps becomes the modulation
/// `g_k'[m] = sum_l' h[k',l'] exp(j2pi l' m / MN)`, and the channel acts as
/// `y[n] = sum_k' g_k'[n - k'] x[n - k']`.
#[derive(Debug, Clone)]
pub struct ChannelOperator {
    grid: GridParams,
    rows: Vec<(i64, Vec<C64>)>,
}

impl ChannelOperator {
    pub fn new(h: &EffectiveChannel) -> Self {
        let grid = h.grid;
        let mn = grid.mn();
        let roots = grid.roots();
        let mut rows = Vec::new();
        for k in h.k_lo..=h.k_hi {
            let row: Vec<(i64, C64)> =
                (h.l_lo..=h.l_hi).map(|l| (l, h.get(k, l))).filter(|(_, v)| v.norm_sqr() > 0.0).collect();
            if row.is_empty() {
                continue;
            }
            let g = (0..mn as i64).map(|m| row.iter().map(|&(l, v)| v * roots.get(l * m)).sum()).collect();
            rows.push((k.rem_euclid(mn as i64), g));
        }
        Self { grid, rows }
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    /// `out = H x` on time-domain samples.
    pub fn apply_td(&self, x: &[C64], out: &mut [C64]) {
        let mn = x.len();
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (k, g) in &self.rows {
            let k = *k as usize;
            for m in 0..mn {
                let n = if m + k >= mn { m + k - mn } else { m + k };
                out[n] += g[m] * x[m];
            }
        }
    }

    /// `out = H^H y` on time-domain samples.
    pub fn adjoint_td(&self, y: &[C64], out: &mut [C64]) {
        let mn = y.len();
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (k, g) in &self.rows {
            let k = *k as usize;
            for m in 0..mn {
                let n = if m + k >= mn { m + k - mn } else { m + k };
                out[m] += g[m].conj() * y[n];
            }
        }
    }

    pub fn apply(&self, x: &QuasiPeriodicArray) -> Result<QuasiPeriodicArray> {
        self.grid.ensure_same(x.grid())?;
        let xt = idzt(x);
        let mut yt = vec![C64::new(0.0, 0.0); self.grid.mn()];
        self.apply_td(xt.samples(), &mut yt);
        Ok(dzt(&PeriodicSequence::new(self.grid, yt)?))
    }
}

/// `y = h (twisted) frame`.
pub fn apply_channel(h: &EffectiveChannel, frame: &QuasiPeriodicArray) -> Result<QuasiPeriodicArray> {
    if h.is_identity() {
        h.grid.ensure_same(frame.grid())?;
        return Ok(frame.clone());
    }
    h.operator().apply(frame)
}

/// [`apply_channel`] by the full twisted-convolution sum. Reference route.
pub fn apply_channel_direct(h: &EffectiveChannel, frame: &QuasiPeriodicArray) -> Result<QuasiPeriodicArray> {
    twisted_conv(&h.periodized(), frame)
}

/// Superimposed pilot and data with `E_p / E_d = PDR` and `E_p + E_d = MN`.
#[derive(Debug, Clone)]
pub struct FrameConfig {
    pub constellation: Constellation,
    /// Linear pilot-to-data energy ratio.
    pub pdr: f64,
    /// Data SNR in dB.
    pub rho_d_db: f64,
    /// Unit-energy pilot.
    pub pilot: QuasiPeriodicArray,
}

impl FrameConfig {
    pub fn new(pilot: QuasiPeriodicArray, pdr: f64, rho_d_db: f64) -> Result<Self> {
        if !(pdr > 0.0) || !pdr.is_finite() {
            return Err(Error::BadPdr(pdr));
        }
        let e = pilot.energy();
        if (e - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("pilot energy is {e}, expected 1")));
        }
        Ok(Self { constellation: Constellation::qam4(), pdr, rho_d_db, pilot })
    }

    fn mn(&self) -> f64 {
        self.pilot.grid().mn() as f64
    }

    pub fn pilot_energy(&self) -> f64 {
        self.mn() * self.pdr / (1.0 + self.pdr)
    }

    pub fn data_energy(&self) -> f64 {
        self.mn() / (1.0 + self.pdr)
    }

    /// Amplitude of each data symbol, `sqrt(E_d / MN)`.
    pub fn data_scale(&self) -> f64 {
        (self.data_energy() / self.mn()).sqrt()
    }

    pub fn pilot_scaled(&self) -> QuasiPeriodicArray {
        self.pilot.scaled(self.pilot_energy().sqrt())
    }

    /// Per-cell noise variance at the configured data SNR.
    pub fn sigma2(&self) -> f64 {
        noise_variance(self.rho_d_db, self.data_energy(), self.pilot.grid().mn())
    }
}

pub fn assemble_frame(data: &DataFrame, fc: &FrameConfig) -> Result<QuasiPeriodicArray> {
    fc.pilot.grid().ensure_same(data.grid())?;
    fc.pilot_scaled().add(&data.to_array().scaled(fc.data_scale()))
}

/// `signal_ref_energy / (MN 10^{snr/10})`.
pub fn noise_variance(snr_db: f64, signal_ref_energy: f64, mn: usize) -> f64 {
    signal_ref_energy / (mn as f64 * 10f64.powf(snr_db / 10.0))
}

/// Adds circular complex Gaussian noise; returns the noisy frame and its per-cell variance.
pub fn add_noise<R: Rng + ?Sized>(
    y: &QuasiPeriodicArray,
    snr_db: f64,
    signal_ref_energy: f64,
    rng: &mut R,
) -> (QuasiPeriodicArray, f64) {
    let sigma2 = noise_variance(snr_db, signal_ref_energy, y.grid().mn());
    let mut out = y.clone();
    if sigma2 > 0.0 {
        for v in out.data_mut() {
            *v += complex_normal(rng, sigma2);
        }
    }
    (out, sigma2)
}

/// Sum of every user's preamble through its own channel, plus noise.
pub fn multiuser_superpose<R: Rng + ?Sized>(
    users: &[(QuasiPeriodicArray, EffectiveChannel)],
    rng: &mut R,
    snr_db: f64,
    signal_ref_energy: f64,
) -> Result<(QuasiPeriodicArray, f64)> {
    let grid = match users.first() {
        Some((p, _)) => *p.grid(),
        None => return Err(Error::Config("no users to superpose".into())),
    };
    let mut y = QuasiPeriodicArray::zeros(grid);
    for (p, h) in users {
        y = y.add(&apply_channel(h, p)?)?;
    }
    Ok(add_noise(&y, snr_db, signal_ref_energy, rng))
}
