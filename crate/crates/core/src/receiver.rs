//! Pilot-based channel sensing, MMSE data detection, turbo alternation
//! between the two, and one-step-threshold preamble detection.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ambiguity::td_probes;
use crate::channel::{ChannelOperator, EffectiveChannel};
use crate::constellation::{Constellation, DataFrame};
use crate::error::{Error, Result};
use crate::grid::{GridParams, PeriodicSequence, QuasiPeriodicArray, RootTable, C64};
use crate::stats::aux_rng;
use crate::zak::{dzt, idzt};

/// Relative ambiguity level above which a lag counts as pilot self-ambiguity support.
pub const ALIAS_TOL: f64 = 1e-6;

/// Delay-Doppler lags `[k_min, k_max] x [-l_max, l_max]` read off from the pilot response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensingRegion {
    pub k_min: i64,
    pub k_max: i64,
    pub l_max: i64,
}

impl SensingRegion {
    /// `[0, k_max] x [-l_max, l_max]`.
    pub fn new(k_max: i64, l_max: i64) -> Result<Self> {
        Self::with_k_min(0, k_max, l_max)
    }

    pub fn with_k_min(k_min: i64, k_max: i64, l_max: i64) -> Result<Self> {
        if k_max < k_min || l_max < 0 {
            return Err(Error::Config(format!("empty sensing region [{k_min}, {k_max}] x [-{l_max}, {l_max}]")));
        }
        Ok(Self { k_min, k_max, l_max })
    }

    pub fn len(&self) -> usize {
        ((self.k_max - self.k_min + 1) * (2 * self.l_max + 1)) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All lags, `k` major.
    pub fn lags(&self) -> Vec<(i64, i64)> {
        (self.k_min..=self.k_max).flat_map(|k| (-self.l_max..=self.l_max).map(move |l| (k, l))).collect()
    }

    pub fn window(&self) -> ((i64, i64), (i64, i64)) {
        ((self.k_min, self.k_max), (-self.l_max, self.l_max))
    }

    /// Fails with the first nonzero lag difference inside the region at which
    /// the pilot self-ambiguity is not negligible.
    pub fn check_alias_free(&self, pilot: &QuasiPeriodicArray) -> Result<()> {
        let pt = idzt(pilot);
        let dk = self.k_max - self.k_min;
        let dl = 2 * self.l_max;
        let diffs: Vec<(i64, i64)> =
            (-dk..=dk).flat_map(|k| (-dl..=dl).map(move |l| (k, l))).filter(|&d| d != (0, 0)).collect();
        let peak = td_probes(&pt, &pt, &[(0, 0)])[0].norm();
        if peak == 0.0 {
            return Err(Error::ZeroSignal);
        }
        for (d, v) in diffs.iter().zip(td_probes(&pt, &pt, &diffs)) {
            if v.norm() > ALIAS_TOL * peak {
                return Err(Error::RegionAliased { k: d.0, l: d.1 });
            }
        }
        Ok(())
    }
}

/// Cross-ambiguity read-off `(MN / E_p) A_{y, pilot}` over a checked region.
#[derive(Debug, Clone)]
pub struct Sensor {
    pilot_td: PeriodicSequence,
    region: SensingRegion,
    lags: Vec<(i64, i64)>,
    gain: f64,
}

impl Sensor {
    pub fn new(pilot: &QuasiPeriodicArray, region: SensingRegion, pilot_energy: f64) -> Result<Self> {
        if !(pilot_energy > 0.0) {
            return Err(Error::NonPositive { what: "pilot energy", value: pilot_energy });
        }
        region.check_alias_free(pilot)?;
        Ok(Self { pilot_td: idzt(pilot), region, lags: region.lags(), gain: pilot.grid().mn() as f64 / pilot_energy })
    }

    pub fn region(&self) -> &SensingRegion {
        &self.region
    }

    pub fn estimate(&self, y: &QuasiPeriodicArray) -> Result<EffectiveChannel> {
        self.pilot_td.grid().ensure_same(y.grid())?;
        Ok(self.estimate_td(&idzt(y)))
    }

    /// Same as [`Sensor::estimate`] for a frame already in the time domain.
    pub fn estimate_td(&self, y: &PeriodicSequence) -> EffectiveChannel {
        let vals = td_probes(y, &self.pilot_td, &self.lags);
        let (kr, lr) = self.region.window();
        let width = 2 * self.region.l_max + 1;
        EffectiveChannel::from_fn(*self.pilot_td.grid(), kr, lr, |k, l| {
            vals[((k - kr.0) * width + l - lr.0) as usize] * self.gain
        })
        .expect("region checked against the grid by construction")
    }
}

/// `h[k,l] = (MN / pilot_energy) A_{y,pilot}[k,l]` on `region`, zero elsewhere.
pub fn estimate_channel(
    y: &QuasiPeriodicArray,
    pilot: &QuasiPeriodicArray,
    region: SensingRegion,
    pilot_energy: f64,
) -> Result<EffectiveChannel> {
    pilot.grid().ensure_same(y.grid())?;
    Sensor::new(pilot, region, pilot_energy)?.estimate(y)
}

/// Regularized least-squares taps on a window, from a fully known training frame.
///
/// The Gram matrix of the twisted shifts of `s` is read from the self-ambiguity
/// of `s`, `G[(k,l),(k',l')] = MN w^{l'(k-k')} A_{s,s}[k-k', l-l']`, and the
/// right-hand side from `MN A_{y,s}`.
pub fn ls_estimate_channel(
    y: &PeriodicSequence,
    training: &PeriodicSequence,
    (k_lo, k_hi): (i64, i64),
    (l_lo, l_hi): (i64, i64),
    ridge: f64,
) -> Result<EffectiveChannel> {
    y.grid().ensure_same(training.grid())?;
    let grid = *y.grid();
    let mn = grid.mn() as f64;
    let zero = EffectiveChannel::zeros(grid, (k_lo, k_hi), (l_lo, l_hi))?;
    let taps: Vec<(i64, i64)> = zero.iter().map(|(t, _)| t).collect();
    let (dk, dl) = (k_hi - k_lo, l_hi - l_lo);
    let dl_w = 2 * dl + 1;
    let diffs: Vec<(i64, i64)> = (-dk..=dk).flat_map(|k| (-dl..=dl).map(move |l| (k, l))).collect();
    let af = td_probes(training, training, &diffs);
    let roots: RootTable = grid.roots();
    let n = taps.len();
    let gram = DMatrix::from_fn(n, n, |i, j| {
        let (ki, li) = taps[i];
        let (kj, lj) = taps[j];
        let a = af[((ki - kj + dk) * dl_w + (li - lj + dl)) as usize];
        let v = roots.get(lj * (ki - kj)) * a * mn;
        if i == j {
            v + ridge
        } else {
            v
        }
    });
    let rhs = DVector::from_vec(td_probes(y, training, &taps).into_iter().map(|v| v * mn).collect());
    let chol = gram.cholesky().ok_or(Error::SingularChannel)?;
    let sol = chol.solve(&rhs);
    let mut out = zero;
    for (t, v) in taps.iter().zip(sol.iter()) {
        *out.get_mut(t.0, t.1).expect("tap from this window") = *v;
    }
    Ok(out)
}

/// Soft and hard symbol estimates from [`detect_data`].
#[derive(Debug, Clone)]
pub struct Detection {
    pub soft: Vec<C64>,
    pub frame: DataFrame,
    pub cg_iterations: usize,
}

const CG_TOL: f64 = 1e-10;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Conjugate gradients on `(s^2 H^H H + sigma2 I) x = b` in the time domain.
fn cg_normal(op: &ChannelOperator, s2: f64, sigma2: f64, b: &[C64], max_iter: usize) -> Result<(Vec<C64>, usize)> {
    let n = b.len();
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut ap = vec![C64::new(0.0, 0.0); n];
    let b2 = norm_sqr(b);
    if b2 == 0.0 {
        return Ok((x, 0));
    }
    let mut rr = b2;
    for it in 1..=max_iter {
        op.apply_td(&p, &mut tmp);
        op.adjoint_td(&tmp, &mut ap);
        for (a, pv) in ap.iter_mut().zip(&p) {
            *a = *a * s2 + pv * sigma2;
        }
        let pap = dot(&p, &ap).re;
        if !(pap > 1e-14 * norm_sqr(&p) * s2.max(sigma2)) {
            return Err(Error::SingularChannel);
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let rr_new = norm_sqr(&r);
        if rr_new <= CG_TOL * CG_TOL * b2 {
            return Ok((x, it));
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + p[i] * beta;
        }
    }
    Err(Error::SingularChannel)
}

/// Fails when `H^H H` cannot be inverted by CG on a random right-hand side.
fn check_invertible(op: &ChannelOperator, max_iter: usize) -> Result<()> {
    let mn = op.grid().mn();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let probe: Vec<C64> =
        (0..mn).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
    cg_normal(op, 1.0, 0.0, &probe, max_iter).map(|_| ())
}

/// Cancels the pilot through `h`, then solves the linear MMSE problem
/// `x = (s^2 H^H H + sigma2 I)^{-1} s H^H y'` for the unit-energy data symbols
/// carried with amplitude `data_scale`, and slices to `constellation`.
pub fn detect_data(
    y: &QuasiPeriodicArray,
    h: &EffectiveChannel,
    pilot_scaled: &QuasiPeriodicArray,
    data_scale: f64,
    sigma2: f64,
    constellation: &Constellation,
) -> Result<Detection> {
    y.grid().ensure_same(h.grid())?;
    y.grid().ensure_same(pilot_scaled.grid())?;
    let op = h.operator();
    detect_with_operator(&op, &idzt(y), &idzt(pilot_scaled), data_scale, sigma2, constellation)
}

fn detect_with_operator(
    op: &ChannelOperator,
    y: &PeriodicSequence,
    pilot: &PeriodicSequence,
    data_scale: f64,
    sigma2: f64,
    constellation: &Constellation,
) -> Result<Detection> {
    let grid = *y.grid();
    let mn = grid.mn();
    if !(sigma2 >= 0.0) {
        return Err(Error::Config(format!("noise variance must be >= 0, got {sigma2}")));
    }
    let max_iter = 4 * mn;
    if sigma2 == 0.0 {
        check_invertible(op, max_iter)?;
    }
    let mut hp = vec![C64::new(0.0, 0.0); mn];
    op.apply_td(pilot.samples(), &mut hp);
    let resid: Vec<C64> = y.samples().iter().zip(&hp).map(|(a, b)| a - b).collect();
    let mut b = vec![C64::new(0.0, 0.0); mn];
    op.adjoint_td(&resid, &mut b);
    b.iter_mut().for_each(|v| *v *= data_scale);
    let (x, iters) = cg_normal(op, data_scale * data_scale, sigma2, &b, max_iter)?;
    let soft = dzt(&PeriodicSequence::new(grid, x)?).data().to_vec();
    let frame = DataFrame::sliced(grid, constellation, &soft);
    Ok(Detection { soft, frame, cg_iterations: iters })
}

/// How iterations after the first re-estimate the channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TurboMode {
    /// Cancel the re-modulated detected data, then read off the pilot response
    /// on the sensing region again.
    Readoff,
    /// Treat pilot plus detected data as known training and fit the taps on a
    /// wider window by regularized least squares.
    DecisionDirected { k_lo: i64, k_hi: i64, l_lo: i64, l_hi: i64 },
}

#[derive(Debug, Clone)]
pub struct TurboConfig {
    pub region: SensingRegion,
    pub iterations: usize,
    pub mode: TurboMode,
    pub data_scale: f64,
    pub sigma2: f64,
    pub constellation: Constellation,
    /// Re-modulate posterior-mean symbols instead of hard decisions.
    pub soft_feedback: bool,
}

/// Posterior-mean symbols, with the noise variance taken from the spread of
/// the soft estimates around their hard decisions.
fn soft_symbols(soft: &[C64], hard: &DataFrame, q: &Constellation) -> Vec<C64> {
    let v = soft.iter().zip(hard.symbols()).map(|(z, x)| (z - x).norm_sqr()).sum::<f64>() / soft.len() as f64;
    soft.iter().map(|&z| q.posterior_mean(z, v)).collect()
}

#[derive(Debug, Clone)]
pub struct TurboResult {
    pub h_est: Vec<EffectiveChannel>,
    pub detected: Vec<DataFrame>,
    /// Bit error rate per iteration, `NaN` without ground truth.
    pub ber_trace: Vec<f64>,
}

/// Alternates channel sensing and data detection for `cfg.iterations` rounds.
pub fn turbo_loop(
    y: &QuasiPeriodicArray,
    pilot_scaled: &QuasiPeriodicArray,
    cfg: &TurboConfig,
    truth: Option<&DataFrame>,
) -> Result<TurboResult> {
    if cfg.iterations == 0 {
        return Err(Error::Config("turbo loop needs at least one iteration".into()));
    }
    y.grid().ensure_same(pilot_scaled.grid())?;
    let grid = *y.grid();
    let mn = grid.mn();
    let sensor = Sensor::new(pilot_scaled, cfg.region, pilot_scaled.energy())?;
    let y_td = idzt(y);
    let p_td = idzt(pilot_scaled);
    let mut out = TurboResult { h_est: Vec::new(), detected: Vec::new(), ber_trace: Vec::new() };
    let mut feedback: Option<QuasiPeriodicArray> = None;
    for t in 0..cfg.iterations {
        let h = match (t, &feedback, out.h_est.last()) {
            (0, _, _) => sensor.estimate_td(&y_td),
            (_, Some(prev), Some(h_prev)) => {
                let d_td: Vec<C64> = idzt(prev).samples().iter().map(|v| v * cfg.data_scale).collect();
                match cfg.mode {
                    TurboMode::Readoff => {
                        let mut hd = vec![C64::new(0.0, 0.0); mn];
                        h_prev.operator().apply_td(&d_td, &mut hd);
                        let clean: Vec<C64> = y_td.samples().iter().zip(&hd).map(|(a, b)| a - b).collect();
                        sensor.estimate_td(&PeriodicSequence::new(grid, clean)?)
                    }
                    TurboMode::DecisionDirected { k_lo, k_hi, l_lo, l_hi } => {
                        let s: Vec<C64> = p_td.samples().iter().zip(&d_td).map(|(a, b)| a + b).collect();
                        let taps = ((k_hi - k_lo + 1) * (l_hi - l_lo + 1)) as f64;
                        ls_estimate_channel(
                            &y_td,
                            &PeriodicSequence::new(grid, s)?,
                            (k_lo, k_hi),
                            (l_lo, l_hi),
                            cfg.sigma2 * taps,
                        )?
                    }
                }
            }
            _ => unreachable!("later iterations always follow a detection"),
        };
        let det = detect_with_operator(&h.operator(), &y_td, &p_td, cfg.data_scale, cfg.sigma2, &cfg.constellation)?;
        out.ber_trace.push(match truth {
            Some(d) => d.bit_error_rate(&det.frame, &cfg.constellation),
            None => f64::NAN,
        });
        feedback = Some(if cfg.soft_feedback {
            QuasiPeriodicArray::new(grid, soft_symbols(&det.soft, &det.frame, &cfg.constellation))?
        } else {
            det.frame.to_array()
        });
        out.detected.push(det.frame);
        out.h_est.push(h);
    }
    Ok(out)
}

/// Outcome of one-step thresholding over a preamble dictionary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub active_set: Vec<usize>,
    pub statistics: Vec<f64>,
    pub threshold: f64,
}

/// `ln(|region| / pfa)`: with unit-energy preambles and white noise of power
/// `P`, `MN^2 |A|^2 / P` is a unit exponential at every lag, so a union bound
/// over the region gives the per-preamble false-alarm level.
pub fn ost_threshold_factor(region: &SensingRegion, pfa: f64) -> Result<f64> {
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(Error::Config(format!("false-alarm target must lie in (0, 1), got {pfa}")));
    }
    Ok((region.len() as f64 / pfa).ln().max(0.0))
}

/// Matched cross-ambiguity detector over a fixed dictionary.
#[derive(Debug, Clone)]
pub struct OstDetector {
    dictionary_td: Vec<PeriodicSequence>,
    lags: Vec<(i64, i64)>,
    grid: GridParams,
}

impl OstDetector {
    pub fn new(dictionary: &[QuasiPeriodicArray], region: SensingRegion) -> Result<Self> {
        let grid = *dictionary.first().ok_or(Error::EmptyDictionary)?.grid();
        for d in dictionary {
            grid.ensure_same(d.grid())?;
            let e = d.energy();
            if (e - 1.0).abs() > 1e-6 {
                return Err(Error::Config(format!("dictionary entries must have unit energy, got {e}")));
            }
        }
        Ok(Self { dictionary_td: dictionary.iter().map(idzt).collect(), lags: region.lags(), grid })
    }

    pub fn len(&self) -> usize {
        self.dictionary_td.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dictionary_td.is_empty()
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    /// `A_{y,d_i}` on every region lag, one vector per entry.
    pub fn responses(&self, y: &QuasiPeriodicArray) -> Result<Vec<Vec<C64>>> {
        self.grid.ensure_same(y.grid())?;
        Ok(self.responses_td(&idzt(y)))
    }

    /// [`OstDetector::responses`] for a frame already in the time domain.
    pub fn responses_td(&self, y: &PeriodicSequence) -> Vec<Vec<C64>> {
        self.dictionary_td.iter().map(|d| td_probes(y, d, &self.lags)).collect()
    }

    /// `max_{region} |A_{y,d_i}|^2` for every entry.
    pub fn statistics(&self, y: &QuasiPeriodicArray) -> Result<Vec<f64>> {
        Ok(self.responses(y)?.iter().map(|r| peak_power(r)).collect())
    }

    /// Noise-plus-interference power used to scale the threshold, `max(sigma2, |y|^2 / MN)`.
    pub fn reference_power(&self, y: &QuasiPeriodicArray, sigma2: f64) -> f64 {
        sigma2.max(y.energy() / self.grid.mn() as f64)
    }

    /// Declares entries whose statistic exceeds `factor * power / MN^2`.
    pub fn decide(&self, statistics: Vec<f64>, power: f64, factor: f64) -> DetectionReport {
        let mn = self.grid.mn() as f64;
        let threshold = factor * power / (mn * mn);
        let active_set = statistics.iter().enumerate().filter(|(_, &s)| s > threshold).map(|(i, _)| i).collect();
        DetectionReport { active_set, statistics, threshold }
    }

    pub fn detect(&self, y: &QuasiPeriodicArray, sigma2: f64, factor: f64) -> Result<DetectionReport> {
        let statistics = self.statistics(y)?;
        Ok(self.decide(statistics, self.reference_power(y, sigma2), factor))
    }
}

/// `max |r|^2`.
pub fn peak_power(r: &[C64]) -> f64 {
    r.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max)
}

pub fn ost_detect(
    y: &QuasiPeriodicArray,
    dictionary: &[QuasiPeriodicArray],
    region: SensingRegion,
    sigma2: f64,
    pfa_target: f64,
) -> Result<DetectionReport> {
    let det = OstDetector::new(dictionary, region)?;
    det.detect(y, sigma2, ost_threshold_factor(&region, pfa_target)?)
}

/// Monte-Carlo threshold factor: the `1 - pfa` quantile of the normalized
/// statistic `MN^2 T_i / P` over noise-only frames, pooled across entries.
pub fn ost_calibrate(detector: &OstDetector, pfa: f64, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::EmptyTrialSet);
    }
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(Error::Config(format!("false-alarm target must lie in (0, 1), got {pfa}")));
    }
    let grid = detector.grid;
    let mn = grid.mn() as f64;
    let mut rng = aux_rng(seed, 7);
    let mut pooled = Vec::with_capacity(trials * detector.len());
    for _ in 0..trials {
        let y = QuasiPeriodicArray::from_fn(grid, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        });
        let p = detector.reference_power(&y, 1.0);
        pooled.extend(detector.statistics(&y)?.into_iter().map(|s| s * mn * mn / p));
    }
    pooled.sort_by(|a, b| a.total_cmp(b));
    let idx = (((1.0 - pfa) * pooled.len() as f64).ceil() as usize).clamp(1, pooled.len()) - 1;
    Ok(pooled[idx])
}
