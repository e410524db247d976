use std::path::PathBuf;

use rand::seq::index::sample;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::config::{ExperimentConfig, FamilyName};
use crate::ambiguity::cross_af_flatness;
use crate::cazac::{cazac_dd, resolve_family, CazacParams};
use crate::channel::{
    check_spread, complex_normal, effective_channel, sample_channel, ChannelConfig, PulseShapeConfig,
};
use crate::error::{Error, Result};
use crate::export::{write_json, write_records_csv};
use crate::grid::{GridParams, PeriodicSequence, QuasiPeriodicArray, C64};
use crate::receiver::{ost_calibrate, ost_threshold_factor, OstDetector, SensingRegion};
use crate::stats::{aux_rng, median, trial_rng, wilson95};
use crate::zak::idzt;

pub const DEFAULT_RACH_TRIALS: usize = 1000;

fn null_if_none<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str("null"),
    }
}

/// One CSV row. `miss_rate` is the median over seeds, `null` with no active users.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RachRow {
    pub snr_db: f64,
    pub family: FamilyName,
    #[serde(serialize_with = "null_if_none")]
    pub miss_rate: Option<f64>,
    /// Frames over all seeds.
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RachCell {
    pub snr_db: f64,
    pub family: FamilyName,
    pub per_seed_miss_rate: Vec<Option<f64>>,
    pub median_miss_rate: Option<f64>,
    /// Missed users over all seeds, with its Wilson 95% interval.
    pub pooled_miss_rate: Option<f64>,
    pub pooled_ci95: Option<(f64, f64)>,
    pub misses: u64,
    pub users: u64,
    /// Inactive entries declared active, over inactive entries tested.
    pub false_alarm_rate: f64,
    pub false_alarm_ci95: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyThreshold {
    pub family: FamilyName,
    /// `T_i > factor * P / MN^2` declares entry `i` active.
    pub factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RachReport {
    pub config: ExperimentConfig,
    pub region: SensingRegion,
    pub thresholds: Vec<FamilyThreshold>,
    pub cells: Vec<RachCell>,
    pub files: Vec<PathBuf>,
}

struct FamilyBank {
    detector: OstDetector,
    /// Unit-energy entries in the time domain.
    entries_td: Vec<PeriodicSequence>,
    factor: f64,
}

struct RachSetup {
    grid: GridParams,
    channel: ChannelConfig,
    pulse: PulseShapeConfig,
    k_active: usize,
    dictionary_size: usize,
    sigmas: Vec<f64>,
    banks: Vec<FamilyBank>,
}

/// `(misses, false alarms)` per family, per SNR.
type TrialCounts = Vec<Vec<(u64, u64)>>;

impl RachSetup {
    fn run_trial(&self, seed: u64, t: u64) -> Result<TrialCounts> {
        let mut rng = trial_rng(seed, t);
        let mn = self.grid.mn();
        let mut active = sample(&mut rng, self.dictionary_size, self.k_active).into_vec();
        active.sort_unstable();
        let operators = (0..self.k_active)
            .map(|_| {
                Ok(effective_channel(&sample_channel(&self.channel, &mut rng)?, &self.grid, &self.pulse)?.operator())
            })
            .collect::<Result<Vec<_>>>()?;
        let noise = PeriodicSequence::from_fn(self.grid, |_| complex_normal(&mut rng, 1.0));
        let e_w = noise.energy();
        let amp = (mn as f64).sqrt();

        let mut out = Vec::with_capacity(self.banks.len());
        let mut buf = vec![C64::new(0.0, 0.0); mn];
        for bank in &self.banks {
            let mut s = vec![C64::new(0.0, 0.0); mn];
            for (op, &i) in operators.iter().zip(&active) {
                op.apply_td(bank.entries_td[i].samples(), &mut buf);
                for (a, b) in s.iter_mut().zip(&buf) {
                    *a += b * amp;
                }
            }
            let e_s: f64 = s.iter().map(|v| v.norm_sqr()).sum();
            let cross: f64 = s.iter().zip(noise.samples()).map(|(a, b)| (a.conj() * b).re).sum();
            let s = PeriodicSequence::new(self.grid, s)?;
            let r_s = bank.detector.responses_td(&s);
            let r_w = bank.detector.responses_td(&noise);
            let counts = self
                .sigmas
                .iter()
                .map(|&sigma| {
                    let stats = r_s
                        .iter()
                        .zip(&r_w)
                        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x + y * sigma).norm_sqr()).fold(0.0, f64::max))
                        .collect();
                    let y_energy = e_s + sigma * sigma * e_w + 2.0 * sigma * cross;
                    let power = (sigma * sigma).max(y_energy / mn as f64);
                    let rep = bank.detector.decide(stats, power, bank.factor);
                    let misses = active.iter().filter(|i| rep.active_set.binary_search(i).is_err()).count();
                    let false_alarms = rep.active_set.iter().filter(|i| active.binary_search(i).is_err()).count();
                    (misses as u64, false_alarms as u64)
                })
                .collect();
            out.push(counts);
        }
        Ok(out)
    }
}

fn setup(cfg: &ExperimentConfig) -> Result<RachSetup> {
    let grid = cfg.grid_params()?;
    let r = &cfg.rach;
    if r.snr_db.is_empty() || r.families.is_empty() {
        return Err(Error::Config("RACH sweep needs at least one SNR and one family".into()));
    }
    if r.seeds == 0 {
        return Err(Error::EmptyTrialSet);
    }
    if r.dictionary_size == 0 {
        return Err(Error::EmptyDictionary);
    }
    if r.k_active > r.dictionary_size {
        return Err(Error::Config(format!("{} active users exceed a dictionary of {}", r.k_active, r.dictionary_size)));
    }
    let region = r.region()?;
    let factor = ost_threshold_factor(&region, r.pfa)?;
    let channel = cfg.channel.channel_config(r.nu_max)?;
    let pulse = cfg.channel.pulse_shape()?;
    check_spread(&channel, &grid, &pulse)?;
    let unit = 1.0 / (grid.mn() as f64).sqrt();

    let mut banks = Vec::with_capacity(r.families.len());
    for (fi, &family) in r.families.iter().enumerate() {
        let params = (1..=r.dictionary_size as i64)
            .map(|a| Ok(resolve_family(r.family_tag(family, a)?, &grid)?.resolved))
            .collect::<Result<Vec<CazacParams>>>()?;
        for (i, p) in params.iter().enumerate() {
            for q in &params[i + 1..] {
                if !cross_af_flatness(p, q)?.eligible {
                    return Err(Error::Config(format!(
                        "{} dictionary entries alpha={} and alpha={} are not mutually flat on this grid",
                        family.as_str(),
                        p.alpha,
                        q.alpha
                    )));
                }
            }
        }
        let dict: Vec<QuasiPeriodicArray> = params.iter().map(|p| cazac_dd(p).scaled(unit)).collect();
        let detector = OstDetector::new(&dict, region)?;
        let factor = if r.calibration_trials > 0 {
            ost_calibrate(&detector, r.pfa, r.calibration_trials, cfg.seed.wrapping_add(fi as u64))?
        } else {
            factor
        };
        banks.push(FamilyBank { detector, entries_td: dict.iter().map(idzt).collect(), factor });
    }
    Ok(RachSetup {
        grid,
        channel,
        pulse,
        k_active: r.k_active,
        dictionary_size: r.dictionary_size,
        sigmas: r.snr_db.iter().map(|s| 10f64.powf(-s / 20.0)).collect(),
        banks,
    })
}

/// Missed-detection sweep over user SNR for each dictionary family. Writes
/// `rach.csv` and `rach.json` under `cfg.out`.
///
/// Every user sends its entry with energy `MN` through its own channel, so the
/// per-user SNR is `1 / sigma^2`. Channels, active sets and noise are shared
/// across families and SNRs within a trial.
pub fn run_rach(cfg: &ExperimentConfig) -> Result<RachReport> {
    let trials = cfg.trials_or(DEFAULT_RACH_TRIALS)?;
    let setup = setup(cfg)?;
    let r = &cfg.rach;
    let (nf, ns) = (r.families.len(), r.snr_db.len());

    let mut master = aux_rng(cfg.seed, 100);
    let mut per_seed: Vec<TrialCounts> = Vec::with_capacity(r.seeds);
    for _ in 0..r.seeds {
        let base = master.next_u64();
        let counts: Vec<TrialCounts> =
            (0..trials as u64).into_par_iter().map(|t| setup.run_trial(base, t)).collect::<Result<_>>()?;
        let mut total = vec![vec![(0u64, 0u64); ns]; nf];
        for c in &counts {
            for (f, row) in c.iter().enumerate() {
                for (s, &(m, fa)) in row.iter().enumerate() {
                    total[f][s].0 += m;
                    total[f][s].1 += fa;
                }
            }
        }
        per_seed.push(total);
    }

    let users_per_seed = (r.k_active * trials) as u64;
    let inactive_total = ((r.dictionary_size - r.k_active) * trials * r.seeds) as u64;
    let mut cells = Vec::with_capacity(nf * ns);
    let mut rows = Vec::with_capacity(nf * ns);
    for (s, &snr_db) in r.snr_db.iter().enumerate() {
        for (f, &family) in r.families.iter().enumerate() {
            let rates: Vec<Option<f64>> = per_seed
                .iter()
                .map(|t| (users_per_seed > 0).then(|| t[f][s].0 as f64 / users_per_seed as f64))
                .collect();
            let misses: u64 = per_seed.iter().map(|t| t[f][s].0).sum();
            let false_alarms: u64 = per_seed.iter().map(|t| t[f][s].1).sum();
            let users = users_per_seed * r.seeds as u64;
            let median_miss_rate =
                (users > 0).then(|| median(&rates.iter().map(|v| v.unwrap_or(f64::NAN)).collect::<Vec<_>>()));
            rows.push(RachRow { snr_db, family, miss_rate: median_miss_rate, trials: trials * r.seeds });
            cells.push(RachCell {
                snr_db,
                family,
                per_seed_miss_rate: rates,
                median_miss_rate,
                pooled_miss_rate: (users > 0).then(|| misses as f64 / users as f64),
                pooled_ci95: (users > 0).then(|| wilson95(misses, users)),
                misses,
                users,
                false_alarm_rate: if inactive_total > 0 { false_alarms as f64 / inactive_total as f64 } else { 0.0 },
                false_alarm_ci95: wilson95(false_alarms, inactive_total),
            });
        }
    }

    std::fs::create_dir_all(&cfg.out)?;
    let files = vec![cfg.out.join("rach.csv"), cfg.out.join("rach.json")];
    write_records_csv(&files[0], &rows)?;
    let mut config = cfg.clone();
    config.trials = Some(trials);
    let report = RachReport {
        config,
        region: r.region()?,
        thresholds: r
            .families
            .iter()
            .zip(&setup.banks)
            .map(|(&family, b)| FamilyThreshold { family, factor: b.factor })
            .collect(),
        cells,
        files: files.clone(),
    };
    write_json(&files[1], &report)?;
    Ok(report)
}
