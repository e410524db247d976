use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::cazac::{cazac_dd, resolve_family, CazacFamily, FamilyTag};
use crate::channel::{
    apply_channel, assemble_frame, check_spread, complex_normal, effective_channel, sample_channel, ChannelConfig,
    FrameConfig, PulseShapeConfig,
};
use crate::constellation::{Constellation, DataFrame};
use crate::error::{Error, Result};
use crate::export::{write_json, write_records_csv};
use crate::grid::{GridParams, QuasiPeriodicArray};
use crate::receiver::{turbo_loop, SensingRegion, TurboConfig, TurboMode};
use crate::stats::{median, sign_test_p, summarize, trial_rng};

pub const DEFAULT_ISAC_TRIALS: usize = 200;

/// One CSV row: mean BER after `iter` turbo iterations at `pdr` dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsacRow {
    pub pdr: f64,
    pub iter: usize,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Frame-by-frame comparison of the first and last iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedComparison {
    /// Frames whose BER dropped.
    pub improved: usize,
    /// Frames whose BER rose.
    pub worsened: usize,
    pub ties: usize,
    /// One-sided sign-test p-value for "last iteration is better".
    pub p_value: f64,
    pub mean_difference: f64,
    pub std_error: f64,
}

impl PairedComparison {
    pub fn new(first: &[f64], last: &[f64]) -> Self {
        let diffs: Vec<f64> = first.iter().zip(last).map(|(a, b)| a - b).collect();
        let improved = diffs.iter().filter(|&&d| d > 0.0).count();
        let worsened = diffs.iter().filter(|&&d| d < 0.0).count();
        let s = summarize(&diffs);
        Self {
            improved,
            worsened,
            ties: diffs.len() - improved - worsened,
            p_value: sign_test_p(improved as u64, worsened as u64),
            mean_difference: s.mean,
            std_error: s.std_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsacPdrSummary {
    pub pdr_db: f64,
    pub mean_ber: Vec<f64>,
    pub median_ber: Vec<f64>,
    pub first_vs_last: PairedComparison,
    /// `traces[f][t]`: BER of frame `f` after iteration `t + 1`.
    pub traces: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsacReport {
    pub config: ExperimentConfig,
    pub pilot: CazacFamily,
    pub region: SensingRegion,
    pub mode: TurboMode,
    pub frames: usize,
    pub rows: Vec<IsacRow>,
    pub per_pdr: Vec<IsacPdrSummary>,
    pub files: Vec<PathBuf>,
}

struct IsacSetup {
    grid: GridParams,
    channel: ChannelConfig,
    pulse: PulseShapeConfig,
    frames: Vec<FrameConfig>,
    turbo: TurboConfig,
}

impl IsacSetup {
    /// BER traces of frame `f`, one per PDR. The channel, data and noise
    /// pattern are shared across PDRs.
    fn run_frame(&self, seed: u64, f: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = trial_rng(seed, f);
        let ch = sample_channel(&self.channel, &mut rng)?;
        let h = effective_channel(&ch, &self.grid, &self.pulse)?;
        let data = DataFrame::random(self.grid, &self.turbo.constellation, &mut rng);
        let noise = QuasiPeriodicArray::from_fn(self.grid, |_, _| complex_normal(&mut rng, 1.0));
        self.frames
            .iter()
            .map(|fc| {
                let sigma2 = fc.sigma2();
                let y = apply_channel(&h, &assemble_frame(&data, fc)?)?.add(&noise.scaled(sigma2.sqrt()))?;
                let cfg = TurboConfig { data_scale: fc.data_scale(), sigma2, ..self.turbo.clone() };
                Ok(turbo_loop(&y, &fc.pilot_scaled(), &cfg, Some(&data))?.ber_trace)
            })
            .collect()
    }
}

fn setup(cfg: &ExperimentConfig) -> Result<(IsacSetup, CazacFamily)> {
    let grid = cfg.grid_params()?;
    let s = &cfg.isac;
    if s.iterations == 0 {
        return Err(Error::Config("at least one turbo iteration is required".into()));
    }
    if s.pdr_db.is_empty() {
        return Err(Error::Config("empty PDR sweep".into()));
    }
    let family = resolve_family(FamilyTag::ZadoffChu { u: s.pilot_root }, &grid)?;
    let pilot = cazac_dd(&family.resolved).scaled(1.0 / (grid.mn() as f64).sqrt());
    let region = s.region()?;
    region.check_alias_free(&pilot)?;
    let frames = s
        .pdr_db
        .iter()
        .map(|&db| FrameConfig::new(pilot.clone(), 10f64.powf(db / 10.0), s.rho_d_db))
        .collect::<Result<Vec<_>>>()?;
    let turbo = TurboConfig {
        region,
        iterations: s.iterations,
        mode: s.mode()?,
        data_scale: 1.0,
        sigma2: 0.0,
        constellation: Constellation::qam4(),
        soft_feedback: s.soft_feedback,
    };
    let channel = cfg.channel.channel_config(s.nu_max)?;
    let pulse = cfg.channel.pulse_shape()?;
    check_spread(&channel, &grid, &pulse)?;
    Ok((IsacSetup { grid, channel, pulse, frames, turbo }, family))
}

/// Monte-Carlo BER against turbo iteration for each PDR. Writes `isac.csv`
/// and `isac.json` under `cfg.out`.
pub fn run_isac(cfg: &ExperimentConfig) -> Result<IsacReport> {
    let trials = cfg.trials_or(DEFAULT_ISAC_TRIALS)?;
    let (setup, family) = setup(cfg)?;
    let per_frame: Vec<Vec<Vec<f64>>> =
        (0..trials as u64).into_par_iter().map(|f| setup.run_frame(cfg.seed, f)).collect::<Result<_>>()?;

    let iters = cfg.isac.iterations;
    let mut rows = Vec::new();
    let mut per_pdr = Vec::new();
    for (i, &pdr_db) in cfg.isac.pdr_db.iter().enumerate() {
        let traces: Vec<Vec<f64>> = per_frame.iter().map(|f| f[i].clone()).collect();
        let mut mean_ber = Vec::with_capacity(iters);
        let mut median_ber = Vec::with_capacity(iters);
        for t in 0..iters {
            let col: Vec<f64> = traces.iter().map(|tr| tr[t]).collect();
            let s = summarize(&col);
            let (lo, hi) = s.ci95();
            rows.push(IsacRow { pdr: pdr_db, iter: t + 1, ber: s.mean, ci_low: lo.max(0.0), ci_high: hi.min(1.0) });
            mean_ber.push(s.mean);
            median_ber.push(median(&col));
        }
        let first: Vec<f64> = traces.iter().map(|tr| tr[0]).collect();
        let last: Vec<f64> = traces.iter().map(|tr| tr[iters - 1]).collect();
        per_pdr.push(IsacPdrSummary {
            pdr_db,
            mean_ber,
            median_ber,
            first_vs_last: PairedComparison::new(&first, &last),
            traces,
        });
    }

    std::fs::create_dir_all(&cfg.out)?;
    let files = vec![cfg.out.join("isac.csv"), cfg.out.join("isac.json")];
    write_records_csv(&files[0], &rows)?;
    let mut config = cfg.clone();
    config.trials = Some(trials);
    let report = IsacReport {
        config,
        pilot: family,
        region: setup.turbo.region,
        mode: setup.turbo.mode,
        frames: trials,
        rows,
        per_pdr,
        files: files.clone(),
    };
    write_json(&files[1], &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.trials = Some(0);
        assert!(matches!(run_isac(&cfg), Err(Error::EmptyTrialSet)));
    }

    #[test]
    fn aliased_region_rejected() {
        let mut cfg = ExperimentConfig::default();
        cfg.isac.l_max = 8;
        assert!(matches!(run_isac(&cfg), Err(Error::RegionAliased { .. })));
    }

    #[test]
    fn paired_comparison_counts() {
        let c = PairedComparison::new(&[0.5, 0.2, 0.1, 0.0], &[0.1, 0.2, 0.3, 0.0]);
        assert_eq!((c.improved, c.worsened, c.ties), (1, 1, 2));
        assert!((c.p_value - 0.75).abs() < 1e-12);
    }
}
