use std::path::PathBuf;

use rand::Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::ambiguity::{
    cross_af_flatness, dd_ambiguity, dd_ambiguity_direct, gauss_sum_magnitude, max_flatness_deviation, on_self_af_line,
    td_ambiguity_direct, unbiasedness_stat,
};
use crate::cazac::{cazac_dd, cazac_td, periodic_autocorrelation, resolve_family, CazacParams, FamilyTag};
use crate::constellation::Constellation;
use crate::error::Result;
use crate::export::write_json;
use crate::grid::{papr, GridParams, PeriodicSequence, QuasiPeriodicArray, C64};
use crate::modular::gcd;
use crate::pilot::{lattice_descriptor, spread_pilot, Cazac2DParams, PilotSpec};
use crate::stats::aux_rng;
use crate::zak::{dzt, idzt};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyEntry {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl VerifyEntry {
    fn new(name: &str, max_error: f64, tolerance: f64, detail: String) -> Self {
        Self { name: name.into(), passed: max_error <= tolerance, max_error, tolerance, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub config: ExperimentConfig,
    pub all_passed: bool,
    pub entries: Vec<VerifyEntry>,
    pub files: Vec<PathBuf>,
}

fn small(m: usize, n: usize) -> GridParams {
    GridParams::unit(m, n).expect("odd coprime test grid")
}

fn random_sequence<R: Rng>(grid: GridParams, rng: &mut R) -> PeriodicSequence {
    PeriodicSequence::from_fn(grid, |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// The transform under test; the negative control perturbs one cell.
struct Transform {
    corrupt: bool,
}

impl Transform {
    fn apply(&self, x: &PeriodicSequence) -> QuasiPeriodicArray {
        let mut out = dzt(x);
        if self.corrupt {
            out.data_mut()[1] += C64::new(0.25, -0.1);
        }
        out
    }
}

fn dzt_unitarity(t: &Transform, seed: u64) -> VerifyEntry {
    let grid = small(5, 7);
    let mut rng = aux_rng(seed, 11);
    let mut err: f64 = 0.0;
    for _ in 0..10 {
        let x = random_sequence(grid, &mut rng);
        let y = random_sequence(grid, &mut rng);
        let (xd, yd) = (t.apply(&x), t.apply(&y));
        let ip_t: C64 = x.samples().iter().zip(y.samples()).map(|(a, b)| a * b.conj()).sum();
        let ip_d: C64 = xd.data().iter().zip(yd.data()).map(|(a, b)| a * b.conj()).sum();
        err = err.max((x.energy() - xd.energy()).abs()).max((ip_t - ip_d).norm());
    }
    VerifyEntry::new("dzt_unitarity", err, 1e-9, "Parseval and inner products, 10 random pairs at 5x7".into())
}

fn dzt_round_trip(t: &Transform, seed: u64) -> VerifyEntry {
    let mut rng = aux_rng(seed, 12);
    let mut err: f64 = 0.0;
    for (m, n) in [(3, 5), (5, 7), (7, 11), (9, 11)] {
        let x = random_sequence(small(m, n), &mut rng);
        let back = idzt(&t.apply(&x));
        for (a, b) in x.samples().iter().zip(back.samples()) {
            err = err.max((a - b).norm());
        }
    }
    VerifyEntry::new("dzt_round_trip", err, 1e-12, "inverse after forward at 3x5, 5x7, 7x11, 9x11".into())
}

fn td_dd_equivalence(t: &Transform, seed: u64) -> Result<VerifyEntry> {
    let grid = small(5, 7);
    let mut rng = aux_rng(seed, 13);
    let mut err: f64 = 0.0;
    for _ in 0..10 {
        let x = random_sequence(grid, &mut rng);
        let y = random_sequence(grid, &mut rng);
        let dd = dd_ambiguity_direct(&t.apply(&x), &t.apply(&y))?;
        let td = td_ambiguity_direct(&x, &y)?;
        err = err.max(dd.max_deviation(&td));
    }
    Ok(VerifyEntry::new(
        "td_dd_equivalence",
        err,
        1e-12,
        "DD ambiguity of the transforms against the TD ambiguity, 10 random pairs at 5x7".into(),
    ))
}

fn line_support() -> Result<VerifyEntry> {
    let grid = small(3, 5);
    let p = CazacParams::new(grid, 1, 0, 0)?;
    let x = cazac_dd(&p);
    let s = dd_ambiguity_direct(&x, &x)?;
    let mut err: f64 = 0.0;
    let mut support = 0;
    for ((k, l), v) in s.iter() {
        let on = on_self_af_line(&p, k as i64, l as i64);
        err = err.max(if on { (v.norm() - 1.0).abs() } else { v.norm() });
        support += (v.norm() > 0.5) as usize;
    }
    if support != 15 {
        err = err.max(1.0);
    }
    Ok(VerifyEntry::new(
        "line_support",
        err,
        1e-9,
        format!("exhaustive 15x15 self-ambiguity at 3x5, alpha=1: support_count={support}"),
    ))
}

fn lattice_support_check() -> Result<VerifyEntry> {
    let mut err: f64 = 0.0;
    let mut counts = Vec::new();
    for (m, n) in [(3, 5), (5, 7)] {
        let grid = small(m, n);
        let p = Cazac2DParams::new(grid, 1, 0, 1, 0, 0)?;
        let x = spread_pilot(&p, PilotSpec::new(grid, 0, 0))?;
        let s = dd_ambiguity(&x, &x)?;
        let lat = lattice_descriptor(&p)?;
        let mut count = 0;
        for ((k, l), v) in s.iter() {
            let on = lat.contains(k as i64, l as i64);
            err = err.max(if on { (v.norm() - 1.0).abs() } else { v.norm() });
            count += on as usize;
        }
        if count != grid.mn() {
            err = err.max(1.0);
        }
        counts.push(count);
    }
    Ok(VerifyEntry::new(
        "lattice_support",
        err,
        1e-9,
        format!("spread-pilot self-ambiguity against the lattice at MN=15, 35: support {counts:?}"),
    ))
}

fn cross_flatness() -> Result<VerifyEntry> {
    let mut err: f64 = 0.0;
    let mut pairs = 0;
    for (m, n) in [(3, 5), (5, 7), (7, 11)] {
        let grid = small(m, n);
        for (a, b) in [(1, 2), (2, 3), (1, 3)] {
            let p = CazacParams::new(grid, a, 1, 0)?;
            let q = CazacParams::new(grid, b, 2, 0)?;
            let f = cross_af_flatness(&p, &q)?;
            if !f.eligible {
                continue;
            }
            let s = dd_ambiguity(&cazac_dd(&p), &cazac_dd(&q))?;
            err = err.max(max_flatness_deviation(&s, f.magnitude));
            pairs += 1;
        }
    }
    Ok(VerifyEntry::new(
        "cross_af_flatness",
        err,
        1e-9,
        format!("{pairs} eligible pairs at MN=15, 35, 77, exhaustive over lags"),
    ))
}

fn gauss_sums() -> Result<VerifyEntry> {
    let mut err: f64 = 0.0;
    let mut cases = 0;
    for n in (3..=101).step_by(2) {
        for a in 1..n as i64 {
            if gcd(a, n as i64) == 1 {
                err = err.max((gauss_sum_magnitude(a, n)? - (n as f64).sqrt()).abs());
                cases += 1;
            }
        }
    }
    Ok(VerifyEntry::new("gauss_sum", err, 1e-9, format!("{cases} unit residues over odd N <= 101")))
}

fn cazac_properties() -> Result<VerifyEntry> {
    let mut err: f64 = 0.0;
    for (m, n) in [(3, 5), (5, 7), (7, 11)] {
        let grid = small(m, n);
        for tag in
            [FamilyTag::ZadoffChu { u: 2 }, FamilyTag::Gaussian { alpha: 1, beta: 3 }, FamilyTag::Wiener { alpha: 1 }]
        {
            let x = cazac_td(&resolve_family(tag, &grid)?.resolved);
            for s in x.samples() {
                err = err.max((s.norm() - 1.0).abs());
            }
            let acf = periodic_autocorrelation(&x);
            err = err.max((acf[0] - C64::new(1.0, 0.0)).norm());
            for v in &acf[1..] {
                err = err.max(v.norm());
            }
            err = err.max((10.0 * papr(&x)?.log10()).abs());
        }
    }
    Ok(VerifyEntry::new(
        "cazac_ca_zac_papr",
        err,
        1e-10,
        "constant amplitude, zero autocorrelation and 0 dB PAPR for three families at MN=15, 35, 77".into(),
    ))
}

fn unbiasedness(m: usize, n: usize, trials: usize, seed: u64) -> Result<VerifyEntry> {
    let grid = small(m, n);
    let x = cazac_dd(&CazacParams::new(grid, 1, 0, 0)?);
    let r = unbiasedness_stat(&x, &Constellation::qam4(), trials, seed)?;
    Ok(VerifyEntry::new(
        &format!("unbiasedness_{m}x{n}"),
        (r.mean_sq_cross - r.target).abs(),
        3.0 * r.std_error,
        format!("mean |A|^2 = {:.6e} against 1/MN = {:.6e} over {trials} 4-QAM frames", r.mean_sq_cross, r.target),
    ))
}

/// Runs every check and writes `verify.json` under `cfg.out`. Failed checks
/// are report entries, not errors.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    let t = Transform { corrupt: cfg.verify.corrupt_dzt };
    let mut entries = vec![
        dzt_unitarity(&t, cfg.seed),
        dzt_round_trip(&t, cfg.seed),
        td_dd_equivalence(&t, cfg.seed)?,
        line_support()?,
        lattice_support_check()?,
        cross_flatness()?,
        gauss_sums()?,
        cazac_properties()?,
    ];
    if cfg.verify.unbiasedness_trials_small > 0 {
        entries.push(unbiasedness(3, 5, cfg.verify.unbiasedness_trials_small, cfg.seed)?);
    }
    if cfg.verify.unbiasedness_trials_large > 0 {
        entries.push(unbiasedness(31, 37, cfg.verify.unbiasedness_trials_large, cfg.seed)?);
    }
    std::fs::create_dir_all(&cfg.out)?;
    let files = vec![cfg.out.join("verify.json")];
    let report = VerifyReport {
        config: cfg.clone(),
        all_passed: entries.iter().all(|e| e.passed),
        entries,
        files: files.clone(),
    };
    write_json(&files[0], &report)?;
    Ok(report)
}
