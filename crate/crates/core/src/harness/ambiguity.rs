use std::path::PathBuf;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::ambiguity::{dd_ambiguity, on_self_af_line, self_af_closed_form, td_ambiguity, AmbiguitySurface};
use crate::cazac::{cazac_dd, cazac_td, CazacFamily};
use crate::error::Result;
use crate::export::{write_json, write_surface_csv};

/// `|A|` above this counts towards `support_count`.
pub const SUPPORT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct AmbiguityReport {
    pub config: ExperimentConfig,
    pub waveform: CazacFamily,
    /// Smallest `|A|` on the line `2 alpha k = l (mod MN)`.
    pub on_line_min_mag: f64,
    /// Largest `|A|` off that line.
    pub off_line_max_mag: f64,
    pub support_count: usize,
    pub support_threshold: f64,
    /// Largest deviation of the DD surface from its closed form.
    pub closed_form_max_deviation: f64,
    /// Largest deviation between the DD surface and the TD baseline.
    pub td_dd_max_deviation: f64,
    pub files: Vec<PathBuf>,
}

/// Self-ambiguity surfaces of the configured waveform, DD route then TD route.
pub fn ambiguity_surfaces(family: &CazacFamily) -> Result<(AmbiguitySurface, AmbiguitySurface)> {
    let dd = cazac_dd(&family.resolved);
    let td = cazac_td(&family.resolved);
    Ok((dd_ambiguity(&dd, &dd)?, td_ambiguity(&td, &td)?))
}

/// Writes `af_dd.csv`, `af_td.csv` and `ambiguity.json` under `cfg.out`.
pub fn run_ambiguity(cfg: &ExperimentConfig) -> Result<AmbiguityReport> {
    let grid = cfg.grid_params()?;
    let family = cfg.waveform.resolve(&grid)?;
    let (dd, td) = ambiguity_surfaces(&family)?;

    let p = &family.resolved;
    let mut on_line_min_mag = f64::INFINITY;
    let mut off_line_max_mag: f64 = 0.0;
    let mut support_count = 0;
    let mut closed_form_max_deviation: f64 = 0.0;
    for ((k, l), v) in dd.iter() {
        let (k, l) = (k as i64, l as i64);
        let mag = v.norm();
        if on_self_af_line(p, k, l) {
            on_line_min_mag = on_line_min_mag.min(mag);
        } else {
            off_line_max_mag = off_line_max_mag.max(mag);
        }
        if mag > SUPPORT_THRESHOLD {
            support_count += 1;
        }
        closed_form_max_deviation = closed_form_max_deviation.max((v - self_af_closed_form(p, k, l)).norm());
    }

    std::fs::create_dir_all(&cfg.out)?;
    let files = vec![cfg.out.join("af_dd.csv"), cfg.out.join("af_td.csv"), cfg.out.join("ambiguity.json")];
    write_surface_csv(&files[0], &dd)?;
    write_surface_csv(&files[1], &td)?;
    let report = AmbiguityReport {
        config: cfg.clone(),
        waveform: family,
        on_line_min_mag,
        off_line_max_mag,
        support_count,
        support_threshold: SUPPORT_THRESHOLD,
        closed_form_max_deviation,
        td_dd_max_deviation: dd.max_deviation(&td),
        files: files.clone(),
    };
    write_json(&files[2], &report)?;
    Ok(report)
}
