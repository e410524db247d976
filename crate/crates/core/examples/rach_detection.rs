//! Five users pick distinct Zadoff-Chu preambles and transmit through their
//! own Veh-A channels; one-step thresholding recovers who is active.

use rand::seq::index::sample;
use zak_cazac::cazac::{resolve_family, FamilyTag};
use zak_cazac::channel::{effective_channel, multiuser_superpose, sample_channel, ChannelConfig, PulseShapeConfig};
use zak_cazac::receiver::{ost_detect, SensingRegion};
use zak_cazac::stats::trial_rng;
use zak_cazac::GridParams;

fn main() -> zak_cazac::Result<()> {
    let grid = GridParams::new(31, 37, 30_000.0)?;
    let unit = 1.0 / (grid.mn() as f64).sqrt();
    let dictionary = (1..=16)
        .map(|a| Ok(resolve_family(FamilyTag::ZadoffChu { u: 2 * a }, &grid)?.resolved.dd().scaled(unit)))
        .collect::<zak_cazac::Result<Vec<_>>>()?;
    let region = SensingRegion::with_k_min(-1, 4, 2)?;
    let ccfg = ChannelConfig::veh_a(815.0);
    let ps = PulseShapeConfig::default();

    for snr_db in [-20.0, -10.0, 0.0] {
        let mut rng = trial_rng(21, 0);
        let mut active = sample(&mut rng, dictionary.len(), 5).into_vec();
        active.sort_unstable();
        let users = active
            .iter()
            .map(|&i| {
                let h = effective_channel(&sample_channel(&ccfg, &mut rng)?, &grid, &ps)?;
                Ok((dictionary[i].scaled(1.0 / unit), h))
            })
            .collect::<zak_cazac::Result<Vec<_>>>()?;
        // Each user has energy MN, so a reference of MN makes snr_db the per-user SNR.
        let (y, sigma2) = multiuser_superpose(&users, &mut rng, snr_db, grid.mn() as f64)?;
        let rep = ost_detect(&y, &dictionary, region, sigma2, 1e-3)?;
        println!("SNR {snr_db:+.0} dB: active {active:?}, detected {:?}", rep.active_set);
        println!(
            "  threshold {:.2e}, largest statistic {:.1e}",
            rep.threshold,
            rep.statistics.iter().cloned().fold(0.0, f64::max)
        );
    }
    Ok(())
}
