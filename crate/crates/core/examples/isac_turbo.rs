//! Superimposed spread pilot and 4-QAM data through Veh-A channels at
//! 25 dB, with the receiver alternating channel sensing and detection.

use zak_cazac::cazac::{resolve_family, FamilyTag};
use zak_cazac::channel::{add_noise, apply_channel, assemble_frame, effective_channel, sample_channel};
use zak_cazac::channel::{ChannelConfig, FrameConfig, PulseShapeConfig};
use zak_cazac::constellation::{Constellation, DataFrame};
use zak_cazac::receiver::{detect_data, turbo_loop, SensingRegion, TurboConfig, TurboMode};
use zak_cazac::stats::{median, trial_rng};
use zak_cazac::GridParams;

fn main() -> zak_cazac::Result<()> {
    let frames: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let grid = GridParams::new(31, 37, 30_000.0)?;
    let pilot = resolve_family(FamilyTag::ZadoffChu { u: 11 }, &grid)?.resolved.dd();
    let fc = FrameConfig::new(pilot.scaled(1.0 / (grid.mn() as f64).sqrt()), 10f64.powf(0.5), 25.0)?;
    let q = Constellation::qam4();
    let ccfg = ChannelConfig::veh_a(6000.0);
    let ps = PulseShapeConfig::default();
    let mut cfg = TurboConfig {
        region: SensingRegion::with_k_min(-1, 4, 5)?,
        iterations: 5,
        mode: TurboMode::DecisionDirected { k_lo: -2, k_hi: 5, l_lo: -10, l_hi: 10 },
        data_scale: fc.data_scale(),
        sigma2: 0.0,
        constellation: q.clone(),
        soft_feedback: false,
    };

    let mut traces = Vec::new();
    let mut genie = Vec::new();
    for f in 0..frames {
        let mut rng = trial_rng(5, f);
        let h = effective_channel(&sample_channel(&ccfg, &mut rng)?, &grid, &ps)?;
        let data = DataFrame::random(grid, &q, &mut rng);
        let (y, sigma2) =
            add_noise(&apply_channel(&h, &assemble_frame(&data, &fc)?)?, 25.0, fc.data_energy(), &mut rng);
        cfg.sigma2 = sigma2;
        let r = turbo_loop(&y, &fc.pilot_scaled(), &cfg, Some(&data))?;
        let known = detect_data(&y, &h, &fc.pilot_scaled(), fc.data_scale(), sigma2, &q)?;
        genie.push(data.bit_error_rate(&known.frame, &q));
        println!(
            "frame {f:2}: BER by iteration {:?}",
            r.ber_trace.iter().map(|b| format!("{b:.3}")).collect::<Vec<_>>()
        );
        traces.push(r.ber_trace);
    }
    let medians: Vec<f64> =
        (0..cfg.iterations).map(|t| median(&traces.iter().map(|tr| tr[t]).collect::<Vec<_>>())).collect();
    println!("PDR 5 dB median BER by iteration: {medians:.3?}");
    println!("with the true channel: median BER {:.3}", median(&genie));
    Ok(())
}
