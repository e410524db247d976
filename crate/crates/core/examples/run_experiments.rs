//! The command-line experiments, driven from a TOML string.

use zak_cazac::harness::{run_ambiguity, run_rach, run_verify, ExperimentConfig};

fn main() -> zak_cazac::Result<()> {
    let out = std::env::temp_dir().join("zak-cazac-example");
    let mut cfg = ExperimentConfig::from_toml_str(
        r#"
        seed = 4
        trials = 50

        [grid]
        m = 31
        n = 37

        [waveform]
        family = "zadoff_chu"
        u = 14

        [rach]
        snr_db = [-20.0, -10.0, 0.0]
        seeds = 1
        families = ["zadoff_chu", "wiener"]

        [verify]
        unbiasedness_trials_small = 2000
        unbiasedness_trials_large = 20
        "#,
    )?;
    cfg.out = out.clone();

    let a = run_ambiguity(&cfg)?;
    println!("ambiguity: support {} points, off-line max {:.1e}", a.support_count, a.off_line_max_mag);

    let r = run_rach(&cfg)?;
    for c in &r.cells {
        println!("rach: {:>5.1} dB {:<10} miss {:?}", c.snr_db, c.family.as_str(), c.median_miss_rate);
    }

    let v = run_verify(&cfg)?;
    println!("verify: {} checks, all passed: {}", v.entries.len(), v.all_passed);
    println!("outputs in {}", out.display());
    println!("\nresolved config:\n{}", cfg.to_toml_string());
    Ok(())
}
