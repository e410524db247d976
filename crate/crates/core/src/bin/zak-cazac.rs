use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zak_cazac::harness::{run_ambiguity, run_isac, run_rach, run_verify, ExperimentConfig, FamilyName, TurboModeName};
use zak_cazac::Result;

/// Zak-OTFS CAZAC waveform experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Self-ambiguity surfaces of one CAZAC waveform.
    #[command(allow_negative_numbers = true)]
    Ambiguity(AmbiguityArgs),
    /// BER of superimposed-pilot sensing with turbo detection.
    #[command(allow_negative_numbers = true)]
    Isac(IsacArgs),
    /// Missed detection of random-access preambles.
    #[command(allow_negative_numbers = true)]
    Rach(RachArgs),
    /// Property checks on small grids.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

/// Sets `$cfg.$path` from every flag that was given.
macro_rules! set {
    ($cfg:expr, $args:expr; $($field:ident => $($path:ident).+),* $(,)?) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$($path).+ = v; })*
    };
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "nu_p")]
    nu_p: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(t) = self.trials {
            cfg.trials = Some(t);
        }
        set!(cfg, self; seed => seed, out => out, m => grid.m, n => grid.n, nu_p => grid.nu_p);
        Ok(cfg)
    }
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long = "delays_ns", value_delimiter = ',', allow_hyphen_values = true)]
    delays_ns: Option<Vec<f64>>,
    #[arg(long = "powers_db", value_delimiter = ',', allow_hyphen_values = true)]
    powers_db: Option<Vec<f64>>,
    #[arg(long = "equal_power")]
    equal_power: Option<bool>,
    #[arg(long = "beta_tau")]
    beta_tau: Option<f64>,
    #[arg(long = "beta_nu")]
    beta_nu: Option<f64>,
    #[arg(long = "tap_halfwidth")]
    tap_halfwidth: Option<usize>,
}

impl ChannelArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        set!(cfg, self;
            delays_ns => channel.delays_ns, powers_db => channel.powers_db, equal_power => channel.equal_power,
            beta_tau => channel.beta_tau, beta_nu => channel.beta_nu, tap_halfwidth => channel.tap_halfwidth);
    }
}

#[derive(Args)]
struct AmbiguityArgs {
    #[command(flatten)]
    common: Common,
    /// general_quadratic, zadoff_chu, gaussian or wiener.
    #[arg(long)]
    family: Option<FamilyName>,
    #[arg(long)]
    u: Option<i64>,
    #[arg(long)]
    alpha: Option<i64>,
    #[arg(long)]
    beta: Option<i64>,
    #[arg(long)]
    gamma: Option<i64>,
}

#[derive(Args)]
struct IsacArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long = "nu_max")]
    nu_max: Option<f64>,
    #[arg(long = "pilot_root")]
    pilot_root: Option<i64>,
    #[arg(long = "rho_d_db")]
    rho_d_db: Option<f64>,
    #[arg(long = "pdr_db", value_delimiter = ',', allow_hyphen_values = true)]
    pdr_db: Option<Vec<f64>>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long = "k_min")]
    k_min: Option<i64>,
    #[arg(long = "k_max")]
    k_max: Option<i64>,
    #[arg(long = "l_max")]
    l_max: Option<i64>,
    /// readoff or decision_directed.
    #[arg(long = "turbo_mode")]
    turbo_mode: Option<TurboModeName>,
    #[arg(long = "ls_k_lo")]
    ls_k_lo: Option<i64>,
    #[arg(long = "ls_k_hi")]
    ls_k_hi: Option<i64>,
    #[arg(long = "ls_l_lo")]
    ls_l_lo: Option<i64>,
    #[arg(long = "ls_l_hi")]
    ls_l_hi: Option<i64>,
    #[arg(long = "soft_feedback")]
    soft_feedback: Option<bool>,
}

#[derive(Args)]
struct RachArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long = "nu_max")]
    nu_max: Option<f64>,
    #[arg(long = "snr_db", value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Option<Vec<f64>>,
    #[arg(long = "k_active")]
    k_active: Option<usize>,
    #[arg(long = "dictionary_size")]
    dictionary_size: Option<usize>,
    #[arg(long)]
    pfa: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<FamilyName>>,
    #[arg(long = "gaussian_beta")]
    gaussian_beta: Option<i64>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long = "k_min")]
    k_min: Option<i64>,
    #[arg(long = "k_max")]
    k_max: Option<i64>,
    #[arg(long = "l_max")]
    l_max: Option<i64>,
    #[arg(long = "calibration_trials")]
    calibration_trials: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Negative control: corrupt one transform cell.
    #[arg(long = "corrupt_dzt")]
    corrupt_dzt: Option<bool>,
    #[arg(long = "unbiasedness_trials_small")]
    unbiasedness_trials_small: Option<usize>,
    #[arg(long = "unbiasedness_trials_large")]
    unbiasedness_trials_large: Option<usize>,
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ambiguity(a) => {
            let mut cfg = a.common.load()?;
            set!(cfg, a; family => waveform.family, u => waveform.u, alpha => waveform.alpha,
                beta => waveform.beta, gamma => waveform.gamma);
            let r = run_ambiguity(&cfg)?;
            println!(
                "on_line_min_mag={:.12} off_line_max_mag={:.3e} support_count={}",
                r.on_line_min_mag, r.off_line_max_mag, r.support_count
            );
            print_files(&r.files);
        }
        Command::Isac(a) => {
            let mut cfg = a.common.load()?;
            a.channel.apply(&mut cfg);
            set!(cfg, a;
                nu_max => isac.nu_max, pilot_root => isac.pilot_root, rho_d_db => isac.rho_d_db,
                pdr_db => isac.pdr_db, iterations => isac.iterations, k_min => isac.k_min, k_max => isac.k_max,
                l_max => isac.l_max, turbo_mode => isac.turbo_mode, ls_k_lo => isac.ls_k_lo,
                ls_k_hi => isac.ls_k_hi, ls_l_lo => isac.ls_l_lo, ls_l_hi => isac.ls_l_hi,
                soft_feedback => isac.soft_feedback);
            let r = run_isac(&cfg)?;
            for p in &r.per_pdr {
                println!(
                    "pdr {:>5.1} dB  median {:?}  mean {:?}  p(first > last) = {:.3e}",
                    p.pdr_db, p.median_ber, p.mean_ber, p.first_vs_last.p_value
                );
            }
            print_files(&r.files);
        }
        Command::Rach(a) => {
            let mut cfg = a.common.load()?;
            a.channel.apply(&mut cfg);
            set!(cfg, a;
                nu_max => rach.nu_max, snr_db => rach.snr_db, k_active => rach.k_active,
                dictionary_size => rach.dictionary_size, pfa => rach.pfa, families => rach.families,
                gaussian_beta => rach.gaussian_beta, seeds => rach.seeds, k_min => rach.k_min,
                k_max => rach.k_max, l_max => rach.l_max, calibration_trials => rach.calibration_trials);
            let r = run_rach(&cfg)?;
            for c in &r.cells {
                println!(
                    "snr {:>6.1} dB  {:<10}  miss {}  false alarm {:.2e}",
                    c.snr_db,
                    c.family.as_str(),
                    c.median_miss_rate.map_or("null".to_string(), |v| format!("{v:.3e}")),
                    c.false_alarm_rate
                );
            }
            print_files(&r.files);
        }
        Command::Verify(a) => {
            let mut cfg = a.common.load()?;
            set!(cfg, a;
                corrupt_dzt => verify.corrupt_dzt,
                unbiasedness_trials_small => verify.unbiasedness_trials_small,
                unbiasedness_trials_large => verify.unbiasedness_trials_large);
            let r = run_verify(&cfg)?;
            for e in &r.entries {
                let status = if e.passed { "pass" } else { "FAIL" };
                println!("{status}  {:<22} max_error={:.3e} tol={:.1e}", e.name, e.max_error, e.tolerance);
            }
            print_files(&r.files);
        }
    }
    Ok(())
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
