use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zak-cazac")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn even_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["ambiguity", "--m", "4", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_config_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.toml");
    std::fs::write(&unknown, "seed = 3\n[grid]\nm = 31\nbogus = 1\n").unwrap();
    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "seed = = 3\n").unwrap();
    let missing = dir.path().join("missing.toml");
    for path in [&unknown, &broken, &missing] {
        let o = run(&["verify", "--config", path.to_str().unwrap(), "--out", &out_arg(dir.path())]);
        assert_eq!(o.status.code(), Some(2), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn runs_are_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let experiments: [(&str, &[&str], &[&str]); 2] = [
        (
            "rach",
            &["--trials", "4", "--seeds", "2", "--snr_db", "-10,0,10", "--families", "zc,wiener"],
            &["rach.csv", "rach.json"],
        ),
        ("isac", &["--trials", "2", "--pdr_db", "5", "--iterations", "2"], &["isac.csv", "isac.json"]),
    ];
    for (cmd, flags, files) in experiments {
        let mut args = vec![cmd, "--seed", "9", "--out", &out];
        args.extend_from_slice(flags);
        let read = || -> Vec<Vec<u8>> { files.iter().map(|f| std::fs::read(dir.path().join(f)).unwrap()).collect() };
        let o = run(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let first = read();
        let o = run(&args);
        assert!(o.status.success());
        assert!(first == read(), "{cmd} output changed between runs");
    }
}

#[test]
fn json_echoes_the_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "ambiguity",
        "--seed",
        "77",
        "--alpha",
        "5",
        "--family",
        "general_quadratic",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("ambiguity.json")).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 77);
    assert_eq!(v["config"]["waveform"]["alpha"], 5);
    assert_eq!(v["config"]["grid"]["m"], 31);
    assert_eq!(v["support_count"], 1147);
}

#[test]
fn corrupted_transform_is_reported_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "verify",
        "--corrupt_dzt",
        "true",
        "--unbiasedness_trials_small",
        "0",
        "--unbiasedness_trials_large",
        "0",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let line = stdout.lines().find(|l| l.contains("td_dd_equivalence")).expect("equivalence line");
    assert!(line.starts_with("FAIL"), "{line}");
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["all_passed"], false);
}
