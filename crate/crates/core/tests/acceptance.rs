//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.
//!
//! Oracles here are written independently of the library: direct sums for
//! transforms and ambiguity functions, and plain integer arithmetic for
//! support predicates.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zak_cazac::ambiguity::{dd_ambiguity, dd_ambiguity_direct, gauss_sum_magnitude, unbiasedness_stat};
use zak_cazac::cazac::{cazac_dd, cazac_td, resolve_family, CazacParams, FamilyTag};
use zak_cazac::constellation::Constellation;
use zak_cazac::grid::papr;
use zak_cazac::harness::{run_isac, run_rach, ExperimentConfig, FamilyName};
use zak_cazac::pilot::{lattice_support, spread_pilot, Cazac2DParams, PilotSpec};
use zak_cazac::zak::{dzt, idzt};
use zak_cazac::{GridParams, PeriodicSequence, C64};

fn cis(num: f64, den: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * num / den)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a.rem_euclid(b))
    }
}

fn random_seq(grid: GridParams, rng: &mut ChaCha8Rng) -> PeriodicSequence {
    PeriodicSequence::from_fn(grid, |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// `X[k,l] = N^{-1/2} sum_p x[k+pM] e^{-j2pi pl/N}`, summed directly.
fn oracle_dzt(x: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    for k in 0..m {
        for l in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..n {
                acc += x[k + p * m] * cis(-((p * l) as f64), n as f64);
            }
            out[k * n + l] = acc / (n as f64).sqrt();
        }
    }
    out
}

/// `(1/MN) sum_n x[k+n] y*[n] e^{-j2pi nl/MN}`.
fn oracle_td_af(x: &[C64], y: &[C64], k: usize, l: usize) -> C64 {
    let mn = x.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..mn {
        acc += x[(k + i) % mn] * y[i].conj() * cis(-(((i * l) % mn) as f64), mn as f64);
    }
    acc / mn as f64
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let grid = GridParams::new(31, 37, 30_000.0).unwrap();
    let p = resolve_family(FamilyTag::ZadoffChu { u: 14 }, &grid).unwrap().resolved;
    assert_eq!((p.alpha, p.beta), (7, 7));
    let x = cazac_dd(&p);
    let af = dd_ambiguity(&x, &x).unwrap();
    let elapsed = t.elapsed();
    let (mut on_min, mut off_max, mut on_count) = (f64::INFINITY, 0.0f64, 0);
    for k in 0..1147i64 {
        for l in 0..1147i64 {
            let mag = af.get(k, l).norm();
            if (14 * k - l).rem_euclid(1147) == 0 {
                on_min = on_min.min(mag);
                on_count += 1;
            } else {
                off_max = off_max.max(mag);
            }
        }
    }
    outcome(
        on_count == 1147 && on_min >= 1.0 - 1e-9 && off_max <= 1e-9 && within(elapsed, 60),
        format!("{on_count} line points, min |A| on line {on_min:.15}, max |A| off line {off_max:.2e}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let grid = GridParams::unit(5, 7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let x = random_seq(grid, &mut rng);
        let y = random_seq(grid, &mut rng);
        let dd = dd_ambiguity_direct(&dzt(&x), &dzt(&y)).unwrap();
        for k in 0..35 {
            for l in 0..35 {
                let want = oracle_td_af(x.samples(), y.samples(), k, l);
                worst = worst.max((dd.get(k as i64, l as i64) - want).norm());
            }
        }
    }
    outcome(worst < 1e-12, format!("50 pairs at 5x7, max |A_DD - A_TD| = {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut pairs = Vec::new();
    'outer: for (m, n) in [(3usize, 5usize), (5, 7), (7, 11)] {
        let mn = (m * n) as i64;
        for a in 1..mn {
            for b in a + 1..mn {
                if gcd(2 * a, mn) == 1 && gcd(2 * b, mn) == 1 && gcd(a - b, mn) == 1 && (a + b) % 3 == 0 {
                    pairs.push((m, n, a, b));
                    if pairs.iter().filter(|p| p.0 == m).count() >= 4 {
                        continue 'outer;
                    }
                }
            }
        }
    }
    pairs.truncate(10);
    let mut worst: f64 = 0.0;
    for &(m, n, a, b) in &pairs {
        let grid = GridParams::unit(m, n).unwrap();
        let x = cazac_dd(&CazacParams::new(grid, a, 3, 1).unwrap());
        let y = cazac_dd(&CazacParams::new(grid, b, 5, 0).unwrap());
        let af = dd_ambiguity(&x, &y).unwrap();
        let target = 1.0 / ((m * n) as f64).sqrt();
        worst = af.values().iter().map(|v| (v.norm() - target).abs()).fold(worst, f64::max);
    }
    outcome(
        pairs.len() == 10 && worst < 1e-9,
        format!("{} eligible pairs over MN in {{15, 35, 77}}, max ||A| - 1/sqrt(MN)| = {worst:.2e}", pairs.len()),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = GridParams::new(31, 37, 30_000.0).unwrap();
    let x = random_seq(grid, &mut rng);
    let y = random_seq(grid, &mut rng);
    let (xd, yd) = (dzt(&x), dzt(&y));
    let oracle = oracle_dzt(x.samples(), 31, 37);
    let transform_err = xd.data().iter().zip(&oracle).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let ip = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(u, v)| u * v.conj()).sum::<C64>();
    let parseval = (x.energy() - xd.energy()).abs();
    let inner = (ip(x.samples(), y.samples()) - ip(xd.data(), yd.data())).norm();
    let mut round: f64 = 0.0;
    for (m, n) in [(3, 5), (5, 7), (3, 7), (7, 9), (5, 11), (9, 11), (7, 13)] {
        let g = GridParams::unit(m, n).unwrap();
        let s = random_seq(g, &mut rng);
        let back = idzt(&dzt(&s));
        round = s.samples().iter().zip(back.samples()).map(|(a, b)| (a - b).norm()).fold(round, f64::max);
    }
    outcome(
        parseval < 1e-9 && inner < 1e-9 && round < 1e-12 && transform_err < 1e-9,
        format!(
            "31x37 Parseval {parseval:.1e}, inner product {inner:.1e}, direct-sum oracle {transform_err:.1e}; round trip at MN <= 100 {round:.1e}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (m, n) in [(3usize, 5usize), (5, 7)] {
        let grid = GridParams::unit(m, n).unwrap();
        let mn = m * n;
        for (a1, a2) in [(1, 1), (2, 1), (1, 4)] {
            let p = Cazac2DParams::new(grid, a1, 0, a2, 0, 0).unwrap();
            let x = spread_pilot(&p, PilotSpec::new(grid, 1, 2)).unwrap();
            let td = idzt(&x);
            let mut support = 0;
            let mut agree = true;
            for k in 0..mn {
                for l in 0..mn {
                    let brute = oracle_td_af(td.samples(), td.samples(), k, l).norm() > 0.5;
                    agree &= brute == lattice_support(&p, k as i64, l as i64).unwrap();
                    support += brute as usize;
                }
            }
            ok &= agree && support == mn;
            notes.push(format!("MN={mn} (a1,a2)=({a1},{a2}): |support|={support}, agree={agree}"));
        }
    }
    outcome(ok, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let q = Constellation::qam4();
    let t = Instant::now();
    let small = GridParams::unit(3, 5).unwrap();
    let xs = cazac_dd(&CazacParams::new(small, 1, 0, 0).unwrap());
    let rs = unbiasedness_stat(&xs, &q, 100_000, 6).unwrap();
    let small_time = t.elapsed();
    let large = GridParams::new(31, 37, 30_000.0).unwrap();
    let xl = cazac_dd(&resolve_family(FamilyTag::ZadoffChu { u: 14 }, &large).unwrap().resolved);
    let rl = unbiasedness_stat(&xl, &q, 1000, 6).unwrap();
    let ok = rs.z_score().abs() <= 3.0 && rl.z_score().abs() <= 3.0 && within(small_time, 60);
    outcome(
        ok,
        format!(
            "3x5: {:.5e} vs 1/15, z={:+.2} ({small_time:.2?}); 31x37: {:.5e} vs 1/1147, z={:+.2}",
            rs.mean_sq_cross,
            rs.z_score(),
            rl.mean_sq_cross,
            rl.z_score()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut worst_ca: f64 = 0.0;
    let mut worst_zac: f64 = 0.0;
    let mut worst_papr: f64 = 0.0;
    for (m, n) in [(3usize, 5usize), (5, 7), (7, 11), (31, 37)] {
        let grid = GridParams::unit(m, n).unwrap();
        let mn = m * n;
        for tag in
            [FamilyTag::ZadoffChu { u: 4 }, FamilyTag::Gaussian { alpha: 1, beta: 3 }, FamilyTag::Wiener { alpha: 1 }]
        {
            let x = cazac_td(&resolve_family(tag, &grid).unwrap().resolved);
            let s = x.samples();
            worst_ca = s.iter().map(|v| (v.norm() - 1.0).abs()).fold(worst_ca, f64::max);
            for k in 1..mn {
                let r: C64 = (0..mn).map(|i| s[(i + k) % mn] * s[i].conj()).sum::<C64>() / mn as f64;
                worst_zac = worst_zac.max(r.norm());
            }
            worst_papr = worst_papr.max((10.0 * papr(&x).unwrap().log10()).abs());
        }
    }
    outcome(
        worst_ca <= 1e-10 && worst_zac <= 1e-10 && worst_papr <= 1e-9,
        format!(
            "3 families x MN in {{15, 35, 77, 1147}}: CA {worst_ca:.1e}, ZAC {worst_zac:.1e}, PAPR {worst_papr:.1e} dB"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in (3..=101usize).step_by(2) {
        for a in 1..n as i64 {
            if gcd(a, n as i64) != 1 {
                continue;
            }
            let direct: C64 = (0..n as i64).map(|i| cis(((a * i * i) % n as i64) as f64, n as f64)).sum();
            let lib = gauss_sum_magnitude(a, n).unwrap();
            worst = worst.max((lib - (n as f64).sqrt()).abs()).max((direct.norm() - (n as f64).sqrt()).abs());
            cases += 1;
        }
    }
    outcome(worst < 1e-9, format!("{cases} (a, N) pairs, max ||G| - sqrt(N)| = {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.out = dir.path().to_path_buf();
    cfg.trials = Some(200);
    let t = Instant::now();
    let r = run_isac(&cfg).unwrap();
    let elapsed = t.elapsed();
    assert_eq!((cfg.isac.rho_d_db, cfg.isac.nu_max, cfg.isac.pilot_root), (25.0, 6000.0, 11));
    let mut monotone = true;
    let mut significant = false;
    let mut notes = Vec::new();
    for p in &r.per_pdr {
        monotone &= p.median_ber.windows(2).all(|w| w[1] <= w[0]);
        let mid = p.pdr_db > 0.0 && p.pdr_db < 10.0;
        let improved = p.first_vs_last.p_value < 0.05 && p.median_ber[4] < p.median_ber[0];
        significant |= mid && improved;
        notes.push(format!(
            "PDR {} dB median {:.3}->{:.3} (sign test p={:.1e})",
            p.pdr_db, p.median_ber[0], p.median_ber[4], p.first_vs_last.p_value
        ));
    }
    outcome(monotone && significant && within(elapsed, 1800), format!("{}; {elapsed:.1?}", notes.join(", ")))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.out = dir.path().to_path_buf();
    cfg.trials = Some(1000);
    assert_eq!((cfg.rach.k_active, cfg.rach.nu_max), (5, 815.0));
    assert_eq!(cfg.rach.families, vec![FamilyName::ZadoffChu, FamilyName::Gaussian, FamilyName::Wiener]);
    let t = Instant::now();
    let r = run_rach(&cfg).unwrap();
    let elapsed = t.elapsed();
    let snrs = &cfg.rach.snr_db;
    let top = snrs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut monotone = true;
    let mut top_rate: f64 = 0.0;
    for &fam in &cfg.rach.families {
        let curve: Vec<f64> = snrs
            .iter()
            .map(|&s| r.cells.iter().find(|c| c.family == fam && c.snr_db == s).unwrap().median_miss_rate.unwrap())
            .collect();
        monotone &= curve.windows(2).all(|w| w[1] <= w[0]);
        let cell = r.cells.iter().find(|c| c.family == fam && c.snr_db == top).unwrap();
        for rate in cell.per_seed_miss_rate.iter().flatten() {
            top_rate = top_rate.max(*rate);
        }
    }
    let mut overlap = true;
    for &s in snrs {
        let cis: Vec<(f64, f64)> = r.cells.iter().filter(|c| c.snr_db == s).map(|c| c.pooled_ci95.unwrap()).collect();
        for a in &cis {
            for b in &cis {
                overlap &= a.0 <= b.1 && b.0 <= a.1;
            }
        }
    }
    outcome(
        monotone && top_rate < 1e-2 && overlap && within(elapsed, 1800),
        format!(
            "monotone {monotone}, worst per-seed miss rate at {top} dB {top_rate:.1e} (1000 trials each), 95% intervals overlap {overlap}; {elapsed:.1?}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("line-supported self-ambiguity", criterion_1),
        ("TD/DD ambiguity equivalence", criterion_2),
        ("cross-ambiguity flatness", criterion_3),
        ("DZT unitarity and round trip", criterion_4),
        ("spread-pilot lattice support", criterion_5),
        ("mutual unbiasedness", criterion_6),
        ("CAZAC properties", criterion_7),
        ("Gauss-sum magnitude", criterion_8),
        ("ISAC turbo trend", criterion_9),
        ("RACH detection", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("acceptance {:>2} {status}  {name}: {}", i + 1, o.detail);
        failed += !o.passed as usize;
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
