//! End-to-end acceptance checks at full scale. Each test prints one
//! `PASS`/`FAIL` line before asserting.

use std::collections::BTreeMap;
use std::fs;

use serde_json::Value;
use telegraph_core::fokker_planck::gap_bound;
use telegraph_core::integrate::{coupled_gap_study, deterministic_relaxation, simulate_ensemble, weak_measurement_ensemble, Reducer};
use telegraph_core::{ModelParams, WeakMeasParams};
use telegraph_validation::{num as f, telegraph, verdict};

fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn criterion_01_occupancy_ratio_tracks_gt() {
    let dir = tempfile::tempdir().unwrap();
    let r = telegraph(
        &["ratio-sweep", "--gt-list", "0.25,0.5,1,2,4", "--T", "1", "--alpha", "10", "--dt", "1e-4", "--delta", "0.05", "--steps", "20000000"],
        dir.path(),
    );
    let rows = r["summary"]["rows"].as_array().unwrap();
    let mut pass = rows.len() == 5;
    let mut parts = Vec::new();
    for row in rows {
        let err = f(&row["relative_error"]);
        pass &= err.abs() < 0.15;
        parts.push(format!(
            "GT {} -> {:.4} ({:+.1}%)",
            row["gt"],
            f(&row["measured_ratio"]),
            100.0 * err
        ));
    }
    verdict(1, pass, parts.join(", "));
}

#[test]
fn criterion_02_deterministic_limit() {
    let dir = tempfile::tempdir().unwrap();
    let params = ModelParams::new(0.6, 1.0, 0.0, 1e-4).unwrap();
    let mut worst_path = 0.0f64;
    let mut worst_end = 0.0f64;
    for u0 in ["1", "-1"] {
        telegraph(
            &["simulate", "--G", "0.6", "--T", "1", "--alpha", "0", "--dt", "1e-4", "--steps", "200000", "--stride", "100", "--u0", u0],
            dir.path(),
        );
        let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
        let start: f64 = u0.parse().unwrap();
        let mut last = f64::NAN;
        for line in text.lines().skip(1) {
            let (t, u) = line.split_once(',').unwrap();
            let (t, u): (f64, f64) = (t.parse().unwrap(), u.parse().unwrap());
            let exact = deterministic_relaxation(&params, start, t).unwrap();
            worst_path = worst_path.max((u - exact).abs());
            last = u;
        }
        worst_end = worst_end.max((last + 0.25).abs());
    }
    let pass = worst_end < 1e-6 && worst_path < 1e-4;
    verdict(
        2,
        pass,
        format!("|u(20) + 0.25| = {worst_end:.2e}, max deviation from the exponential = {worst_path:.2e}"),
    );
}

#[test]
fn criterion_03_born_rule_collapse() {
    let dir = tempfile::tempdir().unwrap();
    let r = telegraph(
        &["born", "--u0-list", "-0.5,0,0.5", "--n-traj", "10000", "--alpha", "10", "--steps", "20000"],
        dir.path(),
    );
    let rows = r["summary"]["rows"].as_array().unwrap();
    let mut pass = rows.len() == 3;
    let mut parts = Vec::new();
    for row in rows {
        pass &= row["within"] == true;
        parts.push(format!(
            "u0 {}: {:.4} vs {:.4} ± {:.4}",
            row["u0"],
            f(&row["fraction_positive"]),
            f(&row["expected"]),
            3.0 * f(&row["sigma"])
        ));
    }
    verdict(3, pass, parts.join(", "));
}

#[test]
fn criterion_04_martingale() {
    let p = ModelParams::pure_noise(10.0, 1e-4).unwrap();
    let u0 = 0.3;
    let ens = simulate_ensemble(&p, u0, 100_000, 10_000, 4, Reducer::Terminal).unwrap();
    let (mean, se) = (ens.terminal_mean(), ens.terminal_std_error());
    let pass = (mean - u0).abs() < 3.0 * se;
    verdict(4, pass, format!("final mean {mean:.4} vs {u0} (3 SE = {:.4})", 3.0 * se));
}

#[test]
fn criterion_05_stationary_density() {
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in ["0.05", "0.5", "10"] {
        let r = telegraph(
            &["density", "--G", "0.6", "--T", "1", "--alpha", alpha, "--n-grid", "4096", "--steps", "10000000"],
            dir.path(),
        );
        let s = &r["summary"];
        let (integral, residual, tv) = (f(&s["integral"]), f(&s["residual"]), f(&s["total_variation"]));
        let maxima: Vec<f64> = s["local_maxima"].as_array().unwrap().iter().map(f).collect();
        let shape = match alpha {
            "10" => maxima.len() == 2 && (maxima[0] + 1.0).abs() < 0.1 && (maxima[1] - 1.0).abs() < 0.1,
            "0.05" => maxima.len() == 1 && (f(&s["mode"]) + 0.25).abs() < 0.02,
            _ => true,
        };
        let ok = (integral - 1.0).abs() < 1e-6 && residual < 1e-3 && tv < 0.05 && shape;
        pass &= ok;
        parts.push(format!(
            "alpha {alpha}: integral-1 {:.1e}, residual {residual:.1e}, TV {tv:.4}, maxima {maxima:.3?}",
            integral - 1.0
        ));
    }
    verdict(5, pass, parts.join("; "));
}

#[test]
fn criterion_06_exit_times() {
    let dir = tempfile::tempdir().unwrap();
    let r = telegraph(
        &["exit-time", "--alpha", "10", "--delta", "0.05", "--G", "0.6", "--T", "1", "--n-traj", "10000", "--batches", "10"],
        dir.path(),
    );
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("exit_time.json")).unwrap()).unwrap();
    assert_eq!(doc, r["summary"]);
    let (lower, upper) = (&doc["lower"], &doc["upper"]);
    let enough = lower["n_samples"].as_u64() >= Some(10_000) && upper["n_samples"].as_u64() >= Some(10_000);
    let lower_ok = (f(&lower["mean"]) / (0.05 / 1.2) - 1.0).abs() < 0.20;
    let bound_ok = lower["batch_means"].as_array().unwrap().iter().all(|m| f(m) <= 0.05 / 0.6);
    let upper_ok = (f(&upper["mean"]) / 0.025 - 1.0).abs() < 0.20;
    let ratio = f(&doc["ratio"]["monte_carlo"]);
    let ratio_ok = (ratio / 0.6 - 1.0).abs() < 0.25;
    verdict(
        6,
        enough && lower_ok && bound_ok && upper_ok && ratio_ok,
        format!(
            "lower {:.5} (analytic 0.041667, bound 0.08333 in all batches: {bound_ok}), upper {:.5} (0.025), ratio {ratio:.4} (0.6)",
            f(&lower["mean"]),
            f(&upper["mean"])
        ),
    );
}

#[test]
fn criterion_07_approximation_gap() {
    let p = ModelParams::new(0.6, 1.0, 10.0, 1e-4).unwrap();
    let mut gaps = BTreeMap::new();
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, delta) in [0.05, 0.025].into_iter().enumerate() {
        let s = coupled_gap_study(&p, 0.0, delta, 1_000_000, 10_000, 70 + k as u64).unwrap();
        let bound = gap_bound(delta, 0.6, 1.0, 10.0, s.eval_time).unwrap();
        pass &= s.n_pairs - s.n_censored >= 10_000 && s.mean_square_gap < bound;
        parts.push(format!(
            "delta {delta}: gap {:.3e} at t = {:.4} (bound {bound:.3e})",
            s.mean_square_gap, s.eval_time
        ));
        gaps.insert(k, s.mean_square_gap);
    }
    let shrink = gaps[&1] / gaps[&0];
    pass &= shrink <= 0.25;
    parts.push(format!("halving ratio {shrink:.4}"));
    verdict(7, pass, parts.join(", "));
}

#[test]
fn criterion_08_occupancy_grows_with_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let r = telegraph(
        &["alpha-sweep", "--alpha-list", "0.05,0.5,10", "--G", "0.6", "--T", "1", "--steps", "20000000"],
        dir.path(),
    );
    let occ: Vec<f64> = r["summary"]["rows"].as_array().unwrap().iter().map(|row| f(&row["occupancy"])).collect();
    let increasing = occ.windows(2).all(|w| w[1] > w[0]);
    let strong = occ[2] > 0.9;
    verdict(
        8,
        increasing && strong,
        format!("occupancy {occ:.4?}; increasing: {increasing}, alpha 10 above 0.9: {strong}"),
    );
}

#[test]
fn criterion_09_weak_measurement_follows_the_born_rule() {
    let wp = WeakMeasParams::new(0.01, 0.0, 0.0).unwrap();
    let n = 10_000;
    let finals = weak_measurement_ensemble(&wp, 1.0, [0.0, 0.0, 0.5], 20_000, 1e-4, n, 9).unwrap();
    let up = finals.iter().filter(|s| s[2] > 0.0).count() as f64 / n as f64;
    let sigma = binomial_sigma(0.75, n);
    verdict(9, (up - 0.75).abs() < 3.0 * sigma, format!("fraction {up:.4} vs 0.75 ± {:.4}", 3.0 * sigma));
}

#[test]
fn criterion_10_files_do_not_depend_on_worker_count() {
    let runs: &[&[&str]] = &[
        &["simulate", "--steps", "100000", "--smooth-width", "0.01"],
        &["ratio-sweep", "--gt-list", "0.5,1,2", "--steps", "200000"],
        &["alpha-sweep", "--steps", "200000"],
        &["density", "--alpha", "0.5", "--steps", "200000"],
        &["exit-time", "--n-traj", "2000", "--batches", "4"],
        &["born", "--n-traj", "2000", "--steps", "5000"],
        &["born", "--n-traj", "500", "--steps", "500", "--format", "json"],
    ];
    let mut differing = Vec::new();
    let mut compared = 0;
    for args in runs {
        let dirs: Vec<_> = ["1", "4"]
            .iter()
            .map(|threads| {
                let dir = tempfile::tempdir().unwrap();
                let mut a = args.to_vec();
                a.extend(["--threads", threads]);
                telegraph(&a, dir.path());
                dir
            })
            .collect();
        let mut names: Vec<_> = fs::read_dir(dirs[0].path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            compared += 1;
            let a = fs::read(dirs[0].path().join(&name)).unwrap();
            let b = fs::read(dirs[1].path().join(&name)).unwrap_or_default();
            if a != b {
                differing.push(format!("{} {}", args[0], name.to_string_lossy()));
            }
        }
    }
    verdict(
        10,
        differing.is_empty(),
        format!("{compared} files compared between 1 and 4 workers, differing: {differing:?}"),
    );
}
