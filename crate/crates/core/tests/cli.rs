//! End-to-end runs of the `geomean` binary: exit codes and determinism.

use geomean::frechet::{Ball, DatasetFile};
use geomean::manifolds::ManifoldSpace;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn geomean(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomean"))
        .args(args)
        .env_remove("GEOMEAN_SEED")
        .output()
        .unwrap()
}

fn sphere_dataset(dir: &Path, rho: f64) -> String {
    let s = ManifoldSpace::sphere(2, 1.0).unwrap();
    let pts = [(rho * 0.9, 0.0), (-rho * 0.5, rho * 0.7), (0.0, -rho * 0.95)]
        .iter()
        .map(|&(a, b)| s.exp_map(&s.to_tangent(&s.origin(), &nalgebra::DVector::from_vec(vec![0.0, a, b]))))
        .collect();
    let f = DatasetFile { space: s, points: pts, weights: None, ball: Some(Ball::new(s.origin(), rho)) };
    let path = dir.join(format!("sphere_{rho}.json"));
    f.save(&path).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn mean_conjecture_resolves_unit_step() {
    let dir = tempfile::tempdir().unwrap();
    let data = sphere_dataset(dir.path(), 0.4 * PI);
    let out = dir.path().join("run");
    let o = geomean(&["mean", &data, "--policy", "conjecture", "--p", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["t"], 1.0);
    assert!(out.join("trace.csv").exists());
}

#[test]
fn mean_rejects_ball_beyond_convexity_radius() {
    let dir = tempfile::tempdir().unwrap();
    let data = sphere_dataset(dir.path(), 0.6 * PI);
    let o = geomean(&["mean", &data, "--policy", "constant", "--t", "0.5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("r_cx"));
}

#[test]
fn mean_parse_error_and_iteration_limit() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let o = geomean(&["mean", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let data = sphere_dataset(dir.path(), 0.4 * PI);
    let o = geomean(&["mean", &data, "--policy", "constant", "--t", "0.01", "--max-iters", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn mean_cut_locus_abort() {
    let dir = tempfile::tempdir().unwrap();
    let s = ManifoldSpace::circle(1.0).unwrap();
    let th = 2.0 * PI / 5.0;
    let f = DatasetFile {
        space: s,
        points: vec![s.circle_point(th).unwrap(), s.circle_point(-th).unwrap()],
        weights: Some(vec![0.1, 0.9]),
        ball: Some(Ball::new(s.circle_point(0.0).unwrap(), th * (1.0 + 1e-12))),
    };
    let path = dir.path().join("circle.json");
    f.save(&path).unwrap();
    // From theta = 0 the gradient is 0.32 pi, so t = 1.875 lands on -3pi/5,
    // the antipode of x_1.
    let o = geomean(&["mean", path.to_str().unwrap(), "--policy", "constant", "--t", "1.875", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn euclidean_one_iteration_noted() {
    let dir = tempfile::tempdir().unwrap();
    let s = ManifoldSpace::euclidean(2).unwrap();
    let f = DatasetFile {
        space: s,
        points: vec![s.point(&[0.0, 0.0]).unwrap(), s.point(&[3.0, 1.0]).unwrap(), s.point(&[-1.0, 2.0]).unwrap()],
        weights: None,
        ball: None,
    };
    let path = dir.path().join("flat.json");
    f.save(&path).unwrap();
    let o = geomean(&["mean", path.to_str().unwrap(), "--policy", "constant", "--t", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.contains("converged in 1 iteration"), "{s}");
}

#[test]
fn sphere_configs_are_byte_identical_per_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = geomean(&["sphere-configs", "--seed", "5", "--rho", "0.35,0.47", "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["sphere_configs.csv", "sphere_cross_rho0.4700pi.csv", "sphere_pair_rho0.3500pi.csv", "sphere_configs.svg"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_env_overrides_flag() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let run = |d: &Path, seed: &str, env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_geomean"));
        c.args(["sphere-configs", "--seed", seed, "--rho", "0.4", "--out", d.to_str().unwrap()]);
        match env {
            Some(v) => c.env("GEOMEAN_SEED", v),
            None => c.env_remove("GEOMEAN_SEED"),
        };
        assert!(c.status().unwrap().success());
        std::fs::read(d.join("sphere_configs.csv")).unwrap()
    };
    let with_env = run(dirs[0].path(), "1", Some("9"));
    let flag_nine = run(dirs[1].path(), "9", None);
    let flag_one = run(dirs[2].path(), "1", None);
    assert_eq!(with_env, flag_nine);
    assert_ne!(with_env, flag_one);
}

#[test]
fn circle_example_and_table_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = geomean(&["circle-example", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("circle_f2.svg").exists());
    let o = geomean(&["stepsize", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("stepsize_table.csv").exists());
    let o = geomean(&["stepsize", "--space", "hyperbolic", "--rho", "1.0471975511965976", "--policy", "conjecture"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.4632"));
}

#[test]
fn check_subcommands() {
    for suite in ["comparison", "tethering", "hull"] {
        let o = geomean(&["check", suite, "--space", "sphere", "--trials", "50", "--seed", "3"]);
        assert_eq!(o.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&o.stdout));
    }
}
