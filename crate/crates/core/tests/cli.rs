// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use polyorb::analysis::distance_to_ellipse;
use polyorb::io;
use serde_json::Value;
use tempfile::TempDir;

fn polyorb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyorb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn polyorb_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyorb"))
        .args(args)
        .env("POLYORB_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn construct_regular_dodecagon() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("poly.json");
    let o = polyorb(&[
        "construct", "--curve", "circle:1", "--center", "0,0,0", "--u0", "0", "--s1", "0.5176",
        "--out", path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let orbit = io::polygon_from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    // 0.5176 is 2 sin(pi/12) to four digits, so vertices sit near the 12-gon
    assert_eq!(orbit.len(), 13);
    for (k, v) in orbit.vertices().iter().enumerate().take(12) {
        let a = TAU * k as f64 / 12.0;
        assert!((v.point.x - a.cos()).hypot(v.point.y - a.sin()) < 1e-3, "vertex {k}");
    }
    let exact = 2.0 * (PI / 12.0).sin();
    let o = polyorb(&[
        "construct", "--curve", "circle:1", "--s1", &format!("{exact:?}"), "--out", path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let orbit = io::polygon_from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(orbit.termination().as_str(), "ReachedEndpoint");
    for (k, v) in orbit.vertices().iter().enumerate() {
        let a = TAU * k as f64 / 12.0;
        assert!((v.point.x - a.cos()).hypot(v.point.y - a.sin()) < 1e-12, "vertex {k}");
    }
}

#[test]
fn construct_missing_s1_is_usage_error() {
    let o = polyorb(&["construct", "--curve", "circle:1"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("--s1") && err.contains("Usage"), "{err}");
}

#[test]
fn construct_focal_ellipse_satisfies_conic() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("kepler.csv");
    let o = polyorb(&[
        "construct", "--curve", "ellipse-focus:1,0.5", "--u0", "0", "--s1", "0.05", "--max-steps", "200",
        "--out", path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let orbit = io::polygon_from_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(orbit.len() > 50);
    // r + e x = a (1 - e^2) for a focus at the origin and perihelion on +x
    for v in orbit.vertices() {
        let r = v.point.norm();
        assert!((r + 0.5 * v.point.x - 0.75).abs() < 1e-10);
    }
}

#[test]
fn construct_tangency_exit_code() {
    // the radius from (2, 0) grazes the unit circle at u = pi/3
    let o = polyorb(&[
        "construct", "--curve", "circle:1", "--center", "2,0,0", "--u0", &format!("{:?}", PI / 3.0),
        "--s1", "0.1",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn integrate_hooke_ellipse() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("hooke.csv");
    let o = polyorb(&[
        "integrate", "--law", "linear:1", "--r0", "1,0,0", "--v0", "0,0.5,0", "--T", "6.2832", "--n",
        "1000", "--out", path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("j,t,x,y,z,vx,vy,vz,Lx,Ly,Lz,area2_step"));
    let tr = io::trajectory_from_csv(&text).unwrap();
    assert_eq!(tr.samples.len(), 1001);
    let worst = tr
        .positions()
        .map(|p| distance_to_ellipse(1.0, 0.5, p.x, p.y))
        .fold(0.0, f64::max);
    assert!(worst < 2e-3, "{worst}");
    assert!(tr.diagnostics.max_angular_momentum_drift < 1e-13);
}

#[test]
fn integrate_usage_and_singularity() {
    let o = polyorb(&[
        "integrate", "--law", "linear:1", "--r0", "1,0,0", "--v0", "0,1,0", "--T", "1", "--n", "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = polyorb(&[
        "integrate", "--law", "inverse-square:1", "--r0", "0.001,0,0", "--v0", "0,0,0", "--T", "1",
        "--n", "1000",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("singularity"));
}

#[test]
fn converge_ratio_example() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ratio.json");
    let o = polyorb(&[
        "converge", "ratio", "--curve", "circle:1", "--u", "0", "--n", "16,32,64,128", "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = String::from_utf8(o.stdout).unwrap();
    assert!(summary.contains("slope") && summary.contains("extrapolated"), "{summary}");
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    for key in ["n", "ratio", "extrapolated", "fit_order", "residual"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let x = v["extrapolated"].as_f64().unwrap();
    assert!((x - 2.0).abs() < 1e-3, "{x}");
}

#[test]
fn converge_chords_example() {
    let o = polyorb(&[
        "converge", "chords", "--curve", "circle:1", "--L", "6.2832", "--n", "16,32,64,128",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = io::report_from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!((r.log_log_slope.unwrap() + 1.0).abs() < 1e-3);
}

#[test]
fn converge_rejects_short_sweep() {
    let o = polyorb(&["converge", "chords", "--curve", "circle:1", "--L", "1", "--n", "16,32"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn converge_other_studies() {
    for args in [
        vec!["converge", "coverage", "--curve", "circle:1", "--L", "6.283185307179586", "--n", "16,32,64"],
        vec!["converge", "bound", "--curve", "ellipse-focus:1,0.5", "--L", "5", "--n", "16,32,64"],
        vec![
            "converge", "order", "--law", "inverse-square:1", "--r0", "0.5,0,0", "--v0", "0,1.7320508075688772,0",
            "--T", "6.283185307179586", "--n", "100,200,400,1600",
        ],
        vec![
            "converge", "order", "--law", "linear:1", "--r0", "1,0,0", "--v0", "0,0.5,0", "--T",
            "6.283185307179586", "--n", "200,400,800", "--ellipse", "1,0.5", "--report",
        ],
    ] {
        let o = polyorb(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        let r = io::report_from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
        assert_eq!(r.metric.len(), r.n_values.len());
    }
}

#[test]
fn measure_on_circle() {
    let o = polyorb(&["measure", "--curve", "circle:1", "--u", "1", "--s1", "0.001"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["measure_p6"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!((v["ratio"].as_f64().unwrap() - 2.0).abs() < 1e-5);
}

#[test]
fn outputs_are_deterministic_and_thread_independent() {
    let dir = TempDir::new().unwrap();
    let mut files = Vec::new();
    for (k, threads) in ["0", "1", "4", "4"].iter().enumerate() {
        let out = dir.path().join(format!("r{k}.csv"));
        let o = polyorb_env(
            &[
                "converge", "ratio", "--curve", "ellipse-focus:1,0.6", "--u", "1.3", "--n",
                "16,32,64,128,256", "--out", path_str(&out),
            ],
            threads,
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        files.push(fs::read(&out).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn files_round_trip_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["construct", "--curve", "ellipse-center:2,1", "--u0", "0.3", "--s1", "0.2"], "poly"),
        (
            vec!["integrate", "--law", "power:1.5,-1.2", "--r0", "1,0.2,0.1", "--v0", "0,1,0.3", "--T", "3", "--n", "300"],
            "traj",
        ),
        (vec!["converge", "chords", "--curve", "ellipse-focus:1,0.3", "--L", "3", "--n", "16,32,64"], "report"),
    ];
    for (args, kind) in cases {
        for format in ["json", "csv"] {
            let out = dir.path().join(format!("{kind}.{format}"));
            let mut full = args.clone();
            full.extend(["--out", path_str(&out)]);
            let o = polyorb(&full);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            let text = fs::read_to_string(&out).unwrap();
            let again = match (kind, format) {
                ("poly", "json") => io::polygon_to_json(&io::polygon_from_json(&text).unwrap()),
                ("poly", _) => io::polygon_to_csv(&io::polygon_from_csv(&text).unwrap()),
                ("traj", "json") => io::trajectory_to_json(&io::trajectory_from_json(&text).unwrap()),
                ("traj", _) => io::trajectory_to_csv(&io::trajectory_from_csv(&text).unwrap()),
                (_, "json") => io::report_to_json(&io::report_from_json(&text).unwrap()),
                _ => io::report_to_csv(&io::report_from_csv(&text).unwrap()),
            }
            .unwrap();
            assert_eq!(again, text, "{kind}.{format}");
        }
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"curve": "circle:1", "center": [0, 0, 0], "s1": 0.5, "max_steps": 3, "format": "csv"}"#,
    )
    .unwrap();
    let o = polyorb(&["construct", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let orbit = io::polygon_from_csv(&text).unwrap();
    assert_eq!(orbit.chords().len(), 3);
    assert!((orbit.chords()[0] - 0.5).abs() < 1e-12);

    let o = polyorb(&["construct", "--config", path_str(&cfg), "--s1", "0.25", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let orbit = io::polygon_from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!((orbit.chords()[0] - 0.25).abs() < 1e-12);

    fs::write(&cfg, r#"{"curve": "circle:1", "bogus": 1}"#).unwrap();
    let o = polyorb(&["construct", "--config", path_str(&cfg), "--s1", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn custom_curve_from_csv() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("circle.csv");
    let mut text = String::from("u,x,y,z\n");
    for k in 0..=2000 {
        let u = 2.0 * TAU * k as f64 / 2000.0;
        text += &format!("{u:?},{:?},{:?},0\n", u.cos(), u.sin());
    }
    fs::write(&data, text).unwrap();
    let spec = format!("custom:{}", path_str(&data));
    let o = polyorb(&["construct", "--curve", &spec, "--s1", &format!("{:?}", 2.0 * (PI / 12.0).sin()), "--max-steps", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let orbit = io::polygon_from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(orbit.len(), 13);
    let last = orbit.vertices()[12].point;
    assert!((last.x - 1.0).hypot(last.y) < 1e-6);
}

#[test]
fn plot_data_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("poly.json");
    let o = polyorb(&[
        "construct", "--curve", "circle:1", "--s1", "0.3", "--out", path_str(&out), "--emit-plot-data",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let vertices = fs::read_to_string(dir.path().join("poly_vertices.dat")).unwrap();
    assert!(vertices.starts_with("# x y z\n"));
    assert!(dir.path().join("poly_curve.dat").exists());

    let o = polyorb(&["construct", "--curve", "circle:1", "--s1", "0.3", "--emit-plot-data"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_specs_are_usage_errors() {
    for args in [
        vec!["construct", "--curve", "square:1", "--s1", "0.1"],
        vec!["construct", "--curve", "circle:1", "--s1", "0.1", "--center", "1,2"],
        vec!["integrate", "--law", "gravity:1", "--r0", "1,0,0", "--v0", "0,1,0", "--T", "1", "--n", "10"],
        vec!["converge", "sideways", "--n", "1,2,3"],
        vec!["construct", "--curve", "circle:1", "--s1", "0.1", "--format", "xml"],
    ] {
        assert_eq!(polyorb(&args).status.code(), Some(1), "{args:?}");
    }
}
