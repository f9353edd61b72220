mod common;

use std::fs;
use std::path::Path;

use common::*;
use solidkit::io::{parse_off, read_mesh};
use solidkit::{mesh_area, mesh_volume, Tolerance};

#[test]
fn golden_files() {
    if std::env::var_os(BLESS_ENV).is_some() {
        bless();
    }
    let mut failures = Vec::new();
    for case in golden_cases() {
        let dir = tempfile::tempdir().unwrap();
        stage_inputs(dir.path());
        if let Err(e) = check_case(&case, dir.path()) {
            failures.push(e);
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn report_metrics_match_written_files() {
    let dir = tempfile::tempdir().unwrap();
    stage_inputs(dir.path());
    let run = run_in(
        dir.path(),
        &[
            "boolean",
            "--op",
            "union",
            "a.off",
            "b.off",
            "l_prism.off",
            "-o",
            "u.off",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = run.report();
    let out = &report["outputs"][0];
    let tol = Tolerance::default();
    let (m, _) = read_mesh(&dir.path().join("u.off"), &tol).unwrap();
    assert_eq!(out["metrics"]["volume"].as_f64().unwrap(), mesh_volume(&m).unwrap());
    assert_eq!(out["metrics"]["area"].as_f64().unwrap(), mesh_area(&m, &tol).area);
    assert_eq!(
        out["metrics"]["triangles"].as_u64().unwrap() as usize,
        m.triangles().len()
    );
    let bytes = fs::read(dir.path().join("u.off")).unwrap();
    assert_eq!(out["bytes"].as_u64().unwrap() as usize, bytes.len());
    assert_eq!(report["inputs"].as_array().unwrap().len(), 3);
}

#[test]
fn spec_examples() {
    let dir = tempfile::tempdir().unwrap();
    stage_inputs(dir.path());
    let meet = run_in(
        dir.path(),
        &["boolean", "--op", "meet", "a.off", "b.off", "-o", "out.off"],
    );
    assert_eq!(meet.code, 0);
    assert!((meet.report()["metrics"]["volume"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let buf = run_in(
        dir.path(),
        &["buffer", "--distance", "0.5", "sphere_r1.off", "-o", "buf.off"],
    );
    assert_eq!(buf.code, 0, "{}", buf.stderr);
    let v = buf.report()["metrics"]["volume"].as_f64().unwrap();
    let want = 4.0 / 3.0 * std::f64::consts::PI * 1.5f64.powi(3);
    assert!((v - want).abs() <= 0.03 * want, "{v} vs {want}");

    let hull = run_in(dir.path(), &["hull", "flat.json", "-o", "h.off"]);
    assert_ne!(hull.code, 0);
    assert_eq!(hull.diagnostic()["error"], "degenerate");
    assert!(!dir.path().join("h.off").exists());
}

#[test]
fn tolerance_precedence() {
    let dir = tempfile::tempdir().unwrap();
    stage_inputs(dir.path());
    let eps = |args: &[&str], env: Option<&str>| {
        let mut c = std::process::Command::new(bin());
        c.args(args).current_dir(dir.path()).env_remove("SOLIDKIT_EPS");
        if let Some(e) = env {
            c.env("SOLIDKIT_EPS", e);
        }
        let out = c.output().unwrap();
        let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        (
            r["parameters"]["eps"].as_f64().unwrap(),
            r["parameters"]["eps_source"].as_str().unwrap().to_string(),
        )
    };
    let (e, s) = eps(&["validate", "a.off"], None);
    assert_eq!(s, "scene");
    assert!((e - 1e-9 * 3f64.sqrt()).abs() < 1e-24);
    assert_eq!(eps(&["validate", "a.off"], Some("1e-6")), (1e-6, "env".into()));
    assert_eq!(
        eps(&["validate", "a.off", "--eps", "1e-7"], Some("1e-6")),
        (1e-7, "flag".into())
    );

    let out = std::process::Command::new(bin())
        .args(["validate", "a.off"])
        .current_dir(dir.path())
        .env("SOLIDKIT_EPS", "tiny")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(7));
}

#[test]
fn report_file_and_obj_output() {
    let dir = tempfile::tempdir().unwrap();
    stage_inputs(dir.path());
    let run = run_in(
        dir.path(),
        &[
            "minkowski",
            "a.off",
            "small_cube.off",
            "-o",
            "sum.obj",
            "--report",
            "run.json",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(r["command"], "minkowski");
    assert_eq!(r["metrics"]["method"], "convex");
    assert!((r["metrics"]["volume"].as_f64().unwrap() - 3.375).abs() < 1e-12);
    assert!(fs::read_to_string(dir.path().join("sum.obj"))
        .unwrap()
        .starts_with("v "));
}

#[test]
fn buffer_entity_kinds() {
    let dir = tempfile::tempdir().unwrap();
    stage_inputs(dir.path());
    for (id, kind) in [("well", "point"), ("road", "polyline"), ("block", "body")] {
        let out = format!("{id}.off");
        let run = run_in(
            dir.path(),
            &[
                "buffer",
                "--distance",
                "0.25",
                "--lod",
                "2",
                "--entity",
                id,
                "scene.json",
                "-o",
                &out,
            ],
        );
        assert_eq!(run.code, 0, "{}", run.stderr);
        assert_eq!(run.report()["metrics"]["entity_kind"], kind);
        assert!(parse_off(&fs::read_to_string(dir.path().join(&out)).unwrap()).is_ok());
    }
    // An open mesh file is buffered as a planar face.
    let square = "OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n";
    fs::write(dir.path().join("square.off"), square).unwrap();
    let run = run_in(
        dir.path(),
        &[
            "buffer",
            "--distance",
            "0.25",
            "--lod",
            "2",
            "square.off",
            "-o",
            "sq.off",
        ],
    );
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.report()["metrics"]["entity_kind"], "face");
    let run = run_in(
        dir.path(),
        &["buffer", "--distance", "0.25", "scene.json", "-o", "x.off"],
    );
    assert_eq!(run.code, 2);
}

#[test]
fn decompose_directory_is_not_created_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    stage_inputs(dir.path());
    let run = run_in(
        dir.path(),
        &["decompose", "l_prism.off", "--max-pieces", "1", "-o", "pieces"],
    );
    assert_eq!(run.code, 9);
    assert!(!Path::new(&dir.path().join("pieces")).exists());
    let run = run_in(dir.path(), &["decompose", "l_prism.off", "-o", "pieces"]);
    assert_eq!(run.code, 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("pieces/manifest.json")).unwrap()).unwrap();
    let total: f64 = manifest["pieces"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["volume"].as_f64().unwrap())
        .sum();
    assert!((total - 3.0).abs() < 1e-12);
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["--help"]).code, 0);
    assert_eq!(run_in(dir.path(), &["--version"]).code, 0);
    assert_eq!(run_in(dir.path(), &[]).code, 2);
}
