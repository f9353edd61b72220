#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use solidkit::io::to_off;
use solidkit::{shapes, ConvexPolytope, Mesh, Point3};

pub const BLESS_ENV: &str = "SOLIDKIT_BLESS";

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_solidkit"))
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/golden")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn report(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("report is not JSON ({e}): {}", self.stdout))
    }

    pub fn diagnostic(&self) -> Value {
        let last = self.stderr.lines().last().unwrap_or_default();
        serde_json::from_str(last).unwrap_or_else(|e| panic!("diagnostic is not JSON ({e}): {}", self.stderr))
    }
}

pub fn run_in(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(bin())
        .args(args)
        .current_dir(dir)
        .env_remove("SOLIDKIT_EPS")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// The report with run-dependent fields removed.
pub fn stable_report(mut r: Value) -> Value {
    if let Some(o) = r.as_object_mut() {
        o.remove("timing");
    }
    r
}

#[derive(Debug, Deserialize)]
pub struct GoldenCase {
    pub name: String,
    pub args: Vec<String>,
    pub exit_code: i32,
    #[serde(default)]
    pub error: Option<String>,
    pub outputs: Vec<String>,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let text = fs::read_to_string(golden_dir().join("commands.json")).expect("golden command list");
    serde_json::from_str(&text).expect("golden command list parses")
}

/// Copies the golden inputs into `dir`.
pub fn stage_inputs(dir: &Path) {
    for e in fs::read_dir(golden_dir().join("inputs")).expect("golden inputs") {
        let e = e.unwrap();
        fs::copy(e.path(), dir.join(e.file_name())).unwrap();
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn join(parts: &[Mesh]) -> Mesh {
    let (mut v, mut t) = (Vec::new(), Vec::new());
    for m in parts {
        let k = v.len();
        v.extend_from_slice(m.vertices());
        t.extend(m.triangles().iter().map(|&[a, b, c]| [a + k, b + k, c + k]));
    }
    Mesh::new(v, t).unwrap()
}

fn tetra(p: Point3, lift: f64) -> Mesh {
    let q = |x, y, z| p + Point3::new(x, y, z);
    ConvexPolytope::from_points(&[p, q(1.0, lift, 0.0), q(0.0, lift, 1.0), q(1.0, lift, 1.0)])
        .unwrap()
        .to_mesh()
        .unwrap()
}

fn square_layer(name: &str, crs: &str, x0: f64, key: &str, value: &str) -> Value {
    let ring = [[x0, 0.0], [x0 + 1.0, 0.0], [x0 + 1.0, 1.0], [x0, 1.0], [x0, 0.0]];
    json!({
        "name": name,
        "crs": crs,
        "features": [{
            "type": "Feature",
            "geometry": { "type": "Polygon", "coordinates": [ring] },
            "properties": { key: value }
        }]
    })
}

/// Writes the golden input files.
pub fn write_inputs(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    let w = |name: &str, text: String| fs::write(dir.join(name), text).unwrap();
    let pretty = |v: Value| serde_json::to_string_pretty(&v).unwrap() + "\n";

    let a = shapes::unit_cube();
    let b = shapes::cuboid(Point3::new(0.5, 0.0, 0.0), Point3::new(1.5, 1.0, 1.0));
    w("a.off", to_off(&a));
    w("b.off", to_off(&b));
    w("diag.off", to_off(&a.translated(Point3::new(0.5, 0.5, 0.5))));
    w("far.off", to_off(&a.translated(Point3::new(5.0, 0.0, 0.0))));
    w("sphere_r1.off", to_off(&shapes::icosphere(Point3::ORIGIN, 1.0, 3)));
    w("l_prism.off", to_off(&shapes::l_prism()));
    w("staircase3.off", to_off(&shapes::staircase(3)));
    w(
        "torus.off",
        to_off(&shapes::torus(3.0, 1.0, 12, 6).translated(Point3::new(10.0, 0.0, 0.0))),
    );
    w(
        "small_cube.off",
        to_off(&shapes::cuboid(Point3::ORIGIN, Point3::new(0.5, 0.5, 0.5))),
    );
    let mut open = a.clone();
    open = Mesh::new(open.vertices().to_vec(), open.triangles()[2..].to_vec()).unwrap();
    w("open.off", to_off(&open));
    w("garbage.off", "OFF\n3 1 0\n0 0 0\n1 0\n".into());
    // Two corners 0.015 apart and a third between them: with eps 0.01 the
    // third is within tolerance of both.
    let crowded = [0.0, 0.015, 0.0075]
        .iter()
        .enumerate()
        .map(|(k, &x)| tetra(Point3::new(x, 0.0, 0.0), 5.0 * (k as f64 + 1.0)))
        .collect::<Vec<_>>();
    w("crowded.off", to_off(&join(&crowded)));

    let mut r = rng(2024);
    let pts: Vec<[f64; 3]> = (0..24)
        .map(|_| [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)])
        .collect();
    w("points.json", pretty(json!({ "points": pts })));
    w("flat.json", pretty(json!([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]])));

    w(
        "zones.json",
        pretty(square_layer("zones", "local", 0.0, "zone", "residential")),
    );
    w(
        "flood.json",
        pretty(square_layer("flood", "local", 0.5, "risk", "high")),
    );
    w(
        "geographic.json",
        pretty(square_layer("parcels", "EPSG:4326", 0.5, "owner", "city")),
    );
    w(
        "rule.json",
        pretty(json!({
            "cases": [
                { "covered_by": ["zones", "flood"], "class": "at-risk" },
                { "when": { "zones.zone": "residential" }, "class": "safe" }
            ],
            "default": "unzoned"
        })),
    );
    w(
        "partial_rule.json",
        pretty(json!({ "cases": [{ "covered_by": ["zones"], "class": "zoned" }] })),
    );

    w(
        "scene.json",
        pretty(json!({ "entities": [
            { "id": "well", "kind": "point", "geometry": [0.5, 0.5, 2.0] },
            { "id": "road", "kind": "polyline", "geometry": [[0, 0, 0], [2, 0, 0], [2, 1.5, 0.5]],
              "attributes": { "class": "primary" } },
            { "id": "block", "kind": "body", "file": "a.off" }
        ]})),
    );
    w(
        "bodies.json",
        pretty(json!({ "entities": [
            { "id": "a", "kind": "body", "file": "a.off" },
            { "id": "b", "kind": "body", "file": "b.off" },
            { "id": "far", "kind": "body", "file": "far.off" },
            { "id": "slab", "kind": "body", "geometry": {
                "vertices": [[4, 0, 0], [6, 0, 0], [6, 1, 0], [4, 1, 0], [4, 0, 0.5], [6, 0, 0.5], [6, 1, 0.5], [4, 1, 0.5]],
                "faces": [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]]
            }}
        ]})),
    );
}

fn expected_dir(case: &GoldenCase) -> PathBuf {
    golden_dir().join("expected").join(&case.name)
}

/// Runs one golden case in `dir` (which holds the staged inputs) and checks
/// the exit code, error kind, outputs and report against the recorded ones.
pub fn check_case(case: &GoldenCase, dir: &Path) -> Result<(), String> {
    let args: Vec<&str> = case.args.iter().map(String::as_str).collect();
    let run = run_in(dir, &args);
    if run.code != case.exit_code {
        return Err(format!(
            "{}: exit {} (expected {}): {}",
            case.name, run.code, case.exit_code, run.stderr
        ));
    }
    if let Some(kind) = &case.error {
        let d = run.diagnostic();
        if d["error"] != kind.as_str() || d["exit_code"] != case.exit_code {
            return Err(format!("{}: diagnostic {d}", case.name));
        }
    }
    if case.exit_code != 0 {
        // Nothing may be left behind by a failed run.
        let mut staged: Vec<_> = fs::read_dir(golden_dir().join("inputs"))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        let mut present: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name()).collect();
        staged.sort();
        present.sort();
        if staged != present {
            return Err(format!("{}: failed run left files behind", case.name));
        }
        return Ok(());
    }
    let expected = expected_dir(case);
    for out in &case.outputs {
        let got = fs::read(dir.join(out)).map_err(|e| format!("{}: {out}: {e}", case.name))?;
        let want = fs::read(expected.join(out)).map_err(|e| format!("{}: expected {out}: {e}", case.name))?;
        if got != want {
            return Err(format!("{}: {out} differs from the golden file", case.name));
        }
    }
    if case.error.is_none() && case.exit_code == 0 {
        let want: Value = serde_json::from_str(&fs::read_to_string(expected.join("report.json")).unwrap()).unwrap();
        if stable_report(run.report()) != stable_report(want) {
            return Err(format!("{}: report differs from the golden report", case.name));
        }
    }
    Ok(())
}

/// Regenerates inputs and expected outputs for every golden case.
pub fn bless() {
    let root = golden_dir();
    let _ = fs::remove_dir_all(root.join("inputs"));
    let _ = fs::remove_dir_all(root.join("expected"));
    write_inputs(&root.join("inputs"));
    for case in golden_cases() {
        if case.exit_code != 0 {
            continue;
        }
        let dir = tempfile::tempdir().unwrap();
        stage_inputs(dir.path());
        let args: Vec<&str> = case.args.iter().map(String::as_str).collect();
        let run = run_in(dir.path(), &args);
        assert_eq!(run.code, 0, "{}: {}", case.name, run.stderr);
        let expected = expected_dir(&case);
        for out in &case.outputs {
            let dst = expected.join(out);
            fs::create_dir_all(dst.parent().unwrap()).unwrap();
            fs::copy(dir.path().join(out), dst).unwrap();
        }
        fs::create_dir_all(&expected).unwrap();
        let report = serde_json::to_string_pretty(&stable_report(run.report())).unwrap() + "\n";
        fs::write(expected.join("report.json"), report).unwrap();
    }
}
