use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cpm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpm"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("cpm runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// A scratch directory holding the bundled fixtures.
fn fixture_dir() -> (TempDir, PathBuf) {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("fixtures");
    let o = run(cpm().args(["fixtures", "--out"]).arg(&dir));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (tmp, dir)
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("bad JSON ({e}):\n{text}"))
}

fn read_json(path: &Path) -> Value {
    json(&std::fs::read_to_string(path).unwrap())
}

#[test]
fn validate_reports_counts() {
    let (_tmp, dir) = fixture_dir();
    let o = run(cpm().arg("validate").arg(dir.join("tetrahedron.cpmesh")));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("N=4 E=6 F=4 chi=2 ok\n"), "{}", stdout(&o));
}

#[test]
fn validate_finds_fixtures_by_name() {
    let (_tmp, dir) = fixture_dir();
    let o = run(cpm().args(["validate", "genus2", "--euclidean"]).env("CPM_FIXTURES", &dir));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("chi=-2 ok"), "{out}");
    assert!(out.contains("existence condition: holds"), "{out}");

    let o = run(cpm().args(["validate", "obstructed_octahedron", "--euclidean"]).env("CPM_FIXTURES", &dir));
    assert!(stdout(&o).contains("existence condition: violated"), "{}", stdout(&o));
}

#[test]
fn validate_rejects_weight_out_of_range() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.cpmesh");
    std::fs::write(
        &path,
        "cpmesh 1\n4 4 2\nf 0 1 2\nf 0 2 3\nf 0 3 1\nf 1 3 2\nw 0 1.6\n",
    )
    .unwrap();
    let o = run(cpm().arg("validate").arg(&path));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("weight out of range"), "{}", stdout(&o));
}

#[test]
fn validate_reports_syntax_line() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.cpmesh");
    std::fs::write(&path, "cpmesh 1\n4 4 2\nf 0 1 2\nf 0 2 x\n").unwrap();
    let o = run(cpm().arg("validate").arg(&path));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("line 4"), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_64() {
    let (_tmp, dir) = fixture_dir();
    let mesh = dir.join("tetrahedron.cpmesh");
    let o = run(cpm().arg("flow").arg(&mesh).args(["--p", "1.0"]));
    assert_eq!(o.status.code(), Some(64));
    let o = run(cpm().arg("flow").arg(&mesh).arg("--no-such-flag"));
    assert_eq!(o.status.code(), Some(64));
    let o = run(cpm().arg("flow").arg(&mesh).args(["--flow", "ricci-normalized", "--background", "hyperbolic"]));
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn flow_converges_on_perturbed_tetrahedron() {
    let (tmp, dir) = fixture_dir();
    let out = tmp.path().join("run");
    let o = run(cpm()
        .arg("flow")
        .arg(dir.join("tetrahedron.cpmesh"))
        .arg("--radii")
        .arg(dir.join("tetrahedron_perturbed.radii"))
        .args(["--flow", "p-calabi", "--p", "2", "--background", "euclidean", "--out"])
        .arg(&out));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read_json(&out.join("summary.json"));
    assert_eq!(summary["exit"], "converged");
    for k in floats(&summary["final_curvatures"]) {
        assert!((k - PI).abs() < 1e-8, "K = {k}");
    }
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,u_0,u_1,u_2,u_3,K_0,K_1,K_2,K_3,F,E,drift\n"));
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["normalized_initial_product"], true);
    assert_eq!(manifest["mesh_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn hyperbolic_ricci_flow_matches_solver() {
    let (tmp, dir) = fixture_dir();
    let mesh = dir.join("genus2.cpmesh");
    let out = tmp.path().join("ricci");
    let o = run(cpm()
        .arg("flow")
        .arg(&mesh)
        .args(["--flow", "ricci", "--background", "hyperbolic", "--out"])
        .arg(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let flow_radii = floats(&read_json(&out.join("summary.json"))["final_radii"]);

    let o = run(cpm().arg("solve").arg(&mesh).args(["--background", "hyperbolic"]));
    assert_eq!(o.status.code(), Some(0));
    let solved = json(&stdout(&o));
    let solve_radii = floats(&solved["solution_radii"]);
    for (a, b) in flow_radii.iter().zip(&solve_radii) {
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }
}

#[test]
fn horizon_exit_code() {
    let (tmp, dir) = fixture_dir();
    let o = run(cpm()
        .arg("flow")
        .arg(dir.join("octahedron.cpmesh"))
        .args(["--p", "3", "--t-max", "0.01", "--out"])
        .arg(tmp.path().join("h")));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&stdout(&o))["exit"], "horizonReached");
}

#[test]
fn blow_up_exit_code() {
    // no zero-curvature hyperbolic packing exists on a sphere
    let (tmp, dir) = fixture_dir();
    let o = run(cpm()
        .arg("flow")
        .arg(dir.join("tetrahedron.cpmesh"))
        .args(["--flow", "ricci", "--background", "hyperbolic", "--t-max", "1e6", "--out"])
        .arg(tmp.path().join("b")));
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}

#[test]
fn solve_examples() {
    let (_tmp, dir) = fixture_dir();
    let o = run(cpm().arg("solve").arg(dir.join("tetrahedron.cpmesh")));
    assert_eq!(o.status.code(), Some(0));
    for r in floats(&json(&stdout(&o))["solution_radii"]) {
        assert!((r - 1.0).abs() < 1e-8);
    }

    let o = run(cpm().arg("solve").arg(dir.join("genus2.cpmesh")).args(["--background", "hyperbolic"]));
    assert_eq!(o.status.code(), Some(0));
    let v = json(&stdout(&o));
    assert_eq!(v["status"], "found");
    assert!(v["max_curvature_error"].as_f64().unwrap() < 1e-8);

    let o = run(cpm().arg("solve").arg(dir.join("icosahedron.cpmesh")).args(["--init", "random", "--seed", "7"]));
    assert_eq!(o.status.code(), Some(0));
    let r = floats(&json(&stdout(&o))["solution_radii"]);
    let product: f64 = r.iter().product();
    assert!((product - 1.0).abs() < 1e-9);
    for x in &r {
        assert!((x - r[0]).abs() < 1e-6);
    }
}

#[test]
fn solve_reports_divergence() {
    let (_tmp, dir) = fixture_dir();
    let o = run(cpm().arg("solve").arg(dir.join("obstructed_octahedron.cpmesh")));
    assert_eq!(o.status.code(), Some(4));
    assert_ne!(json(&stdout(&o))["status"], "found");
}

#[test]
fn energy_examples() {
    let (_tmp, dir) = fixture_dir();
    let tet = dir.join("tetrahedron.cpmesh");
    let v = json(&stdout(&run(cpm().arg("energy").arg(&tet))));
    assert!(v["E_p"].as_f64().unwrap().abs() < 1e-24);
    assert!(v["gauss_bonnet_residual"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(floats(&v["K"]).len(), 4);

    let v = json(&stdout(&run(cpm()
        .arg("energy")
        .arg(&tet)
        .arg("--radii")
        .arg(dir.join("tetrahedron_perturbed.radii")))));
    assert!(v["E_p"].as_f64().unwrap() > 0.0);
    assert!(v["dirichlet_e"].as_f64().unwrap() > 0.0);

    let v = json(&stdout(&run(cpm().arg("energy").arg(dir.join("genus2.cpmesh")).args(["--background", "hyperbolic"]))));
    assert!(v["gauss_bonnet_residual"].as_f64().unwrap().abs() < 1e-9);
    assert!((v["k_av"].as_f64().unwrap() + 2.0 * PI / 5.0).abs() < 1e-15);
}

#[test]
fn replay_is_byte_identical() {
    let (_tmp, dir) = fixture_dir();
    let mesh = dir.join("icosahedron.cpmesh");
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let work = TempDir::new().unwrap();
        let o = run(cpm()
            .current_dir(work.path())
            .arg("flow")
            .arg(&mesh)
            .args(["--p", "1.5", "--random", "--seed", "3", "--out", "run"]));
        assert_eq!(o.status.code(), Some(0));
        let read = |f: &str| std::fs::read(work.path().join("run").join(f)).unwrap();
        let mut summary = json(&String::from_utf8(read("summary.json")).unwrap());
        summary.as_object_mut().unwrap().remove("wall_time_seconds");
        outputs.push((read("trajectory.csv"), read("manifest.json"), read("final.radii"), summary));
    }
    assert!(outputs[0] == outputs[1]);
}

#[test]
fn sweep_is_independent_of_job_count() {
    let (tmp, dir) = fixture_dir();
    let mesh = dir.join("octahedron.cpmesh");
    let mut listings = Vec::new();
    for jobs in ["1", "3"] {
        let out = tmp.path().join(format!("sweep{jobs}"));
        let o = run(cpm()
            .arg("sweep")
            .arg(&mesh)
            .args(["--p", "1.5,2,3", "--runs", "2", "--t-max", "5", "--jobs", jobs, "--out"])
            .arg(&out));
        assert!(matches!(o.status.code(), Some(0) | Some(2)), "{}", String::from_utf8_lossy(&o.stderr));
        let index = read_json(&out.join("sweep.json"));
        assert_eq!(index.as_array().unwrap().len(), 6);
        let mut dirs: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()).collect();
        dirs.sort();
        let csvs: Vec<Vec<u8>> = dirs.iter().map(|d| std::fs::read(d.join("trajectory.csv")).unwrap()).collect();
        listings.push(csvs);
    }
    assert_eq!(listings[0].len(), 6);
    assert!(listings[0] == listings[1]);
}

#[test]
fn fixtures_round_trip_through_validate() {
    let (_tmp, dir) = fixture_dir();
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cpmesh") {
            count += 1;
            let o = run(cpm().arg("validate").arg(&path));
            assert_eq!(o.status.code(), Some(0), "{}", path.display());
        }
    }
    assert_eq!(count, 7);
}
