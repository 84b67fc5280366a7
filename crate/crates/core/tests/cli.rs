use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn plan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2a-plan")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// Four stations, coarse voxels and a tiny swarm so runs take milliseconds.
fn write_scenario(dir: &Path, extra: Value) -> String {
    let mut s = json!({
        "stations": [
            {"id": 1, "x": 0.0, "y": 0.0, "z": 25.0},
            {"id": 2, "x": 900.0, "y": 0.0, "z": 25.0},
            {"id": 3, "x": 450.0, "y": 780.0, "z": 25.0},
            {"id": 4, "x": 1300.0, "y": 700.0, "z": 25.0}
        ],
        "h_max_m": 150.0,
        "voxel_resolution_m": 50.0,
        "tau_dbm": -80.0,
        "overlap_cap": 0.05,
        "optimizer": {"particles": 4, "iterations": 5}
    });
    for (k, v) in extra.as_object().unwrap() {
        s[k] = v.clone();
    }
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(&s).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn triangulate_writes_the_region_list() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(dir.path(), json!({}));
    let out_dir = dir.path().join("out");
    let out = plan(&["triangulate", "--scenario", &sc, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("triangulation.json")).unwrap()).unwrap();
    let tris = v.as_array().unwrap();
    assert_eq!(tris.len(), 2);
    for t in tris {
        assert_eq!(t["vertex_ids"].as_array().unwrap().len(), 3);
        let sum: f64 = t["angles_deg"].as_array().unwrap().iter().map(|a| a.as_f64().unwrap()).sum();
        assert!((sum - 180.0).abs() < 1e-9);
        assert!(t["area_m2"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn optimize_exports_reports_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(dir.path(), json!({}));
    let mut manifests = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = plan(&["optimize", "--scenario", &sc, "--seed", "5", "--out", out_dir.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        for f in ["manifest.json", "triangles.csv", "convergence.csv", "layers.csv"] {
            assert!(out_dir.join(f).exists(), "{f}");
        }
        let mut m: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
        m.as_object_mut().unwrap().remove("timings");
        manifests.push(m);
    }
    assert_eq!(manifests[0], manifests[1]);
    assert_eq!(manifests[0]["seed"], 5);

    // re-export from the manifest alone
    let again = dir.path().join("again");
    let manifest = dir.path().join("a").join("manifest.json");
    let out = plan(&["report", "--out", again.to_str().unwrap(), "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        std::fs::read_to_string(again.join("triangles.csv")).unwrap(),
        std::fs::read_to_string(dir.path().join("a").join("triangles.csv")).unwrap()
    );
}

#[test]
fn every_algorithm_runs() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        json!({"exhaustive": {"pattern_ids": [1, 2], "tilts_deg": [-10.0, 10.0], "budget": 100}}),
    );
    for alg in ["slbc", "abc", "es", "downtilt"] {
        let out_dir = dir.path().join(alg);
        let out = plan(&[
            "optimize", "--scenario", &sc, "--algorithm", alg, "--triangulation", "random", "--overlap-cap", "1",
            "--out", out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{alg}: {}", String::from_utf8_lossy(&out.stderr));
        let m: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["algorithm"], alg);
        assert_eq!(m["triangulation"], "random");
    }
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(dir.path(), json!({"overlap_cap": 2.0}));
    let out = plan(&["optimize", "--scenario", &sc]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("overlap_cap"));

    let sc = write_scenario(dir.path(), json!({}));
    let out = plan(&["optimize", "--scenario", &sc, "--particles", "0"]);
    assert_eq!(code(&out), 2);

    std::fs::write(dir.path().join("broken.json"), "{\"stations\": [").unwrap();
    let out = plan(&["triangulate", "--scenario", dir.path().join("broken.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn infeasible_runs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(dir.path(), json!({"tau_dbm": -250.0, "overlap_cap": 0.0}));
    let out = plan(&["optimize", "--scenario", &sc, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    // the manifest still records the attempt
    assert!(dir.path().join("o").join("manifest.json").exists());
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = plan(&["triangulate", "--scenario", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&out), 4);

    let sc = write_scenario(dir.path(), json!({}));
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = plan(&["optimize", "--scenario", &sc, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn prisms_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = plan(&["prisms", "--samples", "20000", "--seed", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("prism_overlap.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 12);
}
