//! Files written for a run: manifest JSON plus CSV tables.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::geometry::TriangleRegion;
use crate::optimizer::Algorithm;
use crate::pipeline::RunManifest;
use crate::prism::ZetaRow;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TABLE_FILE: &str = "triangles.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const LAYERS_FILE: &str = "layers.csv";
pub const ZETA_FILE: &str = "zeta.csv";

/// Name of the per-triangle GCR column: `v1` for the dual swarm, `v2` for
/// the continuous swarm.
pub fn gcr_column(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Slbc => "v1",
        Algorithm::Abc => "v2",
        Algorithm::Es => "v_es",
        Algorithm::Downtilt => "v_baseline",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn writer(path: &Path) -> io::Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_writer(fs::File::create(path)?))
}

/// Writes every report file into `out_dir` (created if missing) and returns
/// their paths.
pub fn export_reports(manifest: &RunManifest, out_dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let paths: Vec<PathBuf> = [MANIFEST_FILE, TABLE_FILE, CONVERGENCE_FILE, LAYERS_FILE, ZETA_FILE]
        .iter()
        .map(|f| out_dir.join(f))
        .collect();
    fs::write(&paths[0], manifest.to_json())?;

    // b in km^2, as in the usual coverage tables
    let mut w = writer(&paths[1])?;
    w.write_record(["triangle", "stations", "a1", "a2", "a3", "b", gcr_column(manifest.algorithm), "cor", "status"])?;
    for t in &manifest.triangles {
        let ids = t.vertex_ids.map(|i| i.to_string()).join("-");
        w.write_record([
            t.triangle_id.to_string(),
            ids,
            t.angles_deg[0].to_string(),
            t.angles_deg[1].to_string(),
            t.angles_deg[2].to_string(),
            (t.area_m2 / 1e6).to_string(),
            opt(t.gcr),
            opt(t.cor),
            serde_json::to_value(t.status).unwrap().as_str().unwrap_or_default().to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = writer(&paths[2])?;
    w.write_record(["triangle", "iteration", "best_gcr", "best_cor"])?;
    for t in &manifest.triangles {
        for p in t.solution.iter().flat_map(|s| &s.trace) {
            w.write_record([t.triangle_id.to_string(), p.iteration.to_string(), opt(p.best_gcr), opt(p.best_cor)])?;
        }
    }
    w.flush()?;

    let mut w = writer(&paths[3])?;
    w.write_record(["z_low_m", "z_high_m", "n_total", "n_covered", "gcr"])?;
    for l in &manifest.layers {
        w.write_record([
            l.z_low.to_string(),
            l.z_high.to_string(),
            l.n_total.to_string(),
            l.n_covered.to_string(),
            l.gcr.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = writer(&paths[4])?;
    w.write_record(["triangle", "longest_edge_m", "area_m2", "zeta"])?;
    for t in &manifest.triangles {
        w.write_record([
            t.triangle_id.to_string(),
            t.longest_edge_m.to_string(),
            t.area_m2.to_string(),
            t.overlap_ratio.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(paths)
}

#[derive(Serialize)]
struct TriangleJson {
    vertex_ids: [u32; 3],
    angles_deg: [f64; 3],
    area_m2: f64,
}

/// `[{vertex_ids, angles_deg, area_m2}, ...]`.
pub fn triangulation_json(regions: &[TriangleRegion]) -> String {
    let rows: Vec<TriangleJson> = regions
        .iter()
        .map(|r| TriangleJson { vertex_ids: r.vertex_ids, angles_deg: r.inner_angles, area_m2: r.area })
        .collect();
    serde_json::to_string_pretty(&rows).expect("triangulation serializes")
}

/// Structure-level overlap table (analytic and optional Monte-Carlo columns).
pub fn write_zeta_table(rows: &[ZetaRow], path: &Path) -> io::Result<()> {
    let mut w = writer(path)?;
    w.write_record(["structure", "r_over_h", "analytic", "monte_carlo", "std_error"])?;
    for r in rows {
        w.write_record([
            r.kind.name().to_string(),
            r.r_over_h.to_string(),
            r.analytic.to_string(),
            opt(r.monte_carlo),
            opt(r.std_error),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{TriangleRecord, TriangleStatus, TriangulationMode};
    use crate::scenario::Scenario;

    fn record(id: usize, angles: [f64; 3], b_km2: f64, gcr: f64) -> TriangleRecord {
        TriangleRecord {
            triangle_id: id,
            vertex_ids: [id as u32, id as u32 + 1, id as u32 + 2],
            angles_deg: angles,
            area_m2: b_km2 * 1e6,
            longest_edge_m: 1000.0,
            overlap_ratio: 0.0,
            voxel_count: 0,
            status: TriangleStatus::Solved,
            gcr: Some(gcr),
            cor: Some(0.0),
            feasible: Some(true),
            best_cor: None,
            error: None,
            solution: None,
        }
    }

    fn read(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
        let mut r = csv::Reader::from_path(path).unwrap();
        let head = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
        (head, rows)
    }

    #[test]
    fn empty_manifest_gives_headers_only() {
        let m = RunManifest::assemble(&Scenario::default(), Algorithm::Slbc, TriangulationMode::Delaunay, vec![]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = export_reports(&m, dir.path()).unwrap();
        for p in &paths[1..] {
            let (head, rows) = read(p);
            assert!(!head.is_empty());
            assert!(rows.is_empty());
        }
    }

    #[test]
    fn fixture_table_recomputes_weighted_mean() {
        let rows = [
            ([5.0, 171.0, 5.0], 0.61, 0.51),
            ([140.0, 15.0, 25.0], 0.67, 0.85),
            ([25.0, 121.0, 34.0], 0.66, 0.80),
            ([34.0, 35.0, 111.0], 2.22, 0.88),
            ([27.0, 54.0, 99.0], 0.97, 0.9),
            ([23.0, 82.0, 75.0], 1.36, 0.91),
            ([70.0, 74.0, 36.0], 1.56, 0.87),
            ([65.0, 75.0, 40.0], 4.62, 0.87),
            ([61.0, 66.0, 53.0], 2.5, 0.9),
        ];
        let recs = rows.iter().enumerate().map(|(i, (a, b, v))| record(i + 1, *a, *b, *v)).collect();
        let m = RunManifest::assemble(&Scenario::default(), Algorithm::Slbc, TriangulationMode::Delaunay, recs).unwrap();
        let dir = tempfile::tempdir().unwrap();
        export_reports(&m, dir.path()).unwrap();
        let (head, body) = read(&dir.path().join(TABLE_FILE));
        assert_eq!(&head[..7], &["triangle", "stations", "a1", "a2", "a3", "b", "v1"]);
        let (mut num, mut den) = (0.0, 0.0);
        for r in &body {
            let b: f64 = r[5].parse().unwrap();
            let v: f64 = r[6].parse().unwrap();
            num += b * v;
            den += b;
        }
        assert!((num / den - 0.86).abs() < 0.005);
        assert!((m.average_gcr().unwrap() - num / den).abs() < 1e-12);
    }

    #[test]
    fn unwritable_directory() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        fs::write(&file, "x").unwrap();
        let m = RunManifest::assemble(&Scenario::default(), Algorithm::Es, TriangulationMode::Random, vec![]).unwrap();
        assert!(export_reports(&m, &file.join("sub")).is_err());
    }

    #[test]
    fn triangulation_json_schema() {
        let s = [
            crate::geometry::BaseStation::new(1, 0.0, 0.0, 0.0),
            crate::geometry::BaseStation::new(2, 3.0, 0.0, 0.0),
            crate::geometry::BaseStation::new(3, 0.0, 4.0, 0.0),
        ];
        let t = crate::geometry::delaunay_triangulate(&s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&triangulation_json(&t)).unwrap();
        assert_eq!(v[0]["area_m2"], 6.0);
        assert_eq!(v[0]["vertex_ids"].as_array().unwrap().len(), 3);
        assert_eq!(v[0]["angles_deg"].as_array().unwrap().len(), 3);
    }
}
