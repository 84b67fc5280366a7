//! Whole-network run: triangulate, voxelize each prism, solve each
//! cooperation set independently, aggregate.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coverage::{evaluate_streaming, LayerCoverage, NetworkReport, StationBeam, TriangleGcr};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{build_voxel_grid, delaunay_triangulate, random_triangulate, TriangleRegion, VoxelGrid};
use crate::optimizer::{
    abc_optimize, downtilt_baseline, exhaustive_search, slbc_optimize, Algorithm, CooperationSet, Solution,
};
use crate::prism::region_overlap_ratio;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TriangulationMode {
    Delaunay,
    Random,
}

/// Cooperation sets of the scenario's stations. Random mode draws from the
/// scenario seed.
pub fn triangulate(scenario: &Scenario, mode: TriangulationMode) -> Result<Vec<TriangleRegion>> {
    match mode {
        TriangulationMode::Delaunay => delaunay_triangulate(&scenario.stations),
        TriangulationMode::Random => random_triangulate(&scenario.stations, scenario.seed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleStatus {
    Solved,
    Infeasible,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleRecord {
    pub triangle_id: usize,
    pub vertex_ids: [u32; 3],
    pub angles_deg: [f64; 3],
    pub area_m2: f64,
    pub longest_edge_m: f64,
    /// Longest-edge overlap ratio of the triangle.
    pub overlap_ratio: f64,
    pub voxel_count: usize,
    pub status: TriangleStatus,
    pub gcr: Option<f64>,
    pub cor: Option<f64>,
    pub feasible: Option<bool>,
    /// Lowest overlap ratio seen by a search that found nothing feasible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_cor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<Solution>,
}

impl TriangleRecord {
    /// Skeleton record for `region` with no outcome yet.
    pub fn pending(triangle_id: usize, region: &TriangleRegion) -> Self {
        Self {
            triangle_id,
            vertex_ids: region.vertex_ids,
            angles_deg: region.inner_angles,
            area_m2: region.area,
            longest_edge_m: region.longest_edge,
            overlap_ratio: region_overlap_ratio(region).unwrap_or(f64::NAN),
            voxel_count: 0,
            status: TriangleStatus::Failed,
            gcr: None,
            cor: None,
            feasible: None,
            best_cor: None,
            error: None,
            solution: None,
        }
    }

    fn settle(&mut self, outcome: Result<Solution>) {
        match outcome {
            Ok(sol) => {
                self.status = TriangleStatus::Solved;
                self.gcr = Some(sol.gcr());
                self.cor = Some(sol.cor());
                self.feasible = Some(sol.feasible);
                self.solution = Some(sol);
            }
            Err(e) => {
                self.status = match e {
                    Error::InfeasibleRun { best_cor } => {
                        self.best_cor = best_cor;
                        TriangleStatus::Infeasible
                    }
                    _ => TriangleStatus::Failed,
                };
                self.error = Some(e.to_string());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
    pub triangles_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit: String,
    pub version: String,
    /// SHA-256 of the scenario's canonical JSON.
    pub scenario_hash: String,
    pub algorithm: Algorithm,
    pub triangulation: TriangulationMode,
    pub seed: u64,
    pub triangles: Vec<TriangleRecord>,
    /// `None` when no triangle produced a GCR.
    pub network: Option<NetworkReport>,
    /// Per-layer coverage summed over the solved triangles.
    pub layers: Vec<LayerCoverage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// JSON without wall-clock timings; identical across repeated runs.
    pub fn canonical_json(&self) -> String {
        let mut m = self.clone();
        m.timings = None;
        m.to_json()
    }

    pub fn average_gcr(&self) -> Option<f64> {
        self.network.as_ref().map(|n| n.average_gcr)
    }

    pub fn count(&self, status: TriangleStatus) -> usize {
        self.triangles.iter().filter(|t| t.status == status).count()
    }

    /// Builds the aggregate fields from `triangles`.
    pub fn assemble(
        scenario: &Scenario,
        algorithm: Algorithm,
        triangulation: TriangulationMode,
        triangles: Vec<TriangleRecord>,
    ) -> Result<Self> {
        let rows: Vec<TriangleGcr> = triangles
            .iter()
            .filter_map(|t| {
                t.gcr.map(|gcr| TriangleGcr { triangle_id: t.triangle_id, area_m2: t.area_m2, gcr })
            })
            .collect();
        let network = if rows.is_empty() { None } else { Some(NetworkReport::new(rows)?) };
        let mut layers: Vec<LayerCoverage> = Vec::new();
        for sol in triangles.iter().filter_map(|t| t.solution.as_ref()) {
            if layers.is_empty() {
                layers = sol.report.per_layer.iter().map(|l| LayerCoverage { n_total: 0, n_covered: 0, gcr: 0.0, ..*l }).collect();
            }
            for (acc, l) in layers.iter_mut().zip(&sol.report.per_layer) {
                acc.n_total += l.n_total;
                acc.n_covered += l.n_covered;
            }
        }
        for l in &mut layers {
            l.gcr = if l.n_total == 0 { 0.0 } else { l.n_covered as f64 / l.n_total as f64 };
        }
        Ok(Self {
            toolkit: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario_hash: scenario_hash(scenario),
            algorithm,
            triangulation,
            seed: scenario.seed,
            triangles,
            network,
            layers,
            timings: None,
        })
    }
}

pub fn scenario_hash(scenario: &Scenario) -> String {
    Sha256::digest(scenario.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Seed of the `index`-th triangle's search, derived from the scenario seed.
pub fn triangle_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub algorithm: Algorithm,
    pub triangulation: TriangulationMode,
    pub exec: Execution,
    /// Evaluate the overlap ratio of all returned beams over the union of
    /// prisms after the per-triangle runs.
    pub network_cor: bool,
}

impl RunOptions {
    pub fn new(algorithm: Algorithm, triangulation: TriangulationMode) -> Self {
        Self { algorithm, triangulation, exec: Execution::Parallel, network_cor: true }
    }
}

pub fn run_network(scenario: &Scenario, algorithm: Algorithm, triangulation: TriangulationMode) -> Result<RunManifest> {
    run_network_with(scenario, &RunOptions::new(algorithm, triangulation))
}

/// Solves one cooperation set with the scenario's settings.
pub fn solve_triangle(
    scenario: &Scenario,
    region: &TriangleRegion,
    grid: &VoxelGrid,
    algorithm: Algorithm,
    seed: u64,
    exec: Execution,
) -> Result<Solution> {
    let model = scenario.coverage_model()?;
    let stations = region.vertex_ids.map(|id| {
        *scenario.stations.iter().find(|s| s.id == id).expect("triangle vertices come from the scenario")
    });
    let set = CooperationSet::new(region, stations, grid, &model, exec)?;
    let config = crate::optimizer::SwarmConfig { seed, ..scenario.swarm_config(exec) };
    match algorithm {
        Algorithm::Slbc => slbc_optimize(&set, &scenario.codebook, &scenario.tilt_box, &config),
        Algorithm::Abc => abc_optimize(&set, &scenario.beamwidth_box, &scenario.tilt_box, &config),
        Algorithm::Es => exhaustive_search(
            &set,
            &scenario.discretization()?,
            u128::from(scenario.exhaustive.budget),
            scenario.overlap_cap,
            exec,
        ),
        Algorithm::Downtilt => downtilt_baseline(&set, &scenario.codebook, &scenario.baseline, scenario.overlap_cap, exec),
    }
}

pub fn run_network_with(scenario: &Scenario, options: &RunOptions) -> Result<RunManifest> {
    let start = Instant::now();
    scenario.validate().map_err(|e| Error::invalid("scenario", e.to_string()))?;
    let regions = triangulate(scenario, options.triangulation)?;
    let exec = options.exec;
    let work: Vec<(usize, TriangleRegion)> = regions.into_iter().enumerate().collect();
    let outcomes = exec.map(&work, |(i, region)| {
        let t0 = Instant::now();
        let mut rec = TriangleRecord::pending(i + 1, region);
        let outcome = scenario.prism(region.clone()).and_then(|p| build_voxel_grid(&p, scenario.voxel_resolution_m));
        let outcome = outcome.and_then(|grid| {
            rec.voxel_count = grid.count();
            solve_triangle(scenario, region, &grid, options.algorithm, triangle_seed(scenario.seed, *i), exec)
        });
        rec.settle(outcome);
        (rec, t0.elapsed().as_secs_f64() * 1e3)
    });
    let (records, triangles_ms): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let mut manifest = RunManifest::assemble(scenario, options.algorithm, options.triangulation, records)?;
    if options.network_cor {
        if let Some(cor) = network_cor(scenario, &manifest, &work, exec)? {
            if let Some(n) = manifest.network.as_mut() {
                n.network_cor = Some(cor);
            }
        }
    }
    manifest.timings = Some(Timings { total_ms: start.elapsed().as_secs_f64() * 1e3, triangles_ms });
    Ok(manifest)
}

/// Overlap ratio of every returned beam over the union of the solved prisms.
fn network_cor(
    scenario: &Scenario,
    manifest: &RunManifest,
    work: &[(usize, TriangleRegion)],
    exec: Execution,
) -> Result<Option<f64>> {
    let mut grids = Vec::new();
    let mut beams = Vec::new();
    for ((_, region), rec) in work.iter().zip(&manifest.triangles) {
        let Some(sol) = &rec.solution else { continue };
        grids.push(build_voxel_grid(&scenario.prism(region.clone())?, scenario.voxel_resolution_m)?);
        for b in &sol.beams {
            let station = *scenario.stations.iter().find(|s| s.id == b.station_id).expect("known station");
            beams.push(StationBeam { station, beam: b.beam });
        }
    }
    if grids.is_empty() {
        return Ok(None);
    }
    let refs: Vec<&VoxelGrid> = grids.iter().collect();
    let union = VoxelGrid::concat(&refs)?;
    Ok(Some(evaluate_streaming(&union, &beams, &scenario.coverage_model()?, exec)?.cor))
}
