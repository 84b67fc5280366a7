//! Beam-parameter search for one three-station cooperation set: the dual
//! swarm (pattern ids + tilts), the nine-dimensional continuous swarm, an
//! exhaustive enumerator and the fixed down-tilt baseline.

mod baseline;
mod continuous;
mod dual;
mod exhaustive;
pub mod swarm;

pub use baseline::{downtilt_baseline, BaselineSettings};
pub use continuous::{abc_optimize, BeamwidthBox};
pub use dual::slbc_optimize;
pub use exhaustive::{exhaustive_search, Discretization};
pub use swarm::{
    continuous_step, discrete_step, feasible_best, global_best, inertia_weight, update_continuous, update_discrete, Particle,
    Step, SwarmConfig,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::{CoverageModel, CoverageProblem, CoverageReport, StationBeam};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{BaseStation, TriangleRegion, VoxelGrid};
use crate::rf::BeamConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Slbc,
    Abc,
    Es,
    Downtilt,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Slbc => "slbc",
            Self::Abc => "abc",
            Self::Es => "es",
            Self::Downtilt => "downtilt",
        }
    }
}

/// Beam shape without azimuth; the azimuth is fixed by the cooperation set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamShape {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_id: Option<u32>,
    pub h_hpbw_deg: f64,
    pub v_hpbw_deg: f64,
    pub tilt_deg: f64,
}

/// Closed tilt interval in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltBox {
    pub min_deg: f64,
    pub max_deg: f64,
}

impl Default for TiltBox {
    fn default() -> Self {
        Self { min_deg: -90.0, max_deg: 90.0 }
    }
}

impl TiltBox {
    pub fn new(min_deg: f64, max_deg: f64) -> Result<Self> {
        let b = Self { min_deg, max_deg };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_deg.is_finite() && self.max_deg.is_finite())
            || self.min_deg < -90.0
            || self.max_deg > 90.0
            || self.min_deg > self.max_deg
        {
            return Err(Error::invalid("tilt_box", "need -90 <= min_deg <= max_deg <= 90"));
        }
        Ok(())
    }

    fn bounds(&self) -> (f64, f64) {
        (self.min_deg, self.max_deg)
    }
}

/// The three stations of one triangle, each beam facing the triangle
/// centroid, with link quantities precomputed over the prism grid.
///
/// Optional background beams (e.g. neighbouring sets' fixed beams over
/// neighbouring prisms) take part in every evaluation; they make the overlap
/// constraint see leakage out of this set's prism.
#[derive(Debug, Clone)]
pub struct CooperationSet {
    stations: [BaseStation; 3],
    azimuths_deg: [f64; 3],
    background: Vec<BeamConfig>,
    problem: CoverageProblem,
    grid_voxels: usize,
}

/// Heading (degrees, counter-clockwise from +x) from `station` to the centroid.
pub fn facing_azimuth(station: &BaseStation, region: &TriangleRegion) -> f64 {
    let [cx, cy] = region.centroid();
    let a = (cy - station.position.y).atan2(cx - station.position.x).to_degrees();
    a.rem_euclid(360.0)
}

impl CooperationSet {
    /// `stations` must be the three vertices of `region` (any order).
    pub fn new(
        region: &TriangleRegion,
        stations: [BaseStation; 3],
        grid: &VoxelGrid,
        model: &CoverageModel,
        exec: Execution,
    ) -> Result<Self> {
        Self::with_background(region, stations, grid, model, &[], exec)
    }

    pub fn with_background(
        region: &TriangleRegion,
        stations: [BaseStation; 3],
        grid: &VoxelGrid,
        model: &CoverageModel,
        background: &[StationBeam],
        exec: Execution,
    ) -> Result<Self> {
        let mut ids: Vec<u32> = stations.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        if ids != region.key() {
            return Err(Error::invalid(
                "stations",
                format!("stations {ids:?} are not the vertices {:?} of the region", region.key()),
            ));
        }
        let azimuths_deg = stations.map(|s| facing_azimuth(&s, region));
        let mut slots: Vec<BaseStation> = stations.to_vec();
        let mut azimuths: Vec<f64> = azimuths_deg.to_vec();
        for b in background {
            slots.push(b.station);
            azimuths.push(b.beam.azimuth_deg());
        }
        let problem = CoverageProblem::new(grid, &slots, &azimuths, model, exec)?;
        Ok(Self {
            stations,
            azimuths_deg,
            background: background.iter().map(|b| b.beam).collect(),
            problem,
            grid_voxels: grid.count(),
        })
    }

    pub fn stations(&self) -> &[BaseStation; 3] {
        &self.stations
    }

    pub fn azimuths_deg(&self) -> [f64; 3] {
        self.azimuths_deg
    }

    pub fn voxel_count(&self) -> usize {
        self.grid_voxels
    }

    pub fn beams(&self, shapes: &[BeamShape; 3]) -> Result<[BeamConfig; 3]> {
        let mut out = [BeamConfig::new(1.0, 1.0, 0.0, 0.0)?; 3];
        for i in 0..3 {
            out[i] = BeamConfig::new(shapes[i].h_hpbw_deg, shapes[i].v_hpbw_deg, shapes[i].tilt_deg, self.azimuths_deg[i])?;
        }
        Ok(out)
    }

    pub fn evaluate(&self, shapes: &[BeamShape; 3], exec: Execution) -> Result<CoverageReport> {
        let beams = self.beams(shapes)?;
        let slots: Vec<Option<BeamConfig>> = beams
            .iter()
            .copied()
            .chain(self.background.iter().copied())
            .map(Some)
            .collect();
        Ok(self.problem.evaluate(&slots, exec))
    }
}

/// One point of a convergence trace; `None` until a feasible point is found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub best_gcr: Option<f64>,
    pub best_cor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedBeam {
    pub station_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_id: Option<u32>,
    pub beam: BeamConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub algorithm: Algorithm,
    pub beams: Vec<SolvedBeam>,
    pub report: CoverageReport,
    pub feasible: bool,
    pub trace: Vec<TracePoint>,
}

impl Solution {
    pub fn gcr(&self) -> f64 {
        self.report.gcr
    }

    pub fn cor(&self) -> f64 {
        self.report.cor
    }

    pub fn shapes(&self) -> Vec<BeamShape> {
        self.beams
            .iter()
            .map(|b| BeamShape {
                pattern_id: b.pattern_id,
                h_hpbw_deg: b.beam.h_hpbw_deg(),
                v_hpbw_deg: b.beam.v_hpbw_deg(),
                tilt_deg: b.beam.tilt_deg(),
            })
            .collect()
    }
}

/// Re-evaluates `shapes` from the cached links and packages the result.
/// Search loops never hand back their own recorded fitness.
fn finish(
    set: &CooperationSet,
    algorithm: Algorithm,
    shapes: &[BeamShape; 3],
    overlap_cap: f64,
    trace: Vec<TracePoint>,
    exec: Execution,
    require_feasible: bool,
) -> Result<Solution> {
    let report = set.evaluate(shapes, exec)?;
    let feasible = report.feasible(overlap_cap);
    if require_feasible && !feasible {
        return Err(Error::InfeasibleRun { best_cor: Some(report.cor) });
    }
    let beams = set.beams(shapes)?;
    Ok(Solution {
        algorithm,
        beams: (0..3)
            .map(|i| SolvedBeam {
                station_id: set.stations[i].id,
                pattern_id: shapes[i].pattern_id,
                beam: beams[i],
            })
            .collect(),
        report,
        feasible,
        trace,
    })
}

/// Independent stream per particle (and per swarm), derived from one seed.
pub(crate) fn particle_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn check_cap(overlap_cap: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&overlap_cap) {
        return Err(Error::invalid("overlap_cap", "must lie in [0, 1]"));
    }
    Ok(())
}
