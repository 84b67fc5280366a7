//! Single continuous swarm over all nine beam parameters:
//! `[psi1, psi2, psi3, phi1, phi2, phi3, tilt1, tilt2, tilt3]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::swarm::{feasible_best, global_best, inertia_weight, update_continuous, Particle, SwarmConfig};
use super::{check_cap, finish, particle_rng, Algorithm, BeamShape, CooperationSet, Solution, TiltBox, TracePoint};

/// Horizontal (`h_*`) and vertical (`v_*`) HPBW limits in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BeamwidthBox {
    pub h_min_deg: f64,
    pub h_max_deg: f64,
    pub v_min_deg: f64,
    pub v_max_deg: f64,
}

impl Default for BeamwidthBox {
    fn default() -> Self {
        Self::uniform(1.0, 179.0)
    }
}

impl BeamwidthBox {
    /// Same range for both beamwidths.
    pub fn uniform(min_deg: f64, max_deg: f64) -> Self {
        Self { h_min_deg: min_deg, h_max_deg: max_deg, v_min_deg: min_deg, v_max_deg: max_deg }
    }

    pub fn validate(&self) -> Result<()> {
        for (lo, hi) in [(self.h_min_deg, self.h_max_deg), (self.v_min_deg, self.v_max_deg)] {
            if !(lo > 0.0 && hi < 180.0 && lo <= hi) {
                return Err(Error::invalid("beamwidth_box", "need 0 < min <= max < 180 for both beamwidths"));
            }
        }
        Ok(())
    }
}

fn shapes_of(x: &[f64]) -> [BeamShape; 3] {
    std::array::from_fn(|i| BeamShape {
        pattern_id: None,
        h_hpbw_deg: x[i],
        v_hpbw_deg: x[3 + i],
        tilt_deg: x[6 + i],
    })
}

/// Maximizes GCR over free beamwidths and tilts subject to
/// `COR <= overlap_cap`.
pub fn abc_optimize(
    set: &CooperationSet,
    beamwidths: &BeamwidthBox,
    tilt_box: &TiltBox,
    config: &SwarmConfig,
) -> Result<Solution> {
    config.validate()?;
    check_cap(config.overlap_cap)?;
    beamwidths.validate()?;
    tilt_box.validate()?;
    let h = (beamwidths.h_min_deg, beamwidths.h_max_deg);
    let v = (beamwidths.v_min_deg, beamwidths.v_max_deg);
    let t = tilt_box.bounds();
    let bounds = [h, h, h, v, v, v, t, t, t];
    let exec = config.exec;
    let n = config.particles;

    let mut rngs: Vec<_> = (0..n).map(|j| particle_rng(config.seed, j as u64)).collect();
    let mut swarm: Vec<Particle> = rngs.iter_mut().map(|r| Particle::random(&bounds, r)).collect();
    let mut best_cor = vec![f64::NAN; n];
    let mut lowest_cor = f64::INFINITY;
    let mut trace = Vec::with_capacity(config.iterations + 1);

    for l in 0..=config.iterations {
        if l > 0 {
            let w = inertia_weight(l, config);
            let g = global_best(&swarm).and_then(|g| swarm[g].best_position.clone());
            for (p, r) in swarm.iter_mut().zip(&mut rngs) {
                update_continuous(p, g.as_deref(), w, config, &bounds, r);
            }
        }
        let reports = exec.map_range(n, |j| set.evaluate(&shapes_of(&swarm[j].position), exec));
        for (j, r) in reports.into_iter().enumerate() {
            let r = r?;
            lowest_cor = lowest_cor.min(r.cor);
            if swarm[j].offer_evaluation(r.gcr, r.cor, config.overlap_cap) {
                best_cor[j] = r.cor;
            }
        }
        let g = feasible_best(&swarm);
        trace.push(TracePoint {
            iteration: l,
            best_gcr: g.map(|g| swarm[g].best_fitness),
            best_cor: g.map(|g| best_cor[g]),
        });
    }

    let Some(g) = feasible_best(&swarm) else {
        return Err(Error::InfeasibleRun { best_cor: lowest_cor.is_finite().then_some(lowest_cor) });
    };
    let shapes = shapes_of(swarm[g].best_position.as_ref().unwrap());
    finish(set, Algorithm::Abc, &shapes, config.overlap_cap, trace, exec, true)
}
