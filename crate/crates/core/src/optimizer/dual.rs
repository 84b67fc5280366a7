//! Dual swarm: a discrete swarm over codebook pattern ids and a continuous
//! swarm over tilts, paired by particle index and sharing one fitness.

use crate::error::{Error, Result};
use crate::rf::BeamPatternCodebook;

use super::swarm::{feasible_best, global_best, inertia_weight, update_continuous, update_discrete, Particle, SwarmConfig};
use super::{check_cap, finish, particle_rng, Algorithm, BeamShape, CooperationSet, Solution, TiltBox, TracePoint};

fn shapes_of(codebook: &BeamPatternCodebook, patterns: &[f64], tilts: &[f64]) -> [BeamShape; 3] {
    std::array::from_fn(|i| {
        let id = patterns[i] as u32;
        let p = codebook.get(id).expect("pattern index kept within the codebook");
        BeamShape {
            pattern_id: Some(id),
            h_hpbw_deg: p.h_hpbw_deg,
            v_hpbw_deg: p.v_hpbw_deg,
            tilt_deg: tilts[i],
        }
    })
}

/// Maximizes GCR over (pattern id, tilt) per station subject to
/// `COR <= overlap_cap`. A feasible evaluation always
/// displaces an infeasible best; before one is found particles chase the
/// lowest overlap seen.
pub fn slbc_optimize(
    set: &CooperationSet,
    codebook: &BeamPatternCodebook,
    tilt_box: &TiltBox,
    config: &SwarmConfig,
) -> Result<Solution> {
    config.validate()?;
    check_cap(config.overlap_cap)?;
    tilt_box.validate()?;
    if codebook.is_empty() {
        return Err(Error::invalid("codebook", "at least one pattern is required"));
    }
    let levels = codebook.len();
    let bounds = [tilt_box.bounds(); 3];
    let exec = config.exec;
    let n = config.particles;

    let mut rngs: Vec<_> = (0..n)
        .map(|j| (particle_rng(config.seed, 2 * j as u64), particle_rng(config.seed, 2 * j as u64 + 1)))
        .collect();
    let mut disc: Vec<Particle> = rngs.iter_mut().map(|(r, _)| Particle::random_discrete(3, levels, r)).collect();
    let mut cont: Vec<Particle> = rngs.iter_mut().map(|(_, r)| Particle::random(&bounds, r)).collect();
    let mut best_cor = vec![f64::NAN; n];
    let mut lowest_cor = f64::INFINITY;
    let mut trace = Vec::with_capacity(config.iterations + 1);

    for l in 0..=config.iterations {
        if l > 0 {
            let w = inertia_weight(l, config);
            let gb = global_best(&disc);
            let gd = gb.and_then(|g| disc[g].best_position.clone());
            let gc = gb.and_then(|g| cont[g].best_position.clone());
            for (j, (rd, rc)) in rngs.iter_mut().enumerate() {
                update_discrete(&mut disc[j], gd.as_deref(), w, config, levels, rd);
                update_continuous(&mut cont[j], gc.as_deref(), w, config, &bounds, rc);
            }
        }
        let reports = exec.map_range(n, |j| set.evaluate(&shapes_of(codebook, &disc[j].position, &cont[j].position), exec));
        for (j, r) in reports.into_iter().enumerate() {
            let r = r?;
            lowest_cor = lowest_cor.min(r.cor);
            if disc[j].offer_evaluation(r.gcr, r.cor, config.overlap_cap) {
                cont[j].offer_evaluation(r.gcr, r.cor, config.overlap_cap);
                best_cor[j] = r.cor;
            }
        }
        let g = feasible_best(&disc);
        trace.push(TracePoint {
            iteration: l,
            best_gcr: g.map(|g| disc[g].best_fitness),
            best_cor: g.map(|g| best_cor[g]),
        });
    }

    let Some(g) = feasible_best(&disc) else {
        return Err(Error::InfeasibleRun { best_cor: lowest_cor.is_finite().then_some(lowest_cor) });
    };
    let shapes = shapes_of(
        codebook,
        disc[g].best_position.as_ref().unwrap(),
        cont[g].best_position.as_ref().unwrap(),
    );
    finish(set, Algorithm::Slbc, &shapes, config.overlap_cap, trace, exec, true)
}
