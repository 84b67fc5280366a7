//! Particle state and the continuous / discrete velocity-position updates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;

/// Swarm hyper-parameters shared by the SLBC and ABC searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwarmConfig {
    pub particles: usize,
    pub iterations: usize,
    /// Local (`c1`) and global (`c2`) learning coefficients, continuous swarm.
    pub c1: f64,
    pub c2: f64,
    /// Local (`d1`) and global (`d2`) learning coefficients, discrete swarm.
    pub d1: f64,
    pub d2: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub overlap_cap: f64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            particles: 30,
            iterations: 100,
            c1: 1.5,
            c2: 2.5,
            d1: 1.5,
            d2: 2.5,
            w_min: 0.4,
            w_max: 0.9,
            overlap_cap: 1e-4,
            seed: 0,
            exec: Execution::Parallel,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        if self.particles < 1 {
            return Err(Error::invalid("particles", "at least one particle is required"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("iterations", "at least one iteration is required"));
        }
        if !(self.w_min > 0.0 && self.w_min <= self.w_max) {
            return Err(Error::invalid("w_min", "inertia bounds must satisfy 0 < w_min <= w_max"));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("d1", self.d1), ("d2", self.d2)] {
            if !(v > 0.0) {
                return Err(Error::invalid(name, "learning coefficients must be positive"));
            }
        }
        if !(0.0..=1.0).contains(&self.overlap_cap) {
            return Err(Error::invalid("overlap_cap", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Linearly decreasing inertia: `w_max` at `l = 1`, `w_min` at `l = n_iter`.
pub fn inertia_weight(l: usize, config: &SwarmConfig) -> f64 {
    let n = config.iterations;
    if n <= 1 || l <= 1 {
        return config.w_max;
    }
    if l >= n {
        return config.w_min;
    }
    config.w_max - (l - 1) as f64 * (config.w_max - config.w_min) / (n - 1) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Best position seen. Feasible positions always displace infeasible
    /// ones; until one turns up the lowest-overlap position is kept, with
    /// `best_fitness` holding the negated overlap.
    pub best_position: Option<Vec<f64>>,
    pub best_fitness: f64,
    pub best_feasible: bool,
}

impl Particle {
    /// Uniform position in `bounds`, velocity uniform within +-10% of each
    /// dimension's width.
    pub fn random<R: Rng>(bounds: &[(f64, f64)], rng: &mut R) -> Self {
        let position = bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect();
        let velocity = bounds
            .iter()
            .map(|&(lo, hi)| 0.1 * (hi - lo) * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        Self {
            position,
            velocity,
            best_position: None,
            best_fitness: f64::NEG_INFINITY,
            best_feasible: false,
        }
    }

    /// Random integer position in `1..=levels` per dimension.
    pub fn random_discrete<R: Rng>(dims: usize, levels: usize, rng: &mut R) -> Self {
        let width = (levels - 1) as f64;
        Self {
            position: (0..dims).map(|_| rng.random_range(1..=levels) as f64).collect(),
            velocity: (0..dims)
                .map(|_| 0.1 * width * (2.0 * rng.random::<f64>() - 1.0))
                .collect(),
            best_position: None,
            best_fitness: f64::NEG_INFINITY,
            best_feasible: false,
        }
    }

    /// Records a feasible evaluation; returns whether it improved the local best.
    pub fn offer(&mut self, fitness: f64) -> bool {
        if !self.best_feasible || fitness > self.best_fitness {
            self.best_fitness = fitness;
            self.best_position = Some(self.position.clone());
            self.best_feasible = true;
            true
        } else {
            false
        }
    }

    /// Records an infeasible evaluation with overlap `cor`. Only kept while
    /// nothing feasible has been seen, and only if it lowers the overlap.
    pub fn offer_infeasible(&mut self, cor: f64) -> bool {
        if self.best_feasible || -cor <= self.best_fitness {
            return false;
        }
        self.best_fitness = -cor;
        self.best_position = Some(self.position.clone());
        true
    }

    /// Feasible or lowest-overlap offer depending on `cor <= cap`.
    pub fn offer_evaluation(&mut self, gcr: f64, cor: f64, cap: f64) -> bool {
        if cor <= cap {
            self.offer(gcr)
        } else {
            self.offer_infeasible(cor)
        }
    }
}

/// Coefficients of one velocity update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub inertia: f64,
    pub local_coeff: f64,
    pub global_coeff: f64,
    pub f1: f64,
    pub f2: f64,
}

fn velocity(particle: &Particle, global_best: Option<&[f64]>, step: &Step, d: usize) -> f64 {
    let b = particle.position[d];
    let local = particle.best_position.as_ref().map_or(b, |p| p[d]);
    let global = global_best.map_or(b, |g| g[d]);
    step.inertia * particle.velocity[d]
        + step.local_coeff * step.f1 * (local - b)
        + step.global_coeff * step.f2 * (global - b)
}

/// `V' = wV + c1 F1 (S_L - B) + c2 F2 (S_G - B)`, `B' = B + V'`. Velocities
/// are clamped to half each box width and positions to the box. Missing
/// bests contribute nothing.
pub fn continuous_step(particle: &mut Particle, global_best: Option<&[f64]>, step: &Step, bounds: &[(f64, f64)]) {
    for (d, &(lo, hi)) in bounds.iter().enumerate() {
        let vmax = 0.5 * (hi - lo);
        let v = velocity(particle, global_best, step, d).clamp(-vmax, vmax);
        particle.velocity[d] = v;
        particle.position[d] = (particle.position[d] + v).clamp(lo, hi);
    }
}

/// Discrete counterpart: same velocity form, position floored and clamped to
/// `1..=levels`.
pub fn discrete_step(particle: &mut Particle, global_best: Option<&[f64]>, step: &Step, levels: usize) {
    let top = levels as f64;
    let vmax = (0.5 * (top - 1.0)).max(1.0);
    for d in 0..particle.position.len() {
        let v = velocity(particle, global_best, step, d).clamp(-vmax, vmax);
        particle.velocity[d] = v;
        particle.position[d] = (particle.position[d] + v).floor().clamp(1.0, top);
    }
}

/// Continuous update with `F1, F2 ~ U[0, 1]` drawn from `rng`.
pub fn update_continuous<R: Rng>(
    particle: &mut Particle,
    global_best: Option<&[f64]>,
    inertia: f64,
    config: &SwarmConfig,
    bounds: &[(f64, f64)],
    rng: &mut R,
) {
    let step = Step {
        inertia,
        local_coeff: config.c1,
        global_coeff: config.c2,
        f1: rng.random(),
        f2: rng.random(),
    };
    continuous_step(particle, global_best, &step, bounds);
}

/// Discrete update with `F1, F2 ~ U[0, 1]` drawn from `rng`.
pub fn update_discrete<R: Rng>(
    particle: &mut Particle,
    global_best: Option<&[f64]>,
    inertia: f64,
    config: &SwarmConfig,
    levels: usize,
    rng: &mut R,
) {
    let step = Step {
        inertia,
        local_coeff: config.d1,
        global_coeff: config.d2,
        f1: rng.random(),
        f2: rng.random(),
    };
    discrete_step(particle, global_best, &step, levels);
}

/// Index of the best local best (first wins ties), if any particle has one.
/// Feasible bests rank above infeasible ones.
pub fn global_best(particles: &[Particle]) -> Option<usize> {
    let key = |p: &Particle| (p.best_feasible, p.best_fitness);
    let mut best: Option<usize> = None;
    for (i, p) in particles.iter().enumerate() {
        if p.best_position.is_some() && best.is_none_or(|b| key(p) > key(&particles[b])) {
            best = Some(i);
        }
    }
    best
}

/// Like [`global_best`] but only when that best is feasible.
pub fn feasible_best(particles: &[Particle]) -> Option<usize> {
    global_best(particles).filter(|&g| particles[g].best_feasible)
}
