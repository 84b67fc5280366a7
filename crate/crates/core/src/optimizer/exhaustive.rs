//! Exhaustive enumeration over a finite per-station candidate list.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rf::BeamPatternCodebook;

use super::{check_cap, finish, Algorithm, BeamShape, CooperationSet, Solution};

/// Candidate beam shapes per station; combination `i` picks
/// `per_station[0][i / (n1 n2)]`, `per_station[1][(i / n2) % n1]`,
/// `per_station[2][i % n2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub per_station: [Vec<BeamShape>; 3],
}

impl Discretization {
    /// Every listed pattern at every listed tilt, identically for all three stations.
    pub fn from_codebook(codebook: &BeamPatternCodebook, pattern_ids: &[u32], tilts_deg: &[f64]) -> Result<Self> {
        let mut cands = Vec::with_capacity(pattern_ids.len() * tilts_deg.len());
        for &id in pattern_ids {
            let p = codebook
                .get(id)
                .ok_or_else(|| Error::invalid("pattern_ids", format!("pattern {id} is not in the codebook")))?;
            for &t in tilts_deg {
                cands.push(BeamShape {
                    pattern_id: Some(id),
                    h_hpbw_deg: p.h_hpbw_deg,
                    v_hpbw_deg: p.v_hpbw_deg,
                    tilt_deg: t,
                });
            }
        }
        Ok(Self { per_station: [cands.clone(), cands.clone(), cands] })
    }

    pub fn combinations(&self) -> u128 {
        self.per_station.iter().map(|c| c.len() as u128).product()
    }

    pub fn combination(&self, i: usize) -> [BeamShape; 3] {
        let n1 = self.per_station[1].len();
        let n2 = self.per_station[2].len();
        [
            self.per_station[0][i / (n1 * n2)],
            self.per_station[1][(i / n2) % n1],
            self.per_station[2][i % n2],
        ]
    }
}

const BLOCK: usize = 64;

/// Exact feasible maximizer of GCR; ties go to the lowest combination index.
pub fn exhaustive_search(
    set: &CooperationSet,
    discretization: &Discretization,
    budget: u128,
    overlap_cap: f64,
    exec: Execution,
) -> Result<Solution> {
    check_cap(overlap_cap)?;
    let total = discretization.combinations();
    if total == 0 {
        return Err(Error::invalid("discretization", "every station needs at least one candidate"));
    }
    if total > budget {
        return Err(Error::BudgetExceeded { combinations: total, budget });
    }
    let total = total as usize;
    // (best feasible (gcr, index), lowest cor) per block
    let blocks = exec.map_range(total.div_ceil(BLOCK), |b| -> Result<(Option<(f64, usize)>, f64)> {
        let mut best: Option<(f64, usize)> = None;
        let mut lowest = f64::INFINITY;
        for i in b * BLOCK..((b + 1) * BLOCK).min(total) {
            let r = set.evaluate(&discretization.combination(i), Execution::Sequential)?;
            lowest = lowest.min(r.cor);
            if r.feasible(overlap_cap) && best.is_none_or(|(g, _)| r.gcr > g) {
                best = Some((r.gcr, i));
            }
        }
        Ok((best, lowest))
    });
    let mut best: Option<(f64, usize)> = None;
    let mut lowest = f64::INFINITY;
    for blk in blocks {
        let (b, l) = blk?;
        lowest = lowest.min(l);
        if let Some((g, i)) = b {
            if best.is_none_or(|(bg, _)| g > bg) {
                best = Some((g, i));
            }
        }
    }
    let Some((_, i)) = best else {
        return Err(Error::InfeasibleRun { best_cor: Some(lowest) });
    };
    finish(set, Algorithm::Es, &discretization.combination(i), overlap_cap, Vec::new(), exec, true)
}
