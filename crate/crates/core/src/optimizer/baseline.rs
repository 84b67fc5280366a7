//! Fixed down-tilted configuration, evaluated without search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rf::BeamPatternCodebook;

use super::{check_cap, finish, Algorithm, BeamShape, CooperationSet, Solution};

/// Pattern and tilt per station; stations not listed in `per_station` use
/// the defaults (pattern 3, a mid-width 65 x 25 degree beam in the default
/// codebook, tilted 3 degrees down).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineSettings {
    pub pattern_id: u32,
    pub tilt_deg: f64,
    pub per_station: BTreeMap<u32, (u32, f64)>,
}

impl Default for BaselineSettings {
    fn default() -> Self {
        Self {
            pattern_id: 3,
            tilt_deg: -3.0,
            per_station: BTreeMap::new(),
        }
    }
}

impl BaselineSettings {
    pub fn shape_for(&self, station_id: u32, codebook: &BeamPatternCodebook) -> Result<BeamShape> {
        let (id, tilt) = self.per_station.get(&station_id).copied().unwrap_or((self.pattern_id, self.tilt_deg));
        let p = codebook
            .get(id)
            .ok_or_else(|| Error::invalid("baseline.pattern_id", format!("pattern {id} is not in the codebook")))?;
        Ok(BeamShape {
            pattern_id: Some(id),
            h_hpbw_deg: p.h_hpbw_deg,
            v_hpbw_deg: p.v_hpbw_deg,
            tilt_deg: tilt,
        })
    }
}

/// Evaluates the baseline; `feasible` only reports whether `COR <= overlap_cap`.
pub fn downtilt_baseline(
    set: &CooperationSet,
    codebook: &BeamPatternCodebook,
    settings: &BaselineSettings,
    overlap_cap: f64,
    exec: Execution,
) -> Result<Solution> {
    check_cap(overlap_cap)?;
    let st = set.stations();
    let shapes = [
        settings.shape_for(st[0].id, codebook)?,
        settings.shape_for(st[1].id, codebook)?,
        settings.shape_for(st[2].id, codebook)?,
    ];
    finish(set, Algorithm::Downtilt, &shapes, overlap_cap, Vec::new(), exec, false)
}
