use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step-pattern directional antenna: `G0 / (Psi Phi)` (beamwidths in radians)
/// inside the main-lobe box `|az| <= Psi, |el| <= Phi`, `S0` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaModel {
    pub main_lobe_constant: f64,
    pub side_lobe_gain: f64,
}

impl Default for AntennaModel {
    fn default() -> Self {
        Self {
            main_lobe_constant: 2.2864,
            side_lobe_gain: 0.03,
        }
    }
}

impl AntennaModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.main_lobe_constant > 0.0) {
            return Err(Error::invalid("main_lobe_constant", "must be positive"));
        }
        // largest admissible box is pi x pi
        let min_main = self.main_lobe_constant / (std::f64::consts::PI * std::f64::consts::PI);
        if !(self.side_lobe_gain > 0.0 && self.side_lobe_gain < min_main) {
            return Err(Error::invalid(
                "side_lobe_gain",
                format!("must lie in (0, {min_main})"),
            ));
        }
        Ok(())
    }

    pub fn main_lobe_linear(&self, beam: &BeamConfig) -> f64 {
        self.main_lobe_constant / (beam.h_half_rad() * beam.v_half_rad())
    }

    pub fn main_lobe_dbi(&self, beam: &BeamConfig) -> f64 {
        10.0 * self.main_lobe_linear(beam).log10()
    }

    pub fn side_lobe_dbi(&self) -> f64 {
        10.0 * self.side_lobe_gain.log10()
    }

    /// Gain in dBi for horizontal offset `az` and vertical offset `el` (radians)
    /// from boresight.
    pub fn gain_dbi(&self, beam: &BeamConfig, az: f64, el: f64) -> f64 {
        if beam.in_main_lobe(az, el) {
            self.main_lobe_dbi(beam)
        } else {
            self.side_lobe_dbi()
        }
    }
}

/// Antenna parameters of one beam. Angles in degrees; the azimuth is the
/// boresight heading measured counter-clockwise from the +x axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBeam", into = "RawBeam")]
pub struct BeamConfig {
    h_hpbw: f64,
    v_hpbw: f64,
    tilt: f64,
    azimuth: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBeam {
    h_hpbw_deg: f64,
    v_hpbw_deg: f64,
    tilt_deg: f64,
    azimuth_deg: f64,
}

impl TryFrom<RawBeam> for BeamConfig {
    type Error = Error;
    fn try_from(r: RawBeam) -> Result<Self> {
        BeamConfig::new(r.h_hpbw_deg, r.v_hpbw_deg, r.tilt_deg, r.azimuth_deg)
    }
}

impl From<BeamConfig> for RawBeam {
    fn from(b: BeamConfig) -> Self {
        RawBeam {
            h_hpbw_deg: b.h_hpbw,
            v_hpbw_deg: b.v_hpbw,
            tilt_deg: b.tilt,
            azimuth_deg: b.azimuth,
        }
    }
}

impl BeamConfig {
    /// Enforces `0 < Psi < 180`, `0 < Phi < 180`, `-90 <= Theta <= 90`;
    /// the azimuth is normalized into `[0, 360)`.
    pub fn new(h_hpbw_deg: f64, v_hpbw_deg: f64, tilt_deg: f64, azimuth_deg: f64) -> Result<Self> {
        if !(h_hpbw_deg > 0.0 && h_hpbw_deg < 180.0) {
            return Err(Error::InvalidBeam { field: "h_hpbw", value: h_hpbw_deg });
        }
        if !(v_hpbw_deg > 0.0 && v_hpbw_deg < 180.0) {
            return Err(Error::InvalidBeam { field: "v_hpbw", value: v_hpbw_deg });
        }
        if !((-90.0..=90.0).contains(&tilt_deg)) {
            return Err(Error::InvalidBeam { field: "tilt", value: tilt_deg });
        }
        if !azimuth_deg.is_finite() {
            return Err(Error::InvalidBeam { field: "azimuth", value: azimuth_deg });
        }
        let mut azimuth = azimuth_deg.rem_euclid(360.0);
        if azimuth >= 360.0 {
            azimuth = 0.0;
        }
        Ok(Self {
            h_hpbw: h_hpbw_deg,
            v_hpbw: v_hpbw_deg,
            tilt: tilt_deg,
            azimuth,
        })
    }

    pub fn h_hpbw_deg(&self) -> f64 {
        self.h_hpbw
    }
    pub fn v_hpbw_deg(&self) -> f64 {
        self.v_hpbw
    }
    pub fn tilt_deg(&self) -> f64 {
        self.tilt
    }
    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth
    }

    pub fn h_half_rad(&self) -> f64 {
        self.h_hpbw.to_radians()
    }
    pub fn v_half_rad(&self) -> f64 {
        self.v_hpbw.to_radians()
    }
    pub fn tilt_rad(&self) -> f64 {
        self.tilt.to_radians()
    }
    pub fn azimuth_rad(&self) -> f64 {
        self.azimuth.to_radians()
    }

    pub fn in_main_lobe(&self, az: f64, el: f64) -> bool {
        az.abs() <= self.h_half_rad() && el.abs() <= self.v_half_rad()
    }

    pub fn with_azimuth(self, azimuth_deg: f64) -> Result<Self> {
        Self::new(self.h_hpbw, self.v_hpbw, self.tilt, azimuth_deg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamPattern {
    pub id: u32,
    pub h_hpbw_deg: f64,
    pub v_hpbw_deg: f64,
}

/// Discrete beam patterns addressed by ids `1..=len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BeamPattern>", into = "Vec<BeamPattern>")]
pub struct BeamPatternCodebook {
    patterns: Vec<BeamPattern>,
}

impl TryFrom<Vec<BeamPattern>> for BeamPatternCodebook {
    type Error = Error;
    fn try_from(patterns: Vec<BeamPattern>) -> Result<Self> {
        BeamPatternCodebook::new(patterns)
    }
}

impl From<BeamPatternCodebook> for Vec<BeamPattern> {
    fn from(c: BeamPatternCodebook) -> Self {
        c.patterns
    }
}

impl Default for BeamPatternCodebook {
    fn default() -> Self {
        Self::from_pairs(&[
            (110.0, 25.0),
            (90.0, 25.0),
            (65.0, 25.0),
            (45.0, 25.0),
            (25.0, 25.0),
            (110.0, 15.0),
            (90.0, 15.0),
            (65.0, 15.0),
            (65.0, 8.0),
        ])
        .expect("default codebook is valid")
    }
}

impl BeamPatternCodebook {
    pub fn new(patterns: Vec<BeamPattern>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::invalid("codebook", "must contain at least one pattern"));
        }
        for (i, p) in patterns.iter().enumerate() {
            if p.id != i as u32 + 1 {
                return Err(Error::invalid(
                    "codebook",
                    format!("pattern ids must be contiguous from 1; entry {i} has id {}", p.id),
                ));
            }
            BeamConfig::new(p.h_hpbw_deg, p.v_hpbw_deg, 0.0, 0.0)
                .map_err(|e| Error::invalid("codebook", format!("pattern {}: {e}", p.id)))?;
        }
        Ok(Self { patterns })
    }

    /// Codebook numbering `pairs` (H-HPBW, V-HPBW) from 1.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .enumerate()
                .map(|(i, &(h, v))| BeamPattern {
                    id: i as u32 + 1,
                    h_hpbw_deg: h,
                    v_hpbw_deg: v,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&BeamPattern> {
        id.checked_sub(1).and_then(|i| self.patterns.get(i as usize))
    }

    pub fn patterns(&self) -> &[BeamPattern] {
        &self.patterns
    }

    pub fn beam(&self, id: u32, tilt_deg: f64, azimuth_deg: f64) -> Result<BeamConfig> {
        let p = self
            .get(id)
            .ok_or_else(|| Error::invalid("pattern_id", format!("no pattern {id}")))?;
        BeamConfig::new(p.h_hpbw_deg, p.v_hpbw_deg, tilt_deg, azimuth_deg)
    }
}
