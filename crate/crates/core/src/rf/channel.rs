//! Ground-to-air path loss: probability-weighted mix of LOS and NLOS losses
//! using aerial-vehicle coefficient sets (RMa-AV, UMa-AV).

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/channel_coefficients.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Environment {
    #[serde(rename = "RMa-AV")]
    RmaAv,
    #[serde(rename = "UMa-AV")]
    UmaAv,
}

impl Environment {
    pub fn name(self) -> &'static str {
        match self {
            Environment::RmaAv => "RMa-AV",
            Environment::UmaAv => "UMa-AV",
        }
    }
}

/// LOS probability `1` for `d <= d1`, else `d1/d + exp(-d/p1) (1 - d1/d)`.
///
/// Below `terrestrial_max_height_m` fixed `(d1, p1)` apply; above it both
/// grow with `log10(h)`; above `all_los_height_m` the link is always LOS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosProbabilityCoefficients {
    pub all_los_height_m: f64,
    pub terrestrial_max_height_m: f64,
    pub terrestrial_d1_m: f64,
    pub terrestrial_p1_m: f64,
    pub d1_slope: f64,
    pub d1_intercept: f64,
    pub d1_min_m: f64,
    pub p1_slope: f64,
    pub p1_intercept: f64,
    pub p1_min_m: f64,
}

/// `intercept + max(exponent + height_slope log10 h, min_exponent) log10 d3
/// + 20 log10(frequency_scale f_GHz)`, optionally floored at the LOS loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLossCoefficients {
    pub intercept_db: f64,
    pub exponent: f64,
    pub exponent_height_slope: f64,
    pub min_exponent: f64,
    pub frequency_scale: f64,
    pub floor_at_los: bool,
}

impl PathLossCoefficients {
    pub fn distance_exponent(&self, h: f64) -> f64 {
        (self.exponent + self.exponent_height_slope * h.log10()).max(self.min_exponent)
    }

    fn eval(&self, d3: f64, h: f64, f_ghz: f64) -> f64 {
        self.intercept_db
            + self.distance_exponent(h) * d3.log10()
            + 20.0 * (self.frequency_scale * f_ghz).log10()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelCoefficients {
    /// Heights are clamped into this range before the path-loss formulas.
    pub height_range_m: (f64, f64),
    pub los_probability: LosProbabilityCoefficients,
    pub los_path_loss: PathLossCoefficients,
    pub nlos_path_loss: PathLossCoefficients,
}

impl ChannelCoefficients {
    /// Coefficient set shipped with the crate.
    pub fn bundled(env: Environment) -> ChannelCoefficients {
        static TABLE: OnceLock<BTreeMap<Environment, ChannelCoefficients>> = OnceLock::new();
        TABLE
            .get_or_init(|| serde_json::from_str(BUNDLED).expect("bundled coefficient table"))
            .get(&env)
            .cloned()
            .expect("bundled table covers every environment")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub carrier_frequency_ghz: f64,
    pub environment: Environment,
    pub coefficients: ChannelCoefficients,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self::new(2.6, Environment::RmaAv).expect("valid defaults")
    }
}

impl ChannelParams {
    pub fn new(carrier_frequency_ghz: f64, environment: Environment) -> Result<Self> {
        if !(carrier_frequency_ghz > 0.0 && carrier_frequency_ghz.is_finite()) {
            return Err(Error::invalid(
                "carrier_frequency_ghz",
                format!("must be positive, got {carrier_frequency_ghz}"),
            ));
        }
        Ok(Self {
            carrier_frequency_ghz,
            environment,
            coefficients: ChannelCoefficients::bundled(environment),
        })
    }

    pub fn los_probability(&self, d_2d: f64, h_t: f64) -> f64 {
        let c = &self.coefficients.los_probability;
        if h_t >= c.all_los_height_m {
            return 1.0;
        }
        let (d1, p1) = if h_t <= c.terrestrial_max_height_m {
            (c.terrestrial_d1_m, c.terrestrial_p1_m)
        } else {
            let lh = h_t.log10();
            (
                (c.d1_slope * lh + c.d1_intercept).max(c.d1_min_m),
                (c.p1_slope * lh + c.p1_intercept).max(c.p1_min_m),
            )
        };
        if d_2d <= d1 {
            return 1.0;
        }
        let ratio = d1 / d_2d;
        (ratio + (-d_2d / p1).exp() * (1.0 - ratio)).clamp(0.0, 1.0)
    }

    fn clamped_height(&self, h_t: f64) -> f64 {
        let (lo, hi) = self.coefficients.height_range_m;
        h_t.clamp(lo, hi)
    }

    pub fn los_path_loss(&self, d_2d: f64, h_t: f64) -> Result<f64> {
        let d3 = distance_3d(d_2d, h_t)?;
        Ok(self.coefficients.los_path_loss.eval(
            d3,
            self.clamped_height(h_t),
            self.carrier_frequency_ghz,
        ))
    }

    pub fn nlos_path_loss(&self, d_2d: f64, h_t: f64) -> Result<f64> {
        let d3 = distance_3d(d_2d, h_t)?;
        let h = self.clamped_height(h_t);
        let c = &self.coefficients;
        let nlos = c.nlos_path_loss.eval(d3, h, self.carrier_frequency_ghz);
        Ok(if c.nlos_path_loss.floor_at_los {
            nlos.max(c.los_path_loss.eval(d3, h, self.carrier_frequency_ghz))
        } else {
            nlos
        })
    }

    /// Expected path loss in dB, `p_L PL_L + (1 - p_L) PL_N`.
    pub fn path_loss(&self, d_2d: f64, h_t: f64) -> Result<f64> {
        let p_los = self.los_probability(d_2d, h_t);
        Ok(mix(p_los, self.los_path_loss(d_2d, h_t)?, self.nlos_path_loss(d_2d, h_t)?))
    }
}

/// Probability-weighted loss; `p = 1` and `p = 0` return the pure regimes exactly.
pub fn mix(p_los: f64, pl_los: f64, pl_nlos: f64) -> f64 {
    if p_los >= 1.0 {
        pl_los
    } else if p_los <= 0.0 {
        pl_nlos
    } else {
        p_los * pl_los + (1.0 - p_los) * pl_nlos
    }
}

fn distance_3d(d_2d: f64, h_t: f64) -> Result<f64> {
    let d3 = d_2d.hypot(h_t);
    if d3 > 0.0 && d3.is_finite() {
        Ok(d3)
    } else {
        Err(Error::SingularGeometry(format!(
            "zero link distance (d_2d = {d_2d}, h_t = {h_t})"
        )))
    }
}
