//! Scenario files: one JSON document, optionally with the station list in a
//! CSV side-file (`id,x,y,z`).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coverage::CoverageModel;
use crate::error::Error;
use crate::exec::Execution;
use crate::geometry::{validate_stations, BaseStation, PrismAirspace, TriangleRegion};
use crate::optimizer::{BaselineSettings, BeamwidthBox, Discretization, SwarmConfig, TiltBox};
use crate::rf::{
    AntennaModel, BeamPatternCodebook, ChannelCoefficients, ChannelParams, Environment, RadioModel,
    SUBCARRIER_OFFSET_DB,
};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid {field}{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Invalid {
        field: String,
        line: Option<usize>,
        message: String,
    },
    #[error(transparent)]
    Topology(Error),
}

/// Flat station record used by both the JSON and CSV forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationRecord {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<StationRecord> for BaseStation {
    fn from(r: StationRecord) -> Self {
        BaseStation::new(r.id, r.x, r.y, r.z)
    }
}

impl From<BaseStation> for StationRecord {
    fn from(s: BaseStation) -> Self {
        Self { id: s.id, x: s.position.x, y: s.position.y, z: s.position.z }
    }
}

/// Carrier and environment; `coefficients` replaces the bundled table entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelSettings {
    pub carrier_frequency_ghz: f64,
    pub environment: Environment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<ChannelCoefficients>,
}

impl Default for ChannelSettings {
    fn default() -> Self {
        Self {
            carrier_frequency_ghz: 2.6,
            environment: Environment::RmaAv,
            coefficients: None,
        }
    }
}

/// Swarm settings; the overlap cap and seed come from the scenario itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub particles: usize,
    pub iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let d = SwarmConfig::default();
        Self {
            particles: d.particles,
            iterations: d.iterations,
            c1: d.c1,
            c2: d.c2,
            d1: d.d1,
            d2: d.d2,
            w_min: d.w_min,
            w_max: d.w_max,
        }
    }
}

/// Candidate grid for exhaustive search: every pattern at every tilt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExhaustiveSettings {
    /// Empty means the whole codebook.
    pub pattern_ids: Vec<u32>,
    pub tilts_deg: Vec<f64>,
    pub budget: u64,
}

impl Default for ExhaustiveSettings {
    fn default() -> Self {
        Self {
            pattern_ids: Vec::new(),
            tilts_deg: vec![-60.0, -30.0, 0.0, 30.0, 60.0],
            budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    #[serde(with = "station_list")]
    pub stations: Vec<BaseStation>,
    /// Path of a CSV station list, relative to the scenario file. Its rows
    /// are appended to `stations` on load.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stations_csv: Option<PathBuf>,
    pub h_max_m: f64,
    pub voxel_resolution_m: f64,
    pub tau_dbm: f64,
    pub transmit_power_dbm: f64,
    pub power_offset_db: f64,
    pub overlap_cap: f64,
    pub channel: ChannelSettings,
    pub antenna: AntennaModel,
    pub codebook: BeamPatternCodebook,
    pub tilt_box: TiltBox,
    pub beamwidth_box: BeamwidthBox,
    /// Interior layer boundaries in metres; `None` means 50 m bands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer_bounds: Option<Vec<f64>>,
    pub optimizer: OptimizerSettings,
    pub exhaustive: ExhaustiveSettings,
    pub baseline: BaselineSettings,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            stations: Vec::new(),
            stations_csv: None,
            h_max_m: 300.0,
            voxel_resolution_m: 10.0,
            tau_dbm: -90.0,
            transmit_power_dbm: 46.0,
            power_offset_db: SUBCARRIER_OFFSET_DB,
            overlap_cap: 1e-4,
            channel: ChannelSettings::default(),
            antenna: AntennaModel::default(),
            codebook: BeamPatternCodebook::default(),
            tilt_box: TiltBox::default(),
            beamwidth_box: BeamwidthBox::default(),
            layer_bounds: None,
            optimizer: OptimizerSettings::default(),
            exhaustive: ExhaustiveSettings::default(),
            baseline: BaselineSettings::default(),
            seed: 0,
        }
    }
}

mod station_list {
    use super::StationRecord;
    use crate::geometry::BaseStation;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BaseStation], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|&b| StationRecord::from(b)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BaseStation>, D::Error> {
        Ok(Vec::<StationRecord>::deserialize(d)?.into_iter().map(Into::into).collect())
    }
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

/// Reads a station CSV with header `id,x,y,z`.
pub fn read_stations_csv(path: &Path) -> Result<Vec<BaseStation>, ScenarioError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for rec in reader.deserialize::<StationRecord>() {
        out.push(rec.map_err(|e| csv_error(path, e))?.into());
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> ScenarioError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => ScenarioError::Io { path: path.to_path_buf(), source },
        kind => ScenarioError::Parse {
            path: path.to_path_buf(),
            line,
            column: 0,
            message: format!("{kind:?}"),
        },
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_json(&text, path)
}

impl Scenario {
    /// Parses and validates `text`; `origin` names the file in errors and
    /// anchors a relative `stations_csv`.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, ScenarioError> {
        let mut s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if let Some(csv_path) = s.stations_csv.take() {
            let full = origin.parent().unwrap_or(Path::new(".")).join(&csv_path);
            s.stations.extend(read_stations_csv(&full)?);
        }
        s.validate().map_err(|e| match e {
            ScenarioError::Invalid { field, message, .. } => {
                let key = field.rsplit('.').next().unwrap_or(&field).to_string();
                ScenarioError::Invalid { line: line_of(text, &key), field, message }
            }
            other => other,
        })?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |field: &str, message: &str| ScenarioError::Invalid {
            field: field.to_string(),
            line: None,
            message: message.to_string(),
        };
        let finite = |field: &str, v: f64| if v.is_finite() { Ok(()) } else { Err(bad(field, "must be finite")) };
        finite("tau_dbm", self.tau_dbm)?;
        finite("transmit_power_dbm", self.transmit_power_dbm)?;
        finite("power_offset_db", self.power_offset_db)?;
        if !(0.0..=1.0).contains(&self.overlap_cap) {
            return Err(bad("overlap_cap", "must lie in [0, 1]"));
        }
        if !(self.h_max_m > 0.0 && self.h_max_m.is_finite()) {
            return Err(bad("h_max_m", "must be positive"));
        }
        if !(self.voxel_resolution_m > 0.0 && self.voxel_resolution_m.is_finite()) {
            return Err(bad("voxel_resolution_m", "must be positive"));
        }
        if let Some(cuts) = &self.layer_bounds {
            let ok = cuts.windows(2).all(|w| w[0] < w[1]) && cuts.iter().all(|&c| c > 0.0 && c < self.h_max_m);
            if !ok {
                return Err(bad("layer_bounds", "must be strictly increasing inside (0, h_max_m)"));
            }
        }
        let lift = |e: Error| match e {
            Error::InvalidParameter { field, message } => ScenarioError::Invalid { field, line: None, message },
            Error::InvalidBeam { field, value } => ScenarioError::Invalid {
                field: field.to_string(),
                line: None,
                message: format!("value {value} is out of range"),
            },
            other => ScenarioError::Topology(other),
        };
        self.channel_params().map_err(lift)?;
        self.antenna.validate().map_err(lift)?;
        self.tilt_box.validate().map_err(lift)?;
        self.beamwidth_box.validate().map_err(lift)?;
        self.swarm_config(Execution::Sequential).validate().map_err(lift)?;
        self.discretization().map_err(lift)?;
        if self.codebook.get(self.baseline.pattern_id).is_none() {
            return Err(bad("baseline.pattern_id", "not in the codebook"));
        }
        for (id, (pattern, _)) in &self.baseline.per_station {
            if self.codebook.get(*pattern).is_none() {
                return Err(bad("baseline.per_station", &format!("station {id}: pattern {pattern} not in the codebook")));
            }
        }
        validate_stations(&self.stations).map_err(lift)
    }

    pub fn channel_params(&self) -> crate::Result<ChannelParams> {
        let mut ch = ChannelParams::new(self.channel.carrier_frequency_ghz, self.channel.environment)?;
        if let Some(c) = &self.channel.coefficients {
            ch.coefficients = c.clone();
        }
        Ok(ch)
    }

    pub fn coverage_model(&self) -> crate::Result<CoverageModel> {
        Ok(CoverageModel {
            radio: RadioModel {
                channel: self.channel_params()?,
                antenna: self.antenna,
                transmit_power_dbm: self.transmit_power_dbm,
                power_offset_db: self.power_offset_db,
            },
            threshold_dbm: self.tau_dbm,
        })
    }

    pub fn swarm_config(&self, exec: Execution) -> SwarmConfig {
        let o = &self.optimizer;
        SwarmConfig {
            particles: o.particles,
            iterations: o.iterations,
            c1: o.c1,
            c2: o.c2,
            d1: o.d1,
            d2: o.d2,
            w_min: o.w_min,
            w_max: o.w_max,
            overlap_cap: self.overlap_cap,
            seed: self.seed,
            exec,
        }
    }

    pub fn discretization(&self) -> crate::Result<Discretization> {
        let ids: Vec<u32> = if self.exhaustive.pattern_ids.is_empty() {
            self.codebook.patterns().iter().map(|p| p.id).collect()
        } else {
            self.exhaustive.pattern_ids.clone()
        };
        if self.exhaustive.tilts_deg.is_empty() {
            return Err(Error::invalid("exhaustive.tilts_deg", "at least one tilt is required"));
        }
        Discretization::from_codebook(&self.codebook, &ids, &self.exhaustive.tilts_deg)
    }

    /// Layer boundaries actually used: the configured cuts or 50 m bands.
    pub fn layer_cuts(&self) -> Vec<f64> {
        match &self.layer_bounds {
            Some(c) => c.clone(),
            None => (1..)
                .map(|k| 50.0 * k as f64)
                .take_while(|&z| z < self.h_max_m)
                .collect(),
        }
    }

    pub fn prism(&self, base: TriangleRegion) -> crate::Result<PrismAirspace> {
        PrismAirspace::with_bounds(base, self.h_max_m, &self.layer_cuts())
    }
}
