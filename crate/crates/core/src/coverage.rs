//! Voxel coverage and overlap indicators, GCR/COR metrics and area-weighted
//! network aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{BaseStation, Point3, VoxelGrid};
use crate::rf::{elevation_offset, link_budget, BeamConfig, LinkGeometry, RadioModel};

/// Radio model plus the received-power threshold `tau` (dBm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageModel {
    pub radio: RadioModel,
    pub threshold_dbm: f64,
}

impl Default for CoverageModel {
    fn default() -> Self {
        Self {
            radio: RadioModel::default(),
            threshold_dbm: -90.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationBeam {
    pub station: BaseStation,
    pub beam: BeamConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerCoverage {
    pub z_low: f64,
    pub z_high: f64,
    pub n_total: usize,
    pub n_covered: usize,
    pub gcr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub n_total: usize,
    pub n_covered: usize,
    pub n_overlapped: usize,
    pub gcr: f64,
    pub cor: f64,
    pub per_layer: Vec<LayerCoverage>,
}

impl CoverageReport {
    fn from_counts(
        n_total: usize,
        n_covered: usize,
        n_overlapped: usize,
        layers: &[(f64, f64)],
        layer_totals: &[usize],
        layer_covered: &[usize],
    ) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        Self {
            n_total,
            n_covered,
            n_overlapped,
            gcr: ratio(n_covered, n_total),
            cor: ratio(n_overlapped, n_total),
            per_layer: layers
                .iter()
                .zip(layer_totals.iter().zip(layer_covered))
                .map(|(&(z_low, z_high), (&t, &c))| LayerCoverage {
                    z_low,
                    z_high,
                    n_total: t,
                    n_covered: c,
                    gcr: ratio(c, t),
                })
                .collect(),
        }
    }

    pub fn feasible(&self, overlap_cap: f64) -> bool {
        self.cor <= overlap_cap
    }

    /// Voxel-weighted GCR of the layers lying entirely within `[z_low, z_high]`.
    pub fn band_gcr(&self, z_low: f64, z_high: f64) -> Option<f64> {
        let (t, c) = self
            .per_layer
            .iter()
            .filter(|l| l.z_low >= z_low && l.z_high <= z_high)
            .fold((0, 0), |(t, c), l| (t + l.n_total, c + l.n_covered));
        (t > 0).then(|| c as f64 / t as f64)
    }
}

/// Whether any beam delivers at least `tau` at `voxel`.
pub fn is_covered(voxel: &Point3, beams: &[StationBeam], model: &CoverageModel) -> Result<bool> {
    Ok(covering_stations(voxel, beams, model)? >= 1)
}

/// Whether at least two distinct stations each deliver at least `tau`.
pub fn is_overlapped(voxel: &Point3, beams: &[StationBeam], model: &CoverageModel) -> Result<bool> {
    Ok(covering_stations(voxel, beams, model)? >= 2)
}

fn covering_stations(voxel: &Point3, beams: &[StationBeam], model: &CoverageModel) -> Result<usize> {
    let mut ids: Vec<u32> = Vec::new();
    for sb in beams {
        let p = model.radio.received_power(&sb.station, &sb.beam, voxel)?;
        if p >= model.threshold_dbm && !ids.contains(&sb.station.id) {
            ids.push(sb.station.id);
        }
    }
    Ok(ids.len())
}

/// Exact GCR/COR of `beams` over every voxel of `grid`.
pub fn evaluate(grid: &VoxelGrid, beams: &[StationBeam], model: &CoverageModel) -> Result<CoverageReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let stations: Vec<BaseStation> = beams.iter().map(|b| b.station).collect();
    let azimuths: Vec<f64> = beams.iter().map(|b| b.beam.azimuth_deg()).collect();
    let problem = CoverageProblem::new(grid, &stations, &azimuths, model, Execution::Parallel)?;
    let slots: Vec<Option<BeamConfig>> = beams.iter().map(|b| Some(b.beam)).collect();
    Ok(problem.evaluate(&slots, Execution::Parallel))
}

/// Same result as [`evaluate`] without the link table: each voxel's links
/// are computed on the fly. Suited to large grids with many beams.
pub fn evaluate_streaming(
    grid: &VoxelGrid,
    beams: &[StationBeam],
    model: &CoverageModel,
    exec: Execution,
) -> Result<CoverageReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut sorted = beams.to_vec();
    sorted.sort_by_key(|b| b.station.id);
    let n = grid.count();
    let nl = grid.layers.len();
    let chunks = exec.map_range(n.div_ceil(CHUNK), |c| -> Result<(usize, usize, Vec<usize>)> {
        let (mut covered, mut overlapped, mut per_layer) = (0, 0, vec![0usize; nl]);
        for k in c * CHUNK..((c + 1) * CHUNK).min(n) {
            let distinct = covering_stations(&grid.centers[k], &sorted, model)?;
            if distinct >= 1 {
                covered += 1;
                per_layer[grid.layer_index[k] as usize] += 1;
            }
            if distinct >= 2 {
                overlapped += 1;
            }
        }
        Ok((covered, overlapped, per_layer))
    });
    let (mut covered, mut overlapped, mut per_layer) = (0, 0, vec![0usize; nl]);
    for chunk in chunks {
        let (c, o, l) = chunk?;
        covered += c;
        overlapped += o;
        for (acc, v) in per_layer.iter_mut().zip(l) {
            *acc += v;
        }
    }
    Ok(CoverageReport::from_counts(
        n,
        covered,
        overlapped,
        &grid.layers,
        &grid.layer_counts(),
        &per_layer,
    ))
}

/// `(gcr, cor, feasible)` with feasibility meaning `cor <= overlap_cap`.
pub fn objective(
    beams: &[StationBeam],
    grid: &VoxelGrid,
    model: &CoverageModel,
    overlap_cap: f64,
) -> Result<(f64, f64, bool)> {
    let r = evaluate(grid, beams, model)?;
    Ok((r.gcr, r.cor, r.feasible(overlap_cap)))
}

#[derive(Debug, Clone, Copy)]
struct Link {
    path_loss: f64,
    azimuth_offset: f64,
    elevation: f64,
}

/// Beam-independent link quantities for a fixed set of station slots over a
/// fixed grid, so that evaluating a beam configuration needs no path-loss
/// or trigonometry work.
///
/// A slot is one (station, azimuth) pair; several slots may share a station,
/// in which case they count as one station for overlap.
#[derive(Debug, Clone)]
pub struct CoverageProblem {
    stations: Vec<BaseStation>,
    azimuths_deg: Vec<f64>,
    /// Slot indices ordered by station id.
    slot_order: Vec<usize>,
    group_of: Vec<u32>,
    links: Vec<Link>,
    n: usize,
    layer_index: Vec<u16>,
    layers: Vec<(f64, f64)>,
    layer_totals: Vec<usize>,
    radio: RadioModel,
    threshold_dbm: f64,
}

const CHUNK: usize = 8192;

impl CoverageProblem {
    pub fn new(
        grid: &VoxelGrid,
        stations: &[BaseStation],
        azimuths_deg: &[f64],
        model: &CoverageModel,
        exec: Execution,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if stations.len() != azimuths_deg.len() {
            return Err(Error::invalid("azimuths", "one azimuth per station slot is required"));
        }
        let n = grid.count();
        let per_slot: Vec<Result<Vec<Link>>> = stations
            .iter()
            .zip(azimuths_deg)
            .map(|(s, &az)| {
                let az = BeamConfig::new(1.0, 1.0, 0.0, az)?.azimuth_rad();
                let chunks = exec.map_range(n.div_ceil(CHUNK), |c| {
                    grid.centers[c * CHUNK..((c + 1) * CHUNK).min(n)]
                        .iter()
                        .map(|v| {
                            let g = LinkGeometry::between(&s.position, v)?;
                            Ok(Link {
                                path_loss: model.radio.channel.path_loss(g.d_2d, g.h_t)?,
                                azimuth_offset: g.azimuth_offset(az),
                                elevation: g.elevation,
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                });
                let mut out = Vec::with_capacity(n);
                for c in chunks {
                    out.extend(c?);
                }
                Ok(out)
            })
            .collect();
        let mut links = Vec::with_capacity(n * stations.len());
        for s in per_slot {
            links.extend(s?);
        }
        let mut slot_order: Vec<usize> = (0..stations.len()).collect();
        slot_order.sort_by_key(|&i| (stations[i].id, i));
        Ok(Self {
            stations: stations.to_vec(),
            azimuths_deg: azimuths_deg
                .iter()
                .map(|&a| BeamConfig::new(1.0, 1.0, 0.0, a).map(|b| b.azimuth_deg()))
                .collect::<Result<_>>()?,
            group_of: stations.iter().map(|s| s.id).collect(),
            slot_order,
            links,
            n,
            layer_index: grid.layer_index.clone(),
            layers: grid.layers.clone(),
            layer_totals: grid.layer_counts(),
            radio: model.radio.clone(),
            threshold_dbm: model.threshold_dbm,
        })
    }

    pub fn voxel_count(&self) -> usize {
        self.n
    }

    pub fn stations(&self) -> &[BaseStation] {
        &self.stations
    }

    pub fn azimuths_deg(&self) -> &[f64] {
        &self.azimuths_deg
    }

    /// Evaluates one beam per slot (`None` leaves the slot silent). Beam
    /// azimuths are ignored; each slot uses the azimuth it was built with.
    pub fn evaluate(&self, beams: &[Option<BeamConfig>], exec: Execution) -> CoverageReport {
        assert_eq!(beams.len(), self.stations.len(), "one beam per slot");
        let p_eff = self.radio.effective_power_dbm();
        let side = self.radio.antenna.side_lobe_dbi();
        let active: Vec<(usize, BeamConfig, f64)> = self
            .slot_order
            .iter()
            .filter_map(|&s| beams[s].map(|b| (s, b, self.radio.antenna.main_lobe_dbi(&b))))
            .collect();
        let nl = self.layers.len();
        let chunks = exec.map_range(self.n.div_ceil(CHUNK), |c| {
            let mut covered = 0usize;
            let mut overlapped = 0usize;
            let mut per_layer = vec![0usize; nl];
            for k in c * CHUNK..((c + 1) * CHUNK).min(self.n) {
                let mut distinct = 0;
                let mut last_group = None;
                for &(s, ref beam, main) in &active {
                    let group = self.group_of[s];
                    if last_group == Some(group) {
                        continue;
                    }
                    let link = &self.links[s * self.n + k];
                    let el = elevation_offset(link.elevation, beam);
                    let gain = if beam.in_main_lobe(link.azimuth_offset, el) { main } else { side };
                    if link_budget(p_eff, gain, link.path_loss) >= self.threshold_dbm {
                        distinct += 1;
                        last_group = Some(group);
                        if distinct >= 2 {
                            break;
                        }
                    }
                }
                if distinct >= 1 {
                    covered += 1;
                    per_layer[self.layer_index[k] as usize] += 1;
                }
                if distinct >= 2 {
                    overlapped += 1;
                }
            }
            (covered, overlapped, per_layer)
        });
        let mut covered = 0;
        let mut overlapped = 0;
        let mut per_layer = vec![0usize; nl];
        for (c, o, l) in chunks {
            covered += c;
            overlapped += o;
            for (acc, v) in per_layer.iter_mut().zip(l) {
                *acc += v;
            }
        }
        CoverageReport::from_counts(
            self.n,
            covered,
            overlapped,
            &self.layers,
            &self.layer_totals,
            &per_layer,
        )
    }
}

/// Per-triangle entry of a network report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleGcr {
    pub triangle_id: usize,
    pub area_m2: f64,
    pub gcr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub triangles: Vec<TriangleGcr>,
    pub average_gcr: f64,
    pub triangle_count: usize,
    /// Whole-network overlap ratio over the union of all prisms, when computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network_cor: Option<f64>,
}

impl NetworkReport {
    pub fn new(triangles: Vec<TriangleGcr>) -> Result<Self> {
        let entries: Vec<(f64, f64)> = triangles.iter().map(|t| (t.area_m2, t.gcr)).collect();
        let average_gcr = average_gcr(&entries)?;
        Ok(Self {
            triangle_count: triangles.len(),
            triangles,
            average_gcr,
            network_cor: None,
        })
    }
}

/// Area-weighted mean GCR over `(area, gcr)` pairs.
pub fn average_gcr(entries: &[(f64, f64)]) -> Result<f64> {
    if entries.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(area, gcr) in entries {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::invalid("area", format!("must be positive, got {area}")));
        }
        num += area * gcr;
        den += area;
    }
    Ok(num / den)
}
