use serde::{Deserialize, Serialize};

use super::{Point3, TriangleRegion};
use crate::error::{Error, Result};

/// A triangle extruded vertically from the ground to `h_max`, split into
/// horizontal sub-layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrismAirspace {
    pub base: TriangleRegion,
    pub h_max: f64,
    /// `(z_low, z_high)` bounds, ascending, partitioning `[0, h_max]`.
    pub layers: Vec<(f64, f64)>,
}

impl PrismAirspace {
    /// Prism with the default low/medium/high split into thirds.
    pub fn new(base: TriangleRegion, h_max: f64) -> Result<Self> {
        Self::with_bounds(base, h_max, &[h_max / 3.0, 2.0 * h_max / 3.0])
    }

    /// Prism whose layers are delimited by the interior cut heights `cuts`
    /// (cuts outside `(0, h_max)` are ignored).
    pub fn with_bounds(base: TriangleRegion, h_max: f64, cuts: &[f64]) -> Result<Self> {
        if !(h_max > 0.0 && h_max.is_finite()) {
            return Err(Error::invalid("h_max", format!("must be positive, got {h_max}")));
        }
        let mut edges: Vec<f64> = cuts
            .iter()
            .copied()
            .filter(|&c| c > 0.0 && c < h_max)
            .collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        edges.insert(0, 0.0);
        edges.push(h_max);
        let layers = edges.windows(2).map(|w| (w[0], w[1])).collect();
        Ok(Self { base, h_max, layers })
    }

    /// Prism with uniform bands of width `band` (the last band may be thinner).
    pub fn with_bands(base: TriangleRegion, h_max: f64, band: f64) -> Result<Self> {
        if !(band > 0.0) {
            return Err(Error::invalid("band", "must be positive"));
        }
        let cuts: Vec<f64> = (1..)
            .map(|k| k as f64 * band)
            .take_while(|&z| z < h_max)
            .collect();
        Self::with_bounds(base, h_max, &cuts)
    }

    pub fn layer_of(&self, z: f64) -> usize {
        self.layers
            .iter()
            .position(|&(_, hi)| z < hi)
            .unwrap_or(self.layers.len() - 1)
    }
}

/// Voxel centers of a cubic lattice clipped to a prism.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    pub resolution: f64,
    pub centers: Vec<Point3>,
    /// Layer index of each voxel into `layers`.
    pub layer_index: Vec<u16>,
    pub layers: Vec<(f64, f64)>,
}

impl VoxelGrid {
    pub fn count(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Voxels per layer.
    pub fn layer_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.layers.len()];
        for &l in &self.layer_index {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Concatenates grids sharing one layer structure.
    pub fn concat(grids: &[&VoxelGrid]) -> Result<VoxelGrid> {
        let first = grids.first().ok_or(Error::EmptyGrid)?;
        let mut out = VoxelGrid {
            resolution: first.resolution,
            centers: Vec::new(),
            layer_index: Vec::new(),
            layers: first.layers.clone(),
        };
        for g in grids {
            if g.layers != out.layers {
                return Err(Error::invalid("layers", "grids have different layer bounds"));
            }
            out.centers.extend_from_slice(&g.centers);
            out.layer_index.extend_from_slice(&g.layer_index);
        }
        Ok(out)
    }
}

/// Discretizes a prism with a cubic lattice of pitch `resolution` anchored at
/// the origin. A voxel belongs to the prism iff its center lies strictly
/// inside the base triangle and within `[0, h_max]`. When no lattice column
/// falls inside the triangle, a single column at the centroid is used.
pub fn build_voxel_grid(prism: &PrismAirspace, resolution: f64) -> Result<VoxelGrid> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::invalid(
            "voxel_resolution",
            format!("must be positive, got {resolution}"),
        ));
    }
    let levels: Vec<f64> = (0..)
        .map(|k| (k as f64 + 0.5) * resolution)
        .take_while(|&z| z <= prism.h_max)
        .collect();
    if levels.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let (lo, hi) = prism.base.bounds();
    let i0 = (lo[0] / resolution).floor() as i64;
    let i1 = (hi[0] / resolution).ceil() as i64;
    let j0 = (lo[1] / resolution).floor() as i64;
    let j1 = (hi[1] / resolution).ceil() as i64;
    let mut columns = Vec::new();
    for j in j0..j1 {
        let y = (j as f64 + 0.5) * resolution;
        for i in i0..i1 {
            let x = (i as f64 + 0.5) * resolution;
            if prism.base.contains_strict([x, y]) {
                columns.push([x, y]);
            }
        }
    }
    if columns.is_empty() {
        columns.push(prism.base.centroid());
    }
    let n = columns.len() * levels.len();
    let mut centers = Vec::with_capacity(n);
    let mut layer_index = Vec::with_capacity(n);
    for &z in &levels {
        let layer = prism.layer_of(z) as u16;
        for c in &columns {
            centers.push(Point3::new(c[0], c[1], z));
            layer_index.push(layer);
        }
    }
    Ok(VoxelGrid {
        resolution,
        centers,
        layer_index,
        layers: prism.layers.clone(),
    })
}
