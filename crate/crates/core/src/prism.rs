//! Inter-region overlap of triangular, square and hexagonal prism coverage
//! structures, with a Monte-Carlo volume estimator of the same solids, and
//! the longest-edge overlap indicator of a triangular cooperation region.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{triangle_metrics, TriangleRegion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureKind {
    /// Triangular prism.
    Tp,
    /// Square prism.
    Sp,
    /// Hexagonal prism.
    Hp,
}

impl StructureKind {
    pub const ALL: [StructureKind; 3] = [StructureKind::Tp, StructureKind::Sp, StructureKind::Hp];

    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Tp => "TP",
            StructureKind::Sp => "SP",
            StructureKind::Hp => "HP",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrismStructure {
    pub kind: StructureKind,
    pub coverage_radius: f64,
    pub height: f64,
}

impl PrismStructure {
    pub fn new(kind: StructureKind, coverage_radius: f64, height: f64) -> Result<Self> {
        let s = Self { kind, coverage_radius, height };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        if !(self.height > 0.0 && self.height <= self.coverage_radius && self.coverage_radius.is_finite()) {
            return Err(Error::PremiseViolated {
                radius: self.coverage_radius,
                height: self.height,
            });
        }
        Ok(())
    }

    /// Inter-site distance of the regular cell: `r`, `r/sqrt 2`, `r/2`.
    pub fn site_spacing(&self) -> f64 {
        let r = self.coverage_radius;
        match self.kind {
            StructureKind::Tp => r,
            StructureKind::Sp => 2f64.sqrt() * r / 2.0,
            StructureKind::Hp => r / 2.0,
        }
    }

    pub fn cell_area(&self) -> f64 {
        let d = self.site_spacing();
        match self.kind {
            StructureKind::Tp => 3f64.sqrt() * d * d / 4.0,
            StructureKind::Sp => d * d,
            StructureKind::Hp => 3.0 * 3f64.sqrt() * d * d / 2.0,
        }
    }

    /// Signed solids whose volumes make up the overlap of one cell.
    fn terms(&self) -> Vec<Term> {
        let r = self.coverage_radius;
        let d = self.site_spacing();
        match self.kind {
            StructureKind::Tp => {
                let h = d - 3f64.sqrt() * d / 2.0;
                vec![Term { weight: 3.0, solid: Solid::Cap { sphere_radius: r, height: h } }]
            }
            StructureKind::Sp => {
                let h = 2f64.sqrt() * d - d;
                vec![
                    Term { weight: 4.0, solid: Solid::Cap { sphere_radius: r, height: h } },
                    Term { weight: -4.0, solid: Solid::Cone { radius: h, height: h } },
                ]
            }
            StructureKind::Hp => {
                let a = 3f64.sqrt() * d / 2.0;
                vec![
                    Term { weight: 6.0, solid: Solid::Cap { sphere_radius: r, height: d } },
                    // volume pi a^2 (d/2), as used by the closed form
                    Term { weight: -6.0, solid: Solid::Cylinder { radius: a, height: d / 2.0 } },
                    Term { weight: -6.0, solid: Solid::Cylinder { radius: a, height: d / 6.0 } },
                ]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Solid {
    /// Spherical segment of height `height` cut from a sphere.
    Cap { sphere_radius: f64, height: f64 },
    /// Right circular cone, apex up.
    Cone { radius: f64, height: f64 },
    Cylinder { radius: f64, height: f64 },
}

impl Solid {
    fn volume(&self) -> f64 {
        match *self {
            Solid::Cap { sphere_radius, height } => PI * height * height * (sphere_radius - height / 3.0),
            Solid::Cone { radius, height } => PI * radius * radius * height / 3.0,
            Solid::Cylinder { radius, height } => PI * radius * radius * height,
        }
    }

    /// Half-width and height of the axis-aligned bounding box, and its z offset.
    fn bounding_box(&self) -> (f64, f64, f64) {
        match *self {
            Solid::Cap { sphere_radius, height } => {
                let base = sphere_radius - height;
                ((sphere_radius * sphere_radius - base * base).sqrt(), height, base)
            }
            Solid::Cone { radius, height } | Solid::Cylinder { radius, height } => (radius, height, 0.0),
        }
    }

    fn contains(&self, x: f64, y: f64, z: f64) -> bool {
        let rho2 = x * x + y * y;
        match *self {
            Solid::Cap { sphere_radius, .. } => rho2 + z * z <= sphere_radius * sphere_radius,
            Solid::Cone { radius, height } => {
                let a = radius * (1.0 - z / height);
                rho2 <= a * a
            }
            Solid::Cylinder { radius, .. } => rho2 <= radius * radius,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    weight: f64,
    solid: Solid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMethod {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub zeta: f64,
    pub method: OverlapMethod,
    pub sample_count: Option<u64>,
    pub std_error: Option<f64>,
}

/// Closed-form overlap ratio of one cell:
/// TP `(16 sqrt3 - 27) pi r / 6H`, SP `4 (sqrt2 - 1) pi r / 3H`,
/// HP `7 pi r / (3 sqrt3 H)`.
pub fn analytic_overlap(structure: &PrismStructure) -> Result<OverlapResult> {
    structure.check()?;
    let ratio = structure.coverage_radius / structure.height;
    let s3 = 3f64.sqrt();
    let zeta = match structure.kind {
        StructureKind::Tp => (16.0 * s3 - 27.0) * PI / 6.0 * ratio,
        StructureKind::Sp => 4.0 * (2f64.sqrt() - 1.0) * PI / 3.0 * ratio,
        StructureKind::Hp => 7.0 * PI / (3.0 * s3) * ratio,
    };
    Ok(OverlapResult {
        zeta,
        method: OverlapMethod::Analytic,
        sample_count: None,
        std_error: None,
    })
}

/// Overlap ratio from the exact volumes of the decomposition solids. Agrees
/// with [`analytic_overlap`] up to rounding.
pub fn decomposed_overlap(structure: &PrismStructure) -> Result<f64> {
    structure.check()?;
    let v: f64 = structure.terms().iter().map(|t| t.weight * t.solid.volume()).sum();
    Ok(v / (structure.cell_area() * structure.height))
}

/// Fixed partition count so results depend only on the seed.
pub const MC_PARTITIONS: u64 = 16;

/// Monte-Carlo estimate of the overlap ratio: every solid of the cell
/// decomposition is sampled uniformly in its bounding box. Deterministic for
/// a fixed seed.
pub fn monte_carlo_overlap(structure: &PrismStructure, n_samples: u64, seed: u64) -> Result<OverlapResult> {
    monte_carlo_overlap_with(structure, n_samples, seed, Execution::Parallel)
}

pub fn monte_carlo_overlap_with(
    structure: &PrismStructure,
    n_samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<OverlapResult> {
    structure.check()?;
    if n_samples < 10_000 {
        return Err(Error::invalid("n_samples", "at least 10^4 samples are required"));
    }
    let terms = structure.terms();
    let per_term = n_samples / terms.len() as u64;
    let mut estimate = 0.0;
    let mut variance = 0.0;
    for (ti, term) in terms.iter().enumerate() {
        let (half, height, z0) = term.solid.bounding_box();
        let solid = term.solid;
        let hits: u64 = exec
            .map_range(MC_PARTITIONS as usize, |p| {
                let p = p as u64;
                let quota = per_term / MC_PARTITIONS + u64::from(p < per_term % MC_PARTITIONS);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(ti as u64 * MC_PARTITIONS + p);
                (0..quota)
                    .filter(|_| {
                        let x = rng.random_range(-half..half);
                        let y = rng.random_range(-half..half);
                        let z = z0 + rng.random::<f64>() * height;
                        solid.contains(x, y, z)
                    })
                    .count() as u64
            })
            .into_iter()
            .sum();
        let box_volume = 4.0 * half * half * height;
        let frac = hits as f64 / per_term as f64;
        estimate += term.weight * box_volume * frac;
        variance += (term.weight * box_volume).powi(2) * frac * (1.0 - frac) / per_term as f64;
    }
    let cell = structure.cell_area() * structure.height;
    Ok(OverlapResult {
        zeta: estimate / cell,
        method: OverlapMethod::MonteCarlo,
        sample_count: Some(per_term * terms.len() as u64),
        std_error: Some(variance.sqrt() / cell),
    })
}

/// Total sector area `sum n_i pi R^2 / 360` of three antennas at the corners
/// of a triangle with inner angles `angles_deg`.
pub fn triangle_coverage_area(angles_deg: [f64; 3], radius: f64) -> f64 {
    angles_deg.iter().map(|n| n * PI * radius * radius / 360.0).sum()
}

/// `(S - S0) / S0` with `S` the sector area at radius half the longest edge
/// and `S0` the triangle area.
pub fn longest_edge_overlap_ratio(vertices: [[f64; 2]; 3]) -> Result<f64> {
    let m = triangle_metrics(vertices)?;
    let s = triangle_coverage_area(m.inner_angles, 0.5 * m.longest_edge);
    Ok((s - m.area) / m.area)
}

pub fn region_overlap_ratio(region: &TriangleRegion) -> Result<f64> {
    longest_edge_overlap_ratio(region.corners)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaRow {
    pub kind: StructureKind,
    pub r_over_h: f64,
    pub analytic: f64,
    pub monte_carlo: Option<f64>,
    pub std_error: Option<f64>,
}

/// Overlap ratios for every structure kind at each `r/H` (with `H = 1`).
/// Monte-Carlo columns are filled when `mc` carries `(samples, seed)`.
pub fn zeta_table(ratios: &[f64], mc: Option<(u64, u64)>) -> Result<Vec<ZetaRow>> {
    let mut rows = Vec::new();
    for &ratio in ratios {
        for kind in StructureKind::ALL {
            let s = PrismStructure::new(kind, ratio, 1.0)?;
            let analytic = analytic_overlap(&s)?.zeta;
            let est = mc.map(|(n, seed)| monte_carlo_overlap(&s, n, seed)).transpose()?;
            rows.push(ZetaRow {
                kind,
                r_over_h: ratio,
                analytic,
                monte_carlo: est.map(|e| e.zeta),
                std_error: est.and_then(|e| e.std_error),
            });
        }
    }
    Ok(rows)
}
