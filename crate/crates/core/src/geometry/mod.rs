//! Station topology, cooperation-set triangulation and airspace discretization.

mod triangulation;
mod voxel;

pub use triangulation::{delaunay_triangulate, random_triangulate, violates_empty_circumcircle};
pub use voxel::{build_voxel_grid, PrismAirspace, VoxelGrid};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

/// A terrestrial base station site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: u32,
    pub position: Point3,
}

impl BaseStation {
    pub fn new(id: u32, x: f64, y: f64, z: f64) -> Self {
        Self {
            id,
            position: Point3::new(x, y, z),
        }
    }
}

/// One cooperation set: three stations and the planar triangle they span.
///
/// `inner_angles[i]` is the angle at `corners[i]` (the site of
/// `vertex_ids[i]`), in degrees. Corners are stored counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleRegion {
    pub vertex_ids: [u32; 3],
    pub corners: [[f64; 2]; 3],
    pub inner_angles: [f64; 3],
    pub area: f64,
    pub longest_edge: f64,
}

impl TriangleRegion {
    pub fn from_stations(stations: [&BaseStation; 3]) -> Result<Self> {
        let mut order = [0usize, 1, 2];
        let pts = stations.map(|s| s.position.xy());
        if robust_orient(pts[0], pts[1], pts[2]) < 0.0 {
            order.swap(1, 2);
        }
        let corners = order.map(|i| pts[i]);
        let vertex_ids = order.map(|i| stations[i].id);
        let metrics = triangle_metrics(corners)?;
        Ok(Self {
            vertex_ids,
            corners,
            inner_angles: metrics.inner_angles,
            area: metrics.area,
            longest_edge: metrics.longest_edge,
        })
    }

    pub fn centroid(&self) -> [f64; 2] {
        let c = &self.corners;
        [
            (c[0][0] + c[1][0] + c[2][0]) / 3.0,
            (c[0][1] + c[1][1] + c[2][1]) / 3.0,
        ]
    }

    pub fn min_angle(&self) -> f64 {
        self.inner_angles.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Strict interior test.
    pub fn contains_strict(&self, p: [f64; 2]) -> bool {
        let c = &self.corners;
        robust_orient(c[0], c[1], p) > 0.0
            && robust_orient(c[1], c[2], p) > 0.0
            && robust_orient(c[2], c[0], p) > 0.0
    }

    /// Bounding box as `([min_x, min_y], [max_x, max_y])`.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let c = &self.corners;
        let min = [
            c[0][0].min(c[1][0]).min(c[2][0]),
            c[0][1].min(c[1][1]).min(c[2][1]),
        ];
        let max = [
            c[0][0].max(c[1][0]).max(c[2][0]),
            c[0][1].max(c[1][1]).max(c[2][1]),
        ];
        (min, max)
    }

    /// Vertex ids sorted ascending; identifies the cooperation set.
    pub fn key(&self) -> [u32; 3] {
        let mut k = self.vertex_ids;
        k.sort_unstable();
        k
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleMetrics {
    pub inner_angles: [f64; 3],
    pub area: f64,
    pub longest_edge: f64,
}

/// Inner angles (degrees, at each vertex in input order), shoelace area and
/// longest edge of a planar triangle.
pub fn triangle_metrics(vertices: [[f64; 2]; 3]) -> Result<TriangleMetrics> {
    let [a, b, c] = vertices;
    let twice_area = robust_orient(a, b, c);
    let edges = [dist2(b, c), dist2(c, a), dist2(a, b)];
    let longest = edges.iter().copied().fold(0.0, f64::max);
    if twice_area == 0.0 || twice_area.abs() <= 1e-12 * longest * longest {
        return Err(Error::DegenerateTriangle);
    }
    let angle_at = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        cross.abs().atan2(dot).to_degrees()
    };
    let a0 = angle_at(a, b, c);
    let a1 = angle_at(b, c, a);
    // closing the sum keeps the three angles exactly consistent
    let a2 = 180.0 - a0 - a1;
    Ok(TriangleMetrics {
        inner_angles: [a0, a1, a2],
        area: 0.5 * twice_area.abs(),
        longest_edge: longest,
    })
}

pub(crate) fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Twice the signed area of (a, b, c); positive when counter-clockwise.
pub(crate) fn robust_orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    robust::orient2d(
        robust::Coord { x: a[0], y: a[1] },
        robust::Coord { x: b[0], y: b[1] },
        robust::Coord { x: c[0], y: c[1] },
    )
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counter-clockwise triangle (a, b, c).
pub(crate) fn robust_incircle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    robust::incircle(
        robust::Coord { x: a[0], y: a[1] },
        robust::Coord { x: b[0], y: b[1] },
        robust::Coord { x: c[0], y: c[1] },
        robust::Coord { x: d[0], y: d[1] },
    )
}

/// Rejects topologies the planner cannot triangulate: fewer than three
/// stations, repeated ids, repeated planar sites, negative heights, or all
/// sites collinear.
pub fn validate_stations(stations: &[BaseStation]) -> Result<()> {
    if stations.len() < 3 {
        return Err(Error::InsufficientStations(stations.len()));
    }
    for (i, a) in stations.iter().enumerate() {
        if !(a.position.x.is_finite() && a.position.y.is_finite() && a.position.z.is_finite()) {
            return Err(Error::DegenerateTopology(format!(
                "station {} has a non-finite coordinate",
                a.id
            )));
        }
        if a.position.z < 0.0 {
            return Err(Error::DegenerateTopology(format!(
                "station {} has negative height",
                a.id
            )));
        }
        for b in &stations[i + 1..] {
            if a.id == b.id {
                return Err(Error::DegenerateTopology(format!("duplicate station id {}", a.id)));
            }
            if a.position.x == b.position.x && a.position.y == b.position.y {
                return Err(Error::DegenerateTopology(format!(
                    "stations {} and {} share the planar position ({}, {})",
                    a.id, b.id, a.position.x, a.position.y
                )));
            }
        }
    }
    let p0 = stations[0].position.xy();
    let p1 = stations[1].position.xy();
    if stations[2..]
        .iter()
        .all(|s| robust_orient(p0, p1, s.position.xy()) == 0.0)
    {
        return Err(Error::DegenerateTopology("all stations are collinear".into()));
    }
    Ok(())
}
