//! Fixtures shared by the integration targets.
#![allow(dead_code)]

use g2a_coverage::geometry::{build_voxel_grid, BaseStation, PrismAirspace, TriangleRegion, VoxelGrid};
use g2a_coverage::optimizer::CooperationSet;
use g2a_coverage::scenario::Scenario;
use g2a_coverage::Execution;

/// Synthetic nine-site network, hull of about 15 km^2, ten Delaunay
/// triangles including one sliver.
pub fn nine_stations() -> Vec<BaseStation> {
    [
        (1, 0.0, 0.0, 25.0),
        (2, 1545.0, 309.0, 30.0),
        (3, 3296.0, 0.0, 28.0),
        (4, 4738.0, 927.0, 35.0),
        (5, 4326.0, 2987.0, 25.0),
        (6, 2472.0, 4120.0, 30.0),
        (7, 515.0, 3399.0, 32.0),
        (8, 2060.0, 1751.0, 27.0),
        (9, 3399.0, 1957.0, 30.0),
    ]
    .iter()
    .map(|&(id, x, y, z)| BaseStation::new(id, x, y, z))
    .collect()
}

/// Triangle with inner angles (99, 54, 27) degrees and the given area,
/// stations 25 m high.
pub fn angle_triangle(area_m2: f64) -> [BaseStation; 3] {
    let (a, b, c) = (99f64.to_radians(), 54f64.to_radians(), 27f64.to_radians());
    // sides opposite each angle, scaled so that 0.5 * s_b * s_c * sin(a) = area
    let k = (2.0 * area_m2 / (b.sin() * c.sin() * a.sin())).sqrt();
    let (sb, sc) = (k * b.sin(), k * c.sin());
    [
        BaseStation::new(2, 0.0, 0.0, 25.0),
        BaseStation::new(3, sc, 0.0, 25.0),
        BaseStation::new(4, sb * a.cos(), sb * a.sin(), 25.0),
    ]
}

pub fn equilateral(side: f64) -> [BaseStation; 3] {
    [
        BaseStation::new(1, 0.0, 0.0, 25.0),
        BaseStation::new(2, side, 0.0, 25.0),
        BaseStation::new(3, side / 2.0, side * 3f64.sqrt() / 2.0, 25.0),
    ]
}

pub fn scenario(stations: &[BaseStation], resolution: f64) -> Scenario {
    Scenario {
        stations: stations.to_vec(),
        voxel_resolution_m: resolution,
        ..Default::default()
    }
}

/// Single cooperation set over the prism of `stations` using the scenario's
/// radio settings and layer bands.
pub fn single_set(s: &Scenario, stations: [BaseStation; 3]) -> (CooperationSet, VoxelGrid, TriangleRegion) {
    let region = TriangleRegion::from_stations([&stations[0], &stations[1], &stations[2]]).unwrap();
    let prism: PrismAirspace = s.prism(region.clone()).unwrap();
    let grid = build_voxel_grid(&prism, s.voxel_resolution_m).unwrap();
    let set = CooperationSet::new(&region, stations, &grid, &s.coverage_model().unwrap(), Execution::Parallel).unwrap();
    (set, grid, region)
}

/// (a1, a2, a3, b, v1, v2) rows of the published DT-based results table.
pub const TABLE_DT: [(f64, f64, f64, f64, f64, f64); 9] = [
    (5.0, 171.0, 5.0, 0.61, 0.51, 0.84),
    (140.0, 15.0, 25.0, 0.67, 0.85, 0.95),
    (25.0, 121.0, 34.0, 0.66, 0.80, 0.98),
    (34.0, 35.0, 111.0, 2.22, 0.88, 0.95),
    (27.0, 54.0, 99.0, 0.97, 0.9, 0.95),
    (23.0, 82.0, 75.0, 1.36, 0.91, 0.94),
    (70.0, 74.0, 36.0, 1.56, 0.87, 0.94),
    (65.0, 75.0, 40.0, 4.62, 0.87, 0.92),
    (61.0, 66.0, 53.0, 2.5, 0.9, 0.93),
];

/// Same columns for the random plane division.
pub const TABLE_RANDOM: [(f64, f64, f64, f64, f64, f64); 9] = [
    (172.0, 4.0, 4.0, 0.43, 0.55, 0.88),
    (141.0, 20.0, 19.0, 2.14, 0.81, 0.94),
    (5.0, 171.0, 5.0, 0.61, 0.51, 0.84),
    (33.0, 100.0, 47.0, 1.31, 0.90, 0.94),
    (140.0, 15.0, 25.0, 0.67, 0.85, 0.95),
    (25.0, 121.0, 34.0, 0.66, 0.80, 0.98),
    (19.0, 35.0, 126.0, 3.47, 0.80, 0.86),
    (101.0, 55.0, 24.0, 4.89, 0.79, 0.87),
    (11.0, 159.0, 10.0, 0.99, 0.75, 0.89),
];
