//! Incremental planar triangulation with Lawson edge flips.
//!
//! Points are inserted one at a time (split inside, split on an edge, or fan
//! out to the visible hull edges). The Delaunay variant then flips every
//! edge that fails the in-circle test until none remain; the random variant
//! uses a shuffled insertion order followed by random legal flips.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{robust_incircle, robust_orient, validate_stations, BaseStation, TriangleRegion};
use crate::error::{Error, Result};

type Tri = [usize; 3];

/// Delaunay triangulation of the stations' planar projections.
pub fn delaunay_triangulate(stations: &[BaseStation]) -> Result<Vec<TriangleRegion>> {
    validate_stations(stations)?;
    let pts: Vec<[f64; 2]> = stations.iter().map(|s| s.position.xy()).collect();
    let order: Vec<usize> = (0..pts.len()).collect();
    let mut tris = insert_all(&pts, &order)?;
    legalize(&pts, &mut tris);
    to_regions(stations, &tris)
}

/// A valid triangulation of the stations' hull that ignores the
/// empty-circumcircle criterion. Deterministic for a fixed seed.
pub fn random_triangulate(stations: &[BaseStation], seed: u64) -> Result<Vec<TriangleRegion>> {
    validate_stations(stations)?;
    let pts: Vec<[f64; 2]> = stations.iter().map(|s| s.position.xy()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(&mut rng);
    let mut tris = insert_all(&pts, &order)?;
    for _ in 0..2 {
        let mut edges: Vec<(usize, usize)> = interior_edges(&tris).into_keys().collect();
        edges.shuffle(&mut rng);
        for (a, b) in edges {
            if rng.random_bool(0.5) {
                let adj = interior_edges(&tris);
                if let Some(&(t, u)) = adj.get(&(a, b)) {
                    if flip_is_convex(&pts, &tris, t, u, a, b) {
                        flip(&mut tris, t, u, a, b);
                    }
                }
            }
        }
    }
    to_regions(stations, &tris)
}

/// True when some station lies strictly inside the triangle's circumcircle.
pub fn violates_empty_circumcircle(triangle: &TriangleRegion, stations: &[BaseStation]) -> bool {
    let [a, b, c] = triangle.corners;
    stations.iter().any(|s| {
        !triangle.vertex_ids.contains(&s.id) && robust_incircle(a, b, c, s.position.xy()) > 0.0
    })
}

fn insert_all(pts: &[[f64; 2]], order: &[usize]) -> Result<Vec<Tri>> {
    let (i0, i1) = (order[0], order[1]);
    let k = order[2..]
        .iter()
        .position(|&k| robust_orient(pts[i0], pts[i1], pts[k]) != 0.0)
        .ok_or_else(|| Error::DegenerateTopology("all stations are collinear".into()))?
        + 2;
    let i2 = order[k];
    let first = if robust_orient(pts[i0], pts[i1], pts[i2]) > 0.0 {
        [i0, i1, i2]
    } else {
        [i0, i2, i1]
    };
    let mut tris = vec![first];
    for (pos, &p) in order.iter().enumerate() {
        if pos == 0 || pos == 1 || pos == k {
            continue;
        }
        insert_point(pts, &mut tris, p)?;
    }
    Ok(tris)
}

fn insert_point(pts: &[[f64; 2]], tris: &mut Vec<Tri>, p: usize) -> Result<()> {
    let q = pts[p];
    for t in 0..tris.len() {
        let [a, b, c] = tris[t];
        let o = [
            robust_orient(pts[a], pts[b], q),
            robust_orient(pts[b], pts[c], q),
            robust_orient(pts[c], pts[a], q),
        ];
        if o.iter().any(|&v| v < 0.0) {
            continue;
        }
        let zeros = o.iter().filter(|&&v| v == 0.0).count();
        match zeros {
            0 => {
                tris[t] = [a, b, p];
                tris.push([b, c, p]);
                tris.push([c, a, p]);
            }
            1 => {
                let tri = tris[t];
                let e = o.iter().position(|&v| v == 0.0).unwrap();
                let (u, v, w) = (tri[e], tri[(e + 1) % 3], tri[(e + 2) % 3]);
                tris[t] = [u, p, w];
                tris.push([p, v, w]);
                if let Some(n) = tris.iter().position(|tr| has_directed_edge(tr, v, u)) {
                    let tr = tris[n];
                    let x = tr.iter().copied().find(|&x| x != u && x != v).unwrap();
                    tris[n] = [v, p, x];
                    tris.push([p, u, x]);
                }
            }
            _ => {
                return Err(Error::DegenerateTopology(format!(
                    "point {p} coincides with an existing vertex"
                )))
            }
        }
        return Ok(());
    }
    // Outside the current hull: fan out to every strictly visible hull edge.
    let hull: Vec<(usize, usize)> = boundary_edges(tris);
    let mut added = false;
    for (a, b) in hull {
        if robust_orient(pts[a], pts[b], q) < 0.0 {
            tris.push([b, a, p]);
            added = true;
        }
    }
    if !added {
        return Err(Error::DegenerateTopology(format!(
            "point {p} could not be attached to the hull"
        )));
    }
    Ok(())
}

fn has_directed_edge(t: &Tri, a: usize, b: usize) -> bool {
    (0..3).any(|i| t[i] == a && t[(i + 1) % 3] == b)
}

fn directed_edges(tris: &[Tri]) -> BTreeMap<(usize, usize), usize> {
    let mut map = BTreeMap::new();
    for (i, t) in tris.iter().enumerate() {
        for e in 0..3 {
            map.insert((t[e], t[(e + 1) % 3]), i);
        }
    }
    map
}

fn boundary_edges(tris: &[Tri]) -> Vec<(usize, usize)> {
    let map = directed_edges(tris);
    map.keys()
        .filter(|&&(a, b)| !map.contains_key(&(b, a)))
        .copied()
        .collect()
}

/// Undirected interior edges `(a, b)` with `a < b`, mapped to the triangle
/// holding `a -> b` and the one holding `b -> a`.
fn interior_edges(tris: &[Tri]) -> BTreeMap<(usize, usize), (usize, usize)> {
    let map = directed_edges(tris);
    let mut out = BTreeMap::new();
    for (&(a, b), &t) in &map {
        if a < b {
            if let Some(&u) = map.get(&(b, a)) {
                out.insert((a, b), (t, u));
            }
        }
    }
    out
}

fn opposite(t: &Tri, a: usize, b: usize) -> usize {
    t.iter().copied().find(|&x| x != a && x != b).unwrap()
}

fn flip_is_convex(pts: &[[f64; 2]], tris: &[Tri], t: usize, u: usize, a: usize, b: usize) -> bool {
    let c = opposite(&tris[t], a, b);
    let d = opposite(&tris[u], a, b);
    let s1 = robust_orient(pts[c], pts[d], pts[a]);
    let s2 = robust_orient(pts[c], pts[d], pts[b]);
    (s1 > 0.0 && s2 < 0.0) || (s1 < 0.0 && s2 > 0.0)
}

/// Replaces edge a-b (t holds a -> b, u holds b -> a) with the opposite diagonal.
fn flip(tris: &mut [Tri], t: usize, u: usize, a: usize, b: usize) {
    let c = opposite(&tris[t], a, b);
    let d = opposite(&tris[u], a, b);
    tris[t] = [a, d, c];
    tris[u] = [d, b, c];
}

fn legalize(pts: &[[f64; 2]], tris: &mut [Tri]) {
    loop {
        let mut flipped = false;
        for ((a, b), (t, u)) in interior_edges(tris) {
            let [p, q, r] = tris[t];
            let d = opposite(&tris[u], a, b);
            if robust_incircle(pts[p], pts[q], pts[r], pts[d]) > 0.0 {
                flip(tris, t, u, a, b);
                flipped = true;
                break;
            }
        }
        if !flipped {
            return;
        }
    }
}

fn to_regions(stations: &[BaseStation], tris: &[Tri]) -> Result<Vec<TriangleRegion>> {
    let mut out = tris
        .iter()
        .map(|t| TriangleRegion::from_stations(t.map(|i| &stations[i])))
        .collect::<Result<Vec<_>>>()?;
    for r in &mut out {
        // rotate so the smallest id leads, keeping counter-clockwise order
        let lead = (0..3).min_by_key(|&i| r.vertex_ids[i]).unwrap();
        r.vertex_ids.rotate_left(lead);
        r.corners.rotate_left(lead);
        r.inner_angles.rotate_left(lead);
    }
    out.sort_by_key(|r| r.key());
    Ok(out)
}
