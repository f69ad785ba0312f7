//! Streetlights at k-means centroids of the building centres, each snapped
//! to the nearest free cell.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Cell, Rect};
use crate::layout::Layout;
use crate::routing::RoadPlan;
use crate::world::{nearest_by_bfs, BlockClass, Edit, VoxelWorld};

pub const DEFAULT_MAX_ITERATIONS: usize = 100;
pub const SNAP_RADIUS: usize = 20;

pub type Point = (f64, f64);

fn dist2(a: Point, b: Point) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeans {
    pub centroids: Vec<Point>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
}

impl KMeans {
    /// Within-cluster sum of squared distances.
    pub fn wcss(&self, points: &[Point]) -> f64 {
        wcss(points, &self.centroids, &self.assignments)
    }
}

pub fn wcss(points: &[Point], centroids: &[Point], assignments: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(&p, &a)| dist2(p, centroids[a]))
        .sum()
}

pub fn assign(points: &[Point], centroids: &[Point]) -> Vec<usize> {
    points
        .iter()
        .map(|&p| {
            (0..centroids.len())
                .min_by(|&a, &b| dist2(p, centroids[a]).total_cmp(&dist2(p, centroids[b])))
                .expect("at least one centroid")
        })
        .collect()
}

/// Lloyd's algorithm seeded with `k` distinct input points. A cluster that
/// empties out is reseeded at the point farthest from its old centroid.
pub fn kmeans(points: &[Point], k: usize, max_iterations: usize, seed: u64) -> Result<KMeans> {
    if k == 0 || points.len() < k {
        return Err(Error::config(format!(
            "k-means needs 1 <= k <= {} points, got k = {k}",
            points.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Point> = rand::seq::index::sample(&mut rng, points.len(), k)
        .into_iter()
        .map(|i| points[i])
        .collect();
    let mut assignments = assign(points, &centroids);
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        let mut sums = vec![(0.0, 0.0, 0usize); k];
        for (&p, &a) in points.iter().zip(&assignments) {
            sums[a].0 += p.0;
            sums[a].1 += p.1;
            sums[a].2 += 1;
        }
        for (j, &(sx, sz, n)) in sums.iter().enumerate() {
            if n > 0 {
                centroids[j] = (sx / n as f64, sz / n as f64);
            } else {
                let old = centroids[j];
                let far = (0..points.len())
                    .max_by(|&a, &b| dist2(points[a], old).total_cmp(&dist2(points[b], old)).then(b.cmp(&a)))
                    .expect("points are non-empty");
                centroids[j] = points[far];
            }
        }
        let next = assign(points, &centroids);
        if next == assignments {
            break;
        }
        assignments = next;
    }
    Ok(KMeans {
        centroids,
        assignments,
        iterations,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LightPlan {
    pub k: usize,
    pub centroids: Vec<Point>,
    pub lights: Vec<Cell>,
    /// Centroids with no free cell within the snap radius.
    pub dropped: usize,
}

/// Cluster the footprint centres and place one streetlight per cluster on
/// the nearest cell inside the inner city that is dry, free of buildings and
/// roads, and not already lit. `k` defaults to half the building count,
/// rounded up.
pub fn place_streetlights(
    world: &VoxelWorld,
    layout: &Layout,
    roads: &RoadPlan,
    inner: Rect,
    k: Option<usize>,
    seed: u64,
) -> Result<LightPlan> {
    let points: Vec<Point> = layout.rects().iter().map(|r| r.center()).collect();
    if points.is_empty() {
        return Ok(LightPlan::default());
    }
    let k = k.unwrap_or(points.len().div_ceil(2)).max(1);
    if k > points.len() {
        return Err(Error::config(format!(
            "{k} streetlights requested for {} buildings",
            points.len()
        )));
    }
    let clusters = kmeans(&points, k, DEFAULT_MAX_ITERATIONS, seed)?;

    let (w, l) = (world.width(), world.length());
    let mut taken = vec![false; w * l];
    for c in layout.rects().into_iter().flat_map(|r| r.cells()).chain(roads.cells()) {
        taken[c.x * l + c.z] = true;
    }
    let mut plan = LightPlan {
        k,
        centroids: clusters.centroids.clone(),
        ..Default::default()
    };
    for &(cx, cz) in &clusters.centroids {
        let start = Cell::new(
            (cx.round().max(0.0) as usize).clamp(inner.x0, inner.x1() - 1),
            (cz.round().max(0.0) as usize).clamp(inner.z0, inner.z1() - 1),
        );
        let free = |c: Cell| !taken[c.x * l + c.z] && !world.is_water(c) && !world.is_artificial(c);
        match nearest_by_bfs(inner, start, Some(SNAP_RADIUS), free) {
            Some((c, _)) => {
                taken[c.x * l + c.z] = true;
                plan.lights.push(c);
            }
            None => {
                log::warn!("no free cell for a streetlight near ({cx:.1}, {cz:.1})");
                plan.dropped += 1;
            }
        }
    }
    Ok(plan)
}

/// Stand a streetlight on top of each planned cell.
pub fn apply_lights(world: &mut VoxelWorld, plan: &LightPlan) -> usize {
    for &c in &plan.lights {
        let y = world.altitude(c);
        world.apply_edit(Edit::new(c, y, BlockClass::Streetlight));
    }
    plan.lights.len()
}
