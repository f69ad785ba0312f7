use serde::{Deserialize, Serialize};

use super::{Layout, LayoutProblem};
use crate::catalog::Placement;
use crate::geom::{Cell, Rect};

/// One gene per build-list entry. Gene `k` encodes the inner-city position
/// `(k / n, k % n)` for an `m x n` inner city.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Genome {
    pub genes: Vec<u32>,
}

impl Genome {
    pub fn new(genes: Vec<u32>) -> Self {
        Genome { genes }
    }

    pub fn random(rng: &mut impl rand::Rng, len: usize, positions: u32) -> Self {
        Genome {
            genes: (0..len).map(|_| rng.gen_range(0..positions)).collect(),
        }
    }
}

pub(crate) fn gene_anchor(inner: Rect, gene: u32) -> Option<Cell> {
    let k = gene as usize;
    if k >= inner.area() {
        return None;
    }
    Some(Cell::new(inner.x0 + k / inner.length, inner.z0 + k % inner.length))
}

/// Decode genes in order. A gene whose footprint leaves the inner city or
/// comes closer than the minimum distance to an already kept placement is
/// skipped, so the first of two conflicting genes wins.
pub fn decode_genome(genome: &Genome, problem: &LayoutProblem) -> Layout {
    let inner = problem.inner();
    let min_distance = problem.model().min_distance;
    let mut rects: Vec<Rect> = Vec::with_capacity(genome.genes.len());
    let mut layout = Layout::default();
    for (spec, &gene) in problem.specs().iter().zip(&genome.genes) {
        let Some(anchor) = gene_anchor(inner, gene) else {
            continue;
        };
        let rect = spec.rect_at(anchor);
        if !inner.contains_rect(&rect) || rects.iter().any(|r| r.gap(&rect) < min_distance) {
            continue;
        }
        layout.total_score += problem.scorer().score(spec, anchor, &rects);
        rects.push(rect);
        layout.placements.push(Placement::new(spec, anchor));
    }
    layout
}
