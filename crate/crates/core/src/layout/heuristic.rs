use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Algorithm, Layout, LayoutProblem, Trace};
use crate::catalog::Placement;
use crate::error::{Error, Result};
use crate::geom::{Cell, Rect};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicParams {
    /// Number of layouts grown from scratch.
    pub nb: usize,
    /// Random candidates tried per growth step.
    pub max_try: usize,
    /// Hard cap on candidate evaluations across all restarts.
    pub max_evaluations: Option<u64>,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            nb: 8,
            max_try: 200,
            max_evaluations: None,
        }
    }
}

struct Candidate {
    slot: usize,
    anchor: Cell,
    score: i64,
}

/// Greedy restarts. Each layout grows one building at a time: `max_try`
/// random (remaining building, anchor) candidates are drawn, the best legal
/// one is kept, and growth stops once the best candidate no longer has a
/// positive score. The best of the `nb` layouts is returned.
///
/// Each candidate drawn counts as one evaluation.
pub fn heuristic_layout(problem: &LayoutProblem, params: &HeuristicParams, seed: u64) -> Result<(Layout, Trace)> {
    if params.nb == 0 || params.max_try == 0 {
        return Err(Error::config("heuristic layout needs nb >= 1 and max_try >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Trace::new(Algorithm::Heuristic, seed);
    let inner = problem.inner();
    let min_distance = problem.model().min_distance;
    let cap = params.max_evaluations.unwrap_or(u64::MAX);
    let mut evaluations = 0u64;
    let mut best: Option<Layout> = None;

    'restarts: for _ in 0..params.nb {
        let mut remaining: Vec<usize> = (0..problem.specs().len()).collect();
        let mut rects: Vec<Rect> = Vec::new();
        let mut layout = Layout::default();
        let mut exhausted = false;
        while !remaining.is_empty() {
            let mut step_best: Option<Candidate> = None;
            for _ in 0..params.max_try {
                if evaluations >= cap {
                    exhausted = true;
                    break;
                }
                evaluations += 1;
                let slot = rng.gen_range(0..remaining.len());
                let spec = &problem.specs()[remaining[slot]];
                let [fw, fl] = spec.footprint;
                if fw > inner.width || fl > inner.length {
                    continue;
                }
                let anchor = Cell::new(
                    rng.gen_range(inner.x0..=inner.x1() - fw),
                    rng.gen_range(inner.z0..=inner.z1() - fl),
                );
                let rect = spec.rect_at(anchor);
                if rects.iter().any(|r| r.gap(&rect) < min_distance) {
                    continue;
                }
                let score = problem.scorer().score(spec, anchor, &rects);
                if step_best.as_ref().is_none_or(|b| score > b.score) {
                    step_best = Some(Candidate { slot, anchor, score });
                }
            }
            match step_best {
                Some(c) if c.score > 0 => {
                    let spec = &problem.specs()[remaining.remove(c.slot)];
                    rects.push(spec.rect_at(c.anchor));
                    layout.placements.push(Placement::new(spec, c.anchor));
                    layout.total_score += c.score;
                    trace.record_improvement(evaluations, layout.total_score);
                }
                _ => break,
            }
            if exhausted {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| layout.total_score > b.total_score) {
            best = Some(layout);
        }
        if exhausted {
            break 'restarts;
        }
    }
    let best = best.unwrap_or_default();
    trace.record_improvement(evaluations, best.total_score);
    trace.finish(evaluations);
    Ok((best, trace))
}
