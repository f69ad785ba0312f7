use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::genome::{decode_genome, Genome};
use super::{Algorithm, Layout, LayoutProblem, Trace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomParams {
    pub samples: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { samples: 10_100 }
    }
}

/// Decode `samples` uniform genomes and keep the best layout.
pub fn random_layout(problem: &LayoutProblem, params: &RandomParams, seed: u64) -> Result<(Layout, Trace)> {
    if params.samples == 0 {
        return Err(Error::config("random layout needs at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Trace::new(Algorithm::Random, seed);
    let (len, positions) = (problem.specs().len(), problem.positions());
    let mut best: Option<Layout> = None;
    for i in 1..=params.samples {
        let layout = decode_genome(&Genome::random(&mut rng, len, positions), problem);
        trace.record_improvement(i, layout.total_score);
        if best.as_ref().is_none_or(|b| layout.total_score > b.total_score) {
            best = Some(layout);
        }
    }
    trace.finish(params.samples);
    Ok((best.expect("at least one sample"), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_catalog, CostModel};
    use crate::layout::BuildList;
    use crate::world::VoxelWorld;

    #[test]
    fn single_sample_on_unfittable_world() {
        let w = VoxelWorld::flat(4, 4, 0);
        let p = LayoutProblem::new(
            &w,
            &default_catalog(),
            &CostModel::default(),
            w.bounds(),
            &BuildList::new(["dorm"]),
        )
        .unwrap();
        let (l, t) = random_layout(&p, &RandomParams { samples: 1 }, 0).unwrap();
        assert_eq!(l.total_score, 0);
        assert!(l.is_empty());
        assert_eq!(t.points.len(), 1);
    }

    #[test]
    fn same_seed_same_result() {
        let (w, _) = crate::world::generate_terrain(2, 30, 0.5, 0.05).unwrap();
        let p = LayoutProblem::new(
            &w,
            &default_catalog(),
            &CostModel::default(),
            w.bounds(),
            &BuildList::new(["shop", "trampoline"]),
        )
        .unwrap();
        let params = RandomParams { samples: 500 };
        let a = random_layout(&p, &params, 11).unwrap();
        assert_eq!(a, random_layout(&p, &params, 11).unwrap());
        assert!(a.1.is_monotone());
        assert_eq!(a.1.evaluations(), 500);
        assert!(random_layout(&p, &RandomParams { samples: 0 }, 1).is_err());
    }
}
