use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::genome::{decode_genome, Genome};
use super::{Algorithm, Layout, LayoutProblem, Trace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveParams {
    pub pop_size: usize,
    pub generations: usize,
    pub p_mut: f64,
}

impl Default for EvolveParams {
    fn default() -> Self {
        EvolveParams {
            pop_size: 100,
            generations: 100,
            p_mut: 0.1,
        }
    }
}

impl EvolveParams {
    /// Evaluations spent by one run: every generation plus the final
    /// population.
    pub fn evaluations(&self) -> u64 {
        (self.pop_size * (self.generations + 1)) as u64
    }
}

/// Roulette-wheel selection of `count` parents after shifting fitness by
/// `1 - min` so every weight is at least 1.
fn select_parents<'a>(pop: &'a [Genome], fitness: &[i64], count: usize, rng: &mut impl Rng) -> Vec<&'a Genome> {
    let min = fitness.iter().copied().min().unwrap_or(0);
    let weights: Vec<f64> = fitness.iter().map(|&f| (f - min + 1) as f64).collect();
    let wheel = WeightedIndex::new(&weights).expect("weights are positive");
    (0..count).map(|_| &pop[wheel.sample(rng)]).collect()
}

/// Single-point crossover at a uniform cut in `1..len`.
fn reproduce(x: &Genome, y: &Genome, rng: &mut impl Rng) -> Genome {
    let len = x.genes.len();
    if len < 2 {
        return x.clone();
    }
    let cut = rng.gen_range(1..len);
    let mut genes = x.genes[..cut].to_vec();
    genes.extend_from_slice(&y.genes[cut..]);
    Genome::new(genes)
}

/// Replace one uniformly chosen gene with a uniform position.
fn mutate(child: &mut Genome, positions: u32, rng: &mut impl Rng) {
    if child.genes.is_empty() {
        return;
    }
    let i = rng.gen_range(0..child.genes.len());
    child.genes[i] = rng.gen_range(0..positions);
}

/// Generational GA without elitism: evaluate, select, breed, replace. The
/// returned layout is the best member of the final population; the trace
/// holds the best fitness seen after each generation.
pub fn evolve_layout(problem: &LayoutProblem, params: &EvolveParams, seed: u64) -> Result<(Layout, Trace)> {
    if params.pop_size < 2 {
        return Err(Error::config("evolve layout needs pop_size >= 2"));
    }
    if !(0.0..=1.0).contains(&params.p_mut) {
        return Err(Error::config("mutation rate must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Trace::new(Algorithm::Evolve, seed);
    let positions = problem.positions();
    let len = problem.specs().len();
    let mut evaluations = 0u64;

    let mut pop: Vec<Genome> = (0..params.pop_size)
        .map(|_| Genome::random(&mut rng, len, positions))
        .collect();

    for _ in 0..params.generations {
        let fitness: Vec<i64> = pop.iter().map(|g| decode_genome(g, problem).total_score).collect();
        evaluations += pop.len() as u64;
        trace.record(evaluations, *fitness.iter().max().expect("population is non-empty"));

        let parents = select_parents(&pop, &fitness, params.pop_size, &mut rng);
        pop = (0..params.pop_size)
            .map(|_| {
                let x = parents[rng.gen_range(0..parents.len())];
                let y = parents[rng.gen_range(0..parents.len())];
                let mut child = reproduce(x, y, &mut rng);
                if rng.gen::<f64>() < params.p_mut {
                    mutate(&mut child, positions, &mut rng);
                }
                child
            })
            .collect();
    }

    let layouts: Vec<Layout> = pop.iter().map(|g| decode_genome(g, problem)).collect();
    evaluations += pop.len() as u64;
    let best = layouts
        .into_iter()
        .reduce(|a, b| if b.total_score > a.total_score { b } else { a })
        .expect("population is non-empty");
    trace.record(evaluations, best.total_score);
    Ok((best, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{default_catalog, CostModel};
    use crate::layout::{layout_is_legal, layout_score, BuildList};

    #[test]
    fn defaults_match_published_setup() {
        let p = EvolveParams::default();
        assert_eq!((p.pop_size, p.generations, p.p_mut), (100, 100, 0.1));
    }

    #[test]
    fn crossover_and_mutation_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Genome::new(vec![1, 1, 1, 1]);
        let y = Genome::new(vec![2, 2, 2, 2]);
        for _ in 0..50 {
            let c = reproduce(&x, &y, &mut rng);
            let cut = c.genes.iter().position(|&g| g == 2).unwrap();
            assert!((1..4).contains(&cut));
            assert!(c.genes[cut..].iter().all(|&g| g == 2));
            let mut m = x.clone();
            mutate(&mut m, 10, &mut rng);
            assert!(m.genes.iter().filter(|&&g| g != 1).count() <= 1);
        }
    }

    #[test]
    fn selection_favours_fitter_genomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pop = vec![Genome::new(vec![0]), Genome::new(vec![1])];
        let picks = select_parents(&pop, &[-50, 950], 10_000, &mut rng);
        let fit = picks.iter().filter(|g| g.genes[0] == 1).count();
        // weights 1 and 1001
        assert!(fit > 9_900, "{fit}");
    }

    #[test]
    fn trace_is_monotone_and_layouts_legal() {
        let cat = default_catalog();
        let model = CostModel::default();
        let (w, _) = crate::world::generate_terrain(4, 40, 0.4, 0.05).unwrap();
        let list = BuildList::new(["shop", "enderman_statue", "trampoline"]);
        let p = LayoutProblem::new(&w, &cat, &model, w.bounds(), &list).unwrap();
        let params = EvolveParams {
            pop_size: 30,
            generations: 20,
            ..Default::default()
        };
        for seed in 0..5 {
            let (l, t) = evolve_layout(&p, &params, seed).unwrap();
            assert!(t.is_monotone());
            assert_eq!(t.evaluations(), params.evaluations());
            assert!(layout_is_legal(&l, w.bounds(), &cat, &model));
            assert_eq!(layout_score(&w, w.bounds(), &cat, &l, &model).unwrap(), l.total_score);
            assert_eq!(evolve_layout(&p, &params, seed).unwrap(), (l, t));
        }
    }
}
