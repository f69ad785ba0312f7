//! Layout-stage benchmark over map profiles: every (profile, seed) terrain is
//! prepared once and each optimizer runs on it under the same evaluation
//! budget.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{default_catalog, Catalog, CostModel};
use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::layout::{
    evolve_layout, heuristic_layout, random_layout, Algorithm, BuildList, EvolveParams, HeuristicParams, Layout,
    LayoutProblem, RandomParams, Trace,
};
use crate::terrain_ops::{clear_vegetation, reshape};
use crate::walls::{inner_city_bounds, WallConfig};
use crate::world::{generate_terrain, VoxelWorld};

pub const CSV_HEADER: &str = "profile,algorithm,seed,evaluations,best_score";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapProfile {
    pub name: String,
    pub size: usize,
    pub buildings: usize,
    pub plain_ratio: f64,
    #[serde(default = "default_water")]
    pub water_fraction: f64,
}

fn default_water() -> f64 {
    0.05
}

impl MapProfile {
    pub fn new(name: &str, size: usize, buildings: usize, plain_ratio: f64) -> Self {
        MapProfile {
            name: name.to_string(),
            size,
            buildings,
            plain_ratio,
            water_fraction: default_water(),
        }
    }

    /// The four published map profiles.
    pub fn defaults() -> Vec<MapProfile> {
        vec![
            MapProfile::new("a", 100, 5, 0.606),
            MapProfile::new("b", 100, 5, 0.482),
            MapProfile::new("c", 150, 9, 0.539),
            MapProfile::new("d", 150, 9, 0.252),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkSpec {
    pub profiles: Vec<MapProfile>,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub first_seed: u64,
    /// Layout evaluations granted to every optimizer run.
    pub budget: u64,
    /// Worker threads; all available cores when unset.
    pub threads: Option<usize>,
    pub catalog: Option<Catalog>,
    pub cost_model: CostModel,
    pub walls: WallConfig,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            profiles: MapProfile::defaults(),
            algorithms: Algorithm::ALL.to_vec(),
            runs: 30,
            first_seed: 0,
            budget: EvolveParams::default().evaluations(),
            threads: None,
            catalog: None,
            cost_model: CostModel::default(),
            walls: WallConfig::default(),
        }
    }
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("benchmark needs at least one run"));
        }
        if self.profiles.is_empty() || self.algorithms.is_empty() {
            return Err(Error::config("benchmark needs at least one profile and one algorithm"));
        }
        if self.budget < 200 {
            return Err(Error::config("benchmark budget must be at least 200 evaluations"));
        }
        self.walls.validate()
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> {
        self.first_seed..self.first_seed + self.runs as u64
    }

    /// Optimizer parameters that spend `budget` evaluations for a build list
    /// of `buildings` entries.
    pub fn heuristic_params(&self, buildings: usize) -> HeuristicParams {
        let max_try = HeuristicParams::default().max_try;
        HeuristicParams {
            nb: (self.budget as usize / (max_try * (buildings + 1))).max(1),
            max_try,
            max_evaluations: Some(self.budget),
        }
    }

    pub fn evolve_params(&self) -> EvolveParams {
        let pop_size = EvolveParams::default().pop_size;
        EvolveParams {
            pop_size,
            generations: (self.budget as usize / pop_size).saturating_sub(1),
            ..Default::default()
        }
    }

    pub fn random_params(&self) -> RandomParams {
        RandomParams { samples: self.budget }
    }
}

/// Generate, clear and reshape the terrain for one profile and seed, and
/// return it with its inner city.
pub fn prepare_terrain(profile: &MapProfile, walls: &WallConfig, seed: u64) -> Result<(VoxelWorld, Rect)> {
    let (mut world, _) = generate_terrain(seed, profile.size, profile.plain_ratio, profile.water_fraction)?;
    clear_vegetation(&mut world);
    reshape(&mut world);
    let inner = inner_city_bounds(world.width(), world.length(), walls)?;
    Ok((world, inner))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRun {
    pub profile: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub layout: Layout,
    pub trace: Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub profile: String,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean: f64,
    /// Sample standard deviation; zero for a single run.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    /// Ordered by profile (as given), then seed, then algorithm.
    pub runs: Vec<BenchmarkRun>,
    pub summary: Vec<SummaryRow>,
}

impl BenchmarkResult {
    pub fn runs_for<'a>(&'a self, profile: &'a str, algorithm: Algorithm) -> impl Iterator<Item = &'a BenchmarkRun> {
        self.runs
            .iter()
            .filter(move |r| r.profile == profile && r.algorithm == algorithm)
    }
}

fn run_cell(spec: &BenchmarkSpec, catalog: &Catalog, profile: &MapProfile, seed: u64) -> Result<Vec<BenchmarkRun>> {
    let (world, inner) = prepare_terrain(profile, &spec.walls, seed)?;
    let buildlist = BuildList::cycled(catalog, profile.buildings);
    let problem = LayoutProblem::new(&world, catalog, &spec.cost_model, inner, &buildlist)?;
    spec.algorithms
        .iter()
        .map(|&algorithm| {
            let (layout, trace) = match algorithm {
                Algorithm::Heuristic => heuristic_layout(&problem, &spec.heuristic_params(profile.buildings), seed)?,
                Algorithm::Evolve => evolve_layout(&problem, &spec.evolve_params(), seed)?,
                Algorithm::Random => random_layout(&problem, &spec.random_params(), seed)?,
            };
            log::debug!("{} {algorithm} seed {seed}: {}", profile.name, layout.total_score);
            Ok(BenchmarkRun {
                profile: profile.name.clone(),
                algorithm,
                seed,
                layout,
                trace,
            })
        })
        .collect()
}

/// Run every profile x seed x algorithm cell. Cells run in parallel; the
/// result order does not depend on scheduling.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkResult> {
    spec.validate()?;
    let catalog = spec.catalog.clone().unwrap_or_else(default_catalog);
    let cells: Vec<(&MapProfile, u64)> = spec
        .profiles
        .iter()
        .flat_map(|p| spec.seeds().map(move |s| (p, s)))
        .collect();
    let work = || -> Result<Vec<Vec<BenchmarkRun>>> {
        cells
            .par_iter()
            .map(|&(profile, seed)| run_cell(spec, &catalog, profile, seed))
            .collect()
    };
    let nested = match spec.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let runs: Vec<BenchmarkRun> = nested.into_iter().flatten().collect();
    let summary = summarize(&runs);
    Ok(BenchmarkResult { runs, summary })
}

/// Mean and sample standard deviation per (profile, algorithm), in
/// first-seen order, of the last best-so-far value of each trace. For the
/// evolver this can exceed the returned layout, which is the best member of
/// the final population only.
pub fn summarize(runs: &[BenchmarkRun]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, Algorithm)> = Vec::new();
    for r in runs {
        if !keys.iter().any(|(p, a)| *p == r.profile && *a == r.algorithm) {
            keys.push((r.profile.clone(), r.algorithm));
        }
    }
    keys.into_iter()
        .map(|(profile, algorithm)| {
            let scores: Vec<f64> = runs
                .iter()
                .filter(|r| r.profile == profile && r.algorithm == algorithm)
                .map(|r| r.trace.best().unwrap_or(0) as f64)
                .collect();
            let n = scores.len() as f64;
            let mean = scores.iter().sum::<f64>() / n;
            let std = if scores.len() > 1 {
                (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                profile,
                algorithm,
                runs: scores.len(),
                mean,
                std,
            }
        })
        .collect()
}

/// Write trace rows. The header is written only when `with_header` is set,
/// so repeated runs can append to one file.
pub fn write_trace_csv(out: &mut impl Write, runs: &[BenchmarkRun], with_header: bool) -> Result<()> {
    if with_header {
        writeln!(out, "{CSV_HEADER}")?;
    }
    for r in runs {
        for p in &r.trace.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.profile, r.algorithm, r.seed, p.evaluations, p.best_score
            )?;
        }
    }
    Ok(())
}

pub fn write_summary(out: &mut impl Write, summary: &[SummaryRow]) -> Result<()> {
    writeln!(out, "profile,algorithm,runs,mean,std")?;
    for s in summary {
        writeln!(
            out,
            "{},{},{},{:.3},{:.3}",
            s.profile, s.algorithm, s.runs, s.mean, s.std
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> BenchmarkSpec {
        BenchmarkSpec {
            profiles: vec![MapProfile::new("t", 40, 3, 0.5)],
            runs: 3,
            budget: 1_000,
            ..Default::default()
        }
    }

    #[test]
    fn defaults_match_published_profiles() {
        let spec = BenchmarkSpec::default();
        let p: Vec<_> = spec
            .profiles
            .iter()
            .map(|p| (p.size, p.buildings, p.plain_ratio))
            .collect();
        assert_eq!(
            p,
            vec![(100, 5, 0.606), (100, 5, 0.482), (150, 9, 0.539), (150, 9, 0.252)]
        );
        assert_eq!(spec.runs, 30);
        assert_eq!(spec.evolve_params().evaluations(), spec.budget);
        assert_eq!(spec.heuristic_params(5).nb, 8);
        assert_eq!(spec.random_params().samples, spec.budget);
    }

    #[test]
    fn runs_are_ordered_deterministic_and_within_budget() {
        let spec = tiny();
        let a = run_benchmark(&spec).unwrap();
        assert_eq!(a.runs.len(), 9);
        assert!(a
            .runs
            .iter()
            .all(|r| r.trace.is_monotone() && r.trace.evaluations() <= spec.budget));
        let single = BenchmarkSpec {
            threads: Some(1),
            ..tiny()
        };
        assert_eq!(run_benchmark(&single).unwrap(), a);
    }

    #[test]
    fn summary_matches_csv() {
        let result = run_benchmark(&tiny()).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &result.runs, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        // final row per series carries the final score
        let mut finals: std::collections::BTreeMap<(String, String, String), i64> = Default::default();
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            finals.insert((f[0].into(), f[1].into(), f[2].into()), f[4].parse().unwrap());
        }
        for row in &result.summary {
            let scores: Vec<i64> = finals
                .iter()
                .filter(|((p, a, _), _)| *p == row.profile && *a == row.algorithm.to_string())
                .map(|(_, &s)| s)
                .collect();
            let mean = scores.iter().sum::<i64>() as f64 / scores.len() as f64;
            assert!((mean - row.mean).abs() < 1e-9);
        }
        assert!(run_benchmark(&BenchmarkSpec { runs: 0, ..tiny() }).is_err());
    }
}
