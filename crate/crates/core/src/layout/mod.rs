//! Building layout optimization: a shared scoring substrate and the three
//! optimizers (greedy heuristic restarts, genetic evolution, random sampling).
//!
//! Every optimizer reports a [`Trace`] of best-so-far score against the
//! number of layout evaluations spent, so their convergence can be compared
//! on a common axis.

mod evolve;
mod genome;
mod heuristic;
mod random;
mod scorer;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{legal, placement_score, BuildingSpec, Catalog, CostModel, Placement};
use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::world::{BlockClass, Edit, VoxelWorld};

pub use evolve::{evolve_layout, EvolveParams};
pub use genome::{decode_genome, Genome};
pub use heuristic::{heuristic_layout, HeuristicParams};
pub use random::{random_layout, RandomParams};
pub use scorer::Scorer;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub placements: Vec<Placement>,
    pub total_score: i64,
}

impl Layout {
    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn rects(&self) -> Vec<Rect> {
        self.placements.iter().map(Placement::rect).collect()
    }
}

/// Ordered building ids to place; duplicates are allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BuildList(pub Vec<String>);

impl BuildList {
    pub fn new<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Self {
        BuildList(ids.into_iter().map(Into::into).collect())
    }

    /// The first `n` catalog entries, cycling when `n` exceeds the catalog.
    pub fn cycled(catalog: &Catalog, n: usize) -> Self {
        BuildList(
            catalog
                .buildings()
                .iter()
                .cycle()
                .take(if catalog.is_empty() { 0 } else { n })
                .map(|b| b.id.clone())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn resolve(&self, catalog: &Catalog) -> Result<Vec<BuildingSpec>> {
        self.0.iter().map(|id| catalog.require(id).cloned()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Heuristic,
    Evolve,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Heuristic, Algorithm::Evolve, Algorithm::Random];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Heuristic => "heuristic",
            Algorithm::Evolve => "evolve",
            Algorithm::Random => "random",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heuristic" => Ok(Algorithm::Heuristic),
            "evolve" => Ok(Algorithm::Evolve),
            "random" => Ok(Algorithm::Random),
            _ => Err(Error::config(format!("unknown algorithm '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluations: u64,
    pub best_score: i64,
}

/// Best-so-far score as a function of layout evaluations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub points: Vec<TracePoint>,
}

impl Trace {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        Trace {
            algorithm,
            seed,
            points: Vec::new(),
        }
    }

    pub fn best(&self) -> Option<i64> {
        self.points.last().map(|p| p.best_score)
    }

    pub fn evaluations(&self) -> u64 {
        self.points.last().map_or(0, |p| p.evaluations)
    }

    /// Append a point carrying `max(best so far, score)`.
    pub fn record(&mut self, evaluations: u64, score: i64) {
        let best = self.best().map_or(score, |b| b.max(score));
        self.points.push(TracePoint {
            evaluations,
            best_score: best,
        });
    }

    /// Append a point only if `score` beats the best so far.
    pub fn record_improvement(&mut self, evaluations: u64, score: i64) {
        if self.best().is_none_or(|b| score > b) {
            self.record(evaluations, score);
        }
    }

    /// Close the series at the final evaluation count.
    pub fn finish(&mut self, evaluations: u64) {
        if let Some(best) = self.best() {
            if self.evaluations() != evaluations {
                self.record(evaluations, best);
            }
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[0].best_score <= w[1].best_score && w[0].evaluations <= w[1].evaluations)
    }

    /// Evaluations spent when the series first reached `score`, if ever.
    pub fn evaluations_to_reach(&self, score: i64) -> Option<u64> {
        self.points
            .iter()
            .find(|p| p.best_score >= score)
            .map(|p| p.evaluations)
    }
}

/// Everything an optimizer run needs: the precomputed scorer plus the
/// resolved build list.
#[derive(Debug, Clone)]
pub struct LayoutProblem {
    scorer: Scorer,
    specs: Vec<BuildingSpec>,
}

impl LayoutProblem {
    pub fn new(
        world: &VoxelWorld,
        catalog: &Catalog,
        model: &CostModel,
        inner: Rect,
        buildlist: &BuildList,
    ) -> Result<Self> {
        Ok(LayoutProblem {
            scorer: Scorer::new(world, inner, model.clone())?,
            specs: buildlist.resolve(catalog)?,
        })
    }

    pub fn scorer(&self) -> &Scorer {
        &self.scorer
    }

    pub fn specs(&self) -> &[BuildingSpec] {
        &self.specs
    }

    pub fn inner(&self) -> Rect {
        self.scorer.inner()
    }

    pub fn model(&self) -> &CostModel {
        self.scorer.model()
    }

    /// Number of genome positions, `m * n` for an `m x n` inner city.
    pub fn positions(&self) -> u32 {
        self.inner().area() as u32
    }
}

/// Score a layout the slow way: each placement is scored on a scratch copy
/// of the world in which the earlier footprints have been built.
pub fn layout_score(
    world: &VoxelWorld,
    inner: Rect,
    catalog: &Catalog,
    layout: &Layout,
    model: &CostModel,
) -> Result<i64> {
    let mut scratch = world.clone();
    let mut total = 0;
    for p in &layout.placements {
        let spec = catalog.require(&p.building)?;
        total += placement_score(&scratch, inner, spec, p.anchor, model)?;
        mark_footprint(&mut scratch, p);
    }
    Ok(total)
}

/// Write a building's marker blocks into the world, one per footprint column.
pub fn mark_footprint(world: &mut VoxelWorld, placement: &Placement) {
    for c in placement.rect().cells() {
        let y = world.altitude(c) - 1;
        world.apply_edit(Edit::new(c, y, BlockClass::Building(placement.building.clone())));
    }
}

pub fn apply_layout(world: &mut VoxelWorld, layout: &Layout) {
    for p in &layout.placements {
        mark_footprint(world, p);
    }
}

/// Check in-bounds and pairwise minimum distance for every placement.
pub fn layout_is_legal(layout: &Layout, inner: Rect, catalog: &Catalog, model: &CostModel) -> bool {
    layout.placements.iter().enumerate().all(|(i, p)| {
        catalog
            .get(&p.building)
            .is_some_and(|spec| legal(&layout.placements[..i], inner, spec, p.anchor, model))
            && layout.placements[i + 1..]
                .iter()
                .all(|q| q.rect().gap(&p.rect()) >= model.min_distance)
    })
}
