//! End-to-end settlement generation: terrain preparation, layout, roads,
//! streetlights and the wall, driven by a single JSON configuration.

mod benchmark;

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{default_catalog, Catalog, CostModel, Placement};
use crate::error::{Error, Result};
use crate::geom::{Cell, Rect};
use crate::layout::{
    apply_layout, evolve_layout, heuristic_layout, random_layout, Algorithm, BuildList, EvolveParams, HeuristicParams,
    Layout, LayoutProblem, RandomParams, Trace,
};
use crate::lighting::{apply_lights, place_streetlights};
use crate::routing::{build_bridges, find_gates, plan_roads, RoadReport, SegmentFailure};
use crate::terrain_ops::{clear_vegetation, reshape};
use crate::walls::{build_wall, inner_city_bounds, WallConfig, WallReport};
use crate::world::{generate_terrain, load_world, scatter_vegetation, VoxelWorld};

pub use benchmark::{
    prepare_terrain, run_benchmark, summarize, write_summary, write_trace_csv, BenchmarkResult, BenchmarkRun,
    BenchmarkSpec, MapProfile, SummaryRow, CSV_HEADER,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratedWorld {
    pub size: usize,
    pub plain_ratio: f64,
    pub water_fraction: f64,
    /// Fraction of dry columns that get a tree.
    pub vegetation: f64,
}

impl Default for GeneratedWorld {
    fn default() -> Self {
        GeneratedWorld {
            size: 100,
            plain_ratio: 0.606,
            water_fraction: 0.05,
            vegetation: 0.03,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldSource {
    File(PathBuf),
    Generated(GeneratedWorld),
}

impl Default for WorldSource {
    fn default() -> Self {
        WorldSource::Generated(GeneratedWorld::default())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub world: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub world: WorldSource,
    /// Replaces the built-in catalog when present.
    pub catalog: Option<Catalog>,
    pub cost_model: CostModel,
    /// Defaults to the first five catalog entries.
    pub buildlist: Option<BuildList>,
    pub algorithm: Algorithm,
    pub heuristic: HeuristicParams,
    pub evolve: EvolveParams,
    pub random: RandomParams,
    pub walls: WallConfig,
    /// Number of streetlights; defaults to half the building count.
    pub streetlights: Option<usize>,
    pub output: OutputPaths,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            world: WorldSource::default(),
            catalog: None,
            cost_model: CostModel::default(),
            buildlist: None,
            algorithm: Algorithm::Heuristic,
            heuristic: HeuristicParams::default(),
            evolve: EvolveParams::default(),
            random: RandomParams::default(),
            walls: WallConfig::default(),
            streetlights: None,
            output: OutputPaths::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("invalid pipeline config: {e}")))
    }

    pub fn catalog(&self) -> Catalog {
        self.catalog.clone().unwrap_or_else(default_catalog)
    }

    pub fn buildlist(&self) -> BuildList {
        self.buildlist
            .clone()
            .unwrap_or_else(|| BuildList::cycled(&self.catalog(), 5))
    }

    /// Everything that can be checked without touching the world.
    pub fn validate(&self) -> Result<()> {
        let catalog = self.catalog();
        self.buildlist().resolve(&catalog).map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::config(other.to_string()),
        })?;
        self.walls.validate()?;
        let h = &self.heuristic;
        if h.nb == 0 || h.max_try == 0 {
            return Err(Error::config("heuristic nb and max_try must be positive"));
        }
        if self.evolve.pop_size < 2 || !(0.0..=1.0).contains(&self.evolve.p_mut) {
            return Err(Error::config("evolve needs pop_size >= 2 and p_mut in [0, 1]"));
        }
        if self.random.samples == 0 {
            return Err(Error::config("random samples must be positive"));
        }
        if self.streetlights == Some(0) {
            return Err(Error::config("streetlights must be positive when given"));
        }
        if let WorldSource::Generated(g) = &self.world {
            if g.size < 16 {
                return Err(Error::config("generated worlds must be at least 16 cells wide"));
            }
            for (name, v) in [
                ("plain_ratio", g.plain_ratio),
                ("water_fraction", g.water_fraction),
                ("vegetation", g.vegetation),
            ] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::config(format!("{name} must lie in [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub edits: usize,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerrainSummary {
    pub plain_ratio: f64,
    pub smoothing_passes: usize,
    pub trees: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub seed: u64,
    pub algorithm: Option<Algorithm>,
    pub width: usize,
    pub length: usize,
    pub terrain: Option<TerrainSummary>,
    pub inner_city: Option<Rect>,
    pub layout_score: i64,
    pub evaluations: u64,
    pub placements: Vec<Placement>,
    pub gates: Vec<Cell>,
    pub roads: RoadReport,
    pub road_failures: Vec<SegmentFailure>,
    pub streetlights: Vec<Cell>,
    pub streetlights_dropped: usize,
    pub wall: Option<WallReport>,
    pub stages: Vec<StageReport>,
    pub total_edits: usize,
}

pub const STAGES: [&str; 7] = [
    "bounds",
    "clear_vegetation",
    "reshape",
    "layout",
    "roads",
    "streetlights",
    "wall",
];

/// A configured run. The world is kept on the pipeline so that after a
/// stage failure the partial edit log can still be inspected or saved.
#[derive(Debug)]
pub struct Pipeline {
    config: PipelineConfig,
    catalog: Catalog,
    world: VoxelWorld,
    seeds: [u64; 3],
    terrain: Option<TerrainSummary>,
}

fn stage_err(stage: &'static str) -> impl FnOnce(Error) -> Error {
    move |e| Error::Stage {
        stage,
        cause: Box::new(e),
    }
}

impl Pipeline {
    /// Validate the configuration and load or generate the world.
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let mut seeder = ChaCha8Rng::seed_from_u64(config.seed);
        let seeds: [u64; 4] = seeder.gen();
        let (world, terrain) = match &config.world {
            WorldSource::File(path) => (load_world(path)?, None),
            WorldSource::Generated(g) => {
                let (mut world, report) = generate_terrain(seeds[0], g.size, g.plain_ratio, g.water_fraction)?;
                let trees = scatter_vegetation(&mut world, g.vegetation, seeds[0]);
                let summary = TerrainSummary {
                    plain_ratio: report.plain_ratio,
                    smoothing_passes: report.passes,
                    trees,
                };
                (world, Some(summary))
            }
        };
        Ok(Pipeline {
            catalog: config.catalog(),
            config,
            world,
            seeds: [seeds[1], seeds[2], seeds[3]],
            terrain,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn world(&self) -> &VoxelWorld {
        &self.world
    }

    pub fn into_world(self) -> VoxelWorld {
        self.world
    }

    fn optimize(&self, problem: &LayoutProblem) -> Result<(Layout, Trace)> {
        let seed = self.seeds[0];
        match self.config.algorithm {
            Algorithm::Heuristic => heuristic_layout(problem, &self.config.heuristic, seed),
            Algorithm::Evolve => evolve_layout(problem, &self.config.evolve, seed),
            Algorithm::Random => random_layout(problem, &self.config.random, seed),
        }
    }

    /// Run every stage in order. Stops at the first failing stage.
    pub fn run(&mut self) -> Result<PipelineReport> {
        let cfg = self.config.clone();
        let mut report = PipelineReport {
            seed: cfg.seed,
            algorithm: Some(cfg.algorithm),
            width: self.world.width(),
            length: self.world.length(),
            terrain: self.terrain.clone(),
            ..Default::default()
        };
        let mut clock = Instant::now();
        let mut mark = |report: &mut PipelineReport, world: &VoxelWorld, stage: &str| {
            let before: usize = report.stages.iter().map(|s| s.edits).sum();
            report.stages.push(StageReport {
                stage: stage.to_string(),
                edits: world.edits().len() - before,
                millis: clock.elapsed().as_secs_f64() * 1e3,
            });
            clock = Instant::now();
        };

        let inner =
            inner_city_bounds(self.world.width(), self.world.length(), &cfg.walls).map_err(stage_err("bounds"))?;
        report.inner_city = Some(inner);
        mark(&mut report, &self.world, "bounds");

        clear_vegetation(&mut self.world);
        mark(&mut report, &self.world, "clear_vegetation");

        reshape(&mut self.world);
        mark(&mut report, &self.world, "reshape");

        let problem = LayoutProblem::new(&self.world, &self.catalog, &cfg.cost_model, inner, &cfg.buildlist())
            .map_err(stage_err("layout"))?;
        let (layout, trace) = self.optimize(&problem).map_err(stage_err("layout"))?;
        apply_layout(&mut self.world, &layout);
        report.layout_score = layout.total_score;
        report.evaluations = trace.evaluations();
        report.placements = layout.placements.clone();
        mark(&mut report, &self.world, "layout");

        let gates = find_gates(&self.world).map_err(stage_err("roads"))?;
        let plan = plan_roads(&self.world, &self.catalog, &layout, &gates, &cfg.walls).map_err(stage_err("roads"))?;
        report.roads = build_bridges(&mut self.world, &plan);
        report.gates = plan.gates.clone();
        report.road_failures = plan.failures.clone();
        mark(&mut report, &self.world, "roads");

        let lights = place_streetlights(&self.world, &layout, &plan, inner, cfg.streetlights, self.seeds[1])
            .map_err(stage_err("streetlights"))?;
        apply_lights(&mut self.world, &lights);
        report.streetlights = lights.lights;
        report.streetlights_dropped = lights.dropped;
        mark(&mut report, &self.world, "streetlights");

        report.wall = Some(build_wall(&mut self.world, &cfg.walls).map_err(stage_err("wall"))?);
        mark(&mut report, &self.world, "wall");

        report.total_edits = self.world.edits().len();
        Ok(report)
    }
}

/// Build a pipeline from `config` and run it to completion.
pub fn run_pipeline(config: &PipelineConfig) -> Result<(VoxelWorld, PipelineReport)> {
    let mut pipeline = Pipeline::new(config.clone())?;
    let report = pipeline.run()?;
    Ok((pipeline.into_world(), report))
}
