//! Column-based voxel world: one altitude per `(x, z)` column, a surface
//! class per column, the artificial-structure mask and the edit log.

mod generate;
mod io;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Cell, Rect};

pub use generate::{generate_terrain, scatter_vegetation, TerrainReport};
pub use io::{load_world, save_world, world_from_json, world_to_json, WORLD_FORMAT_VERSION};

/// What sits on top of a column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SurfaceClass {
    Water,
    Vegetation,
    /// Natural ground of the given block kind (e.g. `grass_block`).
    NaturalGround(String),
    ArtificialBlock,
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceClass::Water => f.write_str("water"),
            SurfaceClass::Vegetation => f.write_str("vegetation"),
            SurfaceClass::NaturalGround(kind) => write!(f, "ground:{kind}"),
            SurfaceClass::ArtificialBlock => f.write_str("artificial"),
        }
    }
}

impl FromStr for SurfaceClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "water" => Ok(SurfaceClass::Water),
            "vegetation" => Ok(SurfaceClass::Vegetation),
            "artificial" => Ok(SurfaceClass::ArtificialBlock),
            _ => match s.strip_prefix("ground:") {
                Some(kind) if !kind.is_empty() => Ok(SurfaceClass::NaturalGround(kind.to_string())),
                _ => Err(format!("unknown surface class '{s}'")),
            },
        }
    }
}

/// The five terrain categories used for placement costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerrainClass {
    Plain,
    CommonLand,
    Water,
    Artificial,
    AroundArtificial,
}

/// Block written by an edit. Structure blocks mark their column artificial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BlockClass {
    Air,
    Water,
    Ground(String),
    Building(String),
    Road,
    Bridge,
    Streetlight,
    WallBase,
    WallPlane,
    Tower,
    Torch,
    Cannon,
}

impl BlockClass {
    pub fn is_structure(&self) -> bool {
        !matches!(self, BlockClass::Air | BlockClass::Water | BlockClass::Ground(_))
    }
}

impl fmt::Display for BlockClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockClass::Air => f.write_str("air"),
            BlockClass::Water => f.write_str("water"),
            BlockClass::Ground(kind) => write!(f, "ground:{kind}"),
            BlockClass::Building(id) => write!(f, "building:{id}"),
            BlockClass::Road => f.write_str("road"),
            BlockClass::Bridge => f.write_str("bridge"),
            BlockClass::Streetlight => f.write_str("streetlight"),
            BlockClass::WallBase => f.write_str("wall_base"),
            BlockClass::WallPlane => f.write_str("wall_plane"),
            BlockClass::Tower => f.write_str("tower"),
            BlockClass::Torch => f.write_str("torch"),
            BlockClass::Cannon => f.write_str("cannon"),
        }
    }
}

impl FromStr for BlockClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "air" => BlockClass::Air,
            "water" => BlockClass::Water,
            "road" => BlockClass::Road,
            "bridge" => BlockClass::Bridge,
            "streetlight" => BlockClass::Streetlight,
            "wall_base" => BlockClass::WallBase,
            "wall_plane" => BlockClass::WallPlane,
            "tower" => BlockClass::Tower,
            "torch" => BlockClass::Torch,
            "cannon" => BlockClass::Cannon,
            _ => {
                if let Some(kind) = s.strip_prefix("ground:").filter(|k| !k.is_empty()) {
                    BlockClass::Ground(kind.to_string())
                } else if let Some(id) = s.strip_prefix("building:").filter(|k| !k.is_empty()) {
                    BlockClass::Building(id.to_string())
                } else {
                    return Err(format!("unknown block class '{s}'"));
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edit {
    pub x: usize,
    pub y: i32,
    pub z: usize,
    pub block: BlockClass,
}

impl Edit {
    pub fn new(cell: Cell, y: i32, block: BlockClass) -> Self {
        Edit {
            x: cell.x,
            y,
            z: cell.z,
            block,
        }
    }

    pub fn cell(&self) -> Cell {
        Cell::new(self.x, self.z)
    }
}

/// Terrain cost table, one entry per [`TerrainClass`] except common land,
/// whose cost is the cell's gradient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TerrainCosts {
    pub water: u64,
    pub plain: u64,
    pub artificial: u64,
    pub around_artificial: u64,
    /// Chebyshev radius of the "around artificial" fringe.
    pub around_radius: usize,
}

impl Default for TerrainCosts {
    fn default() -> Self {
        TerrainCosts {
            water: 10,
            plain: 0,
            artificial: 10_000,
            around_artificial: 50,
            around_radius: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoxelWorld {
    width: usize,
    length: usize,
    altitude: Vec<i32>,
    surface: Vec<SurfaceClass>,
    artificial: Vec<bool>,
    /// Height of vegetation above the ground, included in `altitude`.
    canopy: Vec<i32>,
    edits: Vec<Edit>,
}

impl VoxelWorld {
    /// A flat natural world of `grass_block` at the given altitude.
    pub fn flat(width: usize, length: usize, altitude: i32) -> Self {
        Self::from_altitudes(width, length, vec![altitude.max(0); width * length])
    }

    /// Natural `grass_block` world from a row-major (x-major) altitude vector.
    pub fn from_altitudes(width: usize, length: usize, altitude: Vec<i32>) -> Self {
        assert_eq!(altitude.len(), width * length, "altitude grid size mismatch");
        let n = width * length;
        VoxelWorld {
            width,
            length,
            altitude: altitude.into_iter().map(|a| a.max(0)).collect(),
            surface: vec![SurfaceClass::NaturalGround("grass_block".into()); n],
            artificial: vec![false; n],
            canopy: vec![0; n],
            edits: Vec::new(),
        }
    }

    pub(crate) fn from_parts(
        width: usize,
        length: usize,
        altitude: Vec<i32>,
        surface: Vec<SurfaceClass>,
        artificial: Vec<bool>,
        canopy: Vec<i32>,
        edits: Vec<Edit>,
    ) -> Self {
        VoxelWorld {
            width,
            length,
            altitude,
            surface,
            artificial,
            canopy,
            edits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0, 0, self.width, self.length)
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x < self.width && c.z < self.length
    }

    pub fn check(&self, c: Cell) -> Result<()> {
        if self.in_bounds(c) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                cell: c,
                width: self.width,
                length: self.length,
            })
        }
    }

    #[inline]
    pub(crate) fn idx(&self, c: Cell) -> usize {
        c.x * self.length + c.z
    }

    pub fn altitude(&self, c: Cell) -> i32 {
        self.altitude[self.idx(c)]
    }

    pub fn surface(&self, c: Cell) -> &SurfaceClass {
        &self.surface[self.idx(c)]
    }

    pub fn is_artificial(&self, c: Cell) -> bool {
        self.artificial[self.idx(c)]
    }

    pub fn is_water(&self, c: Cell) -> bool {
        self.surface[self.idx(c)] == SurfaceClass::Water
    }

    pub fn canopy(&self, c: Cell) -> i32 {
        self.canopy[self.idx(c)]
    }

    pub fn edits(&self) -> &[Edit] {
        &self.edits
    }

    pub fn altitudes(&self) -> &[i32] {
        &self.altitude
    }

    pub(crate) fn surfaces(&self) -> &[SurfaceClass] {
        &self.surface
    }

    pub(crate) fn artificial_mask(&self) -> &[bool] {
        &self.artificial
    }

    pub(crate) fn canopies(&self) -> &[i32] {
        &self.canopy
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        self.bounds().cells()
    }

    /// Set a column's natural state directly. Not logged; intended for
    /// building input worlds (tests, generators, loaders).
    pub fn set_column(&mut self, c: Cell, altitude: i32, surface: SurfaceClass) {
        let i = self.idx(c);
        self.altitude[i] = altitude.max(0);
        self.surface[i] = surface;
    }

    /// Set the vegetation height of a column and mark it as vegetation.
    /// `altitude` is the total column height including the canopy.
    pub fn set_vegetation(&mut self, c: Cell, altitude: i32, canopy: i32) {
        let i = self.idx(c);
        self.altitude[i] = altitude.max(0);
        self.canopy[i] = canopy.clamp(0, self.altitude[i]);
        self.surface[i] = SurfaceClass::Vegetation;
    }

    /// Apply one block edit to the column state and append it to the log.
    ///
    /// Column semantics: `air` at `y` below the column top truncates the
    /// column to height `y` (eating canopy first); any solid block at or
    /// above the top raises the column to `y + 1`; every solid block sets the
    /// surface class, and structure blocks also set the artificial mask.
    pub fn apply_edit(&mut self, edit: Edit) {
        let i = self.idx(edit.cell());
        let top = self.altitude[i];
        match &edit.block {
            BlockClass::Air => {
                if edit.y < top {
                    let removed = top - edit.y.max(0);
                    self.canopy[i] = (self.canopy[i] - removed).max(0);
                    self.altitude[i] = edit.y.max(0);
                }
            }
            block => {
                if edit.y >= top {
                    self.altitude[i] = edit.y + 1;
                }
                self.surface[i] = match block {
                    BlockClass::Water => SurfaceClass::Water,
                    BlockClass::Ground(kind) => SurfaceClass::NaturalGround(kind.clone()),
                    _ => {
                        self.artificial[i] = true;
                        SurfaceClass::ArtificialBlock
                    }
                };
            }
        }
        self.edits.push(edit);
    }

    /// Replay an edit log on top of this world.
    pub fn replay<'a>(&self, edits: impl IntoIterator<Item = &'a Edit>) -> VoxelWorld {
        let mut w = self.clone();
        for e in edits {
            w.apply_edit(e.clone());
        }
        w
    }

    /// Most common natural ground kind, ties broken alphabetically.
    /// Falls back to `grass_block` when there is no natural ground.
    pub fn modal_ground(&self) -> String {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for s in &self.surface {
            if let SurfaceClass::NaturalGround(k) = s {
                *counts.entry(k.as_str()).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(k, _)| k.to_string())
            .unwrap_or_else(|| "grass_block".to_string())
    }

    fn near_artificial(&self, c: Cell, radius: usize) -> bool {
        let r = Rect::at(c, 1, 1).dilate_within(radius, self.width, self.length);
        r.cells().any(|n| self.artificial[self.idx(n)])
    }

    /// All existing 4-neighbours share this cell's altitude.
    pub fn is_flat_at(&self, c: Cell) -> bool {
        let a = self.altitude(c);
        c.neighbors4(self.width, self.length).all(|n| self.altitude(n) == a)
    }

    /// Sum of absolute altitude differences to the existing 4-neighbours.
    pub fn gradient(&self, c: Cell) -> u64 {
        let a = self.altitude(c);
        c.neighbors4(self.width, self.length)
            .map(|n| u64::from(a.abs_diff(self.altitude(n))))
            .sum()
    }
}

/// Classify a column with the default fringe radius of 1.
pub fn classify_terrain(world: &VoxelWorld, cell: Cell) -> Result<TerrainClass> {
    classify_terrain_with(world, cell, 1)
}

/// Precedence: Artificial, AroundArtificial, Water, Plain, CommonLand.
pub fn classify_terrain_with(world: &VoxelWorld, cell: Cell, around_radius: usize) -> Result<TerrainClass> {
    world.check(cell)?;
    Ok(if world.is_artificial(cell) {
        TerrainClass::Artificial
    } else if world.near_artificial(cell, around_radius) {
        TerrainClass::AroundArtificial
    } else if world.is_water(cell) {
        TerrainClass::Water
    } else if world.is_flat_at(cell) {
        TerrainClass::Plain
    } else {
        TerrainClass::CommonLand
    })
}

pub fn cell_cost(world: &VoxelWorld, cell: Cell) -> Result<u64> {
    cell_cost_with(world, cell, &TerrainCosts::default())
}

pub fn cell_cost_with(world: &VoxelWorld, cell: Cell, costs: &TerrainCosts) -> Result<u64> {
    Ok(match classify_terrain_with(world, cell, costs.around_radius)? {
        TerrainClass::Artificial => costs.artificial,
        TerrainClass::AroundArtificial => costs.around_artificial,
        TerrainClass::Water => costs.water,
        TerrainClass::Plain => costs.plain,
        TerrainClass::CommonLand => world.gradient(cell),
    })
}

/// Fraction of cells classified [`TerrainClass::Plain`].
pub fn plain_ratio(world: &VoxelWorld) -> f64 {
    let n = world.width * world.length;
    if n == 0 {
        return 0.0;
    }
    let plain = world
        .bounds()
        .cells()
        .filter(|&c| matches!(classify_terrain(world, c), Ok(TerrainClass::Plain)))
        .count();
    plain as f64 / n as f64
}

/// Breadth-first search (4-connected, through every cell of `region`) for
/// the cell nearest `start` that satisfies `accept`. Among cells at the same
/// BFS depth the lexicographically smallest `(x, z)` wins. `max_depth`
/// bounds the search radius.
pub fn nearest_by_bfs(
    region: Rect,
    start: Cell,
    max_depth: Option<usize>,
    mut accept: impl FnMut(Cell) -> bool,
) -> Option<(Cell, usize)> {
    if !region.contains(start) {
        return None;
    }
    let idx = |c: Cell| (c.x - region.x0) * region.length + (c.z - region.z0);
    let mut seen = vec![false; region.area()];
    seen[idx(start)] = true;
    let mut layer = vec![start];
    let mut depth = 0;
    while !layer.is_empty() {
        if let Some(best) = layer.iter().copied().filter(|&c| accept(c)).min() {
            return Some((best, depth));
        }
        if max_depth.is_some_and(|m| depth >= m) {
            return None;
        }
        let mut next = Vec::new();
        for c in layer {
            for n in c.neighbors4(region.x1(), region.z1()) {
                if region.contains(n) && !seen[idx(n)] {
                    seen[idx(n)] = true;
                    next.push(n);
                }
            }
        }
        layer = next;
        depth += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn road_at(w: &mut VoxelWorld, c: Cell) {
        let y = w.altitude(c) - 1;
        w.apply_edit(Edit::new(c, y, BlockClass::Road));
    }

    #[test]
    fn water_cell_classifies_as_water() {
        let mut w = VoxelWorld::flat(5, 5, 3);
        w.set_column(Cell::new(2, 2), 3, SurfaceClass::Water);
        assert_eq!(classify_terrain(&w, Cell::new(2, 2)).unwrap(), TerrainClass::Water);
        assert_eq!(cell_cost(&w, Cell::new(2, 2)).unwrap(), 10);
    }

    #[test]
    fn flat_neighbourhood_is_plain() {
        let w = VoxelWorld::flat(5, 5, 5);
        assert_eq!(classify_terrain(&w, Cell::new(2, 2)).unwrap(), TerrainClass::Plain);
        assert_eq!(cell_cost(&w, Cell::new(2, 2)).unwrap(), 0);
    }

    #[test]
    fn diagonal_to_road_is_around_artificial() {
        let mut w = VoxelWorld::flat(5, 5, 5);
        road_at(&mut w, Cell::new(1, 1));
        assert_eq!(
            classify_terrain(&w, Cell::new(2, 2)).unwrap(),
            TerrainClass::AroundArtificial
        );
        assert_eq!(classify_terrain(&w, Cell::new(1, 1)).unwrap(), TerrainClass::Artificial);
        assert_eq!(classify_terrain(&w, Cell::new(3, 3)).unwrap(), TerrainClass::Plain);
        assert_eq!(cell_cost(&w, Cell::new(1, 1)).unwrap(), 10_000);
        assert_eq!(cell_cost(&w, Cell::new(2, 1)).unwrap(), 50);
    }

    #[test]
    fn common_land_cost_is_gradient_sum() {
        // neighbours differ by 1, 2, 0, 1
        let mut w = VoxelWorld::flat(3, 3, 5);
        w.set_column(Cell::new(0, 1), 4, SurfaceClass::NaturalGround("grass_block".into()));
        w.set_column(Cell::new(2, 1), 7, SurfaceClass::NaturalGround("grass_block".into()));
        w.set_column(Cell::new(1, 2), 6, SurfaceClass::NaturalGround("grass_block".into()));
        let c = Cell::new(1, 1);
        assert_eq!(classify_terrain(&w, c).unwrap(), TerrainClass::CommonLand);
        assert_eq!(cell_cost(&w, c).unwrap(), 4);
    }

    #[test]
    fn out_of_bounds_is_an_error() {
        let w = VoxelWorld::flat(4, 4, 0);
        assert!(matches!(
            classify_terrain(&w, Cell::new(4, 0)),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(cell_cost(&w, Cell::new(0, 9)).is_err());
    }

    #[test]
    fn plain_ratio_edge_cases() {
        assert_eq!(plain_ratio(&VoxelWorld::flat(10, 10, 3)), 1.0);

        let mut wet = VoxelWorld::flat(6, 6, 3);
        for c in wet.cells() {
            wet.set_column(c, 3, SurfaceClass::Water);
        }
        assert_eq!(plain_ratio(&wet), 0.0);

        let alt = (0..64).map(|i| (i / 8 + i % 8) % 2).collect();
        let checker = VoxelWorld::from_altitudes(8, 8, alt);
        assert_eq!(plain_ratio(&checker), 0.0);
    }

    #[test]
    fn bfs_prefers_smallest_cell_at_equal_depth() {
        let region = Rect::new(0, 0, 5, 5);
        let found = nearest_by_bfs(region, Cell::new(2, 2), None, |c| {
            c == Cell::new(3, 2) || c == Cell::new(2, 1)
        });
        assert_eq!(found, Some((Cell::new(2, 1), 1)));
        assert_eq!(
            nearest_by_bfs(region, Cell::new(2, 2), Some(1), |c| c == Cell::new(0, 0)),
            None
        );
    }

    #[test]
    fn surface_and_block_strings_round_trip() {
        for s in ["water", "vegetation", "ground:sand", "artificial"] {
            assert_eq!(s.parse::<SurfaceClass>().unwrap().to_string(), s);
        }
        for s in [
            "air",
            "ground:dirt",
            "building:dorm",
            "road",
            "bridge",
            "cannon",
            "torch",
        ] {
            assert_eq!(s.parse::<BlockClass>().unwrap().to_string(), s);
        }
        assert!("ground:".parse::<SurfaceClass>().is_err());
        assert!("lava".parse::<BlockClass>().is_err());
    }
}
