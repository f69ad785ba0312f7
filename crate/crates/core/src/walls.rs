//! Perimeter wall: base fitted to the terrain, a level plane on top, corner
//! towers, and torches and cannons spaced along the plane.
//!
//! The outer `ring_width + 1` cells on every side are reserved: the wall
//! ring itself plus a one-cell fringe. Everything inside is the inner city.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Cell, Rect};
use crate::world::{BlockClass, Edit, VoxelWorld};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WallConfig {
    pub ring_width: usize,
    /// Blocks between the highest ring column and the top of the plane.
    pub plane_clearance: i32,
    pub fixture_interval: usize,
    pub tower_size: usize,
}

impl Default for WallConfig {
    fn default() -> Self {
        WallConfig {
            ring_width: 3,
            plane_clearance: 4,
            fixture_interval: 8,
            tower_size: 5,
        }
    }
}

impl WallConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ring_width < 1 {
            return Err(Error::config("wall ring_width must be at least 1"));
        }
        if self.fixture_interval < 2 {
            return Err(Error::config("wall fixture_interval must be at least 2"));
        }
        if self.plane_clearance < 1 {
            return Err(Error::config("wall plane_clearance must be at least 1"));
        }
        if self.tower_size < 1 {
            return Err(Error::config("wall tower_size must be at least 1"));
        }
        Ok(())
    }

    fn margin(&self) -> usize {
        self.ring_width + 1
    }
}

/// The build rectangle inset by `ring_width + 1` on each side.
pub fn inner_city_bounds(width: usize, length: usize, cfg: &WallConfig) -> Result<Rect> {
    cfg.validate()?;
    let m = cfg.margin();
    if width <= 2 * m || length <= 2 * m {
        return Err(Error::config(format!(
            "a {width}x{length} world has no room for an inner city inside a {}-cell wall ring",
            cfg.ring_width
        )));
    }
    Ok(Rect::new(m, m, width - 2 * m, length - 2 * m))
}

fn border_distance(c: Cell, width: usize, length: usize) -> usize {
    c.x.min(c.z).min(width - 1 - c.x).min(length - 1 - c.z)
}

pub fn in_ring(c: Cell, width: usize, length: usize, cfg: &WallConfig) -> bool {
    border_distance(c, width, length) < cfg.ring_width
}

/// Square towers centred on the ring at the four corners, clipped so they
/// stay within the reserved margin.
pub fn tower_rects(width: usize, length: usize, cfg: &WallConfig) -> [Rect; 4] {
    let m = cfg.margin();
    let centre = (cfg.ring_width - 1) / 2;
    let lo = centre.saturating_sub(cfg.tower_size / 2);
    let hi = (centre + cfg.tower_size - cfg.tower_size / 2).min(m);
    let side = hi - lo;
    [
        Rect::new(lo, lo, side, side),
        Rect::new(width - hi, lo, side, side),
        Rect::new(lo, length - hi, side, side),
        Rect::new(width - hi, length - hi, side, side),
    ]
}

/// One fringe cell per tower, 4-adjacent to the inner city.
pub fn tower_entrances(width: usize, length: usize, cfg: &WallConfig) -> [Cell; 4] {
    let m = cfg.margin();
    [
        Cell::new(m - 1, m),
        Cell::new(width - m, m),
        Cell::new(m - 1, length - 1 - m),
        Cell::new(width - m, length - 1 - m),
    ]
}

/// Cells along the ring's centre line, clockwise from the low corner.
pub fn centre_loop(width: usize, length: usize, cfg: &WallConfig) -> Vec<Cell> {
    let d = (cfg.ring_width - 1) / 2;
    let (x0, z0, x1, z1) = (d, d, width - 1 - d, length - 1 - d);
    let mut out = Vec::new();
    out.extend((z0..z1).map(|z| Cell::new(x0, z)));
    out.extend((x0..x1).map(|x| Cell::new(x, z1)));
    out.extend((z0 + 1..=z1).rev().map(|z| Cell::new(x1, z)));
    out.extend((x0 + 1..=x1).rev().map(|x| Cell::new(x, z0)));
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WallReport {
    /// Altitude of the top of the plane.
    pub plane_height: i32,
    pub tower_entrances: Vec<Cell>,
    pub base_blocks: usize,
    pub plane_blocks: usize,
    pub tower_blocks: usize,
    pub torches: usize,
    pub cannons: usize,
    /// Ring cells already occupied (gates, roads) and left open.
    pub openings: usize,
    /// Length of the centre line available for fixtures.
    pub fixture_perimeter: usize,
}

/// Build the wall. Ring columns already marked artificial are treated as
/// openings and left as they are; every other ring column is filled with
/// base blocks up to the plane so that its top sits exactly at the plane
/// height.
pub fn build_wall(world: &mut VoxelWorld, cfg: &WallConfig) -> Result<WallReport> {
    let (w, l) = (world.width(), world.length());
    inner_city_bounds(w, l, cfg)?;
    let ring: Vec<Cell> = world
        .cells()
        .filter(|&c| in_ring(c, w, l, cfg) && !world.is_artificial(c))
        .collect();
    let openings = world
        .cells()
        .filter(|&c| in_ring(c, w, l, cfg) && world.is_artificial(c))
        .count();
    let top = ring.iter().map(|&c| world.altitude(c)).max().unwrap_or(0);
    let plane = top + cfg.plane_clearance;
    let mut report = WallReport {
        plane_height: plane,
        tower_entrances: tower_entrances(w, l, cfg).to_vec(),
        openings,
        ..Default::default()
    };

    for &c in &ring {
        for y in world.altitude(c)..plane - 1 {
            world.apply_edit(Edit::new(c, y, BlockClass::WallBase));
            report.base_blocks += 1;
        }
        world.apply_edit(Edit::new(c, plane - 1, BlockClass::WallPlane));
        report.plane_blocks += 1;
    }

    let towers = tower_rects(w, l, cfg);
    let tower_top = plane + cfg.tower_size as i32;
    let mut seen = std::collections::HashSet::new();
    for rect in &towers {
        for c in rect.cells() {
            let was_opening = in_ring(c, w, l, cfg) && !ring.contains(&c);
            if was_opening || !seen.insert(c) {
                continue;
            }
            for y in world.altitude(c)..tower_top {
                world.apply_edit(Edit::new(c, y, BlockClass::Tower));
                report.tower_blocks += 1;
            }
        }
    }

    let fixture_cells: Vec<Cell> = centre_loop(w, l, cfg)
        .into_iter()
        .filter(|c| !towers.iter().any(|t| t.contains(*c)) && ring.contains(c))
        .collect();
    report.fixture_perimeter = fixture_cells.len();
    for (j, &c) in fixture_cells.iter().step_by(cfg.fixture_interval).enumerate() {
        if j >= fixture_cells.len() / cfg.fixture_interval {
            break;
        }
        let block = if j % 2 == 0 {
            report.torches += 1;
            BlockClass::Torch
        } else {
            report.cannons += 1;
            BlockClass::Cannon
        };
        world.apply_edit(Edit::new(c, plane, block));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::collections::{HashSet, VecDeque};

    use super::*;
    use crate::world::SurfaceClass;

    #[test]
    fn inner_bounds_arithmetic() {
        let cfg = WallConfig::default();
        assert_eq!(inner_city_bounds(100, 100, &cfg).unwrap(), Rect::new(4, 4, 92, 92));
        assert_eq!(inner_city_bounds(9, 9, &cfg).unwrap(), Rect::new(4, 4, 1, 1));
        assert!(inner_city_bounds(8, 9, &cfg).is_err());
    }

    #[test]
    fn flat_ring_is_filled_to_plane() {
        let mut w = VoxelWorld::flat(30, 30, 5);
        let cfg = WallConfig::default();
        let original = w.clone();
        let r = build_wall(&mut w, &cfg).unwrap();
        assert_eq!(r.plane_height, 9);
        let walls_only = original.replay(
            w.edits()
                .iter()
                .filter(|e| matches!(e.block, BlockClass::WallBase | BlockClass::WallPlane)),
        );
        for c in w.cells() {
            if in_ring(c, 30, 30, &cfg) {
                assert_eq!(walls_only.altitude(c), 9, "{c:?}");
                assert!(w.is_artificial(c));
            } else if !tower_rects(30, 30, &cfg).iter().any(|t| t.contains(c)) {
                assert_eq!(w.altitude(c), 5);
                assert!(!w.is_artificial(c));
            }
        }
        assert_eq!(r.base_blocks, 3 * r.plane_blocks);
    }

    #[test]
    fn valley_gets_extra_base_blocks() {
        let mut w = VoxelWorld::flat(30, 30, 5);
        let g = SurfaceClass::NaturalGround("grass_block".into());
        w.set_column(Cell::new(0, 15), 2, g);
        let cfg = WallConfig::default();
        build_wall(&mut w, &cfg).unwrap();
        let count = |c: Cell| {
            w.edits()
                .iter()
                .filter(|e| e.cell() == c && e.block == BlockClass::WallBase)
                .count()
        };
        assert_eq!(count(Cell::new(0, 15)), count(Cell::new(0, 14)) + 3);
    }

    #[test]
    fn fixtures_alternate_and_count() {
        let mut w = VoxelWorld::flat(100, 100, 5);
        let cfg = WallConfig::default();
        let r = build_wall(&mut w, &cfg).unwrap();
        let fixtures: Vec<_> = w
            .edits()
            .iter()
            .filter(|e| matches!(e.block, BlockClass::Torch | BlockClass::Cannon))
            .collect();
        assert_eq!(fixtures.len(), r.fixture_perimeter / 8);
        assert!(fixtures.len() > 40);
        for pair in fixtures.windows(2) {
            assert_ne!(pair[0].block, pair[1].block);
        }
        assert!(fixtures.iter().all(|e| e.y == r.plane_height));
    }

    #[test]
    fn ring_is_closed_and_entrances_touch_inner_city() {
        let mut w = VoxelWorld::flat(40, 50, 5);
        let cfg = WallConfig::default();
        let r = build_wall(&mut w, &cfg).unwrap();
        let ring: HashSet<Cell> = w.cells().filter(|&c| in_ring(c, 40, 50, &cfg)).collect();
        assert!(ring.iter().all(|&c| w.is_artificial(c)));
        let start = *ring.iter().min().unwrap();
        let mut seen = HashSet::from([start]);
        let mut q = VecDeque::from([start]);
        while let Some(c) = q.pop_front() {
            for n in c.neighbors4(40, 50) {
                if ring.contains(&n) && seen.insert(n) {
                    q.push_back(n);
                }
            }
        }
        assert_eq!(seen.len(), ring.len());

        let inner = inner_city_bounds(40, 50, &cfg).unwrap();
        assert_eq!(r.tower_entrances.len(), 4);
        for e in &r.tower_entrances {
            assert!(!inner.contains(*e));
            assert!(e.neighbors4(40, 50).any(|n| inner.contains(n)), "{e:?}");
            assert!(!w.is_artificial(*e));
        }
        for t in tower_rects(40, 50, &cfg) {
            assert!(t.cells().all(|c| !inner.contains(c)));
        }
    }

    #[test]
    fn existing_openings_are_left_alone() {
        let mut w = VoxelWorld::flat(30, 30, 5);
        for x in 0..4 {
            w.apply_edit(Edit::new(Cell::new(x, 15), 4, BlockClass::Road));
        }
        let cfg = WallConfig::default();
        let r = build_wall(&mut w, &cfg).unwrap();
        assert_eq!(r.openings, 3);
        assert_eq!(w.altitude(Cell::new(1, 15)), 5);
    }
}
