//! Vegetation clearing and rule-based terrain reshaping.

use serde::Serialize;

use crate::error::Result;
use crate::geom::Cell;
use crate::world::{BlockClass, Edit, SurfaceClass, VoxelWorld};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReshapeReport {
    pub lowered: usize,
    pub raised: usize,
    pub passes: usize,
    /// Mean altitude before reshaping. Reported only; reshaping ignores it.
    pub mean_altitude: f64,
}

impl ReshapeReport {
    pub fn edit_count(&self) -> usize {
        2 * self.lowered + self.raised
    }
}

/// Remove every vegetation column down to its ground and resurface it with
/// the modal ground block. Returns the number of columns cleared.
pub fn clear_vegetation(world: &mut VoxelWorld) -> usize {
    let ground = world.modal_ground();
    let targets: Vec<Cell> = world
        .cells()
        .filter(|&c| *world.surface(c) == SurfaceClass::Vegetation)
        .collect();
    for &c in &targets {
        let top = world.altitude(c);
        let floor = top - world.canopy(c);
        for y in (floor..top).rev() {
            world.apply_edit(Edit::new(c, y, BlockClass::Air));
        }
        // A tree on bedrock gets a single ground block.
        let y = (floor - 1).max(0);
        world.apply_edit(Edit::new(c, y, BlockClass::Ground(ground.clone())));
    }
    targets.len()
}

/// Sum over the existing 4-neighbours of `sign(A[cell] - A[neighbour])`.
pub fn compare_altitude(world: &VoxelWorld, cell: Cell) -> Result<i32> {
    world.check(cell)?;
    let a = world.altitude(cell);
    Ok(cell
        .neighbors4(world.width(), world.length())
        .map(|n| (a - world.altitude(n)).signum())
        .sum())
}

/// One raster pass (x outer, z inner) over the live altitude map: a cell
/// scoring exactly +3 loses its top block, one scoring exactly -3 gains a
/// ground block.
pub fn reshape(world: &mut VoxelWorld) -> ReshapeReport {
    reshape_passes(world, 1)
}

/// Repeat [`reshape`] until a pass changes nothing or `max_passes` is hit.
pub fn reshape_to_fixpoint(world: &mut VoxelWorld, max_passes: usize) -> ReshapeReport {
    reshape_passes(world, max_passes.max(1))
}

fn reshape_passes(world: &mut VoxelWorld, max_passes: usize) -> ReshapeReport {
    let ground = BlockClass::Ground(world.modal_ground());
    let alts = world.altitudes();
    let mean_altitude = if alts.is_empty() {
        0.0
    } else {
        alts.iter().map(|&a| f64::from(a)).sum::<f64>() / alts.len() as f64
    };
    let mut report = ReshapeReport {
        mean_altitude,
        ..Default::default()
    };
    for _ in 0..max_passes {
        report.passes += 1;
        let before = report.edit_count();
        for x in 0..world.width() {
            for z in 0..world.length() {
                let c = Cell::new(x, z);
                let score = compare_altitude(world, c).expect("scan stays in bounds");
                let a = world.altitude(c);
                if score == 3 && a >= 2 {
                    world.apply_edit(Edit::new(c, a - 1, BlockClass::Air));
                    world.apply_edit(Edit::new(c, a - 2, ground.clone()));
                    report.lowered += 1;
                } else if score == -3 {
                    world.apply_edit(Edit::new(c, a, ground.clone()));
                    report.raised += 1;
                }
            }
        }
        if report.edit_count() == before {
            break;
        }
    }
    report
}
