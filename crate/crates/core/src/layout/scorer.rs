use crate::catalog::{monument_bonus, BuildingSpec, CostModel};
use crate::error::{Error, Result};
use crate::geom::{Cell, Rect};
use crate::world::{cell_cost_with, VoxelWorld};

/// Fast placement scoring against an immutable world.
///
/// Per-cell terrain costs of the unmodified world are precomputed together
/// with a 2-D prefix sum. Footprints placed earlier in a layout are passed as
/// rectangles; cells they cover cost `artificial`, cells within the fringe
/// radius cost `around_artificial`. Footprints far from every earlier
/// placement are costed in O(1).
#[derive(Debug, Clone)]
pub struct Scorer {
    width: usize,
    length: usize,
    base: Vec<u64>,
    prefix: Vec<u64>,
    world_artificial: Vec<bool>,
    inner: Rect,
    model: CostModel,
}

impl Scorer {
    pub fn new(world: &VoxelWorld, inner: Rect, model: CostModel) -> Result<Self> {
        if !world.bounds().contains_rect(&inner) || inner.is_empty() {
            return Err(Error::config(format!(
                "inner city {inner:?} does not fit the {}x{} world",
                world.width(),
                world.length()
            )));
        }
        let (w, l) = (world.width(), world.length());
        let base: Vec<u64> = world
            .cells()
            .map(|c| cell_cost_with(world, c, &model.terrain).expect("cell in bounds"))
            .collect();
        let mut prefix = vec![0u64; (w + 1) * (l + 1)];
        for x in 0..w {
            let mut row = 0;
            for z in 0..l {
                row += base[x * l + z];
                prefix[(x + 1) * (l + 1) + z + 1] = prefix[x * (l + 1) + z + 1] + row;
            }
        }
        Ok(Scorer {
            width: w,
            length: l,
            base,
            prefix,
            world_artificial: world.cells().map(|c| world.is_artificial(c)).collect(),
            inner,
            model,
        })
    }

    pub fn inner(&self) -> Rect {
        self.inner
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    fn base_sum(&self, r: Rect) -> u64 {
        let l1 = self.length + 1;
        let at = |x: usize, z: usize| self.prefix[x * l1 + z];
        at(r.x1(), r.z1()) + at(r.x0, r.z0) - at(r.x0, r.z1()) - at(r.x1(), r.z0)
    }

    /// Terrain cost of `rect` given earlier footprints `placed`.
    pub fn footprint_cost(&self, rect: Rect, placed: &[Rect]) -> u64 {
        debug_assert!(rect.x1() <= self.width && rect.z1() <= self.length);
        let radius = self.model.terrain.around_radius;
        if placed.iter().all(|p| p.gap(&rect) >= radius.max(1)) {
            return self.base_sum(rect);
        }
        let t = &self.model.terrain;
        rect.cells()
            .map(|c| {
                if placed.iter().any(|p| p.contains(c)) {
                    t.artificial
                } else if placed.iter().any(|p| chebyshev_to_rect(c, p) <= radius) {
                    if self.world_artificial[c.x * self.length + c.z] {
                        t.artificial
                    } else {
                        t.around_artificial
                    }
                } else {
                    self.base[c.x * self.length + c.z]
                }
            })
            .sum()
    }

    /// `reward + bonus - cost`. The footprint must lie inside the world.
    pub fn score(&self, spec: &BuildingSpec, anchor: Cell, placed: &[Rect]) -> i64 {
        let rect = spec.rect_at(anchor);
        spec.reward + monument_bonus(self.inner, spec, anchor, &self.model) - self.footprint_cost(rect, placed) as i64
    }
}

fn chebyshev_to_rect(c: Cell, r: &Rect) -> usize {
    let dx = if c.x < r.x0 {
        r.x0 - c.x
    } else if c.x >= r.x1() {
        c.x + 1 - r.x1()
    } else {
        0
    };
    let dz = if c.z < r.z0 {
        r.z0 - c.z
    } else if c.z >= r.z1() {
        c.z + 1 - r.z1()
    } else {
        0
    };
    dx.max(dz)
}
