//! Grid cells and axis-aligned rectangles in the horizontal (x, z) plane.

use serde::{Deserialize, Serialize};

/// A column position. Ordering is lexicographic on `(x, z)` and is used
/// wherever a deterministic tie-break is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub z: usize,
}

impl Cell {
    pub const fn new(x: usize, z: usize) -> Self {
        Cell { x, z }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.x.abs_diff(other.x) + self.z.abs_diff(other.z)
    }

    /// 4-neighbours that fall inside a `width` x `length` grid, in the fixed
    /// order -x, +x, -z, +z.
    pub fn neighbors4(self, width: usize, length: usize) -> impl Iterator<Item = Cell> {
        let Cell { x, z } = self;
        [
            (x > 0).then(|| Cell::new(x.wrapping_sub(1), z)),
            (x + 1 < width).then(|| Cell::new(x + 1, z)),
            (z > 0).then(|| Cell::new(x, z.wrapping_sub(1))),
            (z + 1 < length).then(|| Cell::new(x, z + 1)),
        ]
        .into_iter()
        .flatten()
    }
}

impl From<(usize, usize)> for Cell {
    fn from((x, z): (usize, usize)) -> Self {
        Cell { x, z }
    }
}

/// Half-open rectangle `[x0, x0 + width) x [z0, z0 + length)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub z0: usize,
    pub width: usize,
    pub length: usize,
}

impl Rect {
    pub const fn new(x0: usize, z0: usize, width: usize, length: usize) -> Self {
        Rect { x0, z0, width, length }
    }

    pub fn at(anchor: Cell, width: usize, length: usize) -> Self {
        Rect::new(anchor.x, anchor.z, width, length)
    }

    pub fn x1(&self) -> usize {
        self.x0 + self.width
    }

    pub fn z1(&self) -> usize {
        self.z0 + self.length
    }

    pub fn area(&self) -> usize {
        self.width * self.length
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.length == 0
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x >= self.x0 && c.x < self.x1() && c.z >= self.z0 && c.z < self.z1()
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1() <= self.x1() && other.z0 >= self.z0 && other.z1() <= self.z1()
    }

    /// Chebyshev gap between two rectangles: 0 when they touch or overlap,
    /// otherwise the larger of the empty rows/columns separating them.
    pub fn gap(&self, other: &Rect) -> usize {
        let gx = other
            .x0
            .saturating_sub(self.x1())
            .max(self.x0.saturating_sub(other.x1()));
        let gz = other
            .z0
            .saturating_sub(self.z1())
            .max(self.z0.saturating_sub(other.z1()));
        gx.max(gz)
    }

    /// Grow by `margin` on every side, clipped to `[0, width) x [0, length)`.
    pub fn dilate_within(&self, margin: usize, width: usize, length: usize) -> Rect {
        let x0 = self.x0.saturating_sub(margin);
        let z0 = self.z0.saturating_sub(margin);
        let x1 = (self.x1() + margin).min(width);
        let z1 = (self.z1() + margin).min(length);
        Rect::new(x0, z0, x1.saturating_sub(x0), z1.saturating_sub(z0))
    }

    /// Centre of the rectangle in continuous cell coordinates, where cell
    /// `(x, z)` has its centre at `(x, z)`.
    pub fn center(&self) -> (f64, f64) {
        (
            self.x0 as f64 + (self.width as f64 - 1.0) / 2.0,
            self.z0 as f64 + (self.length as f64 - 1.0) / 2.0,
        )
    }

    pub fn cells(self) -> impl Iterator<Item = Cell> {
        let (z0, z1) = (self.z0, self.z1());
        (self.x0..self.x1()).flat_map(move |x| (z0..z1).map(move |z| Cell::new(x, z)))
    }
}
