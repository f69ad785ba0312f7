//! Gates on the four edges, A* roads from each gate to the monument, a road
//! from each munition factory to the nearest wall tower, and bridges where
//! a road crosses water.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::geom::{Cell, Rect};
use crate::layout::Layout;
use crate::walls::{in_ring, inner_city_bounds, tower_entrances, tower_rects, WallConfig};
use crate::world::{nearest_by_bfs, BlockClass, Edit, VoxelWorld};

pub const EDGES: [&str; 4] = ["x_min", "x_max", "z_min", "z_max"];

/// Gate per edge, in the order of [`EDGES`]. Each gate is the legal cell
/// nearest the edge midpoint by breadth-first search; a cell is legal if it
/// is neither water nor artificial.
pub fn find_gates(world: &VoxelWorld) -> Result<[Cell; 4]> {
    let (w, l) = (world.width(), world.length());
    if w == 0 || l == 0 {
        return Err(Error::GatePlacement { edge: EDGES[0] });
    }
    let mids = [
        Cell::new(0, (l - 1) / 2),
        Cell::new(w - 1, (l - 1) / 2),
        Cell::new((w - 1) / 2, 0),
        Cell::new((w - 1) / 2, l - 1),
    ];
    let mut gates = [Cell::new(0, 0); 4];
    for (i, &mid) in mids.iter().enumerate() {
        let (g, _) = nearest_by_bfs(world.bounds(), mid, None, |c| {
            !world.is_water(c) && !world.is_artificial(c)
        })
        .ok_or(Error::GatePlacement { edge: EDGES[i] })?;
        gates[i] = g;
    }
    Ok(gates)
}

/// The straight line through a gate perpendicular to its edge, from the
/// edge to `depth` cells in, outermost first.
fn gate_line(gate: Cell, edge: usize, depth: usize, w: usize, l: usize) -> Vec<Cell> {
    match edge {
        0 => (0..depth).map(|x| Cell::new(x, gate.z)).collect(),
        1 => (w - depth..w).rev().map(|x| Cell::new(x, gate.z)).collect(),
        2 => (0..depth).map(|z| Cell::new(gate.x, z)).collect(),
        _ => (l - depth..l).rev().map(|z| Cell::new(gate.x, z)).collect(),
    }
}

fn edge_depth(gate: Cell, edge: usize, w: usize, l: usize) -> usize {
    match edge {
        0 => gate.x,
        1 => w - 1 - gate.x,
        2 => gate.z,
        _ => l - 1 - gate.z,
    }
}

/// Cost of stepping between two 4-adjacent cells; `None` if the move is
/// forbidden.
pub trait StepCost {
    fn step(&self, world: &VoxelWorld, from: Cell, to: Cell) -> Option<u64>;
}

/// One per step, two per block of altitude change, four more for entering
/// water. Masked cells cannot be entered.
#[derive(Debug, Clone)]
pub struct RoadCost {
    blocked: Vec<bool>,
    length: usize,
}

impl RoadCost {
    pub fn new(world: &VoxelWorld) -> Self {
        RoadCost {
            blocked: vec![false; world.width() * world.length()],
            length: world.length(),
        }
    }

    pub fn block(&mut self, c: Cell) {
        self.blocked[c.x * self.length + c.z] = true;
    }

    pub fn unblock(&mut self, c: Cell) {
        self.blocked[c.x * self.length + c.z] = false;
    }

    pub fn is_blocked(&self, c: Cell) -> bool {
        self.blocked[c.x * self.length + c.z]
    }
}

impl StepCost for RoadCost {
    fn step(&self, world: &VoxelWorld, from: Cell, to: Cell) -> Option<u64> {
        if self.is_blocked(to) {
            return None;
        }
        let climb = world.altitude(from).abs_diff(world.altitude(to)) as u64;
        Some(1 + 2 * climb + if world.is_water(to) { 4 } else { 0 })
    }
}

/// A* with the Manhattan heuristic. The open set is ordered by
/// `(f, x, z)`, so among equal-`f` nodes the smallest cell expands first
/// and the returned path is reproducible.
pub fn astar(world: &VoxelWorld, start: Cell, goal: Cell, cost: &impl StepCost) -> Result<(Vec<Cell>, u64)> {
    world.check(start)?;
    world.check(goal)?;
    let (w, l) = (world.width(), world.length());
    let idx = |c: Cell| c.x * l + c.z;
    let mut g = vec![u64::MAX; w * l];
    let mut parent: Vec<Option<Cell>> = vec![None; w * l];
    let mut closed = vec![false; w * l];
    let mut open = BinaryHeap::new();
    g[idx(start)] = 0;
    open.push(Reverse((start.manhattan(goal) as u64, start)));
    while let Some(Reverse((_, c))) = open.pop() {
        if closed[idx(c)] {
            continue;
        }
        closed[idx(c)] = true;
        if c == goal {
            let mut path = vec![c];
            let mut cur = c;
            while let Some(p) = parent[idx(cur)] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Ok((path, g[idx(goal)]));
        }
        for n in c.neighbors4(w, l) {
            if closed[idx(n)] {
                continue;
            }
            let Some(step) = cost.step(world, c, n) else {
                continue;
            };
            let cand = g[idx(c)] + step;
            if cand < g[idx(n)] {
                g[idx(n)] = cand;
                parent[idx(n)] = Some(c);
                open.push(Reverse((cand + n.manhattan(goal) as u64, n)));
            }
        }
    }
    Err(Error::Unreachable { from: start, to: goal })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SegmentKind {
    Gate { edge: usize },
    Munitions { factory: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadSegment {
    pub kind: SegmentKind,
    pub cells: Vec<Cell>,
    /// Parallel to `cells`: whether the cell was water when planned.
    pub bridge: Vec<bool>,
    pub cost: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFailure {
    pub kind: SegmentKind,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoadPlan {
    pub gates: Vec<Cell>,
    /// Straight runs from each gate out to its edge, so the wall leaves an
    /// opening there.
    pub approaches: Vec<Cell>,
    pub segments: Vec<RoadSegment>,
    pub failures: Vec<SegmentFailure>,
}

impl RoadPlan {
    /// Every road cell, approaches first, without duplicates.
    pub fn cells(&self) -> Vec<Cell> {
        let mut seen = HashSet::new();
        self.approaches
            .iter()
            .chain(self.segments.iter().flat_map(|s| s.cells.iter()))
            .copied()
            .filter(|c| seen.insert(*c))
            .collect()
    }
}

fn perimeter(rect: Rect, w: usize, l: usize) -> impl Iterator<Item = Cell> {
    let cells: HashSet<Cell> = rect
        .cells()
        .flat_map(|c| c.neighbors4(w, l).collect::<Vec<_>>())
        .filter(|n| !rect.contains(*n))
        .collect();
    let mut v: Vec<Cell> = cells.into_iter().collect();
    v.sort();
    v.into_iter()
}

fn nearest_open(cands: impl Iterator<Item = Cell>, to: Cell, cost: &RoadCost) -> Option<Cell> {
    cands
        .filter(|c| !cost.is_blocked(*c))
        .min_by_key(|c| (c.manhattan(to), *c))
}

/// Plan roads for a placed layout. Unreachable segments are recorded in
/// `failures` and the rest of the plan is kept.
pub fn plan_roads(
    world: &VoxelWorld,
    catalog: &Catalog,
    layout: &Layout,
    gates: &[Cell; 4],
    walls: &WallConfig,
) -> Result<RoadPlan> {
    let (w, l) = (world.width(), world.length());
    let inner = inner_city_bounds(w, l, walls)?;
    let mut cost = RoadCost::new(world);
    for c in world.cells() {
        if in_ring(c, w, l, walls) {
            cost.block(c);
        }
    }
    for t in tower_rects(w, l, walls) {
        t.cells().for_each(|c| cost.block(c));
    }
    let rects: Vec<Rect> = layout.rects();
    for r in &rects {
        r.cells().for_each(|c| cost.block(c));
    }

    let mut plan = RoadPlan {
        gates: gates.to_vec(),
        ..Default::default()
    };
    for (edge, &gate) in gates.iter().enumerate() {
        let depth = edge_depth(gate, edge, w, l);
        for c in gate_line(gate, edge, depth.max(walls.ring_width - 1) + 1, w, l) {
            if in_ring(c, w, l, walls) {
                cost.unblock(c);
            }
        }
        plan.approaches.extend(gate_line(gate, edge, depth, w, l));
    }

    let monument = layout
        .placements
        .iter()
        .position(|p| catalog.get(&p.building).is_some_and(|s| s.is_monument()));
    let hub_for = |gate: Cell, cost: &RoadCost| -> Option<Cell> {
        match monument {
            Some(i) => nearest_open(perimeter(rects[i], w, l), gate, cost),
            None => {
                let centre = if rects.is_empty() {
                    inner.center()
                } else {
                    let n = rects.len() as f64;
                    let (sx, sz) = rects
                        .iter()
                        .map(|r| r.center())
                        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
                    (sx / n, sz / n)
                };
                let start = Cell::new(
                    (centre.0.round() as usize).clamp(inner.x0, inner.x1() - 1),
                    (centre.1.round() as usize).clamp(inner.z0, inner.z1() - 1),
                );
                nearest_by_bfs(inner, start, None, |c| !cost.is_blocked(c)).map(|(c, _)| c)
            }
        }
    };

    let push = |plan: &mut RoadPlan, kind: SegmentKind, result: Result<(Vec<Cell>, u64)>| match result {
        Ok((cells, c)) => {
            let bridge = cells.iter().map(|&x| world.is_water(x)).collect();
            plan.segments.push(RoadSegment {
                kind,
                cells,
                bridge,
                cost: c,
            });
        }
        Err(e) => {
            log::warn!("road segment {kind:?} failed: {e}");
            plan.failures.push(SegmentFailure {
                kind,
                error: e.to_string(),
            });
        }
    };

    for (edge, &gate) in gates.iter().enumerate() {
        let kind = SegmentKind::Gate { edge };
        let result = match hub_for(gate, &cost) {
            Some(hub) => astar(world, gate, hub, &cost),
            None => Err(Error::Unreachable { from: gate, to: gate }),
        };
        push(&mut plan, kind, result);
    }

    let entrances = tower_entrances(w, l, walls);
    for (i, p) in layout.placements.iter().enumerate() {
        if !catalog.get(&p.building).is_some_and(|s| s.is_munition_factory()) {
            continue;
        }
        let (cx, cz) = rects[i].center();
        let entrance = *entrances
            .iter()
            .min_by(|a, b| {
                let d = |c: &Cell| (c.x as f64 - cx).powi(2) + (c.z as f64 - cz).powi(2);
                d(a).total_cmp(&d(b)).then(a.cmp(b))
            })
            .expect("four entrances");
        let kind = SegmentKind::Munitions { factory: i };
        let result = match nearest_open(perimeter(rects[i], w, l), entrance, &cost) {
            Some(start) => astar(world, start, entrance, &cost),
            None => Err(Error::Unreachable {
                from: p.anchor,
                to: entrance,
            }),
        };
        push(&mut plan, kind, result);
    }
    Ok(plan)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoadReport {
    pub roads: usize,
    pub bridges: usize,
}

/// Lay the planned roads: a road block replaces the top block of dry
/// columns and a bridge block replaces the water surface.
pub fn build_bridges(world: &mut VoxelWorld, plan: &RoadPlan) -> RoadReport {
    let mut report = RoadReport::default();
    for c in plan.cells() {
        let y = world.altitude(c) - 1;
        if world.is_water(c) {
            world.apply_edit(Edit::new(c, y, BlockClass::Bridge));
            report.bridges += 1;
        } else {
            world.apply_edit(Edit::new(c, y, BlockClass::Road));
            report.roads += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::catalog::{default_catalog, Placement};
    use crate::world::SurfaceClass;

    /// Plain Dijkstra over the same step costs.
    fn dijkstra(world: &VoxelWorld, start: Cell, goal: Cell, cost: &RoadCost) -> Option<u64> {
        let (w, l) = (world.width(), world.length());
        let mut dist = vec![u64::MAX; w * l];
        let mut heap = BinaryHeap::from([Reverse((0u64, start))]);
        dist[start.x * l + start.z] = 0;
        while let Some(Reverse((d, c))) = heap.pop() {
            if c == goal {
                return Some(d);
            }
            if d > dist[c.x * l + c.z] {
                continue;
            }
            for n in c.neighbors4(w, l) {
                if let Some(s) = cost.step(world, c, n) {
                    if d + s < dist[n.x * l + n.z] {
                        dist[n.x * l + n.z] = d + s;
                        heap.push(Reverse((d + s, n)));
                    }
                }
            }
        }
        None
    }

    fn random_world(rng: &mut ChaCha8Rng, n: usize) -> (VoxelWorld, RoadCost) {
        let alts = (0..n * n).map(|_| rng.gen_range(0..6)).collect();
        let mut w = VoxelWorld::from_altitudes(n, n, alts);
        let mut cost = RoadCost::new(&w);
        for c in w.cells().collect::<Vec<_>>() {
            let r: f64 = rng.gen();
            if r < 0.1 {
                let a = w.altitude(c);
                w.set_column(c, a, SurfaceClass::Water);
            } else if r < 0.25 {
                cost.block(c);
            }
        }
        (w, cost)
    }

    #[test]
    fn astar_matches_dijkstra() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let (w, mut cost) = random_world(&mut rng, 30);
            let s = Cell::new(rng.gen_range(0..30), rng.gen_range(0..30));
            let g = Cell::new(rng.gen_range(0..30), rng.gen_range(0..30));
            cost.unblock(g);
            let oracle = dijkstra(&w, s, g, &cost);
            match astar(&w, s, g, &cost) {
                Ok((path, c)) => {
                    assert_eq!(Some(c), oracle);
                    assert_eq!(path.first(), Some(&s));
                    assert_eq!(path.last(), Some(&g));
                    let walked: u64 = path
                        .windows(2)
                        .map(|p| {
                            assert_eq!(p[0].manhattan(p[1]), 1);
                            cost.step(&w, p[0], p[1]).unwrap()
                        })
                        .sum();
                    assert_eq!(walked, c);
                }
                Err(Error::Unreachable { .. }) => assert_eq!(oracle, None),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn water_and_climbs_are_priced() {
        let mut w = VoxelWorld::flat(3, 1, 2);
        let cost = RoadCost::new(&w);
        assert_eq!(astar(&w, Cell::new(0, 0), Cell::new(2, 0), &cost).unwrap().1, 2);
        w.set_column(Cell::new(1, 0), 5, SurfaceClass::NaturalGround("stone".into()));
        assert_eq!(astar(&w, Cell::new(0, 0), Cell::new(2, 0), &cost).unwrap().1, 14);
        w.set_column(Cell::new(1, 0), 2, SurfaceClass::Water);
        assert_eq!(astar(&w, Cell::new(0, 0), Cell::new(2, 0), &cost).unwrap().1, 6);
    }

    #[test]
    fn walled_off_goal_is_unreachable() {
        let w = VoxelWorld::flat(5, 5, 1);
        let mut cost = RoadCost::new(&w);
        for z in 0..5 {
            cost.block(Cell::new(2, z));
        }
        let err = astar(&w, Cell::new(0, 0), Cell::new(4, 4), &cost).unwrap_err();
        assert!(matches!(err, Error::Unreachable { .. }));
    }

    #[test]
    fn gate_moves_off_water() {
        let mut w = VoxelWorld::flat(21, 21, 3);
        for x in 0..2 {
            w.set_column(Cell::new(x, 10), 3, SurfaceClass::Water);
        }
        let gates = find_gates(&w).unwrap();
        // nearest dry cells at depth 1 are (0,9) and (0,11); smaller wins
        assert_eq!(gates[0], Cell::new(0, 9));
        assert_eq!(gates[1], Cell::new(20, 10));
        let all_water = {
            let mut w = VoxelWorld::flat(5, 5, 1);
            for c in w.cells().collect::<Vec<_>>() {
                w.set_column(c, 1, SurfaceClass::Water);
            }
            w
        };
        assert!(matches!(
            find_gates(&all_water),
            Err(Error::GatePlacement { edge: "x_min" })
        ));
    }

    fn planned(world: &VoxelWorld, layout: &Layout) -> RoadPlan {
        let gates = find_gates(world).unwrap();
        plan_roads(world, &default_catalog(), layout, &gates, &WallConfig::default()).unwrap()
    }

    #[test]
    fn roads_join_gates_to_monument_and_factory_to_tower() {
        let cat = default_catalog();
        let mut w = VoxelWorld::flat(80, 80, 4);
        for z in 0..80 {
            w.set_column(Cell::new(20, z), 4, SurfaceClass::Water);
        }
        let layout = Layout {
            placements: vec![
                Placement::new(cat.get("monument").unwrap(), Cell::new(30, 30)),
                Placement::new(cat.get("munition_factory").unwrap(), Cell::new(60, 50)),
            ],
            total_score: 0,
        };
        let plan = planned(&w, &layout);
        assert!(plan.failures.is_empty(), "{:?}", plan.failures);
        assert_eq!(plan.segments.len(), 5);
        let rects = layout.rects();
        let entrances = tower_entrances(80, 80, &WallConfig::default());
        for s in &plan.segments {
            assert!(s.cells.iter().all(|c| rects.iter().all(|r| !r.contains(*c))));
            let (a, b) = (s.cells[0], *s.cells.last().unwrap());
            match s.kind {
                SegmentKind::Gate { edge } => {
                    assert_eq!(a, plan.gates[edge]);
                    assert!(rects[0].dilate_within(1, 80, 80).contains(b) && !rects[0].contains(b));
                }
                SegmentKind::Munitions { .. } => {
                    assert_eq!(b, entrances[3]);
                    assert!(rects[1].dilate_within(1, 80, 80).contains(a) && !rects[1].contains(a));
                }
            }
        }
        // the x_min road crosses the river
        assert!(plan.segments[0].bridge.iter().any(|&b| b));

        let mut built = w.clone();
        let r = build_bridges(&mut built, &plan);
        assert_eq!(r.roads + r.bridges, plan.cells().len());
        assert!(r.bridges >= 1);
        for c in plan.cells() {
            assert!(built.is_artificial(c));
            assert_eq!(built.altitude(c), w.altitude(c));
        }
        assert_eq!(plan, planned(&w, &layout));
    }

    #[test]
    fn no_monument_routes_to_centroid_and_empty_layout_to_centre() {
        let w = VoxelWorld::flat(40, 40, 4);
        let plan = planned(&w, &Layout::default());
        assert!(plan.failures.is_empty());
        let hubs: HashSet<Cell> = plan.segments.iter().map(|s| *s.cells.last().unwrap()).collect();
        assert_eq!(hubs, HashSet::from([Cell::new(20, 20)]));
    }

    #[test]
    fn enclosed_monument_reports_failures_but_keeps_other_segments() {
        let cat = default_catalog();
        let w = VoxelWorld::flat(80, 80, 4);
        let fence = |x, z, fw, fl| Placement {
            building: "shop".into(),
            anchor: Cell::new(x, z),
            footprint: [fw, fl],
        };
        let layout = Layout {
            placements: vec![
                Placement::new(cat.get("monument").unwrap(), Cell::new(20, 20)),
                fence(19, 19, 27, 1),
                fence(19, 45, 27, 1),
                fence(19, 20, 1, 25),
                fence(45, 20, 1, 25),
                Placement::new(cat.get("munition_factory").unwrap(), Cell::new(60, 50)),
            ],
            total_score: 0,
        };
        let plan = planned(&w, &layout);
        assert_eq!(plan.failures.len(), 4);
        assert!(plan.failures.iter().all(|f| matches!(f.kind, SegmentKind::Gate { .. })));
        assert_eq!(plan.segments.len(), 1);
        assert!(matches!(plan.segments[0].kind, SegmentKind::Munitions { factory: 5 }));
    }
}
