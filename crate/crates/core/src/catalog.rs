//! Building catalog, placement costs and rewards, and placement legality.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Cell, Rect};
use crate::world::{cell_cost_with, TerrainCosts, VoxelWorld};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Monument,
    MunitionFactory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildingSpec {
    pub id: String,
    pub name: String,
    /// `[fw, fl]`: extent along x and along z.
    pub footprint: [usize; 2],
    pub reward: i64,
    #[serde(default)]
    pub roles: Vec<Role>,
}

impl BuildingSpec {
    pub fn new(id: &str, name: &str, fw: usize, fl: usize, reward: i64) -> Self {
        BuildingSpec {
            id: id.to_string(),
            name: name.to_string(),
            footprint: [fw, fl],
            reward,
            roles: Vec::new(),
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.roles.push(role);
        self
    }

    pub fn is_monument(&self) -> bool {
        self.roles.contains(&Role::Monument)
    }

    pub fn is_munition_factory(&self) -> bool {
        self.roles.contains(&Role::MunitionFactory)
    }

    pub fn rect_at(&self, anchor: Cell) -> Rect {
        Rect::at(anchor, self.footprint[0], self.footprint[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BuildingSpec>", into = "Vec<BuildingSpec>")]
pub struct Catalog {
    buildings: Vec<BuildingSpec>,
}

impl TryFrom<Vec<BuildingSpec>> for Catalog {
    type Error = Error;

    fn try_from(buildings: Vec<BuildingSpec>) -> Result<Self> {
        Catalog::new(buildings)
    }
}

impl From<Catalog> for Vec<BuildingSpec> {
    fn from(c: Catalog) -> Self {
        c.buildings
    }
}

impl Catalog {
    pub fn new(buildings: Vec<BuildingSpec>) -> Result<Self> {
        let mut ids = HashSet::new();
        for b in &buildings {
            if !ids.insert(b.id.as_str()) {
                return Err(Error::config(format!("duplicate building id '{}'", b.id)));
            }
            if b.footprint[0] == 0 || b.footprint[1] == 0 {
                return Err(Error::config(format!("building '{}' has an empty footprint", b.id)));
            }
            if b.reward < 0 {
                return Err(Error::config(format!("building '{}' has a negative reward", b.id)));
            }
        }
        if buildings.iter().filter(|b| b.is_monument()).count() > 1 {
            return Err(Error::config("at most one monument is allowed per catalog"));
        }
        Ok(Catalog { buildings })
    }

    pub fn get(&self, id: &str) -> Option<&BuildingSpec> {
        self.buildings.iter().find(|b| b.id == id)
    }

    pub fn require(&self, id: &str) -> Result<&BuildingSpec> {
        self.get(id)
            .ok_or_else(|| Error::config(format!("unknown building id '{id}'")))
    }

    pub fn by_name(&self, name: &str) -> Option<&BuildingSpec> {
        self.buildings.iter().find(|b| b.name == name)
    }

    pub fn buildings(&self) -> &[BuildingSpec] {
        &self.buildings
    }

    pub fn len(&self) -> usize {
        self.buildings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buildings.is_empty()
    }
}

/// The nine redstone buildings. Footprints are chosen so that footprint area
/// equals reward; override them through a catalog file if needed.
pub fn default_catalog() -> Catalog {
    Catalog::new(vec![
        BuildingSpec::new("dorm", "Dorm", 17, 29, 493),
        BuildingSpec::new("church", "Church", 16, 26, 416),
        BuildingSpec::new("munition_factory", "Munition Factory", 7, 17, 119).with_role(Role::MunitionFactory),
        BuildingSpec::new("monument", "Monument", 25, 25, 625).with_role(Role::Monument),
        BuildingSpec::new("shop", "Shop", 13, 14, 182),
        BuildingSpec::new("him_statue", "HIM Statue", 5, 7, 35),
        BuildingSpec::new("enderman_statue", "Enderman Statue", 5, 5, 25),
        BuildingSpec::new("trampoline", "Trampoline", 5, 7, 35),
        BuildingSpec::new("enchanting_room", "Enchanting Room", 11, 11, 121),
    ])
    .expect("default catalog is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    #[serde(flatten)]
    pub terrain: TerrainCosts,
    pub monument_bonus_max: i64,
    /// Minimum empty gap between any two footprints, in cells.
    pub min_distance: usize,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            terrain: TerrainCosts::default(),
            monument_bonus_max: 100,
            min_distance: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub building: String,
    pub anchor: Cell,
    pub footprint: [usize; 2],
}

impl Placement {
    pub fn new(spec: &BuildingSpec, anchor: Cell) -> Self {
        Placement {
            building: spec.id.clone(),
            anchor,
            footprint: spec.footprint,
        }
    }

    pub fn rect(&self) -> Rect {
        Rect::at(self.anchor, self.footprint[0], self.footprint[1])
    }
}

fn footprint_in_world(world: &VoxelWorld, spec: &BuildingSpec, anchor: Cell) -> Result<Rect> {
    let rect = spec.rect_at(anchor);
    if world.bounds().contains_rect(&rect) {
        Ok(rect)
    } else {
        Err(Error::IllegalPlacement {
            building: spec.id.clone(),
            anchor,
            reason: "footprint leaves the world".into(),
        })
    }
}

/// Sum of per-cell terrain costs over the footprint.
pub fn building_cost(world: &VoxelWorld, spec: &BuildingSpec, anchor: Cell, model: &CostModel) -> Result<u64> {
    let rect = footprint_in_world(world, spec, anchor)?;
    rect.cells().map(|c| cell_cost_with(world, c, &model.terrain)).sum()
}

/// Linear centre-distance bonus for the monument: `floor(B * (1 - d / d_max))`
/// where `d_max` is the distance from the inner-city centre to its farthest
/// corner cell. Zero for any other building.
pub fn monument_bonus(inner: Rect, spec: &BuildingSpec, anchor: Cell, model: &CostModel) -> i64 {
    if !spec.is_monument() {
        return 0;
    }
    let (cx, cz) = inner.center();
    let (bx, bz) = spec.rect_at(anchor).center();
    let d = (bx - cx).hypot(bz - cz);
    let d_max = ((inner.width as f64 - 1.0) / 2.0).hypot((inner.length as f64 - 1.0) / 2.0);
    let frac = if d_max > 0.0 { (1.0 - d / d_max).max(0.0) } else { 1.0 };
    (model.monument_bonus_max as f64 * frac).floor() as i64
}

/// `reward + monument bonus - building cost`; may be negative.
pub fn placement_score(
    world: &VoxelWorld,
    inner: Rect,
    spec: &BuildingSpec,
    anchor: Cell,
    model: &CostModel,
) -> Result<i64> {
    let cost = building_cost(world, spec, anchor, model)?;
    Ok(spec.reward + monument_bonus(inner, spec, anchor, model) - cost as i64)
}

/// True iff the footprint lies inside `inner` and keeps at least the
/// minimum gap to every existing placement.
pub fn legal(placements: &[Placement], inner: Rect, spec: &BuildingSpec, anchor: Cell, model: &CostModel) -> bool {
    let rect = spec.rect_at(anchor);
    inner.contains_rect(&rect) && placements.iter().all(|p| p.rect().gap(&rect) >= model.min_distance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::world::{BlockClass, Edit, SurfaceClass};

    #[test]
    fn table_rewards_and_costs() {
        let c = default_catalog();
        let rewards: Vec<(&str, i64)> = c.buildings().iter().map(|b| (b.name.as_str(), b.reward)).collect();
        assert_eq!(
            rewards,
            vec![
                ("Dorm", 493),
                ("Church", 416),
                ("Munition Factory", 119),
                ("Monument", 625),
                ("Shop", 182),
                ("HIM Statue", 35),
                ("Enderman Statue", 25),
                ("Trampoline", 35),
                ("Enchanting Room", 121),
            ]
        );
        let t = CostModel::default().terrain;
        assert_eq!(
            (t.water, t.plain, t.artificial, t.around_artificial),
            (10, 0, 10_000, 50)
        );
    }

    #[test]
    fn default_footprint_areas_match_rewards() {
        for b in default_catalog().buildings() {
            assert_eq!((b.footprint[0] * b.footprint[1]) as i64, b.reward, "{}", b.name);
        }
        let m = default_catalog();
        let m = m.by_name("Monument").unwrap();
        assert_eq!(m.footprint, [25, 25]);
        assert!(m.is_monument());
    }

    #[test]
    fn statue_costs() {
        let cat = default_catalog();
        let statue = cat.get("enderman_statue").unwrap();
        let model = CostModel::default();
        let mut w = VoxelWorld::flat(12, 12, 4);
        assert_eq!(building_cost(&w, statue, Cell::new(1, 1), &model).unwrap(), 0);
        for c in w.cells() {
            w.set_column(c, 4, SurfaceClass::Water);
        }
        assert_eq!(building_cost(&w, statue, Cell::new(1, 1), &model).unwrap(), 250);

        let mut w = VoxelWorld::flat(12, 12, 4);
        w.apply_edit(Edit::new(Cell::new(3, 3), 3, BlockClass::Road));
        assert!(building_cost(&w, statue, Cell::new(1, 1), &model).unwrap() >= 10_000);
        assert!(matches!(
            building_cost(&w, statue, Cell::new(9, 0), &model),
            Err(Error::IllegalPlacement { .. })
        ));
    }

    #[test]
    fn monument_bonus_range() {
        let model = CostModel::default();
        let inner = Rect::new(0, 0, 51, 51);
        let cat = default_catalog();
        let monument = cat.get("monument").unwrap();
        assert_eq!(monument_bonus(inner, monument, Cell::new(13, 13), &model), 100);
        let dot = BuildingSpec::new("m", "M", 1, 1, 0).with_role(Role::Monument);
        assert_eq!(monument_bonus(inner, &dot, Cell::new(0, 0), &model), 0);
        assert_eq!(monument_bonus(inner, &dot, Cell::new(50, 50), &model), 0);
        assert_eq!(
            monument_bonus(inner, cat.get("dorm").unwrap(), Cell::new(13, 13), &model),
            0
        );
    }

    #[test]
    fn placement_scores() {
        let cat = default_catalog();
        let model = CostModel::default();
        let w = VoxelWorld::flat(60, 60, 5);
        let inner = w.bounds();
        assert_eq!(
            placement_score(&w, inner, cat.get("dorm").unwrap(), Cell::new(3, 3), &model).unwrap(),
            493
        );
        // monument centred in a 61-wide city: centre cell 30, anchor 18
        let w61 = VoxelWorld::flat(61, 61, 5);
        let s = placement_score(
            &w61,
            w61.bounds(),
            cat.get("monument").unwrap(),
            Cell::new(18, 18),
            &model,
        )
        .unwrap();
        assert_eq!(s, 625 + 100);

        let mut wet = VoxelWorld::flat(20, 20, 5);
        for c in wet.cells() {
            wet.set_column(c, 5, SurfaceClass::Water);
        }
        let shop = cat.get("shop").unwrap();
        assert_eq!(
            placement_score(&wet, wet.bounds(), shop, Cell::new(0, 0), &model).unwrap(),
            -1638
        );
    }

    #[test]
    fn legality_gap_rules() {
        let cat = default_catalog();
        let model = CostModel::default();
        let inner = Rect::new(0, 0, 40, 40);
        let statue = cat.get("enderman_statue").unwrap();
        assert!(legal(&[], inner, statue, Cell::new(0, 0), &model));
        assert!(!legal(&[], inner, statue, Cell::new(36, 0), &model));
        let first = [Placement::new(statue, Cell::new(0, 0))];
        assert!(!legal(&first, inner, statue, Cell::new(5, 0), &model));
        assert!(!legal(&first, inner, statue, Cell::new(7, 0), &model));
        assert!(legal(&first, inner, statue, Cell::new(8, 0), &model));
    }

    #[test]
    fn catalog_json_shape() {
        let json = serde_json::to_string(&default_catalog()).unwrap();
        assert!(json.starts_with("[{\"id\":\"dorm\""));
        assert!(json.contains("\"roles\":[\"monument\"]"));
        let back: Catalog = serde_json::from_str(&json).unwrap();
        assert_eq!(back, default_catalog());
        let dup = r#"[{"id":"a","name":"A","footprint":[1,1],"reward":1},{"id":"a","name":"B","footprint":[1,1],"reward":1}]"#;
        assert!(serde_json::from_str::<Catalog>(dup).is_err());
        let model: CostModel = serde_json::from_str(r#"{"water": 12, "min_distance": 5}"#).unwrap();
        assert_eq!(
            (model.terrain.water, model.terrain.artificial, model.min_distance),
            (12, 10_000, 5)
        );
    }
}
