//! JSON world files.
//!
//! Grids are written one x-row per line so files stay readable and diff
//! cleanly. The optional `canopy` grid is only written when some column
//! carries vegetation height.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{BlockClass, Edit, SurfaceClass, VoxelWorld};
use crate::error::{Error, Result};

pub const WORLD_FORMAT_VERSION: i64 = 1;

#[derive(Serialize, Deserialize)]
struct EditRecord {
    x: usize,
    y: i32,
    z: usize,
    block: String,
}

#[derive(Deserialize)]
struct WorldFile {
    width: usize,
    length: usize,
    altitude: Vec<Vec<i32>>,
    surface: Vec<Vec<String>>,
    artificial: Vec<Vec<u8>>,
    #[serde(default)]
    canopy: Option<Vec<Vec<i32>>>,
    edits: Vec<EditRecord>,
}

fn write_grid<T: Serialize>(out: &mut String, name: &str, data: &[T], length: usize) {
    out.push_str(&format!("  \"{name}\": [\n"));
    let rows: Vec<String> = data
        .chunks(length.max(1))
        .map(|row| format!("    {}", serde_json::to_string(row).expect("grid row serializes")))
        .collect();
    out.push_str(&rows.join(",\n"));
    out.push_str("\n  ],\n");
}

pub fn world_to_json(world: &VoxelWorld) -> String {
    let l = world.length();
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"version\": {WORLD_FORMAT_VERSION},\n"));
    out.push_str(&format!("  \"width\": {},\n", world.width()));
    out.push_str(&format!("  \"length\": {},\n", l));
    write_grid(&mut out, "altitude", world.altitudes(), l);
    let surface: Vec<String> = world.surfaces().iter().map(|s| s.to_string()).collect();
    write_grid(&mut out, "surface", &surface, l);
    let mask: Vec<u8> = world.artificial_mask().iter().map(|&b| u8::from(b)).collect();
    write_grid(&mut out, "artificial", &mask, l);
    if world.canopies().iter().any(|&c| c != 0) {
        write_grid(&mut out, "canopy", world.canopies(), l);
    }
    out.push_str("  \"edits\": [");
    let edits: Vec<String> = world
        .edits()
        .iter()
        .map(|e| {
            let rec = EditRecord {
                x: e.x,
                y: e.y,
                z: e.z,
                block: e.block.to_string(),
            };
            format!("\n    {}", serde_json::to_string(&rec).expect("edit serializes"))
        })
        .collect();
    out.push_str(&edits.join(","));
    if !edits.is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("]\n}\n");
    out
}

fn flatten<T: Clone>(field: &str, grid: Vec<Vec<T>>, width: usize, length: usize) -> Result<Vec<T>> {
    if grid.len() != width {
        return Err(Error::parse(
            field,
            format!("expected {width} rows, found {}", grid.len()),
        ));
    }
    let mut out = Vec::with_capacity(width * length);
    for (x, row) in grid.into_iter().enumerate() {
        if row.len() != length {
            return Err(Error::parse(
                format!("{field}[{x}]"),
                format!("expected {length} entries, found {}", row.len()),
            ));
        }
        out.extend(row);
    }
    Ok(out)
}

/// Field named in a serde error message, if any (e.g. "missing field `x`").
fn field_from_message(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or("document").to_string()
}

pub fn world_from_json(text: &str) -> Result<VoxelWorld> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::parse("document", e.to_string()))?;
    let version = value
        .get("version")
        .ok_or_else(|| Error::parse("version", "missing field `version`"))?
        .as_i64()
        .ok_or_else(|| Error::parse("version", "expected an integer"))?;
    if version != WORLD_FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            expected: WORLD_FORMAT_VERSION,
        });
    }
    let file: WorldFile = serde_json::from_value(value).map_err(|e| {
        let msg = e.to_string();
        Error::parse(field_from_message(&msg), msg)
    })?;
    let (w, l) = (file.width, file.length);

    let altitude = flatten("altitude", file.altitude, w, l)?;
    if let Some(i) = altitude.iter().position(|&a| a < 0) {
        return Err(Error::parse(
            format!("altitude[{}][{}]", i / l.max(1), i % l.max(1)),
            "altitude must be non-negative",
        ));
    }
    let surface = flatten("surface", file.surface, w, l)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<SurfaceClass>()
                .map_err(|m| Error::parse(format!("surface[{}][{}]", i / l, i % l), m))
        })
        .collect::<Result<Vec<_>>>()?;
    let artificial = flatten("artificial", file.artificial, w, l)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| match v {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::parse(
                format!("artificial[{}][{}]", i / l, i % l),
                format!("expected 0 or 1, found {v}"),
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    let canopy = match file.canopy {
        Some(grid) => flatten("canopy", grid, w, l)?,
        None => vec![0; w * l],
    };
    let edits = file
        .edits
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            if r.x >= w || r.z >= l {
                return Err(Error::parse(format!("edits[{i}]"), "edit outside the world"));
            }
            let block = r
                .block
                .parse::<BlockClass>()
                .map_err(|m| Error::parse(format!("edits[{i}].block"), m))?;
            Ok(Edit {
                x: r.x,
                y: r.y,
                z: r.z,
                block,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VoxelWorld::from_parts(
        w, l, altitude, surface, artificial, canopy, edits,
    ))
}

pub fn save_world(world: &VoxelWorld, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, world_to_json(world))?;
    Ok(())
}

pub fn load_world(path: impl AsRef<Path>) -> Result<VoxelWorld> {
    world_from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Cell;
    use crate::world::plain_ratio;

    fn sample() -> VoxelWorld {
        let mut w = VoxelWorld::from_altitudes(3, 4, (0..12).map(|i| i % 5).collect());
        w.set_column(Cell::new(0, 0), 2, SurfaceClass::Water);
        w.set_vegetation(Cell::new(2, 3), 7, 4);
        w.apply_edit(Edit::new(Cell::new(1, 1), 0, BlockClass::Road));
        w
    }

    #[test]
    fn round_trip_is_exact() {
        let w = sample();
        let back = world_from_json(&world_to_json(&w)).unwrap();
        assert_eq!(back, w);
        assert_eq!(plain_ratio(&back), plain_ratio(&w));
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let text = world_to_json(&sample());
        let err = world_from_json(&text[..text.len() / 2]).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn version_mismatch_is_reported() {
        let text = world_to_json(&sample()).replace("\"version\": 1", "\"version\": 7");
        assert!(matches!(
            world_from_json(&text),
            Err(Error::UnsupportedVersion { found: 7, expected: 1 })
        ));
    }

    #[test]
    fn bad_fields_are_named() {
        let text = world_to_json(&sample()).replace("\"ground:grass_block\"", "\"lava\"");
        match world_from_json(&text) {
            Err(Error::Parse { field, .. }) => assert!(field.starts_with("surface["), "{field}"),
            other => panic!("unexpected {other:?}"),
        }
        let text = world_to_json(&sample()).replace("\"width\": 3", "\"widht\": 3");
        match world_from_json(&text) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "width"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
