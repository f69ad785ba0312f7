pub mod catalog;
pub mod error;
pub mod export;
pub mod geom;
pub mod layout;
pub mod lighting;
pub mod pipeline;
pub mod routing;
pub mod terrain_ops;
pub mod walls;
pub mod world;

pub use error::{Error, Result};
