//! Embeds n-dimensional grid segmentations into 2D rasters that keep the
//! segment adjacency exactly, then optimizes areas and boundary lengths with
//! a cellular automaton and renders the result with cushion shading.

pub mod automaton;
pub mod error;
pub mod graph;
pub mod grid;
pub mod layout;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod render;

pub use error::{Error, Result};
