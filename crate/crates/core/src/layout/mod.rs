//! Planarization, external-face enumeration and orthogonal drawing of the
//! segmentation graph, plus a force-directed node-link baseline.

pub mod embedding;
pub mod force;
pub mod ortho;
pub mod planarity;
pub mod planarize;
pub mod svg;
