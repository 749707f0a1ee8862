//! Geometry kernel, slice tiling, collaborative sessions and the traffic simulator.

pub mod collab;
pub mod geometry;
pub mod sim;
pub mod tiler;
