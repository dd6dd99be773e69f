pub mod cli;
pub mod error;
pub mod geometry;
pub mod linsys;
pub mod pointcloud;
pub mod solvers;
pub mod stencil;
pub mod verify;

pub use error::{Error, Result};

/// Two-dimensional point or vector.
pub type Vec2 = nalgebra::Vector2<f64>;
