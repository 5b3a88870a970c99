//! Translation surfaces `x(u, v) = a·γ(u) + b·γ̃(v)` built from framed curves,
//! their singular points, and the classification of those points.

pub mod app;
pub mod classify;
pub mod curves;
pub mod error;
pub mod framedsurf;
pub mod framefield;
pub mod jets;
pub mod mesh;
pub mod report;
pub mod surface;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
