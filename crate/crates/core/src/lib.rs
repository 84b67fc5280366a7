//! Ground-to-air coverage planning over triangular-prism airspaces.
//!
//! Stations are grouped into three-station cooperation sets by a planar
//! triangulation; each set's prism-shaped airspace is voxelized and the three
//! beams (horizontal/vertical beamwidth and tilt) are tuned by particle swarm
//! search to maximize the covered-voxel ratio under an overlap cap.

pub mod coverage;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod optimizer;
pub mod pipeline;
pub mod prism;
pub mod report;
pub mod rf;
pub mod scenario;

pub use error::{Error, Result};
pub use exec::Execution;
