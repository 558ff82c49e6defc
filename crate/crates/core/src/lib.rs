//! Slope gap statistics for the regular octagon and its normalized L model.
//!
//! Saddle-connection slopes of the L-shaped surface are generated by iterating a first-return
//! map of the horocycle flow, either exactly in Q(√2) or in double precision, and compared
//! against the closed-form limiting gap density.

pub mod distribution;
pub mod error;
pub mod experiments;
pub mod genveech;
pub mod linalg2;
pub mod numfield;
pub mod quad;
pub mod scalar;
pub mod section;
pub mod verify;

pub use error::{Error, Result};
pub use linalg2::{Mat2, Vec2};
pub use numfield::{QSqrt2, Rational};
pub use scalar::Scalar;
pub use section::{BranchStep, Component, Region, Section, SectionPoint};
