//! Exhaustive construction and verification of the three-character affine
//! sets `B(a,b)` of AG(r,q²), their hyperplane spectra, and the few-weight
//! projective codes they generate.

pub mod codes;
pub mod errata;
pub mod error;
pub mod field;
pub mod geometry;
pub mod quadric;
pub mod report;
pub mod varieties;

pub use error::{Error, Result};
pub use field::{Fe, Field, FieldDescriptor, FieldTower};
