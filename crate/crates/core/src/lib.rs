//! Exact desk-scale toolkit for discrete Wasserstein barycenters.
//!
//! Everything runs on arbitrary-precision rationals: barycenter solvers
//! (general LP over the tuple set plus the one-dimensional and two-measure
//! special cases), certificate verification, optimal-plan computation for a
//! fixed support, and a compiler from planar 3-dimensional matching to
//! uniform 3-measure instances built from 3-4-5 triangles, with decoding of
//! optimal measures back into matchings.

pub mod barycenter;
pub mod cli;
pub mod cost;
mod error;
pub mod formats;
pub mod lp;
pub mod measures;
pub mod pattern;
pub mod rational;
pub mod reduction;
pub mod svg;
pub mod verify;

pub use error::{Error, Result};
