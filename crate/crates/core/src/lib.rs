//! Realization spaces and symmetry types of convex 3-polytopes.

pub mod basic_region;
pub mod catalog;
pub mod combinatorics;
pub mod geometry;
pub mod exact;
pub mod realization;
pub mod report;
pub mod symmetry;
