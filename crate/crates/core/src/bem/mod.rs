//! Axisymmetric Stokes boundary elements.

pub mod dump;
pub mod kernel;
pub mod mesh;
pub mod solver;
