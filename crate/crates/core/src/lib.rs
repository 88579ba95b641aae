//! Verification of eleven-dimensional bosonic supergravity backgrounds on
//! products of a five-dimensional Lorentzian and a six-dimensional Riemannian
//! manifold.

pub mod exprlang;
pub mod exterior;
pub mod geometry;
pub mod sugra;
pub mod catalog;
pub mod cli;
