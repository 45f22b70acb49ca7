//! Resonances of one-dimensional layered open resonators and optimization of
//! their decay rates over admissible families of structures.

pub mod bangbang;
pub mod cli;
pub mod config;
pub mod error;
pub mod linear;
pub mod model;
pub mod optimizer;
pub mod perturbation;
pub mod quadrature;

pub use error::{Error, Result};
