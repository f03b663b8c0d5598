//! Numerical verification workbench for Higgs-bundle-type structure
//! equations, the genus-2 quadric integrable system and semiflat hyperkähler
//! metrics built from a prepotential.

pub mod calculus;
pub mod error;
pub mod family;
pub mod quadric;
pub mod semiflat;
pub mod workbench;

pub use error::{Error, Result};
