//! Quantum graphs with abelian symmetry: metric graphs, vertex conditions, cyclic and
//! product group actions, quotient graphs with quasi-periodic gluing, and secular
//! determinants for the scattering formulation of the Laplacian spectrum.

pub mod builders;
pub mod condition;
pub mod decompose;
pub mod error;
pub mod graph;
pub mod io;
pub mod group;
pub mod quotient;
pub mod scattering;
pub mod spectral;
pub mod symmetry;

pub use error::{Error, Result};
