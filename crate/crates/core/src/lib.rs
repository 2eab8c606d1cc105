//! Shape and size optimization of pin-jointed plane trusses, with steepest
//! descent, tabu search and simulated annealing drivers.

pub mod error;
pub mod search;
pub mod truss;

pub use error::{IoError, SearchError, TrussError};
pub mod annealing;
pub mod campaign;
pub mod descent;
pub mod svg;
pub mod tabu;
