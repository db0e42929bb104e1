//! Exact counting, exhaustive enumeration, uniform sampling and asymptotics
//! for incidence matrices: zero-one matrices with a given number of ones
//! and no zero row or column, counted up to row permutations, column
//! permutations and transposition.

pub mod asymptotics;
pub mod class;
pub mod combinatorics;
pub mod counting;
pub mod error;
pub mod known_values;
pub mod matrix;
pub mod oracle;
pub mod sampling;
pub mod stats;

pub use class::{ClassId, CountTable, Flags, Provenance};
pub use error::{Error, Result};
pub use matrix::ZeroOneMatrix;
