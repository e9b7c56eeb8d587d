//! Explicit lower bounds on p-ranks of class groups from ramification data,
//! with the permutation-group, Dirichlet-series and field-counting machinery
//! needed to check them numerically.

pub mod arith;
pub mod bound;
pub mod dirichlet;
pub mod error;
pub mod family;
pub mod finabelian;
pub mod permgroup;
pub mod quadforms;
pub mod stats;

pub use error::{Error, Result};
pub use finabelian::FiniteAbelianGroup;
