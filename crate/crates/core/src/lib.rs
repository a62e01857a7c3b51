//! Exact polynomial algebra, weighted Rees centers, the resolution invariant,
//! cobordant blow-up charts, and weighted-cone and toric checks.

pub mod algebra;
pub mod cobordant;
pub mod error;
pub mod graded;
pub mod invariant;
pub mod rees;

pub use error::{Error, Result};
