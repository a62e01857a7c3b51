//! Driver, problem files and property checks behind the `cobordant` binary.

pub mod checks;
pub mod driver;
pub mod problem;
