pub mod change;
pub mod coeff;
pub mod jet;
pub mod linalg;
pub mod parse;
pub mod poly;

pub use change::{invert_change, restrict, substitute, CoordinateChange};
pub use coeff::{Coeff, Field};
pub use jet::{order_at_origin, Jet};
pub use parse::parse_polynomial;
pub use poly::{Monomial, Poly, Ring};
