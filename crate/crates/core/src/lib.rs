pub mod bounds;
pub mod error;
pub mod fixtures;
pub mod llrf;
pub mod loopmodel;
pub mod lp;
pub mod numeric;
pub mod polyhedra;
pub mod simulator;
pub mod synthesis;

pub use error::{Error, Result};
pub use numeric::{AffineFunc, RatVec, Rational};
