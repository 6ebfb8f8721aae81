//! Computable substrate of the Torelli theory of hyperkähler manifolds.
//!
//! * [`lattice`]: exact arithmetic for integral quadratic lattices.
//! * [`period`]: period points, oriented planes, twistor conics and chains,
//!   rational closures.
//! * [`llv`]: cohomology rings, Lefschetz triples and their Lie closure.
//! * [`walls`]: negative-form walls, majorants and chamber tests.
//! * [`cech`]: Čech cochains of a finite nerve with finite abelian coefficients.

pub mod cech;
pub mod error;
pub mod json;
pub mod lattice;
pub mod llv;
pub mod period;
pub mod rational;
pub mod walls;

pub use error::{Error, Result};
