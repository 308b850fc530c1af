//! Cohomology of the Dolbeault and Betti moduli spaces of rank-`r` Higgs bundles
//! on a `g`-dimensional abelian variety, built as explicit finite-dimensional
//! graded objects, together with exact checks of P=W, curious Poincaré duality,
//! curious hard Lefschetz, the sphere-quotient manifold obstruction and the
//! non-abelian Hodge diagram.

pub mod error;
pub mod filtration;
pub mod graded;
pub mod hodge;
pub mod lefschetz;
pub mod linalg;
pub mod nah;
pub mod torsion;

pub use error::{PwError, Result, WordBound};
