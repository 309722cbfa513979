//! Quantum nilpotent algebras presented as iterated Ore extensions, their
//! prime elements, and the quantum cluster structures built from them.

// Matrix code indexes several arrays with one counter; range loops read better there.
#![allow(clippy::needless_range_loop)]

pub mod io;
pub mod kacmoody;
pub mod linalg;
pub mod ore;
pub mod parse;
pub mod primes;
pub mod qtorus;
pub mod scalars;
pub mod seed;

pub use ore::{CGLPresentation, PBWElement};
pub use qtorus::{FrameSpec, SkewExponentMatrix};
pub use scalars::{Coeff, HalfInt, LaurentScalar, RatFunc, UnitMonomial};
pub use seed::{ExchangeMatrix, QuantumSeed};
