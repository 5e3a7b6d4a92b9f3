//! Exact verification toolkit for F-nef divisors on the moduli space of stable
//! pointed rational curves.
//!
//! The crate computes F-curve intersections of divisor representatives,
//! reduces the F-inequalities by the symmetric group acting on the last `m`
//! marked points, and certifies with exact rational arithmetic that every
//! invariant F-nef class is an effective sum of boundary divisors when
//! `m >= n - 3`. Certificates come from two independent routes: a simplex
//! solver producing Farkas multipliers ([`cone`]) and a replay of the
//! hand-written induction argument ([`replay`]).

pub mod cone;
pub mod divisors;
mod error;
pub mod formats;
pub mod mori;
pub mod pullback;
pub mod rational;
pub mod replay;
pub mod symmetry;

pub use error::{Error, Result};
pub use rational::Rational;

pub use cone::{ContainmentReport, FarkasCertificate, HalfspaceSystem};
pub use divisors::{BVector, FPartition, GroundSet, PointSet};
pub use formats::FormatError;
pub use mori::{MoriCase, MoriReport};
pub use replay::{CheckReport, ProofScript};
pub use symmetry::{InvariantDivisor, LinearForm, OrbitIndex, SymSetup};
