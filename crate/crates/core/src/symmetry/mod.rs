//! Orbits of the symmetric group on the last `m` marked points: invariant
//! bases, invariant divisors and the symmetry-reduced F-inequalities.

mod basis;
mod form;
mod invariant;
mod orbit;
mod partition;

pub use basis::{all_orbits, basis_for, excluded_orbits, exclusion_rule, self_paired_orbits};
pub use form::{coordinate_functional, LinearForm};
pub use invariant::{orbit_coefficients, InvariantDivisor};
pub use orbit::{orbit_of, OrbitIndex, SubsetOrbit, SymSetup};
pub use partition::{orbit_partitions, symmetrized_inequalities, OrbitBlock, OrbitPartition};
