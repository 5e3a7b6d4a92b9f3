use std::collections::BTreeMap;

use num_traits::Zero;

use super::basis::{basis_for, exclusion_rule};
use super::orbit::{orbit_of, OrbitIndex, SubsetOrbit, SymSetup};
use crate::divisors::{canonical_unchecked, BVector, PointSet};
use crate::error::{Error, Result};
use crate::rational::{display_rational, Rational};

/// `D = Σ [i]_T B^i_T` over the invariant basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantDivisor {
    setup: SymSetup,
    coords: BTreeMap<OrbitIndex, Rational>,
}

impl InvariantDivisor {
    pub fn zero(setup: SymSetup) -> Self {
        InvariantDivisor {
            setup,
            coords: BTreeMap::new(),
        }
    }

    pub fn setup(&self) -> SymSetup {
        self.setup
    }

    /// Sets a coordinate given by an arbitrary (possibly non-canonical) index.
    pub fn set(&mut self, size: u32, fixed: PointSet, value: Rational) -> Result<()> {
        let idx = OrbitIndex::new(self.setup, size, fixed)?;
        self.set_index(idx, value)
    }

    pub fn set_index(&mut self, idx: OrbitIndex, value: Rational) -> Result<()> {
        if let Some(rule) = exclusion_rule(self.setup, idx) {
            return Err(Error::ExcludedOrbit {
                orbit: idx.generator_name(),
                rule,
            });
        }
        if !basis_for(self.setup).contains(&idx) {
            return Err(Error::NotInBasis(idx.to_string()));
        }
        if value.is_zero() {
            self.coords.remove(&idx);
        } else {
            self.coords.insert(idx, value);
        }
        Ok(())
    }

    pub fn get(&self, idx: OrbitIndex) -> Rational {
        self.coords.get(&idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coords(&self) -> impl Iterator<Item = (OrbitIndex, &Rational)> {
        self.coords.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn from_dense(setup: SymSetup, values: &[Rational]) -> Result<Self> {
        let basis = basis_for(setup);
        if values.len() != basis.len() {
            return Err(Error::Internal(format!(
                "{} values for a basis of size {}",
                values.len(),
                basis.len()
            )));
        }
        let mut d = InvariantDivisor::zero(setup);
        for (b, v) in basis.iter().zip(values) {
            d.set_index(*b, v.clone())?;
        }
        Ok(d)
    }

    /// The representative `b_S = -[|S|]_{S ∩ fixed}`, one entry per class `{S, S^c}`.
    pub fn expand(&self) -> BVector {
        let n = self.setup.n();
        let mut out = BVector::zero(self.setup.ground());
        if self.coords.is_empty() {
            return out;
        }
        for mask in 1..(1u32 << n) - 1 {
            let set = PointSet::from_mask(mask);
            if let SubsetOrbit::Boundary(orbit) = orbit_of(self.setup, set) {
                let key = canonical_unchecked(set, n);
                if key.set() != set {
                    continue;
                }
                if let Some(c) = self.coords.get(&orbit) {
                    out.add_entry(key, &-c);
                }
            }
        }
        out
    }

    /// Reads coordinates back from a representative, checking that it is
    /// invariant, has no psi part and is supported on the basis.
    pub fn from_bvector(setup: SymSetup, divisor: &BVector) -> Result<Self> {
        if divisor.ground() != setup.ground() {
            return Err(Error::GroundMismatch {
                left: divisor.ground().n(),
                right: setup.n(),
            });
        }
        if let Some((k, v)) = divisor.entries().find(|(k, _)| k.is_psi()) {
            return Err(Error::NotInvariant(format!(
                "psi entry {} = {} on {}",
                k,
                display_rational(v),
                setup
            )));
        }
        let seen = orbit_coefficients(setup, divisor)?;
        let mut out = InvariantDivisor::zero(setup);
        for (orbit, value) in seen {
            if value.is_zero() {
                continue;
            }
            if exclusion_rule(setup, orbit).is_some() {
                return Err(Error::ReductionFailure {
                    orbit: orbit.generator_name(),
                    coeff: display_rational(&value),
                });
            }
            out.set_index(orbit, value)?;
        }
        Ok(out)
    }
}

/// The boundary coefficient `-b_S` of every orbit, excluded orbits included;
/// errors if two members of an orbit disagree. Psi entries are ignored.
pub fn orbit_coefficients(setup: SymSetup, divisor: &BVector) -> Result<BTreeMap<OrbitIndex, Rational>> {
    if divisor.ground() != setup.ground() {
        return Err(Error::GroundMismatch {
            left: divisor.ground().n(),
            right: setup.n(),
        });
    }
        let n = setup.n();
        let mut seen: BTreeMap<OrbitIndex, Rational> = BTreeMap::new();
        for mask in 1..(1u32 << n) - 1 {
            let set = PointSet::from_mask(mask);
            let SubsetOrbit::Boundary(orbit) = orbit_of(setup, set) else {
                continue;
            };
            if canonical_unchecked(set, n).set() != set {
                continue;
            }
            let value = -divisor.coefficient_unchecked(set);
            match seen.get(&orbit) {
                Some(prev) if *prev != value => {
                    return Err(Error::NotInvariant(format!(
                        "orbit {orbit} takes values {} and {}",
                        display_rational(prev),
                        display_rational(&value)
                    )));
                }
                Some(_) => {}
                None => {
                    seen.insert(orbit, value);
                }
            }
        }
    Ok(seen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn expand_fully_symmetric() {
        let s = SymSetup::new(6, 6).unwrap();
        let mut d = InvariantDivisor::zero(s);
        d.set(2, PointSet::EMPTY, int(1)).unwrap();
        let b = d.expand();
        assert_eq!(b.len(), 15);
        assert!(b.entries().all(|(k, v)| k.len() == 2 && *v == int(-1)));

        let mut d = InvariantDivisor::zero(s);
        d.set(3, PointSet::EMPTY, int(1)).unwrap();
        let b = d.expand();
        assert_eq!(b.len(), 10);
        assert!(b.entries().all(|(k, v)| k.len() == 3 && k.set().contains(1) && *v == int(-1)));
        assert!(InvariantDivisor::zero(s).expand().is_zero());
    }

    #[test]
    fn excluded_coordinates_rejected() {
        let s = SymSetup::new(8, 6).unwrap();
        let mut d = InvariantDivisor::zero(s);
        let err = d.set(2, PointSet::from_labels(&[1, 2]).unwrap(), int(1)).unwrap_err();
        assert!(matches!(err, Error::ExcludedOrbit { .. }));
        // (6, ∅) is the same generator
        assert!(d.set(6, PointSet::EMPTY, int(1)).is_err());
    }

    #[test]
    fn identified_indices_expand_identically() {
        let s = SymSetup::new(8, 5).unwrap();
        let t = PointSet::from_labels(&[1]).unwrap();
        let mut a = InvariantDivisor::zero(s);
        a.set(3, t, int(2)).unwrap();
        let mut b = InvariantDivisor::zero(s);
        b.set(5, PointSet::from_labels(&[2, 3]).unwrap(), int(2)).unwrap();
        assert_eq!(a.expand(), b.expand());
    }

    #[test]
    fn round_trip_through_bvector() {
        let s = SymSetup::new(7, 4).unwrap();
        let basis = basis_for(s);
        let values: Vec<Rational> = (0..basis.len() as i64).map(|k| int(k - 3)).collect();
        let d = InvariantDivisor::from_dense(s, &values).unwrap();
        assert_eq!(InvariantDivisor::from_bvector(s, &d.expand()).unwrap(), d);
    }
}
