use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::subset::{canonical_unchecked, canonicalize, CanonSubset, GroundSet, PointSet};
use crate::error::{Error, Result};
use crate::rational::{display_rational, int, Rational};

/// A divisor written as `D = -Σ_{|S|≥2} b_S δ_S + Σ_i b_{i} ψ_i`.
///
/// Entries are keyed by canonical subsets and absent keys are zero. Zero
/// coefficients are never stored, so equality is entrywise.
#[derive(Clone, PartialEq, Eq)]
pub struct BVector {
    ground: GroundSet,
    entries: BTreeMap<CanonSubset, Rational>,
}

impl BVector {
    pub fn zero(ground: GroundSet) -> Self {
        BVector {
            ground,
            entries: BTreeMap::new(),
        }
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn entries(&self) -> impl Iterator<Item = (CanonSubset, &Rational)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: CanonSubset) -> Rational {
        self.entries.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    /// `b` of the class indexed by an arbitrary subset; `S` and `S^c` agree.
    pub fn coefficient(&self, set: PointSet) -> Result<Rational> {
        Ok(self.get(canonicalize(set, self.ground)?))
    }

    pub(crate) fn coefficient_unchecked(&self, set: PointSet) -> Rational {
        self.get(canonical_unchecked(set, self.ground.n()))
    }

    pub fn psi(&self, point: u32) -> Rational {
        self.get(canonical_unchecked(PointSet::singleton(point), self.ground.n()))
    }

    pub fn add_entry(&mut self, key: CanonSubset, value: &Rational) {
        if value.is_zero() {
            return;
        }
        let slot = self.entries.entry(key).or_insert_with(Rational::zero);
        *slot += value;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }

    /// Adds `value` to `b_S` for an arbitrary (non-canonical) subset.
    pub fn add(&mut self, set: PointSet, value: &Rational) -> Result<()> {
        let key = canonicalize(set, self.ground)?;
        self.add_entry(key, value);
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &BVector, weight: &Rational) -> Result<()> {
        if other.ground != self.ground {
            return Err(Error::GroundMismatch {
                left: self.ground.n(),
                right: other.ground.n(),
            });
        }
        for (k, v) in &other.entries {
            self.add_entry(*k, &(v * weight));
        }
        Ok(())
    }

    pub fn scaled(&self, weight: &Rational) -> BVector {
        let mut out = BVector::zero(self.ground);
        for (k, v) in &self.entries {
            out.add_entry(*k, &(v * weight));
        }
        out
    }

    pub fn neg(&self) -> BVector {
        self.scaled(&int(-1))
    }

    /// Renames points through `map[old_label - 1] = new_label` onto `target`.
    pub fn relabel(&self, map: &[u32], target: GroundSet) -> Result<BVector> {
        if map.len() != self.ground.n() as usize {
            return Err(Error::Internal(format!(
                "relabeling map has {} entries for {} points",
                map.len(),
                self.ground.n()
            )));
        }
        let mut out = BVector::zero(target);
        for (k, v) in &self.entries {
            let labels: Vec<u32> = k.set().iter().map(|l| map[(l - 1) as usize]).collect();
            out.add(PointSet::from_labels(&labels)?, v)?;
        }
        Ok(out)
    }

    pub fn has_psi_part(&self) -> bool {
        self.entries.keys().any(|k| k.is_psi())
    }
}

impl fmt::Debug for BVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BVector(n={}; ", self.ground.n())?;
        for (k, (s, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}: {}", display_rational(v))?;
        }
        f.write_str(")")
    }
}

/// The boundary divisor `δ_S`, stored as `b_S = -1`.
pub fn boundary_class(set: PointSet, ground: GroundSet) -> Result<BVector> {
    let size = set.len();
    if size < 2 || size + 2 > ground.n() {
        ground.check(set)?;
        return Err(Error::InvalidSubset {
            subset: set.labels(),
            n: ground.n(),
            reason: "boundary divisors need 2 <= |S| <= n-2",
        });
    }
    let mut out = BVector::zero(ground);
    out.add(set, &int(-1))?;
    Ok(out)
}

/// The cotangent class `ψ_i`, stored as `b_{i} = 1`.
pub fn psi_class(point: u32, ground: GroundSet) -> Result<BVector> {
    if point == 0 || point > ground.n() {
        return Err(Error::LabelOutOfRange {
            label: point,
            n: ground.n(),
        });
    }
    let mut out = BVector::zero(ground);
    out.add(PointSet::singleton(point), &int(1))?;
    Ok(out)
}
