use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::basis::basis_for;
use super::invariant::InvariantDivisor;
use super::orbit::{OrbitIndex, SymSetup};
use crate::error::{Error, Result};
use crate::rational::{display_rational, Rational};

/// A linear functional on invariant coordinates, `Σ c_t [t] + constant`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearForm {
    setup: SymSetup,
    coeffs: BTreeMap<OrbitIndex, Rational>,
    constant: Rational,
}

impl LinearForm {
    pub fn zero(setup: SymSetup) -> Self {
        LinearForm {
            setup,
            coeffs: BTreeMap::new(),
            constant: Rational::zero(),
        }
    }

    pub fn unit(setup: SymSetup, target: OrbitIndex) -> Self {
        let mut f = LinearForm::zero(setup);
        f.add_term(target, &Rational::one());
        f
    }

    pub fn setup(&self) -> SymSetup {
        self.setup
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (OrbitIndex, &Rational)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn coefficient(&self, idx: OrbitIndex) -> Rational {
        self.coeffs.get(&idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn add_term(&mut self, idx: OrbitIndex, value: &Rational) {
        if value.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(idx).or_insert_with(Rational::zero);
        *slot += value;
        if slot.is_zero() {
            self.coeffs.remove(&idx);
        }
    }

    pub fn add_scaled(&mut self, other: &LinearForm, weight: &Rational) {
        debug_assert_eq!(self.setup, other.setup);
        for (k, v) in &other.coeffs {
            self.add_term(*k, &(v * weight));
        }
        self.constant += &other.constant * weight;
    }

    pub fn scaled(&self, weight: &Rational) -> LinearForm {
        let mut out = LinearForm::zero(self.setup);
        out.add_scaled(self, weight);
        out
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn eval(&self, divisor: &InvariantDivisor) -> Rational {
        let mut total = self.constant.clone();
        for (k, v) in &self.coeffs {
            total += v * divisor.get(*k);
        }
        total
    }

    /// `Some((t, c))` when the form is exactly `c·[t]`.
    pub fn as_single(&self) -> Option<(OrbitIndex, &Rational)> {
        if self.coeffs.len() != 1 || !self.constant.is_zero() {
            return None;
        }
        self.coeffs.iter().next().map(|(k, v)| (*k, v))
    }

    /// `Some(c)` when the form is `c·[target]` with `c > 0`.
    pub fn positive_multiple_of(&self, target: OrbitIndex) -> Option<&Rational> {
        match self.as_single() {
            Some((k, c)) if k == target && c.is_positive() => Some(c),
            _ => None,
        }
    }

    /// Coefficients in the order of `basis`; terms outside it are ignored.
    pub fn dense(&self, basis: &[OrbitIndex]) -> Vec<Rational> {
        basis.iter().map(|b| self.coefficient(*b)).collect()
    }

    pub fn from_dense(setup: SymSetup, basis: &[OrbitIndex], values: &[Rational]) -> Self {
        let mut f = LinearForm::zero(setup);
        for (b, v) in basis.iter().zip(values) {
            f.add_term(*b, v);
        }
        f
    }
}

/// The functional `D ↦ [target]`.
pub fn coordinate_functional(setup: SymSetup, target: OrbitIndex) -> Result<LinearForm> {
    if !basis_for(setup).contains(&target) {
        return Err(Error::NotInBasis(target.to_string()));
    }
    Ok(LinearForm::unit(setup, target))
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, v) in &self.coeffs {
            let neg = v.is_negative();
            let mag = v.abs();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            if !mag.is_one() {
                f.write_str(&display_rational(&mag))?;
            }
            write!(f, "{k}")?;
            first = false;
        }
        if !self.constant.is_zero() {
            write!(f, " + {}", display_rational(&self.constant))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisors::PointSet;
    use crate::rational::int;

    #[test]
    fn coordinate_functionals() {
        let s = SymSetup::new(6, 6).unwrap();
        let three = OrbitIndex::new(s, 3, PointSet::EMPTY).unwrap();
        assert_eq!(coordinate_functional(s, three).unwrap().to_string(), "[3]");
        let s = SymSetup::new(8, 6).unwrap();
        let t = OrbitIndex::new(s, 2, PointSet::from_labels(&[1]).unwrap()).unwrap();
        assert_eq!(coordinate_functional(s, t).unwrap().to_string(), "[2]_{1}");
        let bad = OrbitIndex::new(s, 2, PointSet::from_labels(&[1, 2]).unwrap()).unwrap();
        assert!(matches!(coordinate_functional(s, bad), Err(Error::NotInBasis(_))));
    }

    #[test]
    fn display_and_arithmetic() {
        let s = SymSetup::new(6, 6).unwrap();
        let two = OrbitIndex::new(s, 2, PointSet::EMPTY).unwrap();
        let three = OrbitIndex::new(s, 3, PointSet::EMPTY).unwrap();
        let mut f = LinearForm::unit(s, two).scaled(&int(3));
        f.add_term(three, &int(-1));
        assert_eq!(f.to_string(), "3[2] - [3]");
        let g = f.sub(&f);
        assert!(g.is_zero());
        assert_eq!(f.as_single(), None);
        assert_eq!(LinearForm::unit(s, two).scaled(&int(2)).positive_multiple_of(two), Some(&int(2)));
    }
}
