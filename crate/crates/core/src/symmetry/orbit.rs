use std::cmp::Ordering;
use std::fmt;

use crate::divisors::{GroundSet, PointSet};
use crate::error::{Error, Result};

/// `S_m` acting on the last `m` of `n` marked points; labels `1..=n-m` stay fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymSetup {
    n: u32,
    m: u32,
}

impl SymSetup {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        GroundSet::new(n).map_err(|_| Error::UnsupportedSymmetry { n, m })?;
        if m > n || m + 3 < n {
            return Err(Error::UnsupportedSymmetry { n, m });
        }
        Ok(SymSetup { n, m })
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn m(self) -> u32 {
        self.m
    }

    pub fn ground(self) -> GroundSet {
        GroundSet::new(self.n).expect("validated on construction")
    }

    pub fn fixed_count(self) -> u32 {
        self.n - self.m
    }

    pub fn fixed(self) -> PointSet {
        PointSet::range(1, self.fixed_count())
    }

    pub fn permuted(self) -> PointSet {
        PointSet::range(self.fixed_count() + 1, self.n)
    }

    /// Every setup `(n, m)` with `4 <= n <= nmax` and `n - 3 <= m <= n`.
    pub fn all_up_to(nmax: u32) -> Vec<SymSetup> {
        (4..=nmax)
            .flat_map(|n| (n.saturating_sub(3)..=n).rev().map(move |m| SymSetup { n, m }))
            .collect()
    }
}

impl fmt::Display for SymSetup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, m={}", self.n, self.m)
    }
}

/// The orbit `B^i_T`: subsets of size `i` meeting the fixed labels in `T`.
///
/// Stored canonically under `(i, T) ~ (n - i, fixed \ T)`: the smaller size,
/// and at `i = n/2` the side whose `T` contains label 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitIndex {
    size: u32,
    fixed: PointSet,
}

impl OrbitIndex {
    /// Canonical orbit of `(size, fixed)`; sizes 1 and `n - 1` are psi orbits
    /// and are rejected here.
    pub fn new(setup: SymSetup, size: u32, fixed: PointSet) -> Result<Self> {
        let n = setup.n();
        let describe = || format!("[{size}]_{fixed} for {setup}");
        if size < 2 || size + 2 > n {
            return Err(Error::InvalidOrbit(format!("{}: size out of 2..=n-2", describe())));
        }
        if !fixed.is_subset(setup.fixed()) {
            return Err(Error::InvalidOrbit(format!("{}: T is not a set of fixed labels", describe())));
        }
        if fixed.len() > size || size - fixed.len() > setup.m() {
            return Err(Error::InvalidOrbit(format!("{}: no subset has this shape", describe())));
        }
        Ok(Self::canonical(setup, size, fixed))
    }

    pub(crate) fn canonical(setup: SymSetup, size: u32, fixed: PointSet) -> Self {
        let n = setup.n();
        let flip = match (2 * size).cmp(&n) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => !setup.fixed().is_empty() && !fixed.contains(1),
        };
        if flip {
            OrbitIndex {
                size: n - size,
                fixed: setup.fixed().difference(fixed),
            }
        } else {
            OrbitIndex { size, fixed }
        }
    }

    pub fn size(self) -> u32 {
        self.size
    }

    pub fn fixed(self) -> PointSet {
        self.fixed
    }

    /// The identified index `(n - i, fixed \ T)`, not canonicalized.
    pub fn complement(self, setup: SymSetup) -> (u32, PointSet) {
        (setup.n() - self.size, setup.fixed().difference(self.fixed))
    }

    /// Whether `(i, T)` coincides with its own identified index.
    pub fn is_self_paired(self, setup: SymSetup) -> bool {
        self.complement(setup) == (self.size, self.fixed)
    }

    /// Number of subsets in the orbit (each class `{S, S^c}` counted once).
    pub fn orbit_len(self, setup: SymSetup) -> u128 {
        let k = (self.size - self.fixed.len()) as u128;
        let full = binomial(setup.m() as u128, k);
        if self.is_self_paired(setup) {
            full / 2
        } else {
            full
        }
    }

    pub fn generator_name(self) -> String {
        format!("B^{}_{}", self.size, fixed_text(self.fixed))
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

pub(crate) fn fixed_text(set: PointSet) -> String {
    let labels: Vec<String> = set.iter().map(|l| l.to_string()).collect();
    format!("{{{}}}", labels.join(","))
}

impl Ord for OrbitIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.fixed.shortlex_cmp(other.fixed))
    }
}

impl PartialOrd for OrbitIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for OrbitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OrbitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fixed.is_empty() {
            write!(f, "[{}]", self.size)
        } else {
            write!(f, "[{}]_{}", self.size, fixed_text(self.fixed))
        }
    }
}

/// Which invariant coordinate a subset's class belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetOrbit {
    /// Size 1 or `n - 1`: a psi index, zero for boundary combinations.
    Psi,
    Boundary(OrbitIndex),
}

pub fn orbit_of(setup: SymSetup, set: PointSet) -> SubsetOrbit {
    let size = set.len();
    if size <= 1 || size + 1 >= setup.n() {
        SubsetOrbit::Psi
    } else {
        SubsetOrbit::Boundary(OrbitIndex::canonical(setup, size, set.intersection(setup.fixed())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(labels: &[u32]) -> PointSet {
        PointSet::from_labels(labels).unwrap()
    }

    #[test]
    fn setup_range() {
        assert!(SymSetup::new(7, 4).is_ok());
        assert!(SymSetup::new(7, 3).is_err());
        assert!(SymSetup::new(7, 8).is_err());
        assert!(SymSetup::new(3, 3).is_err());
        assert_eq!(SymSetup::new(8, 6).unwrap().fixed(), ps(&[1, 2]));
        assert_eq!(SymSetup::all_up_to(5).len(), 8);
    }

    #[test]
    fn identification() {
        let s = SymSetup::new(8, 6).unwrap();
        let a = OrbitIndex::new(s, 6, ps(&[1])).unwrap();
        let b = OrbitIndex::new(s, 2, ps(&[2])).unwrap();
        assert_eq!(a, b);
        // tie at n/2 keeps the side containing 1
        let c = OrbitIndex::new(s, 4, ps(&[2])).unwrap();
        assert_eq!(c.fixed(), ps(&[1]));
        assert!(OrbitIndex::new(s, 2, ps(&[1, 2, 3])).is_err());
        assert!(OrbitIndex::new(s, 1, PointSet::EMPTY).is_err());
        let sym = SymSetup::new(6, 6).unwrap();
        assert!(OrbitIndex::new(sym, 3, PointSet::EMPTY).unwrap().is_self_paired(sym));
        assert_eq!(OrbitIndex::new(sym, 3, PointSet::EMPTY).unwrap().orbit_len(sym), 10);
    }

    #[test]
    fn subset_orbits() {
        let s = SymSetup::new(7, 5).unwrap();
        assert_eq!(orbit_of(s, ps(&[3])), SubsetOrbit::Psi);
        assert_eq!(orbit_of(s, ps(&[1, 2, 3, 4, 5, 6])), SubsetOrbit::Psi);
        assert_eq!(
            orbit_of(s, ps(&[1, 5])),
            SubsetOrbit::Boundary(OrbitIndex::new(s, 2, ps(&[1])).unwrap())
        );
    }
}
