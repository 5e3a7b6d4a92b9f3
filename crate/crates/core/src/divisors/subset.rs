use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of marked points. One extra bit is reserved for
/// the node label introduced by attaching maps.
pub const MAX_POINTS: u32 = 30;

/// The marked points `{1, …, n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundSet {
    n: u32,
}

impl GroundSet {
    pub fn new(n: u32) -> Result<Self> {
        if n < 4 {
            return Err(Error::GroundTooSmall(n));
        }
        if n > MAX_POINTS {
            return Err(Error::GroundTooLarge(n));
        }
        Ok(GroundSet { n })
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn full(self) -> PointSet {
        PointSet::range(1, self.n)
    }

    pub fn contains(self, set: PointSet) -> bool {
        set.is_subset(self.full())
    }

    pub(crate) fn check(self, set: PointSet) -> Result<()> {
        match set.labels().into_iter().find(|&l| l > self.n) {
            Some(label) => Err(Error::LabelOutOfRange { label, n: self.n }),
            None => Ok(()),
        }
    }
}

/// A set of point labels stored as a bit mask (label `l` is bit `l - 1`).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PointSet(u32);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn from_labels(labels: &[u32]) -> Result<Self> {
        let mut mask = 0u32;
        for &l in labels {
            if l == 0 || l > MAX_POINTS + 1 {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    n: MAX_POINTS + 1,
                });
            }
            mask |= 1 << (l - 1);
        }
        Ok(PointSet(mask))
    }

    /// `{lo, …, hi}`; empty when `lo > hi`.
    pub fn range(lo: u32, hi: u32) -> Self {
        if lo > hi || hi == 0 {
            return PointSet::EMPTY;
        }
        let upper = if hi >= 32 { u32::MAX } else { (1u32 << hi) - 1 };
        let lower = (1u32 << (lo.max(1) - 1)) - 1;
        PointSet(upper & !lower)
    }

    pub fn singleton(label: u32) -> Self {
        debug_assert!(label >= 1 && label <= 32);
        PointSet(1 << (label - 1))
    }

    pub fn from_mask(mask: u32) -> Self {
        PointSet(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, label: u32) -> bool {
        label >= 1 && label <= 32 && self.0 & (1 << (label - 1)) != 0
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: PointSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn min_label(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    pub fn iter(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let bit = rest.trailing_zeros();
            rest &= rest - 1;
            Some(bit + 1)
        })
    }

    pub fn labels(self) -> Vec<u32> {
        self.iter().collect()
    }

    /// Lexicographic comparison of the sorted member lists.
    pub fn lex_cmp(self, other: PointSet) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let bit = diff.trailing_zeros();
        let at_or_above = !((1u32 << bit) - 1);
        if self.0 & (1 << bit) != 0 {
            // `other` either stops before `bit` (a proper prefix) or continues above it.
            if other.0 & at_or_above == 0 {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        } else if self.0 & at_or_above == 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// Size first, then lexicographic.
    pub fn shortlex_cmp(self, other: PointSet) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.lex_cmp(other))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, l) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<u32>::deserialize(d)?;
        let set = PointSet::from_labels(&labels).map_err(serde::de::Error::custom)?;
        if set.len() as usize != labels.len() {
            return Err(serde::de::Error::custom("repeated label in subset"));
        }
        Ok(set)
    }
}

/// Canonical representative of a subset indexing a divisor class.
///
/// Singletons index psi classes and are kept as is. Larger sets stand for the
/// boundary class `δ_S = δ_{S^c}` and are replaced by the smaller of `S` and
/// `S^c`, preferring the side containing label 1 when both have size `n/2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CanonSubset(PointSet);

impl CanonSubset {
    pub fn set(self) -> PointSet {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.len()
    }

    pub fn is_psi(self) -> bool {
        self.0.len() == 1
    }

    pub fn labels(self) -> Vec<u32> {
        self.0.labels()
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(*other)
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.shortlex_cmp(other.0)
    }
}

impl PartialOrd for CanonSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CanonSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for CanonSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Maps a subset to the canonical key of its class.
///
/// Sets of size `n - 1` are rejected: they bound no boundary divisor and their
/// complement would collide with a psi index.
pub fn canonicalize(set: PointSet, ground: GroundSet) -> Result<CanonSubset> {
    ground.check(set)?;
    let n = ground.n();
    let size = set.len();
    let invalid = |reason| Error::InvalidSubset {
        subset: set.labels(),
        n,
        reason,
    };
    if size == 0 {
        return Err(invalid("empty subset"));
    }
    if size == n {
        return Err(invalid("full subset"));
    }
    if size == n - 1 {
        return Err(invalid("complement of a single point"));
    }
    Ok(canonical_unchecked(set, n))
}

pub(crate) fn canonical_unchecked(set: PointSet, n: u32) -> CanonSubset {
    let size = set.len();
    if size == 1 {
        return CanonSubset(set);
    }
    let comp = PointSet::range(1, n).difference(set);
    let take_comp = match (2 * size).cmp(&n) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => !set.contains(1),
    };
    CanonSubset(if take_comp { comp } else { set })
}
