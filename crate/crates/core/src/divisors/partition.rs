use std::fmt;

use num_traits::{Signed, Zero};

use super::bvector::BVector;
use super::subset::{GroundSet, PointSet};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// An unordered partition of the marked points into four nonempty blocks,
/// i.e. the index of an F-curve.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FPartition {
    ground: GroundSet,
    blocks: [PointSet; 4],
}

fn block_key(b: &PointSet) -> (u32, u32) {
    (b.len(), b.min_label().unwrap_or(0))
}

impl FPartition {
    pub fn new(ground: GroundSet, mut blocks: [PointSet; 4]) -> Result<Self> {
        let mut seen = PointSet::EMPTY;
        for b in &blocks {
            ground.check(*b)?;
            let bad = |reason| Error::InvalidSubset {
                subset: b.labels(),
                n: ground.n(),
                reason,
            };
            if b.is_empty() {
                return Err(bad("F-partition blocks must be nonempty"));
            }
            if !b.is_disjoint(seen) {
                return Err(bad("F-partition blocks must be disjoint"));
            }
            seen = seen.union(*b);
        }
        if seen != ground.full() {
            return Err(Error::InvalidSubset {
                subset: ground.full().difference(seen).labels(),
                n: ground.n(),
                reason: "points missing from the F-partition",
            });
        }
        blocks.sort_by_key(block_key);
        Ok(FPartition { ground, blocks })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    /// Blocks sorted by (size, least label).
    pub fn blocks(&self) -> [PointSet; 4] {
        self.blocks
    }
}

impl fmt::Debug for FPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.blocks;
        write!(f, "({a} {b} {c} {d})")
    }
}

/// Number of partitions of an `n`-set into exactly four blocks, `S(n, 4)`.
pub fn f_partition_count(n: u32) -> u128 {
    let p = |b: i128| b.pow(n);
    ((p(4) - 4 * p(3) + 6 * p(2) - 4) / 24) as u128
}

/// All F-partitions in a fixed order: restricted growth strings over
/// `{0, 1, 2, 3}` using every value, in lexicographic order.
pub fn enumerate_f_partitions(ground: GroundSet) -> FPartitions {
    let n = ground.n() as usize;
    FPartitions {
        ground,
        labels: vec![0; n],
        started: false,
        done: false,
    }
}

pub struct FPartitions {
    ground: GroundSet,
    labels: Vec<u8>,
    started: bool,
    done: bool,
}

impl FPartitions {
    fn advance(&mut self) -> bool {
        let n = self.labels.len();
        // prefix maxima are recomputed on the fly; n is small
        let mut i = n;
        while i > 1 {
            i -= 1;
            let prefix_max = *self.labels[..i].iter().max().unwrap();
            if self.labels[i] < 3 && self.labels[i] <= prefix_max {
                self.labels[i] += 1;
                for j in i + 1..n {
                    self.labels[j] = 0;
                }
                return true;
            }
        }
        false
    }

    fn uses_all_blocks(&self) -> bool {
        self.labels.iter().any(|&l| l == 3)
    }
}

impl Iterator for FPartitions {
    type Item = FPartition;

    fn next(&mut self) -> Option<FPartition> {
        if self.done {
            return None;
        }
        loop {
            if self.started {
                if !self.advance() {
                    self.done = true;
                    return None;
                }
            } else {
                self.started = true;
            }
            if self.uses_all_blocks() {
                let mut blocks = [PointSet::EMPTY; 4];
                for (p, &b) in self.labels.iter().enumerate() {
                    blocks[b as usize] = blocks[b as usize].union(PointSet::singleton(p as u32 + 1));
                }
                let mut part = FPartition {
                    ground: self.ground,
                    blocks,
                };
                part.blocks.sort_by_key(block_key);
                return Some(part);
            }
        }
    }
}

/// `b_I + b_J + b_K + b_L - b_{I∪J} - b_{I∪K} - b_{I∪L}` for the divisor's
/// representative; singleton blocks read psi entries.
pub fn f_intersection(divisor: &BVector, partition: &FPartition) -> Result<Rational> {
    if divisor.ground() != partition.ground() {
        return Err(Error::GroundMismatch {
            left: divisor.ground().n(),
            right: partition.ground().n(),
        });
    }
    Ok(f_value(divisor, &partition.blocks))
}

pub(crate) fn f_value(divisor: &BVector, blocks: &[PointSet; 4]) -> Rational {
    let [i, j, k, l] = *blocks;
    let mut total = Rational::zero();
    for b in blocks {
        total += divisor.coefficient_unchecked(*b);
    }
    for other in [j, k, l] {
        total -= divisor.coefficient_unchecked(i.union(other));
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FNefVerdict {
    pub nef: bool,
    /// First violated F-partition in enumeration order, with its value.
    pub witness: Option<(FPartition, Rational)>,
}

pub fn is_f_nef(divisor: &BVector) -> FNefVerdict {
    for part in enumerate_f_partitions(divisor.ground()) {
        let value = f_value(divisor, &part.blocks);
        if value.is_negative() {
            return FNefVerdict {
                nef: false,
                witness: Some((part, value)),
            };
        }
    }
    FNefVerdict {
        nef: true,
        witness: None,
    }
}
