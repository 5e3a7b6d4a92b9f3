use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::basis::exclusion_rule;
use super::form::LinearForm;
use super::orbit::{fixed_text, orbit_of, SubsetOrbit, SymSetup};
use crate::divisors::{FPartition, PointSet};
use crate::error::{Error, Result};
use crate::rational::int;

/// One block of an orbit partition: its size and which fixed labels it holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitBlock {
    pub size: u32,
    pub fixed: PointSet,
}

impl Ord for OrbitBlock {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.fixed.shortlex_cmp(other.fixed))
    }
}

impl PartialOrd for OrbitBlock {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `S_m`-orbit of an F-partition, written `(i_R, j_S, k_T, *)`: the
/// sorted (size, fixed content) signature of all four blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitPartition {
    blocks: [OrbitBlock; 4],
}

impl OrbitPartition {
    pub fn of(setup: SymSetup, partition: &FPartition) -> Self {
        let fixed = setup.fixed();
        let mut blocks = partition.blocks().map(|b| OrbitBlock {
            size: b.len(),
            fixed: b.intersection(fixed),
        });
        blocks.sort();
        OrbitPartition { blocks }
    }

    /// Builds the orbit from three named blocks; the fourth takes the rest.
    pub fn from_named(setup: SymSetup, named: [(u32, &[u32]); 3]) -> Result<Self> {
        let mut blocks = Vec::with_capacity(4);
        let mut used = PointSet::EMPTY;
        let mut total = 0;
        for (size, labels) in named {
            let fixed = PointSet::from_labels(labels)?;
            blocks.push(OrbitBlock { size, fixed });
            used = used.union(fixed);
            total += size;
        }
        let rest_fixed = setup.fixed().difference(used);
        if total >= setup.n() {
            return Err(Error::InvalidOrbit(format!(
                "named blocks cover {total} of {} points",
                setup.n()
            )));
        }
        blocks.push(OrbitBlock {
            size: setup.n() - total,
            fixed: rest_fixed,
        });
        let mut arr = [blocks[0], blocks[1], blocks[2], blocks[3]];
        arr.sort();
        Self::from_blocks(setup, arr)
    }

    pub fn from_blocks(setup: SymSetup, mut blocks: [OrbitBlock; 4]) -> Result<Self> {
        let fixed = setup.fixed();
        let mut seen = PointSet::EMPTY;
        let mut total = 0;
        let mut permuted = 0;
        for b in &blocks {
            if b.size == 0 || !b.fixed.is_subset(fixed) || b.fixed.len() > b.size || !b.fixed.is_disjoint(seen) {
                return Err(Error::InvalidOrbit(format!("bad orbit block {} with {}", b.size, b.fixed)));
            }
            seen = seen.union(b.fixed);
            total += b.size;
            permuted += b.size - b.fixed.len();
        }
        if total != setup.n() || seen != fixed || permuted != setup.m() {
            return Err(Error::InvalidOrbit(format!(
                "orbit blocks do not partition {} points with {} fixed",
                setup.n(),
                fixed
            )));
        }
        blocks.sort();
        Ok(OrbitPartition { blocks })
    }

    pub fn blocks(&self) -> [OrbitBlock; 4] {
        self.blocks
    }

    /// A concrete F-partition in the orbit: fixed labels where prescribed,
    /// permuted labels handed out in increasing order.
    pub fn representative(&self, setup: SymSetup) -> FPartition {
        let mut next = setup.fixed_count() + 1;
        let mut sets = [PointSet::EMPTY; 4];
        for (slot, b) in sets.iter_mut().zip(&self.blocks) {
            let extra = b.size - b.fixed.len();
            *slot = b.fixed.union(PointSet::range(next, next + extra - 1));
            next += extra;
        }
        FPartition::new(setup.ground(), sets).expect("orbit blocks partition the ground set")
    }

    /// The F-inequality of the orbit in invariant coordinates:
    /// `Σ_pairs [I ∪ X] - Σ_blocks [X]`, with psi and excluded orbits zero.
    pub fn form(&self, setup: SymSetup) -> LinearForm {
        let sets = self.representative(setup).blocks();
        let mut f = LinearForm::zero(setup);
        let mut add = |set: PointSet, sign: i64| {
            if let SubsetOrbit::Boundary(o) = orbit_of(setup, set) {
                if exclusion_rule(setup, o).is_none() {
                    f.add_term(o, &int(sign));
                }
            }
        };
        for b in sets {
            add(b, -1);
        }
        for other in &sets[1..] {
            add(sets[0].union(*other), 1);
        }
        f
    }
}

impl fmt::Display for OrbitPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            if b.fixed.is_empty() {
                write!(f, "{}", b.size)?;
            } else {
                write!(f, "{}_{}", b.size, fixed_text(b.fixed))?;
            }
        }
        f.write_str(")")
    }
}

/// Every orbit of F-partitions, in ascending signature order.
pub fn orbit_partitions(setup: SymSetup) -> Vec<OrbitPartition> {
    let f = setup.fixed_count();
    let m = setup.m();
    let mut out = BTreeSet::new();
    for code in 0..4u32.pow(f) {
        let mut fixed = [PointSet::EMPTY; 4];
        let mut c = code;
        for label in 1..=f {
            let slot = (c % 4) as usize;
            fixed[slot] = fixed[slot].union(PointSet::singleton(label));
            c /= 4;
        }
        for p0 in 0..=m {
            for p1 in 0..=m - p0 {
                for p2 in 0..=m - p0 - p1 {
                    let p3 = m - p0 - p1 - p2;
                    let counts = [p0, p1, p2, p3];
                    let mut blocks = [OrbitBlock {
                        size: 0,
                        fixed: PointSet::EMPTY,
                    }; 4];
                    let mut ok = true;
                    for k in 0..4 {
                        blocks[k] = OrbitBlock {
                            size: fixed[k].len() + counts[k],
                            fixed: fixed[k],
                        };
                        ok &= blocks[k].size > 0;
                    }
                    if ok {
                        blocks.sort();
                        out.insert(OrbitPartition { blocks });
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// One `(orbit, form)` pair per orbit of F-partitions.
pub fn symmetrized_inequalities(setup: SymSetup) -> Vec<(OrbitPartition, LinearForm)> {
    orbit_partitions(setup)
        .into_iter()
        .map(|o| {
            let f = o.form(setup);
            (o, f)
        })
        .collect()
}
