//! Pullback of divisor classes along the attaching map
//! `M̄_{0, A ∪ {q}} → M̄_{0, P}` that glues a fixed curve carrying `A^c` at `q`,
//! and the three reductions used for `m = n - 3`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::divisors::{canonical_unchecked, BVector, FPartition, GroundSet, PointSet};
use crate::error::{Error, Result};
use crate::rational::{display_rational, Rational};
use crate::symmetry::{basis_for, InvariantDivisor, LinearForm, OrbitIndex, SymSetup};

/// The four cases of the pullback table for a boundary class `δ_B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PullbackCase {
    /// `B = A` or `B = A^c`: pulls back to `-ψ_q`.
    NodePsi,
    /// `B ⊊ A`: pulls back to `δ_B`.
    Kept(PointSet),
    /// `B ⊋ A^c`: pulls back to `δ_{(B \ A^c) ∪ {q}}` (ambient labels, `q = n + 1`).
    Contracted(PointSet),
    /// `B` separates two points of `A^c`.
    Vanishes,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachingMap {
    ambient: GroundSet,
    kept: PointSet,
    /// `order[k]` is the ambient label (or the node `n + 1`) carried by target label `k + 1`.
    order: Vec<u32>,
    target: GroundSet,
}

impl AttachingMap {
    /// Keeps the points `kept`; the others sit on the glued component. Target
    /// labels follow the ambient order with the node last.
    pub fn new(ambient: GroundSet, kept: PointSet) -> Result<Self> {
        ambient.check(kept)?;
        let removed = ambient.full().difference(kept);
        if removed.len() < 2 {
            return Err(Error::InvalidAttachingMap(format!(
                "the glued component must carry at least 2 points, got {removed}"
            )));
        }
        if kept.len() < 3 {
            return Err(Error::InvalidAttachingMap(format!(
                "keeping {kept} leaves a target with fewer than 4 points"
            )));
        }
        let mut order = kept.labels();
        order.push(ambient.n() + 1);
        let target = GroundSet::new(order.len() as u32)?;
        Ok(AttachingMap {
            ambient,
            kept,
            order,
            target,
        })
    }

    pub fn with_target_order(mut self, order: Vec<u32>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        let mut expected = self.order.clone();
        expected.sort_unstable();
        if sorted != expected {
            return Err(Error::InvalidAttachingMap(format!(
                "target order {order:?} is not a permutation of {expected:?}"
            )));
        }
        self.order = order;
        Ok(self)
    }

    pub fn ambient(&self) -> GroundSet {
        self.ambient
    }

    pub fn target(&self) -> GroundSet {
        self.target
    }

    pub fn kept(&self) -> PointSet {
        self.kept
    }

    pub fn removed(&self) -> PointSet {
        self.ambient.full().difference(self.kept)
    }

    /// The node label `q` in ambient numbering.
    pub fn node(&self) -> u32 {
        self.ambient.n() + 1
    }

    pub fn target_order(&self) -> &[u32] {
        &self.order
    }

    /// Target label of an ambient label in `A` or of the node.
    pub fn target_label(&self, label: u32) -> Option<u32> {
        self.order.iter().position(|&l| l == label).map(|p| p as u32 + 1)
    }

    fn to_target(&self, set: PointSet) -> PointSet {
        let mut out = PointSet::EMPTY;
        for l in set.iter() {
            let t = self.target_label(l).expect("label kept by the map");
            out = out.union(PointSet::singleton(t));
        }
        out
    }

    fn to_ambient(&self, set: PointSet) -> PointSet {
        let mut out = PointSet::EMPTY;
        for t in set.iter() {
            let l = self.order[(t - 1) as usize];
            out = out.union(if l == self.node() {
                self.removed()
            } else {
                PointSet::singleton(l)
            });
        }
        out
    }

    pub fn classify(&self, b: PointSet) -> PullbackCase {
        let kept = self.kept;
        let removed = self.removed();
        if b == kept || b == removed {
            PullbackCase::NodePsi
        } else if b.is_subset(kept) {
            PullbackCase::Kept(b)
        } else if removed.is_subset(b) {
            PullbackCase::Contracted(b.difference(removed).union(PointSet::singleton(self.node())))
        } else {
            PullbackCase::Vanishes
        }
    }

    /// The ambient F-partition obtained by gluing: the node's block absorbs `A^c`.
    pub fn pushforward(&self, partition: &FPartition) -> Result<FPartition> {
        if partition.ground() != self.target {
            return Err(Error::GroundMismatch {
                left: partition.ground().n(),
                right: self.target.n(),
            });
        }
        FPartition::new(self.ambient, partition.blocks().map(|b| self.to_ambient(b)))
    }
}

/// Linear extension of the pullback table; `ψ_i` for `i ∈ A` pulls back to `ψ_i`.
pub fn pullback(map: &AttachingMap, divisor: &BVector) -> Result<BVector> {
    if divisor.ground() != map.ambient {
        return Err(Error::GroundMismatch {
            left: divisor.ground().n(),
            right: map.ambient.n(),
        });
    }
    let mut out = BVector::zero(map.target);
    let node = PointSet::singleton(map.node());
    for (key, value) in divisor.entries() {
        let set = key.set();
        let image = if key.is_psi() {
            let point = set.min_label().expect("nonempty");
            if !map.kept.contains(point) {
                return Err(Error::UnsupportedPullback(point));
            }
            set
        } else {
            match map.classify(set) {
                PullbackCase::NodePsi => node,
                PullbackCase::Kept(s) | PullbackCase::Contracted(s) => s,
                PullbackCase::Vanishes => continue,
            }
        };
        out.add_entry(canonical_unchecked(map.to_target(image), map.target.n()), value);
    }
    Ok(out)
}

/// One of the three reductions of an `S_{n-3}`-invariant divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    /// The two fixed labels moved onto the glued component.
    pub removed: [u32; 2],
    pub map: AttachingMap,
    /// `(n - 1, n - 3)` with fixed labels 1 = the remaining fixed point, 2 = the node.
    pub target: SymSetup,
    pub divisor: InvariantDivisor,
    /// Multiple of `ψ_q` added to the pullback (`[2]_{2,3}` for the pair `{2, 3}`).
    pub psi_correction: Rational,
}

pub const REDUCTION_PAIRS: [[u32; 2]; 3] = [[1, 2], [1, 3], [2, 3]];

/// The attaching map for moving `removed ⊂ {1, 2, 3}` onto the glued side,
/// numbered so that the target is a standard `(n - 1, n - 3)` setup.
pub fn reduction_map(setup: SymSetup, removed: [u32; 2]) -> Result<AttachingMap> {
    if setup.fixed_count() != 3 {
        return Err(Error::UnsupportedCase(format!("reductions need m = n-3, got {setup}")));
    }
    let pair = PointSet::from_labels(&removed)?;
    if pair.len() != 2 || !pair.is_subset(setup.fixed()) {
        return Err(Error::InvalidAttachingMap(format!("{pair} is not a pair of fixed labels")));
    }
    let ground = setup.ground();
    let kept = ground.full().difference(pair);
    let remaining = setup.fixed().difference(pair).min_label().expect("one fixed label left");
    let mut order = vec![remaining, setup.n() + 1];
    order.extend(setup.permuted().iter());
    AttachingMap::new(ground, kept)?.with_target_order(order)
}

/// Reductions of a raw representative; used directly to exercise the
/// vanishing check on inputs outside the basis.
pub fn reduce_representative(setup: SymSetup, divisor: &BVector) -> Result<Vec<Reduction>> {
    let target = SymSetup::new(setup.n() - 1, setup.m())
        .map_err(|_| Error::UnsupportedCase(format!("no reduced space for {setup}")))?;
    let mut out = Vec::with_capacity(3);
    for removed in REDUCTION_PAIRS {
        let map = reduction_map(setup, removed)?;
        let mut pulled = pullback(&map, divisor)?;
        let psi_correction = if removed == [2, 3] {
            // δ-coefficient of δ_{2,3}
            -divisor.coefficient(PointSet::from_labels(&removed)?)?
        } else {
            Rational::zero()
        };
        let node = map.target_label(map.node()).expect("node is a target label");
        pulled.add(PointSet::singleton(node), &psi_correction)?;
        if let Some((k, v)) = pulled.entries().find(|(k, _)| k.is_psi()) {
            return Err(Error::ReductionFailure {
                orbit: format!("psi_{}", map.target_order()[(k.labels()[0] - 1) as usize]),
                coeff: display_rational(v),
            });
        }
        let reduced = InvariantDivisor::from_bvector(target, &pulled)?;
        out.push(Reduction {
            removed,
            map,
            target,
            divisor: reduced,
            psi_correction,
        });
    }
    Ok(out)
}

pub fn reduction_divisors(divisor: &InvariantDivisor) -> Result<Vec<Reduction>> {
    reduce_representative(divisor.setup(), &divisor.expand())
}

/// The linear map sending ambient coordinates to the coordinates of one
/// reduction: `target basis element ↦ form in ambient coordinates`.
pub fn coordinate_map(setup: SymSetup, removed: [u32; 2]) -> Result<BTreeMap<OrbitIndex, LinearForm>> {
    let pair = REDUCTION_PAIRS
        .iter()
        .position(|p| *p == removed)
        .ok_or_else(|| Error::InvalidAttachingMap(format!("{removed:?} is not a reduction pair")))?;
    let target = SymSetup::new(setup.n() - 1, setup.m())?;
    let mut out: BTreeMap<OrbitIndex, LinearForm> =
        basis_for(target).into_iter().map(|t| (t, LinearForm::zero(setup))).collect();
    for e in basis_for(setup) {
        let mut unit = InvariantDivisor::zero(setup);
        unit.set_index(e, Rational::from_integer(1.into()))?;
        let reductions = reduction_divisors(&unit)?;
        for (t, v) in reductions[pair].divisor.coords() {
            out.get_mut(&t).expect("basis coordinate").add_term(e, v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisors::{boundary_class, psi_class};
    use crate::rational::int;

    fn ps(labels: &[u32]) -> PointSet {
        PointSet::from_labels(labels).unwrap()
    }

    fn map6() -> AttachingMap {
        AttachingMap::new(GroundSet::new(6).unwrap(), ps(&[1, 2, 3, 4])).unwrap()
    }

    #[test]
    fn table_examples() {
        let map = map6();
        let g6 = GroundSet::new(6).unwrap();
        let target = map.target();
        assert_eq!(map.node(), 7);
        assert_eq!(map.target_label(7), Some(5));

        let d = pullback(&map, &boundary_class(ps(&[5, 6]), g6).unwrap()).unwrap();
        assert_eq!(d, psi_class(5, target).unwrap().neg());

        let d = pullback(&map, &boundary_class(ps(&[1, 2]), g6).unwrap()).unwrap();
        assert_eq!(d, boundary_class(ps(&[1, 2]), target).unwrap());

        // {2,5,6} ⊃ A^c ↦ δ_{2,q}
        let d = pullback(&map, &boundary_class(ps(&[2, 5, 6]), g6).unwrap()).unwrap();
        assert_eq!(d, boundary_class(ps(&[2, 5]), target).unwrap());

        let d = pullback(&map, &boundary_class(ps(&[1, 5]), g6).unwrap()).unwrap();
        assert!(d.is_zero());
        assert_eq!(map.classify(ps(&[1, 5, 6])), PullbackCase::Contracted(ps(&[1, 7])));
    }

    #[test]
    fn psi_handling() {
        let map = map6();
        let g6 = GroundSet::new(6).unwrap();
        assert_eq!(
            pullback(&map, &psi_class(2, g6).unwrap()).unwrap(),
            psi_class(2, map.target()).unwrap()
        );
        assert_eq!(
            pullback(&map, &psi_class(6, g6).unwrap()),
            Err(Error::UnsupportedPullback(6))
        );
    }

    #[test]
    fn map_validation() {
        let g6 = GroundSet::new(6).unwrap();
        assert!(AttachingMap::new(g6, ps(&[1, 2, 3, 4, 5])).is_err());
        assert!(AttachingMap::new(g6, ps(&[1, 2])).is_err());
        assert!(map6().with_target_order(vec![1, 2, 3, 4, 6]).is_err());
    }

    #[test]
    fn pushforward_glues_node_block() {
        let map = map6();
        let part = FPartition::new(map.target(), [ps(&[1]), ps(&[2]), ps(&[3]), ps(&[4, 5])]).unwrap();
        let pushed = map.pushforward(&part).unwrap();
        assert_eq!(pushed.blocks()[3], ps(&[4, 5, 6]));
    }

    #[test]
    fn reduction_of_zero_and_failure() {
        let s = SymSetup::new(7, 4).unwrap();
        let zero = reduction_divisors(&InvariantDivisor::zero(s)).unwrap();
        assert_eq!(zero.len(), 3);
        assert!(zero.iter().all(|r| r.divisor.is_zero() && r.psi_correction.is_zero()));

        // raw representative carrying the excluded δ_{1,2,3}
        let raw = boundary_class(ps(&[1, 2, 3]), s.ground()).unwrap();
        assert!(matches!(
            reduce_representative(s, &raw),
            Err(Error::ReductionFailure { .. })
        ));
    }

    #[test]
    fn reduction_keeps_invariant_shape() {
        let s = SymSetup::new(7, 4).unwrap();
        let mut d = InvariantDivisor::zero(s);
        d.set(2, PointSet::EMPTY, int(1)).unwrap();
        let reductions = reduction_divisors(&d).unwrap();
        let target = SymSetup::new(6, 4).unwrap();
        for r in &reductions {
            assert_eq!(r.target, target);
            // B^2_∅ lies on A and maps onto [2]_∅ of the target
            assert_eq!(r.divisor.get(OrbitIndex::new(target, 2, PointSet::EMPTY).unwrap()), int(1));
            assert_eq!(r.divisor.coords().count(), 1);
        }
    }
}
