mod common;

use common::*;
use fnef_core::divisors::{
    canonicalize, enumerate_f_partitions, f_intersection, f_partition_count, is_f_nef, BVector, FPartition, GroundSet,
    PointSet,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn enumeration_matches_surjection_oracle() {
    for n in 4..=8 {
        let ground = GroundSet::new(n).unwrap();
        let listed: Vec<[u32; 4]> = enumerate_f_partitions(ground).map(|p| masks(&p)).collect();
        let unique: std::collections::BTreeSet<_> = listed.iter().copied().collect();
        assert_eq!(unique.len(), listed.len(), "n={n}: repeated partition");
        assert_eq!(unique, brute_force_partitions(n), "n={n}");
        assert_eq!(listed.len() as u128, f_partition_count(n));
    }
}

#[test]
fn four_point_example() {
    // b_{12} = +1 means D = -δ_{12}, which is negative on the only F-curve.
    let ground = GroundSet::new(4).unwrap();
    let mut d = BVector::zero(ground);
    d.add(PointSet::from_labels(&[1, 2]).unwrap(), &q(1, 1)).unwrap();
    let verdict = is_f_nef(&d);
    assert!(!verdict.nef);
    assert_eq!(verdict.witness.unwrap().1, q(-1, 1));
}

#[test]
fn strict_base_is_strictly_positive() {
    for n in 5..=9 {
        let d = strict_base(n);
        let min = enumerate_f_partitions(d.ground())
            .map(|p| f_intersection(&d, &p).unwrap())
            .min()
            .unwrap();
        assert!(min > q(0, 1), "n={n}: min {min}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_is_idempotent_and_complement_blind(n in 4u32..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ground = GroundSet::new(n).unwrap();
        let s = random_subset(&mut rng, n, 2, n - 2);
        let c = canonicalize(s, ground).unwrap();
        prop_assert_eq!(canonicalize(c.set(), ground).unwrap(), c);
        prop_assert_eq!(canonicalize(ground.full().difference(s), ground).unwrap(), c);
        prop_assert!(c.len() * 2 <= n);
        if c.len() * 2 == n {
            prop_assert!(c.set().contains(1));
        }
    }

    #[test]
    fn f_intersection_is_linear(n in 4u32..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_bvector(&mut rng, n, 6, true);
        let e = random_bvector(&mut rng, n, 6, true);
        let (a, b) = (random_rational(&mut rng, 7), random_rational(&mut rng, 7));
        let mut combo = d.scaled(&a);
        combo.add_scaled(&e, &b).unwrap();
        for p in enumerate_f_partitions(d.ground()).step_by(7) {
            let lhs = f_intersection(&combo, &p).unwrap();
            let rhs = &a * f_intersection(&d, &p).unwrap() + &b * f_intersection(&e, &p).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pairing_ignores_block_order(n in 4u32..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_bvector(&mut rng, n, 8, true);
        let parts: Vec<FPartition> = enumerate_f_partitions(d.ground()).collect();
        let p = &parts[rng.gen_range(0..parts.len())];
        let base = f_intersection(&d, p).unwrap();
        let blocks = p.blocks();
        for perm in [[1, 0, 2, 3], [2, 3, 0, 1], [3, 1, 2, 0], [1, 2, 3, 0]] {
            prop_assert_eq!(f_at(&d, perm.map(|i| blocks[i])), base.clone());
        }
    }
}
