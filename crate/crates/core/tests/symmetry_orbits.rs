mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use fnef_core::divisors::{canonicalize, enumerate_f_partitions, f_intersection, PointSet};
use fnef_core::symmetry::{
    all_orbits, basis_for, excluded_orbits, orbit_partitions, InvariantDivisor, OrbitPartition, SymSetup,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_invariant(rng: &mut ChaCha8Rng, setup: SymSetup) -> InvariantDivisor {
    let values: Vec<_> = basis_for(setup).iter().map(|_| random_rational(rng, 6)).collect();
    InvariantDivisor::from_dense(setup, &values).unwrap()
}

/// Orbits of `S_m` on boundary classes `{S, S^c}`, by closing each class
/// under adjacent transpositions of the permuted labels.
fn brute_force_orbit_count(setup: SymSetup) -> usize {
    let n = setup.n();
    let ground = setup.ground();
    let first = setup.fixed_count() + 1;
    let mut seen = BTreeSet::new();
    let mut orbits = 0;
    for mask in 1u32..(1 << n) - 1 {
        let s = PointSet::from_mask(mask);
        if s.len() < 2 || s.len() + 2 > n {
            continue;
        }
        let key = canonicalize(s, ground).unwrap();
        if seen.contains(&key) {
            continue;
        }
        orbits += 1;
        let mut stack = vec![key];
        seen.insert(key);
        while let Some(k) = stack.pop() {
            for a in first..n {
                let mut map: Vec<u32> = (1..=n).collect();
                map.swap((a - 1) as usize, a as usize);
                let labels: Vec<u32> = k.set().iter().map(|l| map[(l - 1) as usize]).collect();
                let next = canonicalize(PointSet::from_labels(&labels).unwrap(), ground).unwrap();
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
    }
    orbits
}

#[test]
fn basis_dimension_matches_orbit_count() {
    for setup in SymSetup::all_up_to(10) {
        let all = all_orbits(setup);
        assert_eq!(all.len(), brute_force_orbit_count(setup), "{setup}");
        assert_eq!(basis_for(setup).len(), all.len() - excluded_orbits(setup).len(), "{setup}");
    }
    assert_eq!(basis_for(SymSetup::new(8, 6).unwrap()).len(), 9);
}

#[test]
fn symmetrized_forms_equal_every_member_of_their_orbit() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for setup in SymSetup::all_up_to(8) {
        let d = random_invariant(&mut rng, setup);
        let expanded = d.expand();
        let forms: BTreeMap<OrbitPartition, _> = orbit_partitions(setup)
            .into_iter()
            .map(|o| (o, o.form(setup).eval(&d)))
            .collect();
        let mut hit = BTreeSet::new();
        for p in enumerate_f_partitions(setup.ground()) {
            let o = OrbitPartition::of(setup, &p);
            assert_eq!(f_intersection(&expanded, &p).unwrap(), forms[&o], "{setup} at {p}");
            hit.insert(o);
        }
        assert_eq!(hit.len(), forms.len(), "{setup}: an orbit partition has no members");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expansion_is_invariant_and_round_trips(k in 0usize..34, seed in any::<u64>()) {
        let setups = SymSetup::all_up_to(10);
        let setup = setups[k % setups.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_invariant(&mut rng, setup);
        let expanded = d.expand();
        prop_assert_eq!(InvariantDivisor::from_bvector(setup, &expanded).unwrap(), d);

        let n = setup.n();
        let mut permuted: Vec<u32> = setup.permuted().labels();
        permuted.shuffle(&mut rng);
        let mut map: Vec<u32> = (1..=n).collect();
        for (from, to) in setup.permuted().labels().into_iter().zip(permuted) {
            map[(from - 1) as usize] = to;
        }
        prop_assert_eq!(expanded.relabel(&map, setup.ground()).unwrap(), expanded);
    }
}
