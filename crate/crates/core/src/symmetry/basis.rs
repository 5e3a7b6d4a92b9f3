use super::orbit::{OrbitIndex, SymSetup};
use crate::divisors::PointSet;

/// Generators left out of the invariant basis, with the rule that drops them.
pub fn excluded_orbits(setup: SymSetup) -> Vec<(OrbitIndex, &'static str)> {
    let raw: &[(u32, &[u32], &'static str)] = match setup.fixed_count() {
        2 => &[(2, &[1, 2], "B^2_{1,2} is left out of the basis for m = n-2")],
        3 => &[
            (2, &[1, 2], "B^2_{1,2} is left out of the basis for m = n-3"),
            (2, &[1, 3], "B^2_{1,3} is left out of the basis for m = n-3"),
            (3, &[1, 2, 3], "B^3_{1,2,3} is left out of the basis for m = n-3"),
        ],
        _ => &[],
    };
    let mut out: Vec<(OrbitIndex, &'static str)> = Vec::new();
    for &(size, labels, rule) in raw {
        let fixed = PointSet::from_labels(labels).expect("small labels");
        if let Ok(idx) = OrbitIndex::new(setup, size, fixed) {
            if !out.iter().any(|(o, _)| *o == idx) {
                out.push((idx, rule));
            }
        }
    }
    out
}

pub fn exclusion_rule(setup: SymSetup, idx: OrbitIndex) -> Option<&'static str> {
    excluded_orbits(setup)
        .into_iter()
        .find(|(o, _)| *o == idx)
        .map(|(_, rule)| rule)
}

/// `{B^i_T : 2 <= i <= n/2, T ⊆ fixed}` modulo the identification, minus the
/// excluded generators, in ascending [`OrbitIndex`] order.
pub fn basis_for(setup: SymSetup) -> Vec<OrbitIndex> {
    let mut out = all_orbits(setup);
    let excluded = excluded_orbits(setup);
    out.retain(|o| !excluded.iter().any(|(e, _)| e == o));
    out
}

/// Every canonical boundary orbit, excluded ones included.
pub fn all_orbits(setup: SymSetup) -> Vec<OrbitIndex> {
    let fixed = setup.fixed();
    let mut out = Vec::new();
    for size in 2..=setup.n() / 2 {
        for mask in 0..(1u32 << setup.fixed_count()) {
            let t = PointSet::from_mask(mask);
            debug_assert!(t.is_subset(fixed));
            if let Ok(idx) = OrbitIndex::new(setup, size, t) {
                out.push(idx);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn self_paired_orbits(setup: SymSetup) -> Vec<OrbitIndex> {
    basis_for(setup)
        .into_iter()
        .filter(|o| o.is_self_paired(setup))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn setup(n: u32, m: u32) -> SymSetup {
        SymSetup::new(n, m).unwrap()
    }

    fn ps(labels: &[u32]) -> PointSet {
        PointSet::from_labels(labels).unwrap()
    }

    #[test]
    fn fully_symmetric_basis() {
        let b = basis_for(setup(6, 6));
        let names: Vec<String> = b.iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["[2]", "[3]"]);
        assert_eq!(self_paired_orbits(setup(6, 6)).len(), 1);
    }

    #[test]
    fn basis_for_eight_six() {
        let s = setup(8, 6);
        let b = basis_for(s);
        let mut expected = BTreeSet::new();
        for i in 2..=4 {
            for t in [&[][..], &[1], &[2], &[1, 2]] {
                if i == 2 && t == [1, 2] {
                    continue;
                }
                expected.insert(OrbitIndex::new(s, i, ps(t)).unwrap());
            }
        }
        assert_eq!(b.iter().copied().collect::<BTreeSet<_>>(), expected);
        // (4, {1}) and (4, {2}) are one orbit, as are (4, ∅) and (4, {1,2})
        assert_eq!(b.len(), 9);
        assert!(!b.contains(&OrbitIndex::new(s, 2, ps(&[1, 2])).unwrap()));
    }

    #[test]
    fn small_cases() {
        assert_eq!(basis_for(setup(4, 4)).len(), 1);
        assert_eq!(basis_for(setup(4, 1)).len(), 1);
        assert_eq!(basis_for(setup(4, 2)).len(), 1);
        assert_eq!(basis_for(setup(5, 2)).len(), 4);
    }

    /// Independent count: all raw pairs (i, T) merged under the identification.
    fn brute_force_dimension(n: u32, m: u32) -> usize {
        let f = n - m;
        let mut classes: BTreeSet<(u32, u32)> = BTreeSet::new();
        for i in 2..=n - 2 {
            for t in 0..(1u32 << f) {
                let k = t.count_ones();
                if k > i || i - k > m {
                    continue;
                }
                let other = (n - i, ((1 << f) - 1) & !t);
                classes.insert(std::cmp::min((i, t), other));
            }
        }
        let dropped: &[(u32, u32)] = match f {
            2 => &[(2, 0b11)],
            3 => &[(2, 0b011), (2, 0b101), (3, 0b111)],
            _ => &[],
        };
        for &(i, t) in dropped {
            if i <= n - 2 {
                classes.remove(&std::cmp::min((i, t), (n - i, ((1 << f) - 1) & !t)));
            }
        }
        classes.len()
    }

    #[test]
    fn cardinalities_match_enumeration() {
        for s in SymSetup::all_up_to(10) {
            assert_eq!(basis_for(s).len(), brute_force_dimension(s.n(), s.m()), "{s}");
        }
    }
}
