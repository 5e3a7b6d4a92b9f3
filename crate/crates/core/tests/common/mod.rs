//! Samplers and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fnef_core::divisors::{f_intersection, is_f_nef, BVector, FPartition, GroundSet, PointSet};
use fnef_core::Rational;
use num_bigint::BigInt;
use rand::Rng;

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    q(rng.gen_range(-bound..=bound), rng.gen_range(1..=4))
}

/// A random subset with `lo <= |S| <= hi`.
pub fn random_subset<R: Rng>(rng: &mut R, n: u32, lo: u32, hi: u32) -> PointSet {
    loop {
        let mask = rng.gen_range(1u32..(1 << n));
        let s = PointSet::from_mask(mask);
        if (lo..=hi).contains(&s.len()) {
            return s;
        }
    }
}

/// Sparse divisor with boundary entries and, if `psi`, psi entries.
pub fn random_bvector<R: Rng>(rng: &mut R, n: u32, entries: usize, psi: bool) -> BVector {
    let ground = GroundSet::new(n).unwrap();
    let mut d = BVector::zero(ground);
    for _ in 0..entries {
        let s = if psi && rng.gen_bool(0.25) {
            PointSet::singleton(rng.gen_range(1..=n))
        } else {
            random_subset(rng, n, 2, n - 2)
        };
        d.add(s, &random_rational(rng, 5)).unwrap();
    }
    d
}

/// Coefficient `c(|S|) = (|S| - 1)(n - |S| - 1)` on every `δ_S`; this is
/// strictly positive on every F-curve, so small perturbations stay F-nef.
pub fn strict_base(n: u32) -> BVector {
    let ground = GroundSet::new(n).unwrap();
    let mut d = BVector::zero(ground);
    for mask in 1u32..(1 << n) - 1 {
        let s = PointSet::from_mask(mask);
        let k = s.len();
        if k < 2 || k + 2 > n || d.coefficient(s).unwrap() != q(0, 1) {
            continue;
        }
        // δ-coefficient c_S enters the b-vector as -c_S.
        d.add(s, &q(-(((k - 1) * (n - k - 1)) as i64), 1)).unwrap();
    }
    d
}

/// Rejection sampler for boundary-supported F-nef divisors: a scaled strict
/// base plus a random sparse perturbation, kept only if F-nef.
pub fn f_nef_sample<R: Rng>(rng: &mut R, n: u32) -> BVector {
    let base = strict_base(n);
    loop {
        let mut d = base.scaled(&q(rng.gen_range(0..=2), 1));
        let entries = rng.gen_range(1..=6);
        let noise = random_bvector(rng, n, entries, false);
        d.add_scaled(&noise, &q(1, 1)).unwrap();
        if !d.is_zero() && is_f_nef(&d).nef {
            return d;
        }
    }
}

/// All partitions of `{1..n}` into four nonempty blocks, from every
/// surjection onto four labels, modulo block order.
pub fn brute_force_partitions(n: u32) -> BTreeSet<[u32; 4]> {
    let mut out = BTreeSet::new();
    for code in 0..4u32.pow(n) {
        let mut blocks = [0u32; 4];
        let mut c = code;
        for label in 0..n {
            blocks[(c % 4) as usize] |= 1 << label;
            c /= 4;
        }
        if blocks.iter().all(|&b| b != 0) {
            blocks.sort_unstable();
            out.insert(blocks);
        }
    }
    out
}

pub fn masks(p: &FPartition) -> [u32; 4] {
    let mut m = p.blocks().map(|b| b.mask());
    m.sort_unstable();
    m
}

/// `f_intersection` directly from the four blocks, without the enumeration.
pub fn f_at(d: &BVector, blocks: [PointSet; 4]) -> Rational {
    f_intersection(d, &FPartition::new(d.ground(), blocks).unwrap()).unwrap()
}
