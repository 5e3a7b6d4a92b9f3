//! Extreme rays of `{x : F_j(x) ≥ 0}` by the double-description method,
//! in exact integer arithmetic. Independent of the simplex code path.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::system::HalfspaceSystem;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::symmetry::InvariantDivisor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdResult {
    pub rays: Vec<InvariantDivisor>,
}

impl DdResult {
    /// True when every ray has all basis coordinates `≥ 0`.
    pub fn all_coordinates_nonnegative(&self) -> bool {
        self.rays.iter().all(|r| r.coords().all(|(_, v)| !v.is_negative()))
    }
}

#[derive(Clone)]
struct Ray {
    v: Vec<BigInt>,
    zeros: Vec<u64>,
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

fn integer_rows(system: &HalfspaceSystem) -> Vec<Vec<BigInt>> {
    system
        .dense_rows()
        .into_iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let l = Rational::from_integer(lcm);
            row.iter().map(|v| (v * &l).to_integer()).collect()
        })
        .collect()
}

/// Indices of `d` linearly independent rows, greedily in order.
fn independent_rows(rows: &[Vec<BigInt>], d: usize) -> Vec<usize> {
    let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut r: Vec<Rational> = row.iter().cloned().map(Rational::from_integer).collect();
        for (pivot, e) in &echelon {
            if !r[*pivot].is_zero() {
                let f = &r[*pivot] / &e[*pivot];
                for (a, b) in r.iter_mut().zip(e) {
                    *a -= &f * b;
                }
            }
        }
        if let Some(p) = r.iter().position(|v| !v.is_zero()) {
            echelon.push((p, r));
            chosen.push(i);
            if chosen.len() == d {
                break;
            }
        }
    }
    chosen
}

/// Solves `A0 r = e_k` for each `k` by Gauss-Jordan elimination.
fn inverse_columns(a0: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    let d = a0.len();
    let mut m: Vec<Vec<Rational>> = a0
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().cloned().map(Rational::from_integer).collect();
            r.extend((0..d).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| !m[r][c].is_zero()).expect("rows are independent");
        m.swap(c, p);
        let pv = m[c][c].clone();
        for v in &mut m[c] {
            *v /= &pv;
        }
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a -= &f * b;
                }
            }
        }
    }
    (0..d).map(|k| (0..d).map(|i| m[i][d + k].clone()).collect()).collect()
}

fn to_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let l = Rational::from_integer(lcm);
    primitive(v.iter().map(|x| (x * &l).to_integer()).collect())
}

/// All extreme rays of the cone cut out by `system`. Errors if the cone is
/// not pointed (the forms do not span).
pub fn extreme_rays(system: &HalfspaceSystem) -> Result<DdResult> {
    let d = system.basis().len();
    let rows = integer_rows(system);
    let words = rows.len().div_ceil(64).max(1);
    let start = independent_rows(&rows, d);
    if start.len() < d {
        return Err(Error::Internal(format!(
            "forms have rank {} < {d}; the cone is not pointed",
            start.len()
        )));
    }
    let a0: Vec<Vec<BigInt>> = start.iter().map(|&i| rows[i].clone()).collect();
    let mut rays: Vec<Ray> = inverse_columns(&a0)
        .into_iter()
        .enumerate()
        .map(|(k, col)| {
            let mut zeros = vec![0u64; words];
            for (j, &row) in start.iter().enumerate() {
                if j != k {
                    set_bit(&mut zeros, row);
                }
            }
            Ray {
                v: to_integer(&col),
                zeros,
            }
        })
        .collect();

    let mut processed = vec![false; rows.len()];
    for &i in &start {
        processed[i] = true;
    }
    for (i, a) in rows.iter().enumerate() {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let values: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if values[k].is_zero() {
                    set_bit(&mut r.zeros, i);
                }
            }
            continue;
        }
        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = rays[p].zeros.iter().zip(&rays[q].zeros).map(|(x, y)| x & y).collect();
                let count: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (count as usize) + 2 < d {
                    continue;
                }
                let dominated = rays.iter().enumerate().any(|(k, r)| {
                    k != p && k != q && common.iter().zip(&r.zeros).all(|(c, z)| c & !z == 0)
                });
                if dominated {
                    continue;
                }
                let v: Vec<BigInt> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(x, y)| &values[p] * x - &values[q] * y)
                    .collect();
                let mut zeros = common;
                set_bit(&mut zeros, i);
                fresh.push(Ray { v: primitive(v), zeros });
            }
        }
        let mut next = Vec::with_capacity(pos.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                set_bit(&mut r.zeros, i);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }

    let setup = system.setup();
    let mut out = rays
        .into_iter()
        .map(|r| {
            let values: Vec<Rational> = r.v.into_iter().map(Rational::from_integer).collect();
            InvariantDivisor::from_dense(setup, &values)
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.coords().cmp(b.coords()));
    Ok(DdResult { rays: out })
}

#[cfg(test)]
mod tests {
    use super::super::system::build_system;
    use super::*;
    use crate::rational::int;
    use crate::symmetry::SymSetup;

    #[test]
    fn six_six_rays() {
        let s = SymSetup::new(6, 6).unwrap();
        let sys = build_system(s);
        let result = extreme_rays(&sys).unwrap();
        // rays of {3x - y ≥ 0, 2y - x ≥ 0}: (1,3) and (2,1)
        let dense: Vec<Vec<Rational>> = result.rays.iter().map(|r| sys.basis().iter().map(|b| r.get(*b)).collect()).collect();
        assert_eq!(dense.len(), 2);
        assert!(dense.contains(&vec![int(1), int(3)]));
        assert!(dense.contains(&vec![int(2), int(1)]));
        assert!(result.all_coordinates_nonnegative());
    }

    #[test]
    fn rays_satisfy_all_forms_tightly() {
        for (n, m) in [(7, 7), (7, 6), (6, 4), (7, 4)] {
            let s = SymSetup::new(n, m).unwrap();
            let sys = build_system(s);
            let d = sys.basis().len();
            for ray in extreme_rays(&sys).unwrap().rays {
                let vals: Vec<Rational> = sys.inequalities().iter().map(|q| q.form.eval(&ray)).collect();
                assert!(vals.iter().all(|v| !v.is_negative()));
                // an extreme ray is tight on at least d - 1 forms
                assert!(vals.iter().filter(|v| v.is_zero()).count() + 1 >= d);
            }
        }
    }
}
