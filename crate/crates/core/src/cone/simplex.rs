//! Exact two-phase revised simplex over the rationals, Bland's rule.
//!
//! Problems are in standard form: minimize `c·x` subject to `A x = b`, `x ≥ 0`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default bound on pivots; Bland's rule terminates, this is a guard against bugs.
pub const PIVOT_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug, Default)]
pub struct StandardLp {
    pub rows: usize,
    /// Sparse columns of `A`: `(row, value)` with nonzero values.
    pub columns: Vec<Vec<(usize, Rational)>>,
    pub rhs: Vec<Rational>,
    pub cost: Vec<Rational>,
}

impl StandardLp {
    pub fn new(rows: usize, rhs: Vec<Rational>) -> Self {
        assert_eq!(rhs.len(), rows);
        StandardLp {
            rows,
            columns: Vec::new(),
            rhs,
            cost: Vec::new(),
        }
    }

    /// Adds a column from dense entries and returns its index.
    pub fn push_column(&mut self, dense: &[Rational], cost: Rational) -> usize {
        assert_eq!(dense.len(), self.rows);
        let col = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        self.columns.push(col);
        self.cost.push(cost);
        self.columns.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Rational>,
        /// `y` with `c_j - y·A_j ≥ 0` for every column and `y·b = value`.
        duals: Vec<Rational>,
        value: Rational,
    },
    /// `r` with `r·A_j ≥ 0` for every column and `r·b < 0`.
    Infeasible { ray: Vec<Rational> },
    Unbounded,
}

struct Tableau<'a> {
    lp: &'a StandardLp,
    /// `-1` where the row was negated to make `b ≥ 0`.
    flip: Vec<bool>,
    basis: Vec<usize>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
    pivots: usize,
    limit: usize,
}

impl<'a> Tableau<'a> {
    fn n_struct(&self) -> usize {
        self.lp.columns.len()
    }

    /// Column `j` after row flips; artificial `n + i` is `e_i`.
    fn column(&self, j: usize) -> Vec<(usize, Rational)> {
        if j >= self.n_struct() {
            return vec![(j - self.n_struct(), Rational::one())];
        }
        self.lp.columns[j]
            .iter()
            .map(|(i, v)| (*i, if self.flip[*i] { -v } else { v.clone() }))
            .collect()
    }

    fn ftran(&self, col: &[(usize, Rational)]) -> Vec<Rational> {
        let m = self.lp.rows;
        let mut d = vec![Rational::zero(); m];
        for (r, row) in self.binv.iter().enumerate() {
            let mut acc = Rational::zero();
            for (i, v) in col {
                if !row[*i].is_zero() {
                    acc += &row[*i] * v;
                }
            }
            d[r] = acc;
        }
        d
    }

    fn duals(&self, cost: &dyn Fn(usize) -> Rational) -> Vec<Rational> {
        let m = self.lp.rows;
        let mut y = vec![Rational::zero(); m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = cost(j);
            if c.is_zero() {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                if !self.binv[r][i].is_zero() {
                    *yi += &c * &self.binv[r][i];
                }
            }
        }
        y
    }

    fn pivot(&mut self, r: usize, j: usize, d: &[Rational]) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.limit {
            return Err(Error::PivotLimit(self.limit));
        }
        let p = d[r].clone();
        let row_r: Vec<Rational> = self.binv[r].iter().map(|v| v / &p).collect();
        let x_r = &self.xb[r] / &p;
        for i in 0..self.lp.rows {
            if i == r || d[i].is_zero() {
                continue;
            }
            let f = &d[i];
            for (a, b) in self.binv[i].iter_mut().zip(&row_r) {
                if !b.is_zero() {
                    *a -= f * b;
                }
            }
            self.xb[i] -= f * &x_r;
        }
        self.binv[r] = row_r;
        self.xb[r] = x_r;
        self.basis[r] = j;
        Ok(())
    }

    /// Runs simplex iterations; `Ok(false)` means unbounded.
    fn optimize(&mut self, cost: &dyn Fn(usize) -> Rational, allowed: usize) -> Result<bool> {
        loop {
            let y = self.duals(cost);
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let col = self.column(j);
                let mut rc = cost(j);
                for (i, v) in &col {
                    rc -= &y[*i] * v;
                }
                if rc.is_negative() {
                    entering = Some((j, col));
                    break;
                }
            }
            let Some((j, col)) = entering else {
                return Ok(true);
            };
            let d = self.ftran(&col);
            let mut leave: Option<(usize, Rational)> = None;
            for (i, di) in d.iter().enumerate() {
                if !di.is_positive() {
                    continue;
                }
                let t = &self.xb[i] / di;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => t < *best || (t == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, t));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, j, &d)?;
        }
    }

    fn unflip(&self, y: Vec<Rational>) -> Vec<Rational> {
        y.into_iter()
            .zip(&self.flip)
            .map(|(v, f)| if *f { -v } else { v })
            .collect()
    }
}

pub fn solve(lp: &StandardLp) -> Result<LpOutcome> {
    solve_with_limit(lp, PIVOT_LIMIT)
}

pub fn solve_with_limit(lp: &StandardLp, limit: usize) -> Result<LpOutcome> {
    let m = lp.rows;
    let n = lp.columns.len();
    let flip: Vec<bool> = lp.rhs.iter().map(|b| b.is_negative()).collect();
    let mut binv = vec![vec![Rational::zero(); m]; m];
    for (i, row) in binv.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    let mut t = Tableau {
        lp,
        xb: lp.rhs.iter().map(|b| b.abs()).collect(),
        flip,
        basis: (n..n + m).collect(),
        binv,
        pivots: 0,
        limit,
    };

    let phase1 = |j: usize| if j >= n { Rational::one() } else { Rational::zero() };
    t.optimize(&phase1, n)?;
    let infeasibility: Rational = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter(|(j, _)| **j >= n)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        let y = t.duals(&phase1);
        let ray = t.unflip(y.into_iter().map(|v| -v).collect());
        return Ok(LpOutcome::Infeasible { ray });
    }

    // Drive zero-level artificials out where a structural column can replace them;
    // the rows that remain are redundant and their artificial never moves.
    for r in 0..m {
        if t.basis[r] < n {
            continue;
        }
        for j in 0..n {
            if t.basis.contains(&j) {
                continue;
            }
            let d = t.ftran(&t.column(j));
            if !d[r].is_zero() {
                t.pivot(r, j, &d)?;
                break;
            }
        }
    }

    let phase2 = |j: usize| if j >= n { Rational::zero() } else { lp.cost[j].clone() };
    if !t.optimize(&phase2, n)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = t.xb[r].clone();
        }
    }
    let value = x.iter().zip(&lp.cost).map(|(a, c)| a * c).sum();
    let duals = t.unflip(t.duals(&phase2));
    Ok(LpOutcome::Optimal { x, duals, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn lp(rows: Vec<Vec<i64>>, rhs: Vec<i64>, cost: Vec<i64>) -> StandardLp {
        let mut p = StandardLp::new(rhs.len(), rhs.into_iter().map(int).collect());
        let ncols = rows[0].len();
        for j in 0..ncols {
            let col: Vec<Rational> = rows.iter().map(|r| int(r[j])).collect();
            p.push_column(&col, int(cost[j]));
        }
        p
    }

    #[test]
    fn two_by_two_certificate() {
        // 3λ - μ = 1, -λ + 2μ = 0
        let p = lp(vec![vec![3, -1], vec![-1, 2]], vec![1, 0], vec![0, 0]);
        match solve(&p).unwrap() {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, [rat(2, 5), rat(1, 5)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_ray() {
        // λ1 + λ2 = -1 has no nonnegative solution
        let p = lp(vec![vec![1, 1]], vec![-1], vec![0, 0]);
        match solve(&p).unwrap() {
            LpOutcome::Infeasible { ray } => {
                assert!(ray[0].is_positive());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn optimum_and_duals() {
        // min -x1 - x2, x1 + s1 = 2, x2 + s2 = 3
        let p = lp(vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]], vec![2, 3], vec![-1, -1, 0, 0]);
        match solve(&p).unwrap() {
            LpOutcome::Optimal { x, duals, value } => {
                assert_eq!(value, int(-5));
                assert_eq!(x[..2], [int(2), int(3)]);
                assert_eq!(duals, [int(-1), int(-1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded() {
        // min -x1, x1 - x2 = 0
        let p = lp(vec![vec![1, -1]], vec![0], vec![-1, 0]);
        assert_eq!(solve(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        // duplicate equality row
        let p = lp(vec![vec![1, 1], vec![1, 1]], vec![1, 1], vec![1, 2]);
        match solve(&p).unwrap() {
            LpOutcome::Optimal { x, value, .. } => {
                assert_eq!(value, int(1));
                assert_eq!(x, [int(1), int(0)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pivot_guard() {
        let p = lp(vec![vec![3, -1], vec![-1, 2]], vec![1, 0], vec![0, 0]);
        assert_eq!(solve_with_limit(&p, 0), Err(Error::PivotLimit(0)));
    }
}
