use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::simplex::{solve, LpOutcome, StandardLp};
use super::system::{build_system, HalfspaceSystem};
use crate::divisors::{is_f_nef, FPartition};
use crate::error::{Error, Result};
use crate::rational::{display_rational, Rational};
use crate::symmetry::{coordinate_functional, InvariantDivisor, LinearForm, OrbitIndex, SymSetup};

/// Why a certificate or counterexample was rejected.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("certificate is for {found}, system is {expected}")]
    SetupMismatch { expected: String, found: String },
    #[error("multiplier index {0} is outside the system")]
    UnknownInequality(usize),
    #[error("multiplier {value} on inequality {index} is negative")]
    NegativeMultiplier { index: usize, value: String },
    #[error("scale {0} is not positive")]
    NonPositiveScale(String),
    #[error("combination misses the target by {0}")]
    Residual(String),
    #[error("inequality {index} evaluates to {value} < 0")]
    OutsideCone { index: usize, value: String },
    #[error("target coordinate {0} is not negative")]
    TargetNotNegative(String),
    #[error("expanded divisor fails F-nef at {partition} with value {value}")]
    NotFNef { partition: String, value: String },
}

/// `Σ λ_j form_j = scale · [target]` with every `λ_j ≥ 0` and `scale > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub setup: SymSetup,
    pub target: OrbitIndex,
    pub scale: Rational,
    /// Inequality index → multiplier; zero multipliers are not stored.
    pub multipliers: BTreeMap<usize, Rational>,
}

impl FarkasCertificate {
    pub fn goal(&self) -> LinearForm {
        LinearForm::unit(self.setup, self.target).scaled(&self.scale)
    }

    /// Certificate for `c · [target]`, `c > 0`.
    pub fn scaled(&self, c: &Rational) -> FarkasCertificate {
        FarkasCertificate {
            setup: self.setup,
            target: self.target,
            scale: &self.scale * c,
            multipliers: self.multipliers.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Re-expands the combination with form arithmetic only; the solver is not consulted.
    pub fn validate(&self, system: &HalfspaceSystem) -> std::result::Result<(), CheckError> {
        if self.setup != system.setup() {
            return Err(CheckError::SetupMismatch {
                expected: system.setup().to_string(),
                found: self.setup.to_string(),
            });
        }
        if !self.scale.is_positive() {
            return Err(CheckError::NonPositiveScale(display_rational(&self.scale)));
        }
        validate_combination(system, &self.multipliers, &self.goal())
    }
}

/// Checks `Σ λ_j form_j = goal` exactly with nonnegative `λ`.
pub fn validate_combination(
    system: &HalfspaceSystem,
    multipliers: &BTreeMap<usize, Rational>,
    goal: &LinearForm,
) -> std::result::Result<(), CheckError> {
    let mut sum = LinearForm::zero(system.setup());
    for (&index, value) in multipliers {
        let ineq = system.get(index).ok_or(CheckError::UnknownInequality(index))?;
        if value.is_negative() {
            return Err(CheckError::NegativeMultiplier {
                index,
                value: display_rational(value),
            });
        }
        sum.add_scaled(&ineq.form, value);
    }
    let residual = goal.sub(&sum);
    if residual.is_zero() {
        Ok(())
    } else {
        Err(CheckError::Residual(residual.to_string()))
    }
}

/// An invariant divisor inside the symmetrized cone on which a goal is negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub goal: LinearForm,
    /// Primitive integral ray.
    pub divisor: InvariantDivisor,
    pub goal_value: Rational,
}

impl Counterexample {
    /// Three independent checks: every system form, the goal, and full
    /// unsymmetrized F-nef enumeration of the expanded divisor.
    pub fn validate(&self, system: &HalfspaceSystem) -> std::result::Result<(), CheckError> {
        self.validate_in_cone(system)?;
        let verdict = is_f_nef(&self.divisor.expand());
        if let Some((p, v)) = verdict.witness {
            return Err(CheckError::NotFNef {
                partition: p.to_string(),
                value: display_rational(&v),
            });
        }
        Ok(())
    }

    /// The first two checks only; for systems that are not the full F-nef cone.
    pub fn validate_in_cone(&self, system: &HalfspaceSystem) -> std::result::Result<(), CheckError> {
        for (index, ineq) in system.inequalities().iter().enumerate() {
            let v = ineq.form.eval(&self.divisor);
            if v.is_negative() {
                return Err(CheckError::OutsideCone {
                    index,
                    value: display_rational(&v),
                });
            }
        }
        let g = self.goal.eval(&self.divisor);
        if !g.is_negative() || g != self.goal_value {
            return Err(CheckError::TargetNotNegative(display_rational(&g)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormOutcome {
    Certified(BTreeMap<usize, Rational>),
    Refuted(Counterexample),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Certified(FarkasCertificate),
    Refuted(Counterexample),
}

impl Outcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, Outcome::Certified(_))
    }
}

fn goal_dense(system: &HalfspaceSystem, goal: &LinearForm) -> Result<Vec<Rational>> {
    let basis = system.basis();
    if let Some((t, _)) = goal.terms().find(|(t, _)| !basis.contains(t)) {
        return Err(Error::NotInBasis(t.to_string()));
    }
    if !goal.constant().is_zero() {
        return Err(Error::Internal("goal forms must be homogeneous".into()));
    }
    Ok(goal.dense(basis))
}

fn primitive_ray(values: Vec<Rational>) -> Vec<Rational> {
    let lcm = values.iter().fold(num_bigint::BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<_> = values.iter().map(|v| (v * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(num_bigint::BigInt::zero(), |acc, v| acc.gcd(v));
    if gcd.is_zero() {
        return values;
    }
    ints.into_iter().map(|v| Rational::from_integer(v / &gcd)).collect()
}

/// Decides whether `goal ≥ 0` on the cone `{all forms ≥ 0}`. A certificate is
/// any basic feasible solution of `Σ λ_j F_j = goal`; otherwise the
/// counterexample minimizes the goal on the slice `Σ_j F_j(x) = 1`.
pub fn certify_form(system: &HalfspaceSystem, goal: &LinearForm) -> Result<FormOutcome> {
    let setup = system.setup();
    let g = goal_dense(system, goal)?;
    let rows = system.dense_rows();
    let d = system.basis().len();

    let mut lp = StandardLp::new(d, g.clone());
    for row in &rows {
        lp.push_column(row, Rational::zero());
    }
    let farkas = match solve(&lp)? {
        LpOutcome::Optimal { x, .. } => {
            let multipliers = x
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .collect::<BTreeMap<_, _>>();
            validate_combination(system, &multipliers, goal)
                .map_err(|e| Error::Internal(format!("solver certificate rejected: {e}")))?;
            return Ok(FormOutcome::Certified(multipliers));
        }
        LpOutcome::Infeasible { ray } => ray,
        LpOutcome::Unbounded => return Err(Error::Internal("feasibility problem unbounded".into())),
    };

    // max μ s.t. Σ λ_j F_j + μ Σ_j F_j = goal; the optimal duals give -x.
    let mut slice = StandardLp::new(d, g);
    for row in &rows {
        slice.push_column(row, Rational::zero());
    }
    let mut total = vec![Rational::zero(); d];
    for row in &rows {
        for (t, v) in total.iter_mut().zip(row) {
            *t += v;
        }
    }
    let negated: Vec<Rational> = total.iter().map(|v| -v).collect();
    slice.push_column(&total, -Rational::one());
    slice.push_column(&negated, Rational::one());
    let point = match solve(&slice)? {
        LpOutcome::Optimal { duals, .. } => duals.into_iter().map(|v| -v).collect(),
        _ => farkas,
    };
    let divisor = InvariantDivisor::from_dense(setup, &primitive_ray(point))?;
    let goal_value = goal.eval(&divisor);
    let cx = Counterexample {
        goal: goal.clone(),
        divisor,
        goal_value,
    };
    let checked = if system.is_complete() {
        cx.validate(system)
    } else {
        cx.validate_in_cone(system)
    };
    checked.map_err(|e| Error::Internal(format!("counterexample rejected: {e}")))?;
    Ok(FormOutcome::Refuted(cx))
}

pub fn certify_nonnegative(system: &HalfspaceSystem, target: OrbitIndex) -> Result<Outcome> {
    let setup = system.setup();
    let goal = coordinate_functional(setup, target)?;
    Ok(match certify_form(system, &goal)? {
        FormOutcome::Certified(multipliers) => Outcome::Certified(FarkasCertificate {
            setup,
            target,
            scale: Rational::one(),
            multipliers,
        }),
        FormOutcome::Refuted(cx) => Outcome::Refuted(cx),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetOutcome {
    pub target: OrbitIndex,
    pub self_paired: bool,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentReport {
    pub setup: SymSetup,
    pub inequality_count: usize,
    /// One entry per basis element, in basis order.
    pub targets: Vec<TargetOutcome>,
}

impl ContainmentReport {
    pub fn contained(&self) -> bool {
        self.targets.iter().all(|t| t.outcome.is_certified())
    }

    pub fn certificates(&self) -> impl Iterator<Item = &FarkasCertificate> {
        self.targets.iter().filter_map(|t| match &t.outcome {
            Outcome::Certified(c) => Some(c),
            Outcome::Refuted(_) => None,
        })
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &Counterexample> {
        self.targets.iter().filter_map(|t| match &t.outcome {
            Outcome::Refuted(c) => Some(c),
            Outcome::Certified(_) => None,
        })
    }

    /// Re-validates every certificate and counterexample against `system`.
    pub fn validate(&self, system: &HalfspaceSystem) -> std::result::Result<(), CheckError> {
        for t in &self.targets {
            match &t.outcome {
                Outcome::Certified(c) => c.validate(system)?,
                Outcome::Refuted(c) if system.is_complete() => c.validate(system)?,
                Outcome::Refuted(c) => c.validate_in_cone(system)?,
            }
        }
        Ok(())
    }
}

/// Certifies every basis coordinate of `system`, targets in parallel.
pub fn verify_system(system: &HalfspaceSystem) -> Result<ContainmentReport> {
    let setup = system.setup();
    let targets = system
        .basis()
        .par_iter()
        .map(|&target| {
            Ok(TargetOutcome {
                target,
                self_paired: target.is_self_paired(setup),
                outcome: certify_nonnegative(system, target)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContainmentReport {
        setup,
        inequality_count: system.len(),
        targets,
    })
}

pub fn verify_effectivity(setup: SymSetup) -> Result<ContainmentReport> {
    verify_system(&build_system(setup))
}

/// The first F-partition on which `divisor` is negative, for diagnostics.
pub fn f_nef_witness(divisor: &InvariantDivisor) -> Option<(FPartition, Rational)> {
    is_f_nef(&divisor.expand()).witness
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisors::PointSet;
    use crate::rational::{int, rat};

    fn idx(s: SymSetup, i: u32) -> OrbitIndex {
        OrbitIndex::new(s, i, PointSet::EMPTY).unwrap()
    }

    #[test]
    fn six_six_certificates() {
        let s = SymSetup::new(6, 6).unwrap();
        let sys = build_system(s);
        let expect = [(2, [rat(2, 5), rat(1, 5)]), (3, [rat(1, 5), rat(3, 5)])];
        for (i, lambdas) in expect {
            match certify_nonnegative(&sys, idx(s, i)).unwrap() {
                Outcome::Certified(c) => {
                    c.validate(&sys).unwrap();
                    let got: Vec<_> = (0..2).map(|k| c.multipliers.get(&k).cloned().unwrap_or_default()).collect();
                    assert_eq!(got, lambdas);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn identity_certificate() {
        let s = SymSetup::new(6, 6).unwrap();
        let sys = HalfspaceSystem::from_forms(s, vec![LinearForm::unit(s, idx(s, 2))]);
        match certify_nonnegative(&sys, idx(s, 2)).unwrap() {
            Outcome::Certified(c) => assert_eq!(c.multipliers, BTreeMap::from([(0, int(1))])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refutation_of_dropped_inequality() {
        // without 2[3] - [2] ≥ 0 the coordinate [3] is unbounded below
        let s = SymSetup::new(6, 6).unwrap();
        let full = build_system(s);
        let sys = HalfspaceSystem::from_forms(s, vec![full.inequalities()[0].form.clone()]);
        match certify_nonnegative(&sys, idx(s, 3)).unwrap() {
            Outcome::Refuted(cx) => {
                assert!(cx.goal_value.is_negative());
                cx.validate_in_cone(&sys).unwrap();
                // the dropped inequality is violated, so the full check rejects it
                assert!(f_nef_witness(&cx.divisor).is_some());
                assert!(matches!(cx.validate(&sys), Err(CheckError::NotFNef { .. })));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scaled_certificate_and_tamper() {
        let s = SymSetup::new(7, 7).unwrap();
        let sys = build_system(s);
        let Outcome::Certified(c) = certify_nonnegative(&sys, idx(s, 3)).unwrap() else {
            panic!("not certified");
        };
        c.scaled(&rat(7, 3)).validate(&sys).unwrap();
        let mut bad = c.clone();
        let (k, v) = bad.multipliers.iter().next().map(|(k, v)| (*k, v.clone())).unwrap();
        bad.multipliers.insert(k, v + rat(1, 2));
        assert!(bad.validate(&sys).is_err());
        assert!(c.scaled(&int(0)).validate(&sys).is_err());
    }

    #[test]
    fn small_setups_contained() {
        for s in SymSetup::all_up_to(7) {
            let report = verify_effectivity(s).unwrap();
            assert!(report.contained(), "{s}");
            report.validate(&build_system(s)).unwrap();
        }
    }
}
