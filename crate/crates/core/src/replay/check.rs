use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::script::{Kind, ProofScript, Step};
use crate::cone::{build_system, FarkasCertificate, HalfspaceSystem};
use crate::divisors::{f_intersection, psi_class, FPartition, PointSet};
use crate::error::{Error, Result};
use crate::pullback::{coordinate_map, reduction_divisors, reduction_map, AttachingMap, REDUCTION_PAIRS};
use crate::rational::{display_rational, Rational};
use crate::symmetry::{basis_for, InvariantDivisor, LinearForm, OrbitIndex, OrbitPartition, SymSetup};

/// One rejected derivation. `path` lists the reductions leading to the
/// embedded script that holds it (empty for the top level).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFailure {
    pub path: Vec<[u32; 2]>,
    pub index: usize,
    pub label: String,
    pub kind: Kind,
    pub reason: String,
    /// The unjustified part of the conclusion, when there is one.
    pub delta: Option<LinearForm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub setup: SymSetup,
    pub steps: usize,
    /// Every step that failed its own check, in script order, embedded scripts included.
    pub failures: Vec<StepFailure>,
    /// Per top-level step: its own check passed and so did everything it uses.
    pub valid: Vec<bool>,
    /// Goal → first valid fact concluding a positive multiple of it.
    pub reached: BTreeMap<OrbitIndex, usize>,
    pub unreached: Vec<OrbitIndex>,
    /// Weighted sums that needed slack terms.
    pub slack: Vec<usize>,
    pub reductions: Vec<([u32; 2], CheckReport)>,
}

impl CheckReport {
    pub fn verified(&self) -> bool {
        self.failures.is_empty() && self.unreached.is_empty()
    }

    pub fn first_failure(&self) -> Option<&StepFailure> {
        self.failures.first()
    }
}

/// `ψ_q · F'` for the node class on the reduced space.
pub(crate) fn node_psi_value(map: &AttachingMap, partition: &FPartition) -> Rational {
    let node = map.target_label(map.node()).expect("node label");
    let psi = psi_class(node, map.target()).expect("node is a target label");
    f_intersection(&psi, partition).expect("same ground set")
}

fn positive_single(form: &LinearForm) -> Option<(OrbitIndex, &Rational)> {
    form.as_single().filter(|(_, c)| c.is_positive())
}

fn combine(script: &ProofScript, i: usize, refs: &[(usize, Rational)]) -> std::result::Result<LinearForm, String> {
    let mut sum = LinearForm::zero(script.setup);
    for (r, w) in refs {
        if *r >= i {
            return Err(format!("refers to step {r}, which is not earlier"));
        }
        sum.add_scaled(&script.derivations[*r].conclusion, w);
    }
    Ok(sum)
}

fn negative_part(script: &ProofScript, refs: &[(usize, Rational)]) -> Option<LinearForm> {
    let mut part = LinearForm::zero(script.setup);
    let mut any = false;
    for (r, w) in refs {
        if w.is_negative() {
            any = true;
            if let Some(d) = script.derivations.get(*r) {
                part.add_scaled(&d.conclusion, w);
            }
        }
    }
    any.then_some(part)
}

/// Weights `w_b` of an induction step, or why they do not exist.
fn induction_weights(
    script: &ProofScript,
    i: usize,
    step: usize,
    bases: &[usize],
) -> std::result::Result<Vec<Rational>, String> {
    if step >= i || bases.iter().any(|&b| b >= i) {
        return Err("refers to a step that is not earlier".into());
    }
    let s = &script.derivations[step].conclusion;
    let mut out = Vec::with_capacity(bases.len());
    for &b in bases {
        let base = &script.derivations[b].conclusion;
        let (x, c) = positive_single(base).ok_or_else(|| format!("base step {b} is not of the form c[x] ≥ 0"))?;
        let w = -s.coefficient(x) / c;
        if !w.is_positive() {
            return Err(format!("base step {b} does not clear a negative term"));
        }
        out.push(w);
    }
    Ok(out)
}

struct Reducer {
    map: AttachingMap,
    phi: BTreeMap<OrbitIndex, LinearForm>,
    /// Reduced divisor of every ambient basis unit.
    units: Vec<(OrbitIndex, InvariantDivisor)>,
    base23: OrbitIndex,
}

impl Reducer {
    fn new(setup: SymSetup, removed: [u32; 2]) -> Result<Self> {
        let pair = REDUCTION_PAIRS.iter().position(|p| *p == removed).expect("reduction pair");
        let map = reduction_map(setup, removed)?;
        let phi = coordinate_map(setup, removed)?;
        let mut units = Vec::new();
        for e in basis_for(setup) {
            let mut d = InvariantDivisor::zero(setup);
            d.set_index(e, Rational::one())?;
            let r = reduction_divisors(&d)?.swap_remove(pair).divisor;
            units.push((e, r));
        }
        let base23 = OrbitIndex::new(setup, 2, PointSet::from_labels(&[2, 3])?)?;
        Ok(Reducer { map, phi, units, base23 })
    }
}

fn check_transfer(
    script: &ProofScript,
    system: &HalfspaceSystem,
    i: usize,
    removed: [u32; 2],
    target_fact: usize,
    premises: &[(usize, Rational)],
    reducers: &mut BTreeMap<[u32; 2], Reducer>,
) -> std::result::Result<(), (String, Option<LinearForm>)> {
    let setup = script.setup;
    let conclusion = &script.derivations[i].conclusion;
    let sub = script
        .reduction(removed)
        .ok_or_else(|| (format!("no embedded script for reduction {removed:?}"), None))?;
    let target_form = &sub
        .derivations
        .get(target_fact)
        .ok_or_else(|| (format!("reduced script has no step {target_fact}"), None))?
        .conclusion;
    if !reducers.contains_key(&removed) {
        let r = Reducer::new(setup, removed).map_err(|e| (e.to_string(), None))?;
        reducers.insert(removed, r);
    }
    let red = &reducers[&removed];

    let mut image = LinearForm::zero(setup);
    for (t, c) in target_form.terms() {
        let phi = red.phi.get(&t).ok_or_else(|| (format!("{t} is not a reduced coordinate"), None))?;
        image.add_scaled(phi, c);
    }
    if &image != conclusion {
        return Err(("conclusion is not the image of the reduced fact".into(), Some(conclusion.sub(&image))));
    }

    let lambdas = flatten_partitions(sub, target_fact).map_err(|e| (e.to_string(), None))?;
    let mut expected = LinearForm::zero(setup);
    for (fp, w) in &lambdas {
        let rep = fp.representative(sub.setup);
        let pushed = red.map.pushforward(&rep).map_err(|e| (e.to_string(), None))?;
        let ambient = OrbitPartition::of(setup, &pushed);
        let form = ambient.form(setup);
        let mu = if removed == [2, 3] {
            node_psi_value(&red.map, &rep)
        } else {
            Rational::zero()
        };
        if mu.is_negative() {
            return Err((format!("ψ_q is negative on {fp}"), None));
        }
        // projection formula, checked on every basis unit
        let target_fform = fp.form(sub.setup);
        for (e, reduced) in &red.units {
            let lhs = target_fform.eval(reduced);
            let mut rhs = form.coefficient(*e);
            if *e == red.base23 {
                rhs += &mu;
            }
            if lhs != rhs {
                return Err((format!("pullback of {e} disagrees with the glued partition on {fp}"), None));
            }
        }
        expected.add_scaled(&form, w);
        expected.add_term(red.base23, &(&mu * w));
    }

    for (r, w) in premises {
        if *r >= i {
            return Err((format!("refers to step {r}, which is not earlier"), None));
        }
        if w.is_negative() {
            return Err((format!("weight {} on step {r} is negative", display_rational(w)), negative_part(script, premises)));
        }
        match &script.derivations[*r].step {
            Step::Axiom { partition } if system.index_of_source(partition).is_some() => {}
            _ => return Err((format!("premise {r} is not an ambient axiom"), None)),
        }
    }
    let recorded = combine(script, i, premises).map_err(|e| (e, None))?;
    if recorded != expected {
        return Err(("premises do not match the glued partitions".into(), Some(expected.sub(&recorded))));
    }
    if &recorded != conclusion {
        return Err(("premises do not sum to the conclusion".into(), Some(conclusion.sub(&recorded))));
    }
    Ok(())
}

fn check_step(
    script: &ProofScript,
    system: &HalfspaceSystem,
    i: usize,
    reducers: &mut BTreeMap<[u32; 2], Reducer>,
) -> std::result::Result<(), (String, Option<LinearForm>)> {
    let setup = script.setup;
    let d = &script.derivations[i];
    if d.conclusion.setup() != setup {
        return Err(("conclusion is over another setup".into(), None));
    }
    if !d.conclusion.constant().is_zero() {
        return Err(("conclusion has a constant term".into(), None));
    }
    match &d.step {
        Step::Axiom { partition } => {
            let Some(j) = system.index_of_source(partition) else {
                return Err((format!("{partition} gives no inequality of the system"), None));
            };
            let form = &system.inequalities()[j].form;
            if form != &d.conclusion {
                return Err(("displayed form differs from the system inequality".into(), Some(d.conclusion.sub(form))));
            }
            Ok(())
        }
        Step::WeightedSum { premises, slack } => {
            let all: Vec<(usize, Rational)> = premises.iter().chain(slack).cloned().collect();
            if let Some((r, w)) = all.iter().find(|(_, w)| w.is_negative()) {
                return Err((
                    format!("weight {} on step {r} is negative", display_rational(w)),
                    negative_part(script, &all),
                ));
            }
            let sum = combine(script, i, &all).map_err(|e| (e, None))?;
            if sum != d.conclusion {
                return Err(("weighted sum differs from the conclusion".into(), Some(d.conclusion.sub(&sum))));
            }
            Ok(())
        }
        Step::Substitution { premise, from, to } => {
            if *premise >= i {
                return Err((format!("refers to step {premise}, which is not earlier"), None));
            }
            let n = setup.n();
            let fixed = setup.fixed();
            if from.0 == 0 || from.0 >= n || !from.1.is_subset(fixed) {
                return Err(("renamed index is not an orbit".into(), None));
            }
            if to.0 != n - from.0 || to.1 != fixed.difference(from.1) {
                return Err((format!("[{}]_{} is not the complement of [{}]_{}", to.0, to.1, from.0, from.1), None));
            }
            let p = &script.derivations[*premise].conclusion;
            if p != &d.conclusion {
                return Err(("substitution changed the form".into(), Some(d.conclusion.sub(p))));
            }
            Ok(())
        }
        Step::InductionStep { step, bases } => {
            let weights = induction_weights(script, i, *step, bases).map_err(|e| (e, None))?;
            let mut sum = script.derivations[*step].conclusion.clone();
            for (b, w) in bases.iter().zip(&weights) {
                sum.add_scaled(&script.derivations[*b].conclusion, w);
            }
            if sum != d.conclusion {
                return Err(("step plus bases differs from the conclusion".into(), Some(d.conclusion.sub(&sum))));
            }
            if positive_single(&d.conclusion).is_none() {
                return Err(("conclusion is not a positive multiple of one coordinate".into(), None));
            }
            Ok(())
        }
        Step::PullbackTransfer {
            removed,
            target_fact,
            premises,
        } => check_transfer(script, system, i, *removed, *target_fact, premises, reducers),
    }
}

fn check_inner(script: &ProofScript, path: &[[u32; 2]]) -> CheckReport {
    let setup = script.setup;
    let system = build_system(setup);
    let mut failures = Vec::new();
    let mut reductions = Vec::new();
    for r in &script.reductions {
        let mut sub_path = path.to_vec();
        sub_path.push(r.removed);
        let report = check_inner(&r.script, &sub_path);
        failures.extend(report.failures.iter().cloned());
        reductions.push((r.removed, report));
    }

    let mut reducers = BTreeMap::new();
    let mut valid = Vec::with_capacity(script.derivations.len());
    let mut slack = Vec::new();
    for (i, d) in script.derivations.iter().enumerate() {
        let mut own = check_step(script, &system, i, &mut reducers);
        let mut transfer_ok = true;
        if let Step::PullbackTransfer {
            removed, target_fact, ..
        } = &d.step
        {
            transfer_ok = reductions
                .iter()
                .find(|(rm, _)| rm == removed)
                .is_some_and(|(_, rep): &([u32; 2], CheckReport)| rep.valid.get(*target_fact) == Some(&true));
            if !transfer_ok {
                // The embedded failure is the root cause; report that instead.
                own = Err((
                    format!(
                        "fact {target_fact} of reduction {{{},{}}} is not valid",
                        removed[0], removed[1]
                    ),
                    None,
                ));
            }
        }
        if let Err((reason, delta)) = &own {
            failures.push(StepFailure {
                path: path.to_vec(),
                index: i,
                label: d.label.clone(),
                kind: d.step.kind(),
                reason: reason.clone(),
                delta: delta.clone(),
            });
        }
        if let Step::WeightedSum { slack: s, .. } = &d.step {
            if !s.is_empty() {
                slack.push(i);
            }
        }
        let ok = own.is_ok() && transfer_ok && d.step.references().iter().all(|&r| r < i && valid[r]);
        valid.push(ok);
    }

    let mut reached = BTreeMap::new();
    for (i, d) in script.derivations.iter().enumerate() {
        if !valid[i] {
            continue;
        }
        if let Some((x, _)) = positive_single(&d.conclusion) {
            reached.entry(x).or_insert(i);
        }
    }
    let unreached = script.goals.iter().filter(|g| !reached.contains_key(g)).copied().collect();
    reached.retain(|g, _| script.goals.contains(g));
    CheckReport {
        setup,
        steps: script.derivations.len(),
        failures,
        valid,
        reached,
        unreached,
        slack,
        reductions,
    }
}

/// Machine-checks every derivation. Failures are collected, not fatal.
pub fn check(script: &ProofScript) -> CheckReport {
    check_inner(script, &[])
}

/// The axiom weights a fact reduces to; negative weights are kept as is.
pub fn flatten_partitions(script: &ProofScript, fact: usize) -> Result<BTreeMap<OrbitPartition, Rational>> {
    let mut memo: Vec<Option<BTreeMap<OrbitPartition, Rational>>> = vec![None; script.derivations.len()];
    flatten_rec(script, fact, &mut memo)
}

fn accumulate(into: &mut BTreeMap<OrbitPartition, Rational>, from: &BTreeMap<OrbitPartition, Rational>, w: &Rational) {
    for (k, v) in from {
        let slot = into.entry(*k).or_insert_with(Rational::zero);
        *slot += v * w;
    }
}

fn flatten_rec(
    script: &ProofScript,
    fact: usize,
    memo: &mut Vec<Option<BTreeMap<OrbitPartition, Rational>>>,
) -> Result<BTreeMap<OrbitPartition, Rational>> {
    if let Some(Some(done)) = memo.get(fact) {
        return Ok(done.clone());
    }
    let d = script
        .derivations
        .get(fact)
        .ok_or_else(|| Error::Internal(format!("no step {fact}")))?;
    let refs = d.step.references();
    if refs.iter().any(|&r| r >= fact) {
        return Err(Error::Internal(format!("step {fact} refers forward")));
    }
    let mut out = BTreeMap::new();
    match &d.step {
        Step::Axiom { partition } => {
            out.insert(*partition, Rational::one());
        }
        Step::WeightedSum { premises, slack } => {
            for (r, w) in premises.iter().chain(slack) {
                let sub = flatten_rec(script, *r, memo)?;
                accumulate(&mut out, &sub, w);
            }
        }
        Step::Substitution { premise, .. } => out = flatten_rec(script, *premise, memo)?,
        Step::InductionStep { step, bases } => {
            let weights = induction_weights(script, fact, *step, bases).map_err(Error::Internal)?;
            out = flatten_rec(script, *step, memo)?;
            for (b, w) in bases.iter().zip(&weights) {
                let sub = flatten_rec(script, *b, memo)?;
                accumulate(&mut out, &sub, w);
            }
        }
        Step::PullbackTransfer { premises, .. } => {
            for (r, w) in premises {
                let sub = flatten_rec(script, *r, memo)?;
                accumulate(&mut out, &sub, w);
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    memo[fact] = Some(out.clone());
    Ok(out)
}

/// One Farkas certificate per reached goal, from the flattened weights.
pub fn certificates(script: &ProofScript, report: &CheckReport, system: &HalfspaceSystem) -> Result<Vec<FarkasCertificate>> {
    let mut out = Vec::new();
    for (&goal, &fact) in &report.reached {
        let flat = flatten_partitions(script, fact)?;
        let mut multipliers: BTreeMap<usize, Rational> = BTreeMap::new();
        for (p, w) in flat {
            let j = system
                .index_of_source(&p)
                .ok_or_else(|| Error::Internal(format!("{p} is not in the system")))?;
            *multipliers.entry(j).or_insert_with(Rational::zero) += w;
        }
        multipliers.retain(|_, v| !v.is_zero());
        let scale = script.derivations[fact].conclusion.coefficient(goal);
        out.push(FarkasCertificate {
            setup: script.setup,
            target: goal,
            scale,
            multipliers,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::script::{script_for, Derivation};
    use super::*;
    use crate::rational::int;

    #[test]
    fn empty_script_verifies() {
        let s = SymSetup::new(6, 6).unwrap();
        let report = check(&ProofScript::empty(s));
        assert!(report.verified());
    }

    #[test]
    fn tampered_weight_detected() {
        let s = SymSetup::new(8, 8).unwrap();
        let mut script = script_for(s).unwrap();
        assert!(check(&script).verified());
        let i = script
            .derivations
            .iter()
            .position(|d| matches!(d.step, Step::WeightedSum { .. }))
            .unwrap();
        if let Step::WeightedSum { premises, .. } = &mut script.derivations[i].step {
            premises[0].1 = int(2);
        }
        let report = check(&script);
        assert_eq!(report.first_failure().map(|f| f.index), Some(i));
    }

    #[test]
    fn free_fact_rejected() {
        let s = SymSetup::new(6, 6).unwrap();
        let mut script = ProofScript::empty(s);
        let p = OrbitPartition::from_named(s, [(1, &[]), (1, &[]), (1, &[])]).unwrap();
        let idx = OrbitIndex::new(s, 2, PointSet::EMPTY).unwrap();
        script.derivations.push(Derivation {
            label: "fake".into(),
            conclusion: LinearForm::unit(s, idx),
            step: Step::Axiom { partition: p },
        });
        let report = check(&script);
        assert_eq!(report.failures.len(), 1);
        assert!(!report.valid[0]);
    }

    #[test]
    fn verified_scripts_flatten_to_certificates() {
        for (n, m) in [(6, 6), (7, 6), (5, 3), (6, 3)] {
            let s = SymSetup::new(n, m).unwrap();
            let script = script_for(s).unwrap();
            let report = check(&script);
            assert!(report.verified(), "{s}: {:?}", report.first_failure());
            let system = build_system(s);
            let certs = certificates(&script, &report, &system).unwrap();
            assert_eq!(certs.len(), basis_for(s).len());
            for c in certs {
                c.validate(&system).unwrap();
            }
        }
    }
}
