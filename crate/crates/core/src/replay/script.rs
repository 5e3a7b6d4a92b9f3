use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::divisors::PointSet;
use crate::error::{Error, Result};
use crate::pullback::{coordinate_map, reduction_map, REDUCTION_PAIRS};
use crate::rational::{int, Rational};
use crate::symmetry::{basis_for, exclusion_rule, LinearForm, OrbitIndex, OrbitPartition, SymSetup};

use super::check::flatten_partitions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Axiom,
    WeightedSum,
    Substitution,
    InductionStep,
    PullbackTransfer,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Axiom => "axiom",
            Kind::WeightedSum => "weighted-sum",
            Kind::Substitution => "substitution",
            Kind::InductionStep => "induction-step",
            Kind::PullbackTransfer => "pullback-transfer",
        }
    }
}

/// How a derivation's conclusion follows. Fact references point at earlier
/// derivations of the same script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// The symmetrized F-inequality of one orbit of partitions.
    Axiom { partition: OrbitPartition },
    /// `conclusion = Σ w·premise + Σ s·slack`, all weights `≥ 0`. Slack terms
    /// are facts the displayed inequality silently drops; they are flagged.
    WeightedSum {
        premises: Vec<(usize, Rational)>,
        slack: Vec<(usize, Rational)>,
    },
    /// Renames `[j]_T` as `[n-j]_{F0∖T}`; the form itself is unchanged.
    Substitution {
        premise: usize,
        from: (u32, PointSet),
        to: (u32, PointSet),
    },
    /// `conclusion = step + Σ w_b·base_b` where each base is `c_b [x_b] ≥ 0`
    /// and `w_b` clears the negative coefficient of `x_b` in `step`.
    InductionStep { step: usize, bases: Vec<usize> },
    /// Carries a fact of the reduced space back along the reduction that
    /// moves `removed` onto the glued component.
    PullbackTransfer {
        removed: [u32; 2],
        target_fact: usize,
        premises: Vec<(usize, Rational)>,
    },
}

impl Step {
    pub fn kind(&self) -> Kind {
        match self {
            Step::Axiom { .. } => Kind::Axiom,
            Step::WeightedSum { .. } => Kind::WeightedSum,
            Step::Substitution { .. } => Kind::Substitution,
            Step::InductionStep { .. } => Kind::InductionStep,
            Step::PullbackTransfer { .. } => Kind::PullbackTransfer,
        }
    }

    /// Every fact this step refers to, in the current script.
    pub fn references(&self) -> Vec<usize> {
        match self {
            Step::Axiom { .. } => Vec::new(),
            Step::WeightedSum { premises, slack } => premises.iter().chain(slack).map(|(i, _)| *i).collect(),
            Step::Substitution { premise, .. } => vec![*premise],
            Step::InductionStep { step, bases } => std::iter::once(*step).chain(bases.iter().copied()).collect(),
            Step::PullbackTransfer { premises, .. } => premises.iter().map(|(i, _)| *i).collect(),
        }
    }
}

/// A claimed inequality `conclusion ≥ 0` and its justification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub label: String,
    pub conclusion: LinearForm,
    pub step: Step,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedReduction {
    pub removed: [u32; 2],
    pub script: ProofScript,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofScript {
    pub setup: SymSetup,
    pub derivations: Vec<Derivation>,
    /// Coordinates whose nonnegativity must be concluded.
    pub goals: Vec<OrbitIndex>,
    pub reductions: Vec<EmbeddedReduction>,
}

impl ProofScript {
    pub fn empty(setup: SymSetup) -> Self {
        ProofScript {
            setup,
            derivations: Vec::new(),
            goals: Vec::new(),
            reductions: Vec::new(),
        }
    }

    pub fn reduction(&self, removed: [u32; 2]) -> Option<&ProofScript> {
        self.reductions.iter().find(|r| r.removed == removed).map(|r| &r.script)
    }
}

/// Form from raw `(coeff, [j]_T)` terms. Sizes 1 and n-1 are psi classes and
/// excluded orbits are identically zero; both drop out.
pub(crate) fn raw_form(setup: SymSetup, terms: &[(Rational, u32, &[u32])]) -> LinearForm {
    let n = setup.n();
    let mut f = LinearForm::zero(setup);
    for (c, size, fixed) in terms {
        if *size <= 1 || *size >= n - 1 {
            continue;
        }
        let t = PointSet::from_labels(fixed).expect("fixed labels");
        let idx = OrbitIndex::new(setup, *size, t).expect("raw orbit");
        if exclusion_rule(setup, idx).is_none() {
            f.add_term(idx, c);
        }
    }
    f
}

struct Builder {
    setup: SymSetup,
    derivations: Vec<Derivation>,
    axioms: BTreeMap<OrbitPartition, usize>,
    /// Coordinate → first fact concluding `c [x] ≥ 0`, `c > 0`.
    positives: BTreeMap<OrbitIndex, usize>,
    reductions: Vec<EmbeddedReduction>,
}

impl Builder {
    fn new(setup: SymSetup) -> Self {
        Builder {
            setup,
            derivations: Vec::new(),
            axioms: BTreeMap::new(),
            positives: BTreeMap::new(),
            reductions: Vec::new(),
        }
    }

    fn push(&mut self, label: String, conclusion: LinearForm, step: Step) -> usize {
        let id = self.derivations.len();
        if let Some((x, c)) = conclusion.as_single() {
            if c.is_positive() {
                self.positives.entry(x).or_insert(id);
            }
        }
        self.derivations.push(Derivation { label, conclusion, step });
        id
    }

    fn partition(&self, named: [(u32, &[u32]); 3]) -> OrbitPartition {
        OrbitPartition::from_named(self.setup, named).expect("scripted partition")
    }

    /// Axiom with the displayed form; one fact per orbit.
    fn axiom(&mut self, partition: OrbitPartition, displayed: LinearForm) -> usize {
        if let Some(&id) = self.axioms.get(&partition) {
            return id;
        }
        let id = self.push(format!("axiom {partition}"), displayed, Step::Axiom { partition });
        self.axioms.insert(partition, id);
        id
    }

    fn sum(&mut self, label: String, premises: Vec<(usize, Rational)>, displayed: LinearForm) -> usize {
        self.push(
            label,
            displayed,
            Step::WeightedSum {
                premises,
                slack: Vec::new(),
            },
        )
    }

    /// Clears the negative terms of `step` with known positive facts.
    fn induct(&mut self, label: String, step: usize) -> usize {
        let mut conclusion = self.derivations[step].conclusion.clone();
        let mut bases = Vec::new();
        let negatives: Vec<(OrbitIndex, Rational)> = conclusion
            .terms()
            .filter(|(_, c)| c.is_negative())
            .map(|(x, c)| (x, c.clone()))
            .collect();
        for (x, c) in negatives {
            if let Some(&b) = self.positives.get(&x) {
                let base = &self.derivations[b].conclusion;
                let cb = base.coefficient(x);
                let w = -c / cb;
                conclusion.add_scaled(&base.clone(), &w);
                bases.push(b);
            }
        }
        if bases.is_empty() {
            return step;
        }
        self.push(label, conclusion, Step::InductionStep { step, bases })
    }

    /// Records `[j]_T = [n-j]_{F0∖T}` for a coordinate reached under its
    /// other name.
    fn substitute(&mut self, goal: OrbitIndex, raw: (u32, &[u32])) {
        let Some(&p) = self.positives.get(&goal) else { return };
        let from = (raw.0, PointSet::from_labels(raw.1).expect("labels"));
        let to = (self.setup.n() - raw.0, self.setup.fixed().difference(from.1));
        let conclusion = self.derivations[p].conclusion.clone();
        let label = format!("rename [{}]_{} as [{}]_{}", from.0, from.1, to.0, to.1);
        let id = self.push(label, conclusion, Step::Substitution { premise: p, from, to });
        self.positives.insert(goal, id);
    }

    /// The standard chain over partitions `(1, k_T, i, *)`: unit sums that
    /// telescope to `(n-k)[k+1]_T - (n-k-2)[k]_T`, then induction on `k`.
    fn chain(&mut self, fixed: &[u32], ks: std::ops::RangeInclusive<u32>, tag: &str) {
        let n = self.setup.n();
        let m = self.setup.m();
        for k in ks {
            let mut premises = Vec::new();
            for i in 1..=n - k - 2 {
                let p = self.partition([(1, &[]), (k, fixed), (i, &[])]);
                let shown = raw_form(
                    self.setup,
                    &[
                        (int(1), k + 1, fixed),
                        (int(1), k + i, fixed),
                        (int(1), i + 1, &[]),
                        (int(-1), k, fixed),
                        (int(-1), i, &[]),
                        (int(-1), n - k - i - 1, &[]),
                    ],
                );
                let mut id = self.axiom(p, shown);
                if m == n - 1 {
                    let from = (n - k - i - 1, PointSet::EMPTY);
                    let to = (k + i + 1, PointSet::singleton(1));
                    let conclusion = self.derivations[id].conclusion.clone();
                    id = self.push(
                        format!("rename [{}] as [{}]_{{1}} in {p}", from.0, to.0),
                        conclusion,
                        Step::Substitution { premise: id, from, to },
                    );
                }
                premises.push((id, Rational::one()));
            }
            let telescoped = raw_form(
                self.setup,
                &[
                    (int((n - k) as i64), k + 1, fixed),
                    (int(-((n - k - 2) as i64)), k, fixed),
                ],
            );
            let t = self.sum(format!("telescope{tag} k={k}"), premises, telescoped);
            self.induct(format!("induction{tag} [{}]", k + 1), t);
        }
    }

    fn finish(self, goals: Vec<OrbitIndex>) -> (ProofScript, BTreeMap<OrbitIndex, usize>) {
        (
            ProofScript {
                setup: self.setup,
                derivations: self.derivations,
                goals,
                reductions: self.reductions,
            },
            self.positives,
        )
    }
}

fn script_all(b: &mut Builder) {
    let n = b.setup.n();
    b.chain(&[], 1..=n - 3, "");
}

fn script_one(b: &mut Builder) {
    let n = b.setup.n();
    b.chain(&[1], 1..=n - 3, "");
    for goal in basis_for(b.setup) {
        if goal.fixed().is_empty() {
            // [h] = [n-h]_{1}
            b.substitute(goal, (n - goal.size(), &[1]));
        }
    }
}

fn script_two(b: &mut Builder) {
    let n = b.setup.n();
    let s = b.setup;
    if n >= 5 {
        b.chain(&[1, 2], 2..=n - 3, " {1,2}");
    }
    for goal in basis_for(s) {
        if goal.fixed().is_empty() {
            b.substitute(goal, (n - goal.size(), &[1, 2]));
        }
    }
    // mixed inequalities from (1, k_α, i, *)
    for (alpha, beta) in [(1u32, 2u32), (2, 1)] {
        let a: &[u32] = if alpha == 1 { &[1] } else { &[2] };
        let bb: &[u32] = if beta == 1 { &[1] } else { &[2] };
        for k in 1..=n - 3 {
            let mut premises = Vec::new();
            for i in 1..=n - k - 2 {
                let p = b.partition([(1, &[]), (k, a), (i, &[])]);
                let shown = raw_form(
                    s,
                    &[
                        (int(1), k + 1, a),
                        (int(1), k + i, a),
                        (int(1), i + 1, &[]),
                        (int(-1), k, a),
                        (int(-1), i, &[]),
                        (int(-1), n - k - i - 1, bb),
                    ],
                );
                premises.push((b.axiom(p, shown), Rational::one()));
            }
            let displayed = raw_form(
                s,
                &[
                    (int((n - k - 1) as i64), k + 1, a),
                    (int(1), k + 1, &[1, 2]),
                    (int(-((n - k - 2) as i64)), k, a),
                ],
            );
            let t = b.sum(format!("mixed k={k} a={alpha}"), premises, displayed);
            if k == 1 {
                // (n-2)[2]_α ≥ 0
                b.induct(format!("mixed base [2]_{{{alpha}}}"), t);
            }
        }
    }
    // reverse induction on [k]_α from [n-2]_α = [2]_β
    for (alpha, beta) in [(1u32, 2u32), (2, 1)] {
        let a: &[u32] = if alpha == 1 { &[1] } else { &[2] };
        let bb: &[u32] = if beta == 1 { &[1] } else { &[2] };
        let top = OrbitIndex::new(s, n - 2, PointSet::from_labels(a).unwrap()).unwrap();
        b.substitute(top, (2, bb));
        for k in (3..=n - 3).rev() {
            let shift = |b: &mut Builder, k: u32| {
                let p = b.partition([(k - 1, a), (1, &[]), (1, &[])]);
                let shown = raw_form(
                    s,
                    &[
                        (int(2), k, a),
                        (int(1), 2, &[]),
                        (int(-1), k - 1, a),
                        (int(-1), k + 1, a),
                    ],
                );
                b.axiom(p, shown)
            };
            let one = shift(b, k);
            let claim = if k == 3 {
                let low = shift(b, 2);
                let displayed = raw_form(s, &[(int(3), 3, a), (int(-3), 2, a), (int(-1), 4, a)]);
                b.sum(
                    format!("claim k=3 a={alpha}"),
                    vec![(one, Rational::one()), (low, -Rational::one())],
                    displayed,
                )
            } else {
                let mut premises = Vec::new();
                for i in 1..=k - 3 {
                    premises.push((shift(b, k - 1 - i), int(i as i64)));
                }
                let tri = ((k - 2) * (k - 3) / 2) as i64;
                let two = raw_form(
                    s,
                    &[(int((k - 2) as i64), 2, a), (int(tri), 2, &[]), (int(-1), k - 1, a)],
                );
                let two = b.sum(format!("weighted k={k} a={alpha}"), premises, two);
                let displayed = raw_form(
                    s,
                    &[
                        (int(2), k, a),
                        (int(-(tri - 1)), 2, &[]),
                        (int(-((k - 2) as i64)), 2, a),
                        (int(-1), k + 1, a),
                    ],
                );
                b.sum(
                    format!("claim k={k} a={alpha}"),
                    vec![(one, Rational::one()), (two, -Rational::one())],
                    displayed,
                )
            };
            b.induct(format!("reverse induction [{k}]_{{{alpha}}}"), claim);
        }
    }
}

fn script_three(b: &mut Builder) -> Result<()> {
    let n = b.setup.n();
    let s = b.setup;
    let p = b.partition([(1, &[1]), (1, &[2]), (1, &[3])]);
    let shown = raw_form(
        s,
        &[
            (int(1), 2, &[1, 2]),
            (int(1), 2, &[1, 3]),
            (int(1), 2, &[2, 3]),
            (int(-1), n - 3, &[]),
        ],
    );
    let base23 = b.axiom(p, shown);
    if n >= 6 {
        b.chain(&[1, 2, 3], 3..=n - 3, " {1,2,3}");
    }
    if n < 5 {
        return Ok(());
    }
    let goals = basis_for(s);
    let target = SymSetup::new(n - 1, n - 3)?;
    for removed in REDUCTION_PAIRS {
        let (sub, sub_pos) = build(target)?;
        let map = reduction_map(s, removed)?;
        let phi = coordinate_map(s, removed)?;
        for (&t, &fact) in &sub_pos {
            let image = &phi[&t];
            let Some((goal, scale)) = image.as_single() else { continue };
            if !scale.is_positive() || b.positives.contains_key(&goal) || !goals.contains(&goal) {
                continue;
            }
            let g = &sub.derivations[fact].conclusion;
            let c = g.coefficient(t);
            let conclusion = LinearForm::unit(s, goal).scaled(&(&c * scale));
            let lambdas = flatten_partitions(&sub, fact)?;
            let mut weights: BTreeMap<usize, Rational> = BTreeMap::new();
            let mut psi_weight = Rational::zero();
            for (fp, w) in lambdas {
                let rep = fp.representative(target);
                let pushed = map.pushforward(&rep)?;
                let ambient = OrbitPartition::of(s, &pushed);
                let form = ambient.form(s);
                let id = b.axiom(ambient, form);
                *weights.entry(id).or_insert_with(Rational::zero) += &w;
                if removed == [2, 3] {
                    psi_weight += w * super::check::node_psi_value(&map, &rep);
                }
            }
            if !psi_weight.is_zero() {
                *weights.entry(base23).or_insert_with(Rational::zero) += psi_weight;
            }
            let premises = weights.into_iter().filter(|(_, w)| !w.is_zero()).collect();
            b.push(
                format!("transfer [{}] from reduction {:?}", t, removed),
                conclusion,
                Step::PullbackTransfer {
                    removed,
                    target_fact: fact,
                    premises,
                },
            );
        }
        b.reductions.push(EmbeddedReduction { removed, script: sub });
    }
    Ok(())
}

fn build(setup: SymSetup) -> Result<(ProofScript, BTreeMap<OrbitIndex, usize>)> {
    let mut b = Builder::new(setup);
    match setup.fixed_count() {
        0 => script_all(&mut b),
        1 => script_one(&mut b),
        2 => script_two(&mut b),
        3 => script_three(&mut b)?,
        _ => return Err(Error::UnsupportedSymmetry { n: setup.n(), m: setup.m() }),
    }
    Ok(b.finish(basis_for(setup)))
}

/// The derivation chain of the positivity proof for one setup, unrolled.
pub fn script_for(setup: SymSetup) -> Result<ProofScript> {
    build(setup).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conclusion(script: &ProofScript, label: &str) -> String {
        script
            .derivations
            .iter()
            .find(|d| d.label == label)
            .unwrap_or_else(|| panic!("no step {label}"))
            .conclusion
            .to_string()
    }

    #[test]
    fn eight_eight_telescope() {
        let s = SymSetup::new(8, 8).unwrap();
        let script = script_for(s).unwrap();
        assert_eq!(conclusion(&script, "telescope k=2"), "-4[2] + 6[3]");
    }

    #[test]
    fn eight_six_claims() {
        let s = SymSetup::new(8, 6).unwrap();
        let script = script_for(s).unwrap();
        let claim3 = raw_form(s, &[(int(3), 3, &[1]), (int(-3), 2, &[1]), (int(-1), 4, &[1])]);
        let found = script.derivations.iter().find(|d| d.label == "claim k=3 a=1").unwrap();
        assert_eq!(found.conclusion, claim3);
        let claim5 = raw_form(
            s,
            &[(int(2), 5, &[1]), (int(-2), 2, &[]), (int(-3), 2, &[1]), (int(-1), 6, &[1])],
        );
        let found = script.derivations.iter().find(|d| d.label == "claim k=5 a=1").unwrap();
        assert_eq!(found.conclusion, claim5);
    }

    #[test]
    fn references_point_backwards() {
        for s in SymSetup::all_up_to(9) {
            let script = script_for(s).unwrap();
            for (i, d) in script.derivations.iter().enumerate() {
                assert!(d.step.references().iter().all(|&r| r < i), "{s} step {i}");
            }
        }
    }
}
