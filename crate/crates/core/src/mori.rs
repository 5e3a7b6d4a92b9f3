//! Genus-zero conditions behind the Mori cone statement for small `(g, n)`:
//! containment on `M̄_{0,g+n}/S_g` and on every space reached by boundary
//! restrictions down to 8 points.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::cone::{build_system, verify_system, ContainmentReport};
use crate::divisors::{f_intersection, PointSet};
use crate::error::{Error, Result};
use crate::pullback::{pullback, AttachingMap};
use crate::rational::Rational;
use crate::symmetry::{
    basis_for, excluded_orbits, orbit_coefficients, orbit_partitions, InvariantDivisor, LinearForm, OrbitIndex,
    OrbitPartition, SymSetup,
};

/// Results imported from the literature, not verified here.
pub const TRUSTED_ASSUMPTIONS: [&str; 2] = [
    "Gibney-Keel-Morrison (0.3): the Mori cone of M̄_{g,n} is generated by one-dimensional strata \
     if the same holds for M̄_{0,g+n}/S_g",
    "Farkas-Gibney, Prop. 6: that holds once, for every boundary restriction ν: M̄_{0,k} → M̄_{0,g+n} \
     with 8 ≤ k ≤ g+n, the pullback of every F-nef divisor is an effective combination of boundary classes",
];

/// Smallest number of points at which restrictions are checked.
pub const MIN_POINTS: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoriCase {
    g: u32,
    n: u32,
}

impl MoriCase {
    /// `n = 1, g ≤ 9`; `n = 2, g ≤ 7`; `n = 3, g ≤ 5`; and `g ≥ 2`.
    pub fn new(g: u32, n: u32) -> Result<Self> {
        let max_g = match n {
            1 => 9,
            2 => 7,
            3 => 5,
            _ => 0,
        };
        if g < 2 || g > max_g {
            return Err(Error::UnsupportedCase(format!(
                "g={g}, n={n} is outside n=1, g≤9; n=2, g≤7; n=3, g≤5 (with g≥2)"
            )));
        }
        Ok(MoriCase { g, n })
    }

    pub fn all() -> Vec<MoriCase> {
        [(1u32, 9u32), (2, 7), (3, 5)]
            .into_iter()
            .flat_map(|(n, gmax)| (2..=gmax).map(move |g| MoriCase { g, n }))
            .collect()
    }

    pub fn g(self) -> u32 {
        self.g
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn total(self) -> u32 {
        self.g + self.n
    }

    /// `(g + n, g)`; the `n` marked points are the fixed labels.
    pub fn top(self) -> Option<SymSetup> {
        (self.total() >= MIN_POINTS).then(|| SymSetup::new(self.total(), self.g).expect("valid by construction"))
    }
}

/// Which kinds of points the two replaced points are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DescentKind {
    /// Two permuted points: `S_m → S_{m-2}`, the node becomes fixed.
    PermutedPair,
    FixedAndPermuted,
    FixedPair,
}

impl DescentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DescentKind::PermutedPair => "permuted-pair",
            DescentKind::FixedAndPermuted => "fixed-and-permuted",
            DescentKind::FixedPair => "fixed-pair",
        }
    }
}

/// One boundary restriction `ν: M̄_{0,k-1} → M̄_{0,k}`, up to symmetry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentCheck {
    pub from: SymSetup,
    pub to: SymSetup,
    pub removed: [u32; 2],
    pub kind: DescentKind,
    /// Pullbacks of invariant divisors are invariant on the reduced space.
    pub invariant: bool,
    /// Every reduced F-inequality is an ambient F-inequality by the projection formula.
    pub f_nef_preserved: bool,
    /// The `ψ_q` coefficient of the pullback, in ambient coordinates.
    pub node_psi: LinearForm,
    /// Excluded orbits of the reduced basis with a nonzero coefficient.
    pub excluded: Vec<(OrbitIndex, LinearForm)>,
}

impl DescentCheck {
    pub fn literal_ok(&self) -> bool {
        self.invariant && self.f_nef_preserved
    }

    /// The pullback is already written in the reduced basis.
    pub fn strict_ok(&self) -> bool {
        self.literal_ok() && self.node_psi.is_zero() && self.excluded.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoriLevel {
    pub setup: SymSetup,
    pub containment: ContainmentReport,
    pub descents: Vec<DescentCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoriReport {
    pub case: MoriCase,
    pub assumptions: Vec<String>,
    /// Every space reached, in descending `(k, m)` order.
    pub levels: Vec<MoriLevel>,
}

impl MoriReport {
    /// No spaces with at least 8 points: nothing to check.
    pub fn vacuous(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn literal_ok(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.containment.contained() && l.descents.iter().all(DescentCheck::literal_ok))
    }

    pub fn strict_ok(&self) -> bool {
        self.literal_ok() && self.levels.iter().all(|l| l.descents.iter().all(DescentCheck::strict_ok))
    }

    /// The first level or descent that fails the literal reading.
    pub fn failure(&self) -> Option<String> {
        for l in &self.levels {
            if let Some(cx) = l.containment.counterexamples().next() {
                return Some(format!("{}: {} is negative on an F-nef ray", l.setup, cx.goal));
            }
            if let Some(d) = l.descents.iter().find(|d| !d.literal_ok()) {
                return Some(format!("{} → {} along {:?}: descent check failed", d.from, d.to, d.removed));
            }
        }
        None
    }
}

/// Orbit representatives of the pair of points replaced by the node.
fn descents(setup: SymSetup) -> Vec<([u32; 2], DescentKind)> {
    let k = setup.n();
    let fixed = setup.fixed().labels();
    let mut out = Vec::new();
    if setup.m() >= 2 {
        out.push(([k - 1, k], DescentKind::PermutedPair));
    }
    if setup.m() >= 1 {
        for &x in &fixed {
            out.push(([x, k], DescentKind::FixedAndPermuted));
        }
    }
    for (i, &x) in fixed.iter().enumerate() {
        for &y in &fixed[i + 1..] {
            out.push(([x, y], DescentKind::FixedPair));
        }
    }
    out
}

/// The restriction map, numbered so the reduced space has fixed labels first.
fn descent_map(setup: SymSetup, removed: [u32; 2]) -> Result<(AttachingMap, SymSetup)> {
    let pair = PointSet::from_labels(&removed)?;
    let ground = setup.ground();
    let kept = ground.full().difference(pair);
    let fixed: Vec<u32> = setup.fixed().difference(pair).labels();
    let permuted: Vec<u32> = setup.permuted().difference(pair).labels();
    let mut order = fixed.clone();
    order.push(setup.n() + 1);
    order.extend(&permuted);
    let target = SymSetup::new(setup.n() - 1, permuted.len() as u32)?;
    let map = AttachingMap::new(ground, kept)?.with_target_order(order)?;
    Ok((map, target))
}

fn check_descent(setup: SymSetup, removed: [u32; 2], kind: DescentKind) -> Result<DescentCheck> {
    let (map, target) = descent_map(setup, removed)?;
    let node = map.target_label(map.node()).expect("node label");
    let mut pulled = Vec::new();
    for e in basis_for(setup) {
        let mut d = InvariantDivisor::zero(setup);
        d.set_index(e, Rational::one())?;
        pulled.push((e, pullback(&map, &d.expand())?));
    }

    let mut invariant = true;
    let mut coords: BTreeMap<OrbitIndex, LinearForm> = BTreeMap::new();
    let mut node_psi = LinearForm::zero(setup);
    for (e, p) in &pulled {
        match orbit_coefficients(target, p) {
            Ok(c) => {
                for (t, v) in c {
                    coords.entry(t).or_insert_with(|| LinearForm::zero(setup)).add_term(*e, &v);
                }
            }
            Err(_) => invariant = false,
        }
        for (key, v) in p.entries().filter(|(k, _)| k.is_psi()) {
            if key.labels() == [node] {
                node_psi.add_term(*e, v);
            } else {
                invariant = false;
            }
        }
    }

    let mut f_nef_preserved = true;
    for fp in orbit_partitions(target) {
        let rep = fp.representative(target);
        let glued = OrbitPartition::of(setup, &map.pushforward(&rep)?).form(setup);
        for (e, p) in &pulled {
            if f_intersection(p, &rep)? != glued.coefficient(*e) {
                f_nef_preserved = false;
            }
        }
    }

    let excluded = excluded_orbits(target)
        .into_iter()
        .filter_map(|(t, _)| coords.get(&t).filter(|f| !f.is_zero()).map(|f| (t, f.clone())))
        .collect();
    Ok(DescentCheck {
        from: setup,
        to: target,
        removed,
        kind,
        invariant,
        f_nef_preserved,
        node_psi,
        excluded,
    })
}

/// Runs containment on every space from `(g+n, g)` down to 8 points and
/// checks each one-step restriction between them.
pub fn mori_check(case: MoriCase) -> Result<MoriReport> {
    let assumptions = TRUSTED_ASSUMPTIONS.iter().map(|s| s.to_string()).collect();
    let Some(top) = case.top() else {
        return Ok(MoriReport {
            case,
            assumptions,
            levels: Vec::new(),
        });
    };
    let mut pending: BTreeSet<std::cmp::Reverse<SymSetup>> = BTreeSet::from([std::cmp::Reverse(top)]);
    let mut levels = Vec::new();
    while let Some(std::cmp::Reverse(setup)) = pending.pop_first() {
        let containment = verify_system(&build_system(setup))?;
        let mut checks = Vec::new();
        if setup.n() > MIN_POINTS {
            for (removed, kind) in descents(setup) {
                let d = check_descent(setup, removed, kind)?;
                pending.insert(std::cmp::Reverse(d.to));
                checks.push(d);
            }
        }
        levels.push(MoriLevel {
            setup,
            containment,
            descents: checks,
        });
    }
    Ok(MoriReport {
        case,
        assumptions,
        levels,
    })
}
