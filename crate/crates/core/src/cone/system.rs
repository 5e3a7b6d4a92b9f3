use std::collections::HashMap;

use crate::rational::Rational;
use crate::symmetry::{basis_for, symmetrized_inequalities, LinearForm, OrbitIndex, OrbitPartition, SymSetup};

/// One deduplicated inequality `form ≥ 0` with every orbit partition that produces it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemInequality {
    pub form: LinearForm,
    /// Ascending; the first entry names the inequality in files.
    pub sources: Vec<OrbitPartition>,
}

/// The symmetrized F-inequalities of a setup, over the coordinates of its basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfspaceSystem {
    setup: SymSetup,
    basis: Vec<OrbitIndex>,
    inequalities: Vec<SystemInequality>,
    /// Orbit partitions whose form vanishes identically (every term excluded or psi).
    vacuous: Vec<OrbitPartition>,
    /// Built from every orbit partition, so the cone is the F-nef cone.
    complete: bool,
}

impl HalfspaceSystem {
    /// Groups the given `(source, form)` pairs by exact form, in order of first appearance.
    pub fn from_sourced(setup: SymSetup, items: Vec<(Option<OrbitPartition>, LinearForm)>) -> Self {
        let basis = basis_for(setup);
        let mut inequalities: Vec<SystemInequality> = Vec::new();
        let mut seen: HashMap<Vec<Rational>, usize> = HashMap::new();
        let mut vacuous = Vec::new();
        for (source, form) in items {
            if form.is_zero() {
                vacuous.extend(source);
                continue;
            }
            let key = form.dense(&basis);
            match seen.get(&key) {
                Some(&i) => inequalities[i].sources.extend(source),
                None => {
                    seen.insert(key, inequalities.len());
                    inequalities.push(SystemInequality {
                        form,
                        sources: source.into_iter().collect(),
                    });
                }
            }
        }
        for ineq in &mut inequalities {
            ineq.sources.sort();
        }
        HalfspaceSystem {
            setup,
            basis,
            inequalities,
            vacuous,
            complete: false,
        }
    }

    /// A system from bare forms, without provenance.
    pub fn from_forms(setup: SymSetup, forms: Vec<LinearForm>) -> Self {
        Self::from_sourced(setup, forms.into_iter().map(|f| (None, f)).collect())
    }

    pub(crate) fn mark_complete(&mut self) {
        self.complete = true;
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn setup(&self) -> SymSetup {
        self.setup
    }

    pub fn basis(&self) -> &[OrbitIndex] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.inequalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inequalities.is_empty()
    }

    pub fn inequalities(&self) -> &[SystemInequality] {
        &self.inequalities
    }

    pub fn get(&self, index: usize) -> Option<&SystemInequality> {
        self.inequalities.get(index)
    }

    pub fn vacuous(&self) -> &[OrbitPartition] {
        &self.vacuous
    }

    /// Index of the inequality produced by `source`.
    pub fn index_of_source(&self, source: &OrbitPartition) -> Option<usize> {
        self.inequalities
            .iter()
            .position(|q| q.sources.binary_search(source).is_ok())
    }

    /// Index of the inequality whose form is exactly `form`.
    pub fn index_of_form(&self, form: &LinearForm) -> Option<usize> {
        self.inequalities.iter().position(|q| &q.form == form)
    }

    /// Row-major coefficients of every form, in basis order.
    pub fn dense_rows(&self) -> Vec<Vec<Rational>> {
        self.inequalities.iter().map(|q| q.form.dense(&self.basis)).collect()
    }
}

/// Every symmetrized F-inequality of `setup`, deduplicated.
pub fn build_system(setup: SymSetup) -> HalfspaceSystem {
    let items = symmetrized_inequalities(setup)
        .into_iter()
        .map(|(o, f)| (Some(o), f))
        .collect();
    let mut system = HalfspaceSystem::from_sourced(setup, items);
    system.mark_complete();
    system
}
