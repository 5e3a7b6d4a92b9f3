use super::script::ProofScript;
use crate::cone::{build_system, certify_form, FormOutcome};
use crate::error::Result;
use crate::symmetry::LinearForm;

/// LP verdict on one intermediate inequality of a script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimAudit {
    pub path: Vec<[u32; 2]>,
    pub index: usize,
    pub label: String,
    pub form: LinearForm,
    pub outcome: FormOutcome,
}

/// Asks the cone engine whether each step labelled `claim ...` holds on the
/// F-nef cone, embedded scripts included.
pub fn claim_audit(script: &ProofScript) -> Result<Vec<ClaimAudit>> {
    let mut out = Vec::new();
    audit_inner(script, &[], &mut out)?;
    Ok(out)
}

fn audit_inner(script: &ProofScript, path: &[[u32; 2]], out: &mut Vec<ClaimAudit>) -> Result<()> {
    let system = build_system(script.setup);
    for (index, d) in script.derivations.iter().enumerate() {
        if !d.label.starts_with("claim") {
            continue;
        }
        let outcome = certify_form(&system, &d.conclusion)?;
        out.push(ClaimAudit {
            path: path.to_vec(),
            index,
            label: d.label.clone(),
            form: d.conclusion.clone(),
            outcome,
        });
    }
    for r in &script.reductions {
        let mut p = path.to_vec();
        p.push(r.removed);
        audit_inner(&r.script, &p, out)?;
    }
    Ok(())
}
