//! Proof scripts and replay reports.

use serde::{Deserialize, Serialize};

use super::{at, form_terms, load, parse_coeff, read_form, setup_of, to_json, FormatResult, Located, OrbitDto, Seg, TermDto};
use crate::divisors::PointSet;
use crate::rational::format_rational;
use crate::replay::{CheckReport, Derivation, EmbeddedReduction, ProofScript, Step};
use crate::symmetry::{OrbitBlock, OrbitPartition, SymSetup};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptDto {
    n: u32,
    m: u32,
    goals: Vec<OrbitDto>,
    derivations: Vec<DerivationDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    reductions: Vec<ReductionDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReductionDto {
    removed: [u32; 2],
    script: ScriptDto,
}

// `flatten` and `deny_unknown_fields` do not combine in serde; unknown keys
// inside a step are still rejected by the tagged enum.
#[derive(Serialize, Deserialize)]
struct DerivationDto {
    label: String,
    conclusion: Vec<TermDto>,
    #[serde(flatten)]
    step: StepDto,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum StepDto {
    Axiom {
        partition: [OrbitBlock; 4],
    },
    WeightedSum {
        premises: Vec<WeightDto>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        slack: Vec<WeightDto>,
    },
    Substitution {
        premise: usize,
        from: RawOrbitDto,
        to: RawOrbitDto,
    },
    InductionStep {
        step: usize,
        bases: Vec<usize>,
    },
    PullbackTransfer {
        removed: [u32; 2],
        target_fact: usize,
        premises: Vec<WeightDto>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDto {
    fact: usize,
    weight: String,
}

/// An orbit name as written, not canonicalized: substitutions rename one
/// spelling into the other.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrbitDto {
    i: u32,
    #[serde(rename = "T")]
    t: PointSet,
}

fn weights(list: &[(usize, crate::Rational)]) -> Vec<WeightDto> {
    list.iter()
        .map(|(fact, w)| WeightDto {
            fact: *fact,
            weight: format_rational(w),
        })
        .collect()
}

fn script_dto(script: &ProofScript) -> ScriptDto {
    let derivations = script
        .derivations
        .iter()
        .map(|d| DerivationDto {
            label: d.label.clone(),
            conclusion: form_terms(&d.conclusion),
            step: match &d.step {
                Step::Axiom { partition } => StepDto::Axiom {
                    partition: partition.blocks(),
                },
                Step::WeightedSum { premises, slack } => StepDto::WeightedSum {
                    premises: weights(premises),
                    slack: weights(slack),
                },
                Step::Substitution { premise, from, to } => StepDto::Substitution {
                    premise: *premise,
                    from: RawOrbitDto { i: from.0, t: from.1 },
                    to: RawOrbitDto { i: to.0, t: to.1 },
                },
                Step::InductionStep { step, bases } => StepDto::InductionStep {
                    step: *step,
                    bases: bases.clone(),
                },
                Step::PullbackTransfer {
                    removed,
                    target_fact,
                    premises,
                } => StepDto::PullbackTransfer {
                    removed: *removed,
                    target_fact: *target_fact,
                    premises: weights(premises),
                },
            },
        })
        .collect();
    ScriptDto {
        n: script.setup.n(),
        m: script.setup.m(),
        goals: script.goals.iter().map(|&g| OrbitDto::of(g)).collect(),
        derivations,
        reductions: script
            .reductions
            .iter()
            .map(|r| ReductionDto {
                removed: r.removed,
                script: script_dto(&r.script),
            })
            .collect(),
    }
}

pub fn write_script(script: &ProofScript) -> String {
    to_json(&script_dto(script))
}

fn read_weights(list: Vec<WeightDto>, path: &[Seg]) -> Result<Vec<(usize, crate::Rational)>, Located> {
    list.into_iter()
        .enumerate()
        .map(|(k, w)| {
            let here = [path, &[Seg::Index(k), Seg::Key("weight")]].concat();
            Ok((w.fact, parse_coeff(&w.weight, &here)?))
        })
        .collect()
}

fn script_from(dto: ScriptDto, path: &[Seg]) -> Result<ProofScript, Located> {
    let sub = |extra: &[Seg]| [path, extra].concat();
    let setup: SymSetup = setup_of(dto.n, dto.m, &sub(&[Seg::Key("m")]))?;
    let goals = dto
        .goals
        .iter()
        .enumerate()
        .map(|(k, g)| g.resolve(setup, &sub(&[Seg::Key("goals"), Seg::Index(k)])))
        .collect::<Result<Vec<_>, _>>()?;
    let mut derivations = Vec::with_capacity(dto.derivations.len());
    for (k, d) in dto.derivations.into_iter().enumerate() {
        let here = sub(&[Seg::Key("derivations"), Seg::Index(k)]);
        let field = |name: &'static str| [here.as_slice(), &[Seg::Key(name)]].concat();
        let conclusion = read_form(setup, &d.conclusion, &field("conclusion"))?;
        // References are only range-checked here; the checker decides validity.
        let step = match d.step {
            StepDto::Axiom { partition } => Step::Axiom {
                partition: OrbitPartition::from_blocks(setup, partition).map_err(|e| at(&field("partition"), e))?,
            },
            StepDto::WeightedSum { premises, slack } => Step::WeightedSum {
                premises: read_weights(premises, &field("premises"))?,
                slack: read_weights(slack, &field("slack"))?,
            },
            StepDto::Substitution { premise, from, to } => Step::Substitution {
                premise,
                from: (from.i, from.t),
                to: (to.i, to.t),
            },
            StepDto::InductionStep { step, bases } => Step::InductionStep { step, bases },
            StepDto::PullbackTransfer {
                removed,
                target_fact,
                premises,
            } => Step::PullbackTransfer {
                removed,
                target_fact,
                premises: read_weights(premises, &field("premises"))?,
            },
        };
        if let Some(r) = step.references().into_iter().find(|&r| r >= k) {
            return Err(at(&here, format!("step {k} refers to fact {r}, which is not earlier")));
        }
        derivations.push(Derivation {
            label: d.label,
            conclusion,
            step,
        });
    }
    let mut reductions = Vec::new();
    for (k, r) in dto.reductions.into_iter().enumerate() {
        let here = sub(&[Seg::Key("reductions"), Seg::Index(k)]);
        if reductions.iter().any(|e: &EmbeddedReduction| e.removed == r.removed) {
            return Err(at(&here, format!("reduction {:?} appears twice", r.removed)));
        }
        let script = script_from(r.script, &[here.as_slice(), &[Seg::Key("script")]].concat())?;
        reductions.push(EmbeddedReduction {
            removed: r.removed,
            script,
        });
    }
    Ok(ProofScript {
        setup,
        derivations,
        goals,
        reductions,
    })
}

pub fn read_script(text: &str) -> FormatResult<ProofScript> {
    load(text, |dto: ScriptDto| script_from(dto, &[]))
}

#[derive(Serialize)]
struct CheckReportDto {
    n: u32,
    m: u32,
    status: &'static str,
    steps: usize,
    failures: Vec<FailureDto>,
    reached: Vec<ReachedDto>,
    unreached: Vec<OrbitDto>,
    slack: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    reductions: Vec<ReportReductionDto>,
}

#[derive(Serialize)]
struct FailureDto {
    path: Vec<[u32; 2]>,
    index: usize,
    label: String,
    kind: &'static str,
    reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<Vec<TermDto>>,
}

#[derive(Serialize)]
struct ReachedDto {
    goal: OrbitDto,
    fact: usize,
}

#[derive(Serialize)]
struct ReportReductionDto {
    removed: [u32; 2],
    report: CheckReportDto,
}

fn check_dto(report: &CheckReport) -> CheckReportDto {
    CheckReportDto {
        n: report.setup.n(),
        m: report.setup.m(),
        status: if report.verified() { "VERIFIED" } else { "FAILED" },
        steps: report.steps,
        failures: report
            .failures
            .iter()
            .map(|f| FailureDto {
                path: f.path.clone(),
                index: f.index,
                label: f.label.clone(),
                kind: f.kind.as_str(),
                reason: f.reason.clone(),
                delta: f.delta.as_ref().map(form_terms),
            })
            .collect(),
        reached: report
            .reached
            .iter()
            .map(|(g, &fact)| ReachedDto {
                goal: OrbitDto::of(*g),
                fact,
            })
            .collect(),
        unreached: report.unreached.iter().map(|&g| OrbitDto::of(g)).collect(),
        slack: report.slack.clone(),
        reductions: report
            .reductions
            .iter()
            .map(|(removed, r)| ReportReductionDto {
                removed: *removed,
                report: check_dto(r),
            })
            .collect(),
    }
}

pub fn write_check_report(report: &CheckReport) -> String {
    to_json(&check_dto(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::replay::{check, script_for};

    #[test]
    fn scripts_round_trip() {
        for (n, m) in [(7, 7), (7, 6), (7, 5), (6, 3), (5, 2)] {
            let script = script_for(SymSetup::new(n, m).unwrap()).unwrap();
            let text = write_script(&script);
            let back = read_script(&text).unwrap();
            assert_eq!(back, script);
            assert_eq!(check(&back), check(&script));
            assert_eq!(write_script(&back), text);
        }
    }

    #[test]
    fn forward_reference_is_located() {
        let script = script_for(SymSetup::new(6, 6).unwrap()).unwrap();
        let mut text = write_script(&script);
        let needle = "\"fact\": 0,";
        let pos = text.find(needle).expect("a weighted sum");
        text.replace_range(pos..pos + needle.len(), "\"fact\": 999,");
        let err = read_script(&text).unwrap_err();
        assert!(err.message.contains("not earlier"), "{err}");
        assert!(err.field.starts_with("derivations["));
        assert!(err.line.is_some());
    }

    #[test]
    fn unknown_step_kind() {
        let text = r#"{"n": 6, "m": 6, "goals": [], "derivations": [{"label": "x", "conclusion": [], "kind": "guess"}]}"#;
        let err = read_script(text).unwrap_err();
        assert!(err.message.contains("unknown variant"), "{err}");
    }

    #[test]
    fn report_mentions_failing_step() {
        let script = script_for(SymSetup::new(6, 4).unwrap()).unwrap();
        let report = check(&script);
        let text = write_check_report(&report);
        assert!(text.contains("\"status\": \"FAILED\""));
        assert!(text.contains("claim"));
    }
}
