//! The Mori pipeline report.

use serde::Serialize;

use super::cone::status;
use super::{form_terms, to_json, OrbitDto, TermDto};
use crate::cone::build_system;
use crate::formats::write_report;
use crate::mori::MoriReport;

#[derive(Serialize)]
struct MoriDto {
    g: u32,
    n: u32,
    points: u32,
    assumptions: Vec<String>,
    status: &'static str,
    /// Descents also keep the pullback inside the reduced basis.
    strict: bool,
    levels: Vec<LevelDto>,
}

#[derive(Serialize)]
struct LevelDto {
    n: u32,
    m: u32,
    status: &'static str,
    containment: serde_json::Value,
    descents: Vec<DescentDto>,
}

#[derive(Serialize)]
struct SetupDto {
    n: u32,
    m: u32,
}

#[derive(Serialize)]
struct DescentDto {
    to: SetupDto,
    removed: [u32; 2],
    kind: &'static str,
    invariant: bool,
    f_nef_preserved: bool,
    node_psi: Vec<TermDto>,
    excluded: Vec<ExcludedDto>,
}

#[derive(Serialize)]
struct ExcludedDto {
    orbit: OrbitDto,
    coeff: Vec<TermDto>,
}

pub fn write_mori_report(report: &MoriReport) -> String {
    let levels = report
        .levels
        .iter()
        .map(|l| {
            let system = build_system(l.setup);
            let containment = serde_json::from_str(&write_report(&l.containment, &system)).expect("own output parses");
            LevelDto {
                n: l.setup.n(),
                m: l.setup.m(),
                status: status(&l.containment),
                containment,
                descents: l
                    .descents
                    .iter()
                    .map(|d| DescentDto {
                        to: SetupDto {
                            n: d.to.n(),
                            m: d.to.m(),
                        },
                        removed: d.removed,
                        kind: d.kind.as_str(),
                        invariant: d.invariant,
                        f_nef_preserved: d.f_nef_preserved,
                        node_psi: form_terms(&d.node_psi),
                        excluded: d
                            .excluded
                            .iter()
                            .map(|(o, f)| ExcludedDto {
                                orbit: OrbitDto::of(*o),
                                coeff: form_terms(f),
                            })
                            .collect(),
                    })
                    .collect(),
            }
        })
        .collect();
    to_json(&MoriDto {
        g: report.case.g(),
        n: report.case.n(),
        points: report.case.total(),
        assumptions: report.assumptions.clone(),
        status: if report.literal_ok() { "VERIFIED" } else { "FAILED" },
        strict: report.strict_ok(),
        levels,
    })
}
