//! Certificates, containment reports and inequality-system exports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{at, load, parse_coeff, setup_of, to_json, FormatResult, Located, OrbitDto, Seg, TermDto};
use crate::cone::{build_system, ContainmentReport, Counterexample, FarkasCertificate, HalfspaceSystem, Outcome};
use crate::rational::{format_rational, Rational};
use crate::symmetry::{self_paired_orbits, LinearForm, OrbitBlock, OrbitPartition, SymSetup};

type Blocks = [OrbitBlock; 4];

fn partition_of(setup: SymSetup, blocks: Blocks, path: &[Seg]) -> Result<OrbitPartition, Located> {
    OrbitPartition::from_blocks(setup, blocks).map_err(|e| at(path, e))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDto {
    n: u32,
    m: u32,
    target: OrbitDto,
    /// Omitted when it is 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<String>,
    multipliers: Vec<MultiplierDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiplierDto {
    orbit_partition: Blocks,
    coeff: String,
}

fn certificate_dto(cert: &FarkasCertificate, system: &HalfspaceSystem) -> CertificateDto {
    let multipliers = cert
        .multipliers
        .iter()
        .map(|(&j, v)| {
            let ineq = system.get(j).expect("certificate indices come from the system");
            MultiplierDto {
                orbit_partition: ineq.sources.first().expect("file systems carry provenance").blocks(),
                coeff: format_rational(v),
            }
        })
        .collect();
    let one = Rational::from_integer(1.into());
    CertificateDto {
        n: cert.setup.n(),
        m: cert.setup.m(),
        target: OrbitDto::of(cert.target),
        scale: (cert.scale != one).then(|| format_rational(&cert.scale)),
        multipliers,
    }
}

/// Multipliers are keyed by orbit partition; each names the deduplicated
/// inequality it produces in `build_system`.
pub fn write_certificate(cert: &FarkasCertificate, system: &HalfspaceSystem) -> String {
    to_json(&certificate_dto(cert, system))
}

fn certificate_from(
    dto: CertificateDto,
    system: &HalfspaceSystem,
    path: &[Seg],
) -> Result<FarkasCertificate, Located> {
    let sub = |extra: &[Seg]| [path, extra].concat();
    let setup = setup_of(dto.n, dto.m, &sub(&[Seg::Key("m")]))?;
    if setup != system.setup() {
        return Err(at(path, format!("certificate is for {setup}, expected {}", system.setup())));
    }
    let target = dto.target.resolve(setup, &sub(&[Seg::Key("target")]))?;
    let scale = match &dto.scale {
        Some(s) => parse_coeff(s, &sub(&[Seg::Key("scale")]))?,
        None => Rational::from_integer(1.into()),
    };
    let mut multipliers = BTreeMap::new();
    for (k, m) in dto.multipliers.into_iter().enumerate() {
        let here = sub(&[Seg::Key("multipliers"), Seg::Index(k)]);
        let op_path = [here.as_slice(), &[Seg::Key("orbit_partition")]].concat();
        let partition = partition_of(setup, m.orbit_partition, &op_path)?;
        let index = system
            .index_of_source(&partition)
            .ok_or_else(|| at(&op_path, "orbit partition gives no inequality (its form vanishes)"))?;
        let value = parse_coeff(&m.coeff, &[here.as_slice(), &[Seg::Key("coeff")]].concat())?;
        if multipliers.insert(index, value).is_some() {
            return Err(at(&here, format!("inequality {index} appears twice")));
        }
    }
    Ok(FarkasCertificate {
        setup,
        target,
        scale,
        multipliers,
    })
}

/// Reads a certificate against the full system of its setup. The result is
/// not validated; call [`FarkasCertificate::validate`].
pub fn read_certificate(text: &str) -> FormatResult<FarkasCertificate> {
    load(text, |dto: CertificateDto| {
        let setup = setup_of(dto.n, dto.m, &[Seg::Key("m")])?;
        certificate_from(dto, &build_system(setup), &[])
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportDto {
    n: u32,
    m: u32,
    status: String,
    inequality_count: usize,
    basis: Vec<OrbitDto>,
    self_paired_orbits: Vec<OrbitDto>,
    targets: Vec<TargetDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDto {
    target: OrbitDto,
    self_paired: bool,
    status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counterexample: Option<CounterexampleDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CounterexampleDto {
    goal_value: String,
    coords: Vec<TermDto>,
}

pub(crate) fn status(report: &ContainmentReport) -> &'static str {
    if report.contained() {
        "CONTAINED"
    } else {
        "COUNTEREXAMPLE"
    }
}

fn report_dto(report: &ContainmentReport, system: &HalfspaceSystem) -> ReportDto {
    let setup = report.setup;
    let targets = report
        .targets
        .iter()
        .map(|t| {
            let (status, certificate, counterexample) = match &t.outcome {
                Outcome::Certified(c) => ("certified", Some(certificate_dto(c, system)), None),
                Outcome::Refuted(cx) => ("refuted", None, Some(counterexample_dto(cx))),
            };
            TargetDto {
                target: OrbitDto::of(t.target),
                self_paired: t.self_paired,
                status: status.into(),
                certificate,
                counterexample,
            }
        })
        .collect();
    ReportDto {
        n: setup.n(),
        m: setup.m(),
        status: status(report).into(),
        inequality_count: report.inequality_count,
        basis: system.basis().iter().map(|&b| OrbitDto::of(b)).collect(),
        self_paired_orbits: self_paired_orbits(setup).into_iter().map(OrbitDto::of).collect(),
        targets,
    }
}

fn counterexample_dto(cx: &Counterexample) -> CounterexampleDto {
    CounterexampleDto {
        goal_value: format_rational(&cx.goal_value),
        coords: cx
            .divisor
            .coords()
            .map(|(idx, c)| TermDto {
                i: idx.size(),
                t: idx.fixed(),
                coeff: format_rational(c),
            })
            .collect(),
    }
}

pub fn write_report(report: &ContainmentReport, system: &HalfspaceSystem) -> String {
    to_json(&report_dto(report, system))
}

#[derive(Serialize)]
struct BatchDto {
    nmax: u32,
    status: &'static str,
    setups: Vec<ReportDto>,
}

/// One document for a sweep over many setups, in the given order.
pub fn write_batch_report(nmax: u32, reports: &[(ContainmentReport, HalfspaceSystem)]) -> String {
    let contained = reports.iter().all(|(r, _)| r.contained());
    to_json(&BatchDto {
        nmax,
        status: if contained { "CONTAINED" } else { "COUNTEREXAMPLE" },
        setups: reports.iter().map(|(r, s)| report_dto(r, s)).collect(),
    })
}

/// Every certificate stored in a single-setup report file, for independent
/// re-validation.
pub fn read_report_certificates(text: &str) -> FormatResult<Vec<FarkasCertificate>> {
    load(text, |dto: ReportDto| {
        let setup = setup_of(dto.n, dto.m, &[Seg::Key("m")])?;
        let system = build_system(setup);
        let mut out = Vec::new();
        for (k, t) in dto.targets.into_iter().enumerate() {
            if let Some(cert) = t.certificate {
                let path = [Seg::Key("targets"), Seg::Index(k), Seg::Key("certificate")];
                out.push(certificate_from(cert, &system, &path)?);
            }
        }
        Ok(out)
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDto {
    n: u32,
    m: u32,
    complete: bool,
    basis: Vec<OrbitDto>,
    inequalities: Vec<InequalityDto>,
    vacuous: Vec<Blocks>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InequalityDto {
    /// One per basis element, in basis order.
    coeffs: Vec<String>,
    sources: Vec<Blocks>,
}

pub fn write_system(system: &HalfspaceSystem) -> String {
    let setup = system.setup();
    let inequalities = system
        .inequalities()
        .iter()
        .map(|q| InequalityDto {
            coeffs: q.form.dense(system.basis()).iter().map(format_rational).collect(),
            sources: q.sources.iter().map(|s| s.blocks()).collect(),
        })
        .collect();
    to_json(&SystemDto {
        n: setup.n(),
        m: setup.m(),
        complete: system.is_complete(),
        basis: system.basis().iter().map(|&b| OrbitDto::of(b)).collect(),
        inequalities,
        vacuous: system.vacuous().iter().map(|v| v.blocks()).collect(),
    })
}

/// Reloads an exported system. Each source must produce its inequality, and
/// a system marked complete must equal the one built from scratch.
pub fn read_system(text: &str) -> FormatResult<HalfspaceSystem> {
    load(text, |dto: SystemDto| {
        let setup = setup_of(dto.n, dto.m, &[Seg::Key("m")])?;
        let basis = crate::symmetry::basis_for(setup);
        let listed: Vec<_> = dto
            .basis
            .iter()
            .enumerate()
            .map(|(k, o)| o.resolve(setup, &[Seg::Key("basis"), Seg::Index(k)]))
            .collect::<Result<_, _>>()?;
        if listed != basis {
            return Err(at(&[Seg::Key("basis")], "basis differs from the invariant basis of the setup"));
        }
        let listed_count = dto.inequalities.len();
        let mut items = Vec::new();
        for (k, q) in dto.inequalities.into_iter().enumerate() {
            let here = [Seg::Key("inequalities"), Seg::Index(k)];
            let coeffs_path = [here[0].clone(), here[1].clone(), Seg::Key("coeffs")];
            if q.coeffs.len() != basis.len() {
                return Err(at(
                    &coeffs_path,
                    format!("{} coefficients for a basis of {}", q.coeffs.len(), basis.len()),
                ));
            }
            let mut form = LinearForm::zero(setup);
            for (j, (c, b)) in q.coeffs.iter().zip(&basis).enumerate() {
                let path = [coeffs_path.as_slice(), &[Seg::Index(j)]].concat();
                form.add_term(*b, &parse_coeff(c, &path)?);
            }
            if form.is_zero() {
                return Err(at(&coeffs_path, "zero inequality; list its sources under \"vacuous\""));
            }
            if q.sources.is_empty() {
                items.push((None, form));
                continue;
            }
            for (j, blocks) in q.sources.into_iter().enumerate() {
                let path = [here[0].clone(), here[1].clone(), Seg::Key("sources"), Seg::Index(j)];
                let source = partition_of(setup, blocks, &path)?;
                if source.form(setup) != form {
                    return Err(at(&path, "source does not produce this inequality"));
                }
                items.push((Some(source), form.clone()));
            }
        }
        for (j, blocks) in dto.vacuous.into_iter().enumerate() {
            let path = [Seg::Key("vacuous"), Seg::Index(j)];
            let source = partition_of(setup, blocks, &path)?;
            if !source.form(setup).is_zero() {
                return Err(at(&path, "listed as vacuous but its form is nonzero"));
            }
            items.push((Some(source), LinearForm::zero(setup)));
        }
        let mut system = HalfspaceSystem::from_sourced(setup, items);
        if system.len() != listed_count {
            return Err(at(&[Seg::Key("inequalities")], "two inequalities have the same coefficients"));
        }
        if dto.complete {
            system.mark_complete();
            if system != build_system(setup) {
                return Err(at(
                    &[Seg::Key("complete")],
                    "marked complete but differs from the full F-inequality system",
                ));
            }
        }
        Ok(system)
    })
}

/// One line per inequality: its coefficients in basis order, `≥ 0` implied.
pub fn write_hrep(system: &HalfspaceSystem) -> String {
    let mut out = String::new();
    for row in system.dense_rows() {
        let line: Vec<String> = row.iter().map(format_rational).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
