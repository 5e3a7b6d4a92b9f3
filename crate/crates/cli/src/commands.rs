use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use fnef_core::cone::{build_system, verify_system, FormOutcome};
use fnef_core::divisors::{f_partition_count, is_f_nef};
use fnef_core::formats::{self, DivisorFile};
use fnef_core::mori::{mori_check, TRUSTED_ASSUMPTIONS};
use fnef_core::pullback::{pullback as pull_back, AttachingMap};
use fnef_core::replay::{certificates, check, claim_audit, script_for, StepFailure};
use fnef_core::{ContainmentReport, FormatError, HalfspaceSystem, MoriCase, PointSet, ProofScript, SymSetup};

pub enum CliError {
    Input { file: PathBuf, err: FormatError },
    Io { file: PathBuf, err: std::io::Error },
    Usage(String),
    Core(fnef_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input { file, err } => write!(f, "{}: {err}", file.display()),
            CliError::Io { file, err } => write!(f, "{}: {err}", file.display()),
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<fnef_core::Error> for CliError {
    fn from(e: fnef_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

pub struct RangeArgs {
    pub single: Option<(u32, u32)>,
    pub nmax: Option<u32>,
}

pub fn resolve(args: impl Into<RangeArgs>) -> CliResult<Vec<SymSetup>> {
    let args = args.into();
    match (args.single, args.nmax) {
        (Some((n, m)), None) => Ok(vec![SymSetup::new(n, m)?]),
        (None, Some(nmax)) if nmax >= 4 => SymSetup::new(nmax, nmax)
            .map(|_| SymSetup::all_up_to(nmax))
            .map_err(CliError::from),
        (None, Some(nmax)) => Err(CliError::Usage(format!("--nmax {nmax} is below 4"))),
        _ => Err(CliError::Usage("give --n and --m, or --all --nmax K".into())),
    }
}

fn read(file: &Path) -> CliResult<String> {
    fs::read_to_string(file).map_err(|err| CliError::Io {
        file: file.to_path_buf(),
        err,
    })
}

fn write(file: &Path, text: &str) -> CliResult<()> {
    fs::write(file, text).map_err(|err| CliError::Io {
        file: file.to_path_buf(),
        err,
    })
}

fn input<T>(file: &Path, result: Result<T, FormatError>) -> CliResult<T> {
    result.map_err(|err| CliError::Input {
        file: file.to_path_buf(),
        err,
    })
}

fn code(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

pub fn fnef_check(file: &Path) -> CliResult<ExitCode> {
    let divisor = input(file, DivisorFile::read(&read(file)?))?.to_bvector();
    let n = divisor.ground().n();
    let verdict = is_f_nef(&divisor);
    match &verdict.witness {
        None => println!("F-NEF: nonnegative on all {} F-curves of M̄_0,{n}", f_partition_count(n)),
        Some((partition, value)) => {
            println!("NOT F-NEF");
            println!("witness: F-curve {partition} has intersection {value}");
        }
    }
    Ok(code(verdict.nef))
}

pub fn pullback(kept: &[u32], q: u32, file: &Path, out: Option<&Path>) -> CliResult<ExitCode> {
    let divisor = input(file, DivisorFile::read(&read(file)?))?.to_bvector();
    let ground = divisor.ground();
    if q >= 1 && q <= ground.n() {
        return Err(CliError::Usage(format!("--q {q} is already a point of {{1..{}}}", ground.n())));
    }
    let set = PointSet::from_labels(kept)?;
    if set.len() as usize != kept.len() {
        return Err(CliError::Usage("--A repeats a label".into()));
    }
    let map = AttachingMap::new(ground, set)?;
    let image = pull_back(&map, &divisor)?;
    let names: Vec<String> = map
        .target_order()
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            if l == map.node() {
                format!("{}=q({q})", k + 1)
            } else {
                format!("{}={l}", k + 1)
            }
        })
        .collect();
    eprintln!("target labels: {}", names.join(" "));
    emit(out, &formats::write_divisor(&image))?;
    Ok(ExitCode::SUCCESS)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Message lines go to stdout, unless stdout carries the document itself.
fn say(to_stderr: bool, line: &str) {
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

struct Verified {
    system: HalfspaceSystem,
    report: ContainmentReport,
    validated: Result<(), String>,
    seconds: f64,
}

fn verify_one(setup: SymSetup) -> CliResult<Verified> {
    let start = Instant::now();
    let system = build_system(setup);
    let report = verify_system(&system)?;
    // Re-checked with form arithmetic alone, independent of the solver.
    let validated = report.validate(&system).map_err(|e| e.to_string());
    Ok(Verified {
        system,
        report,
        validated,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn verify(setups: Vec<SymSetup>, out: Option<&Path>) -> CliResult<ExitCode> {
    let quiet = out.is_none();
    let runs: Vec<Verified> = setups.par_iter().map(|&s| verify_one(s)).collect::<CliResult<_>>()?;
    let mut ok = true;
    for v in &runs {
        let r = &v.report;
        let line = match (&v.validated, r.contained()) {
            (Err(e), _) => format!("{}: INVALID certificate ({e})", r.setup),
            (Ok(()), true) => format!(
                "{}: CONTAINED ({} validated, {}, {:.2}s)",
                r.setup,
                count(r.certificates().count(), "certificate"),
                count(r.inequality_count, "inequality"),
                v.seconds
            ),
            (Ok(()), false) => {
                let cx = r.counterexamples().next().expect("not contained");
                format!("{}: COUNTEREXAMPLE {} = {} on an F-nef ray", r.setup, cx.goal, cx.goal_value)
            }
        };
        ok &= v.validated.is_ok() && r.contained();
        say(quiet, &line);
    }
    let text = if runs.len() == 1 {
        formats::write_report(&runs[0].report, &runs[0].system)
    } else {
        let nmax = runs.iter().map(|v| v.report.setup.n()).max().unwrap_or(0);
        let pairs: Vec<_> = runs.into_iter().map(|v| (v.report, v.system)).collect();
        formats::write_batch_report(nmax, &pairs)
    };
    emit(out, &text)?;
    Ok(code(ok))
}

fn path_prefix(path: &[[u32; 2]]) -> String {
    path.iter().map(|p| format!("reduction {{{},{}}} / ", p[0], p[1])).collect()
}

fn failure_line(f: &StepFailure) -> String {
    let path = path_prefix(&f.path);
    let delta = f.delta.as_ref().map(|d| format!("; delta: {d}")).unwrap_or_default();
    format!(
        "  FAIL {path}step {} [{}] ({}): {}{delta}",
        f.index,
        f.label,
        f.kind.as_str(),
        f.reason
    )
}

fn replay_one(script: &ProofScript) -> CliResult<(bool, Vec<String>, String)> {
    let start = Instant::now();
    let report = check(script);
    let mut lines = Vec::new();
    let ok = if report.verified() {
        let system = build_system(script.setup);
        let certs = certificates(script, &report, &system)?;
        let bad = certs.iter().find_map(|c| c.validate(&system).err());
        match bad {
            None => {
                lines.push(format!(
                    "{}: VERIFIED ({}, {} reached, {} validated, {:.2}s)",
                    script.setup,
                    count(report.steps, "step"),
                    count(report.reached.len(), "goal"),
                    count(certs.len(), "flattened certificate"),
                    start.elapsed().as_secs_f64()
                ));
                true
            }
            Some(e) => {
                lines.push(format!("{}: FAILED flattened certificate rejected: {e}", script.setup));
                false
            }
        }
    } else {
        lines.push(format!(
            "{}: FAILED ({} of {} rejected, {} unreached)",
            script.setup,
            report.failures.len(),
            count(report.steps, "step"),
            count(report.unreached.len(), "goal")
        ));
        lines.extend(report.failures.iter().map(failure_line));
        for audit in claim_audit(script)? {
            if let FormOutcome::Refuted(cx) = &audit.outcome {
                lines.push(format!(
                    "  note: {}step {} [{}] is false on the F-nef cone: {} takes the value {} at an F-nef divisor",
                    path_prefix(&audit.path),
                    audit.index,
                    audit.label,
                    audit.form,
                    cx.goal_value
                ));
            }
        }
        false
    };
    Ok((ok, lines, formats::write_check_report(&report)))
}

pub fn replay(
    setups: Vec<SymSetup>,
    emit_script: Option<&Path>,
    script_file: Option<&Path>,
    report_file: Option<&Path>,
) -> CliResult<ExitCode> {
    if setups.len() > 1 && (emit_script.is_some() || report_file.is_some()) {
        return Err(CliError::Usage("--emit-script and --report need a single --n/--m".into()));
    }
    let scripts: Vec<ProofScript> = match script_file {
        Some(file) => {
            let script = input(file, formats::read_script(&read(file)?))?;
            if script.setup != setups[0] {
                return Err(CliError::Usage(format!(
                    "{} holds a script for {}, not {}",
                    file.display(),
                    script.setup,
                    setups[0]
                )));
            }
            vec![script]
        }
        None => setups.iter().map(|&s| script_for(s)).collect::<Result<_, _>>()?,
    };
    if let Some(path) = emit_script {
        write(path, &formats::write_script(&scripts[0]))?;
    }
    let results: Vec<_> = scripts.par_iter().map(replay_one).collect::<CliResult<_>>()?;
    let mut ok = true;
    for (passed, lines, _) in &results {
        ok &= passed;
        for line in lines {
            println!("{line}");
        }
    }
    if let Some(path) = report_file {
        write(path, &results[0].2)?;
    }
    Ok(code(ok))
}

pub fn mori(case: Option<(u32, u32)>, all: bool, report_file: Option<&Path>) -> CliResult<ExitCode> {
    let cases = match (case, all) {
        (Some((g, n)), false) => vec![MoriCase::new(g, n)?],
        (None, true) => MoriCase::all(),
        _ => return Err(CliError::Usage("give --g and --n, or --all".into())),
    };
    if cases.len() > 1 && report_file.is_some() {
        return Err(CliError::Usage("--report needs a single --g/--n".into()));
    }
    println!("trusted assumptions (not verified here):");
    for a in TRUSTED_ASSUMPTIONS {
        println!("  - {a}");
    }
    let mut ok = true;
    for case in cases {
        let start = Instant::now();
        let report = mori_check(case)?;
        let header = format!("g={}, n={} (M̄_0,{} / S_{})", case.g(), case.n(), case.total(), case.g());
        if report.vacuous() {
            println!("{header}: VERIFIED (no restriction has 8 or more points)");
        } else if report.literal_ok() {
            let descents: usize = report.levels.iter().map(|l| l.descents.len()).sum();
            println!(
                "{header}: VERIFIED ({} CONTAINED, {} checked, {:.2}s)",
                count(report.levels.len(), "level"),
                count(descents, "descent"),
                start.elapsed().as_secs_f64()
            );
            if !report.strict_ok() {
                println!("  note: some pullbacks carry a node psi term outside the reduced basis");
            }
        } else {
            ok = false;
            println!("{header}: FAILED ({})", report.failure().unwrap_or_default());
        }
        for level in &report.levels {
            println!(
                "  {}: {} ({})",
                level.setup,
                if level.containment.contained() { "CONTAINED" } else { "COUNTEREXAMPLE" },
                count(level.containment.certificates().count(), "certificate")
            );
        }
        if let Some(path) = report_file {
            write(path, &formats::write_mori_report(&report))?;
        }
    }
    Ok(code(ok))
}

pub fn export_system(n: u32, m: u32, dir: &Path) -> CliResult<ExitCode> {
    let setup = SymSetup::new(n, m)?;
    let system = build_system(setup);
    fs::create_dir_all(dir).map_err(|err| CliError::Io {
        file: dir.to_path_buf(),
        err,
    })?;
    let json = dir.join(format!("system_n{n}_m{m}.json"));
    let hrep = dir.join(format!("system_n{n}_m{m}.hrep"));
    write(&json, &formats::write_system(&system))?;
    write(&hrep, &formats::write_hrep(&system))?;
    println!(
        "{setup}: {} inequalities over {} coordinates",
        system.len(),
        system.basis().len()
    );
    println!("basis order: {}", system.basis().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "));
    println!("wrote {} and {}", json.display(), hrep.display());
    Ok(ExitCode::SUCCESS)
}

/// `1 step`, `2 steps`, `3 inequalities`.
fn count(n: usize, noun: &str) -> String {
    match (n, noun.strip_suffix('y')) {
        (1, _) => format!("1 {noun}"),
        (_, Some(stem)) => format!("{n} {stem}ies"),
        _ => format!("{n} {noun}s"),
    }
}
