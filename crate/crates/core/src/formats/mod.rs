//! JSON file formats and the plain H-representation export.
//!
//! Every rational is written as `"p/q"` in lowest terms with `q > 0`, and every
//! list has a fixed order, so equal values serialize to identical bytes.
//! Readers reject unknown fields, duplicate entries and floats, and report the
//! line and field path of the first problem.

mod cone;
mod divisor;
mod locate;
mod mori;
mod script;

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::divisors::PointSet;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::symmetry::{LinearForm, OrbitIndex, SymSetup};

pub use cone::{
    read_certificate, read_report_certificates, read_system, write_batch_report, write_certificate, write_hrep,
    write_report, write_system,
};
pub use divisor::{read_divisor, read_invariant, write_divisor, write_invariant, DivisorFile};
pub use mori::write_mori_report;
pub use script::{read_script, write_check_report, write_script};

/// A malformed input file: where the problem is and what it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatError {
    /// Field path such as `boundary[2].subset`; empty for the document itself.
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}, ")?;
        }
        let field = if self.field.is_empty() { "(document)" } else { &self.field };
        write!(f, "field {field}: {}", self.message)
    }
}

impl std::error::Error for FormatError {}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

/// One step of a field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Seg {
    Key(&'static str),
    Index(usize),
}

/// A semantic error found after parsing, located later against the text.
pub(crate) struct Located {
    path: Vec<Seg>,
    message: String,
}

pub(crate) fn at(path: &[Seg], message: impl fmt::Display) -> Located {
    Located {
        path: path.to_vec(),
        message: message.to_string(),
    }
}

pub(crate) fn path_text(path: &[Seg]) -> String {
    let mut out = String::new();
    for seg in path {
        match seg {
            Seg::Key(k) => {
                if !out.is_empty() {
                    out.push('.');
                }
                out.push_str(k);
            }
            Seg::Index(i) => out.push_str(&format!("[{i}]")),
        }
    }
    out
}

impl Located {
    fn resolve(self, text: &str) -> FormatError {
        FormatError {
            field: path_text(&self.path),
            line: locate::line_of(text, &self.path),
            message: self.message,
        }
    }
}

/// Parses `text` into a DTO, then converts it; both stages report locations.
pub(crate) fn load<D: DeserializeOwned, T>(
    text: &str,
    convert: impl FnOnce(D) -> std::result::Result<T, Located>,
) -> FormatResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let dto: D = match serde_path_to_error::deserialize(&mut de) {
        Ok(v) => v,
        Err(err) => {
            let field = err.path().to_string();
            let inner = err.into_inner();
            let line = (inner.line() > 0).then_some(inner.line());
            let field = if field == "." { String::new() } else { field };
            return Err(FormatError {
                field,
                line,
                message: strip_position(&inner.to_string()),
            });
        }
    };
    if let Err(err) = de.end() {
        return Err(FormatError {
            field: String::new(),
            line: Some(err.line()),
            message: strip_position(&err.to_string()),
        });
    }
    convert(dto).map_err(|e| e.resolve(text))
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(pos) => message[..pos].to_string(),
        None => message.to_string(),
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("DTOs serialize");
    out.push('\n');
    out
}

pub(crate) fn parse_coeff(text: &str, path: &[Seg]) -> std::result::Result<Rational, Located> {
    parse_rational(text).map_err(|_| at(path, format!("{text:?} is not an exact rational p/q")))
}

pub(crate) fn setup_of(n: u32, m: u32, path: &[Seg]) -> std::result::Result<SymSetup, Located> {
    SymSetup::new(n, m).map_err(|e| at(path, e))
}

/// `{"i": …, "T": […]}`, the wire form of an orbit `B^i_T`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct OrbitDto {
    pub i: u32,
    #[serde(rename = "T")]
    pub t: PointSet,
}

impl OrbitDto {
    pub fn of(idx: OrbitIndex) -> Self {
        OrbitDto {
            i: idx.size(),
            t: idx.fixed(),
        }
    }

    /// Canonicalizes and rejects orbits outside the basis, naming the rule.
    pub fn resolve(&self, setup: SymSetup, path: &[Seg]) -> std::result::Result<OrbitIndex, Located> {
        let idx = OrbitIndex::new(setup, self.i, self.t).map_err(|e| at(path, e))?;
        if let Some(rule) = crate::symmetry::exclusion_rule(setup, idx) {
            return Err(at(
                path,
                format!("orbit {} is excluded from the invariant basis ({rule})", idx.generator_name()),
            ));
        }
        Ok(idx)
    }
}

/// One coefficient of a linear form or invariant divisor.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TermDto {
    pub i: u32,
    #[serde(rename = "T")]
    pub t: PointSet,
    pub coeff: String,
}

pub(crate) fn form_terms(form: &LinearForm) -> Vec<TermDto> {
    form.terms()
        .map(|(idx, c)| TermDto {
            i: idx.size(),
            t: idx.fixed(),
            coeff: format_rational(c),
        })
        .collect()
}

/// Rebuilds a form; repeated orbits (after canonicalization) are errors.
pub(crate) fn read_form(
    setup: SymSetup,
    terms: &[TermDto],
    path: &[Seg],
) -> std::result::Result<LinearForm, Located> {
    let mut form = LinearForm::zero(setup);
    let mut seen = std::collections::BTreeSet::new();
    for (k, term) in terms.iter().enumerate() {
        let here = [path, &[Seg::Index(k)]].concat();
        let idx = OrbitDto { i: term.i, t: term.t }.resolve(setup, &here)?;
        if !seen.insert(idx) {
            return Err(at(&here, format!("duplicate orbit {}", idx.generator_name())));
        }
        let value = parse_coeff(&term.coeff, &[here.as_slice(), &[Seg::Key("coeff")]].concat())?;
        form.add_term(idx, &value);
    }
    Ok(form)
}
