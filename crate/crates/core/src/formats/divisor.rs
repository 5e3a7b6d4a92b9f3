//! Divisor files. Files hold δ-coefficients `c_S = -b_S` and psi coefficients
//! `a_i = b_{i}`; the sign flip happens only here.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{at, load, parse_coeff, setup_of, to_json, FormatResult, Located, OrbitDto, Seg, TermDto};
use crate::divisors::{canonicalize, BVector, GroundSet, PointSet};
use crate::rational::format_rational;
use crate::symmetry::InvariantDivisor;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DivisorDto {
    n: u32,
    #[serde(default)]
    boundary: Vec<BoundaryDto>,
    #[serde(default)]
    psi: Vec<PsiDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryDto {
    subset: PointSet,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PsiDto {
    point: u32,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantDto {
    n: u32,
    m: u32,
    coords: Vec<TermDto>,
}

/// Either kind of divisor file; invariant files are told apart by their `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisorFile {
    Plain(BVector),
    Invariant(InvariantDivisor),
}

impl DivisorFile {
    pub fn read(text: &str) -> FormatResult<Self> {
        let invariant = serde_json::from_str::<serde_json::Value>(text)
            .ok()
            .is_some_and(|v| v.get("m").is_some() || v.get("coords").is_some());
        if invariant {
            read_invariant(text).map(DivisorFile::Invariant)
        } else {
            read_divisor(text).map(DivisorFile::Plain)
        }
    }

    pub fn to_bvector(&self) -> BVector {
        match self {
            DivisorFile::Plain(d) => d.clone(),
            DivisorFile::Invariant(d) => d.expand(),
        }
    }
}

pub fn read_divisor(text: &str) -> FormatResult<BVector> {
    load(text, |dto: DivisorDto| {
        let ground = GroundSet::new(dto.n).map_err(|e| at(&[Seg::Key("n")], e))?;
        let n = dto.n;
        let mut out = BVector::zero(ground);
        let mut seen = BTreeSet::new();
        for (k, entry) in dto.boundary.iter().enumerate() {
            let here = [Seg::Key("boundary"), Seg::Index(k)];
            let subset_path = [Seg::Key("boundary"), Seg::Index(k), Seg::Key("subset")];
            let size = entry.subset.len();
            if size < 2 || size + 2 > n {
                return Err(at(
                    &subset_path,
                    format!(
                        "boundary subset {} must have 2..={} points (write single points under \"psi\")",
                        entry.subset,
                        n - 2
                    ),
                ));
            }
            let key = canonicalize(entry.subset, ground).map_err(|e| at(&subset_path, e))?;
            if !seen.insert(key) {
                return Err(at(&here, format!("duplicate boundary class δ_{key}")));
            }
            let c = parse_coeff(&entry.coeff, &[here[0].clone(), here[1].clone(), Seg::Key("coeff")])?;
            out.add_entry(key, &-c);
        }
        let mut points = BTreeSet::new();
        for (k, entry) in dto.psi.iter().enumerate() {
            let here = [Seg::Key("psi"), Seg::Index(k)];
            if entry.point == 0 || entry.point > n {
                return Err(at(
                    &[here[0].clone(), here[1].clone(), Seg::Key("point")],
                    format!("point {} is not in 1..={n}", entry.point),
                ));
            }
            if !points.insert(entry.point) {
                return Err(at(&here, format!("duplicate psi entry for point {}", entry.point)));
            }
            let a = parse_coeff(&entry.coeff, &[here[0].clone(), here[1].clone(), Seg::Key("coeff")])?;
            let key = canonicalize(PointSet::singleton(entry.point), ground).map_err(|e| at(&here, e))?;
            out.add_entry(key, &a);
        }
        Ok(out)
    })
}

pub fn write_divisor(divisor: &BVector) -> String {
    let mut dto = DivisorDto {
        n: divisor.ground().n(),
        boundary: Vec::new(),
        psi: Vec::new(),
    };
    for (key, b) in divisor.entries() {
        if key.is_psi() {
            dto.psi.push(PsiDto {
                point: key.set().min_label().expect("singleton"),
                coeff: format_rational(b),
            });
        } else {
            dto.boundary.push(BoundaryDto {
                subset: key.set(),
                coeff: format_rational(&-b),
            });
        }
    }
    dto.psi.sort_by_key(|p| p.point);
    to_json(&dto)
}

pub fn read_invariant(text: &str) -> FormatResult<InvariantDivisor> {
    load(text, |dto: InvariantDto| -> Result<_, Located> {
        let setup = setup_of(dto.n, dto.m, &[Seg::Key("m")])?;
        let mut out = InvariantDivisor::zero(setup);
        let mut seen = BTreeSet::new();
        for (k, term) in dto.coords.iter().enumerate() {
            let here = [Seg::Key("coords"), Seg::Index(k)];
            let idx = OrbitDto { i: term.i, t: term.t }.resolve(setup, &here)?;
            if !seen.insert(idx) {
                return Err(at(&here, format!("duplicate coordinate {}", idx.generator_name())));
            }
            let value = parse_coeff(&term.coeff, &[here[0].clone(), here[1].clone(), Seg::Key("coeff")])?;
            out.set_index(idx, value).map_err(|e| at(&here, e))?;
        }
        Ok(out)
    })
}

pub fn write_invariant(divisor: &InvariantDivisor) -> String {
    let setup = divisor.setup();
    let coords = divisor
        .coords()
        .map(|(idx, c)| TermDto {
            i: idx.size(),
            t: idx.fixed(),
            coeff: format_rational(c),
        })
        .collect();
    to_json(&InvariantDto {
        n: setup.n(),
        m: setup.m(),
        coords,
    })
}
