//! Loader for recurrence data files.
//!
//! Integers are decimal strings throughout. Each coefficient block is stored
//! twice, factored (`constant * prod poly^power`) and expanded; the loader
//! re-expands the factored form, compares, and checks a sha256 over the
//! expanded coefficients.

use std::collections::BTreeMap;
use std::path::Path;

use rug::{Integer, Rational};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::{Recurrence, RecurrenceError};
use crate::mpnum::{parse_rational, RatPoly};

/// Convention string for second-order files written as `(A, B, C)`.
pub const ABC_CONVENTION: &str = "A(n)*r(n+1) - B(n)*r(n) - C(n)*r(n-1) = 0";
/// Convention string for files keyed `a0 .. ad`.
pub const GENERIC_CONVENTION: &str = "sum_i a_i(n)*r(n-1+i) = 0";

const SHIPPED: &str = include_str!("../../../../data/recurrence.json");

/// Coefficient degree of the shipped instance, counted from its factored form.
pub const SHIPPED_DEGREE: usize = 21;

#[derive(Deserialize)]
struct RawFile {
    name: Option<String>,
    order: usize,
    convention: String,
    n_start: i64,
    factored: Option<BTreeMap<String, RawFactored>>,
    expanded: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    initial_values: BTreeMap<String, Vec<String>>,
    char_poly: Option<Vec<String>>,
    checksum: Option<String>,
}

#[derive(Deserialize)]
struct RawFactored {
    constant: String,
    factors: Vec<RawFactor>,
}

#[derive(Deserialize)]
struct RawFactor {
    poly: Vec<String>,
    power: u32,
}

/// A validated recurrence together with the named initial values it ships with.
#[derive(Clone, Debug)]
pub struct RecurrenceData {
    pub recurrence: Recurrence,
    pub initial_values: BTreeMap<String, Vec<Rational>>,
    pub char_poly: Option<Vec<Integer>>,
    pub checksum: Option<String>,
}

impl RecurrenceData {
    pub fn initial(&self, name: &str) -> Result<&[Rational], RecurrenceError> {
        self.initial_values
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| RecurrenceError::Data(format!("no initial values named {name:?}")))
    }
}

fn parse_int(s: &str) -> Result<Integer, RecurrenceError> {
    s.trim()
        .parse::<Integer>()
        .map_err(|_| RecurrenceError::Data(format!("not an integer: {s:?}")))
}

fn parse_poly(coeffs: &[String]) -> Result<RatPoly, RecurrenceError> {
    let ints = coeffs
        .iter()
        .map(|c| parse_int(c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RatPoly::from_integers(&ints))
}

fn expand_factored(block: &RawFactored) -> Result<RatPoly, RecurrenceError> {
    let mut acc = RatPoly::constant(Rational::from(parse_int(&block.constant)?));
    for f in &block.factors {
        acc = acc.mul(&parse_poly(&f.poly)?.pow(f.power));
    }
    Ok(acc)
}

fn keys_for(order: usize, convention: &str) -> Result<Vec<String>, RecurrenceError> {
    match convention {
        ABC_CONVENTION if order == 2 => Ok(vec!["A".into(), "B".into(), "C".into()]),
        GENERIC_CONVENTION => Ok((0..=order).map(|i| format!("a{i}")).collect()),
        _ => Err(RecurrenceError::Data(format!(
            "unsupported convention {convention:?} for order {order}"
        ))),
    }
}

/// `sha256` over `"K:c0,c1,...;"` for every block, in file-key order.
pub fn expanded_checksum(blocks: &[(String, RatPoly)]) -> String {
    let mut canon = String::new();
    for (key, poly) in blocks {
        let coeffs: Vec<String> = poly
            .coeffs()
            .iter()
            .map(|c| c.numer().to_string())
            .collect();
        canon.push_str(&format!("{key}:{};", coeffs.join(",")));
    }
    let digest = Sha256::digest(canon.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// Parses and validates a recurrence data file.
pub fn load_recurrence(text: &str) -> Result<RecurrenceData, RecurrenceError> {
    let raw: RawFile =
        serde_json::from_str(text).map_err(|e| RecurrenceError::Data(e.to_string()))?;
    if raw.order == 0 {
        return Err(RecurrenceError::Data("order must be positive".into()));
    }
    let keys = keys_for(raw.order, &raw.convention)?;

    let mut blocks = Vec::with_capacity(keys.len());
    for key in &keys {
        let coeffs = raw
            .expanded
            .get(key)
            .ok_or_else(|| RecurrenceError::Data(format!("missing expanded block {key}")))?;
        let poly = parse_poly(coeffs)?;
        if let Some(factored) = raw.factored.as_ref().and_then(|f| f.get(key)) {
            let from_factors = expand_factored(factored)?;
            if from_factors != poly {
                return Err(RecurrenceError::FactoredMismatch(key.clone()));
            }
        }
        blocks.push((key.clone(), poly));
    }

    let checksum = expanded_checksum(&blocks);
    if let Some(expected) = &raw.checksum {
        if *expected != checksum {
            return Err(RecurrenceError::Checksum {
                expected: expected.clone(),
                found: checksum,
            });
        }
    }

    let polys: Vec<RatPoly> = blocks.into_iter().map(|(_, p)| p).collect();
    let coeffs = if raw.convention == ABC_CONVENTION {
        // A r(n+1) - B r(n) - C r(n-1) = 0  ->  (a0, a1, a2) = (-C, -B, A)
        vec![polys[2].neg(), polys[1].neg(), polys[0].clone()]
    } else {
        polys
    };
    let mut recurrence = Recurrence::new(coeffs, raw.n_start)?;
    if let Some(name) = raw.name {
        recurrence = recurrence.with_name(name);
    }
    recurrence.check_leading_nonvanishing()?;

    let mut initial_values = BTreeMap::new();
    for (name, vals) in &raw.initial_values {
        let parsed = vals
            .iter()
            .map(|v| parse_rational(v).map_err(|e| RecurrenceError::Data(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if parsed.len() != raw.order {
            return Err(RecurrenceError::InitLength {
                expected: raw.order,
                found: parsed.len(),
            });
        }
        initial_values.insert(name.clone(), parsed);
    }

    let char_poly = match &raw.char_poly {
        Some(cp) => {
            let stated = cp
                .iter()
                .map(|c| parse_int(c))
                .collect::<Result<Vec<_>, _>>()?;
            let computed = recurrence.characteristic_polynomial()?;
            if stated != computed {
                return Err(RecurrenceError::Data(format!(
                    "stated characteristic polynomial {stated:?} differs from computed {computed:?}"
                )));
            }
            Some(stated)
        }
        None => None,
    };

    Ok(RecurrenceData {
        recurrence,
        initial_values,
        char_poly,
        checksum: raw.checksum,
    })
}

pub fn load_recurrence_file(path: &Path) -> Result<RecurrenceData, RecurrenceError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RecurrenceError::Data(format!("{}: {e}", path.display())))?;
    load_recurrence(&text)
}

/// Checks that every coefficient of a shipped-type file has the expected degree.
pub fn check_degree(rec: &Recurrence, expected: usize) -> Result<(), RecurrenceError> {
    for (i, a) in rec.coefficients().iter().enumerate() {
        let found = a.degree().unwrap_or(0);
        if found != expected {
            return Err(RecurrenceError::Degree {
                index: i,
                expected,
                found,
            });
        }
    }
    Ok(())
}

/// The recurrence for `L(chi_-8, 2)` compiled into the crate.
pub fn main_theorem() -> Result<RecurrenceData, RecurrenceError> {
    let data = load_recurrence(SHIPPED)?;
    check_degree(&data.recurrence, SHIPPED_DEGREE)?;
    Ok(data)
}

/// Loads the recurrence from `path` and applies the same degree guard as the
/// built-in copy.
pub fn main_theorem_from(path: &Path) -> Result<RecurrenceData, RecurrenceError> {
    let data = load_recurrence_file(path)?;
    check_degree(&data.recurrence, SHIPPED_DEGREE)?;
    Ok(data)
}

pub fn shipped_source() -> &'static str {
    SHIPPED
}
