//! Logarithmic Mahler measures of integer polynomials in one and two
//! variables, the evaluation corpus, and the end-to-end comparison with the
//! Apéry limit.

mod integrate;
mod poly;

use std::path::Path;

use rug::{Float, Integer, Rational};
use serde::Deserialize;
use thiserror::Error;

use crate::characters::{
    computed_l, l_prime_minus_one_with, CharacterError, DirichletCharacter, LProvider,
};
use crate::check::IdentityCheck;
use crate::mpnum::{check_tolerance, parse_rational, pi, MpError, GUARD_BITS};
use crate::recurrence::{self, AperyLimit, RecurrenceData, RecurrenceError};

pub use integrate::{
    breakpoints, mahler_1var, mahler_2var, torus_integral_factor, MahlerResult, QuadratureMethod,
};
pub use poly::{resultant_y, BivariatePoly};

#[derive(Debug, Error)]
pub enum MahlerError {
    #[error("the zero polynomial has no Mahler measure")]
    ZeroPolynomial,
    #[error("duplicate term x^{0} y^{1}")]
    DuplicateTerm(u32, u32),
    #[error("coefficients must be integers")]
    NonIntegral,
    #[error("node count must be even and at least 8, got {0}")]
    InvalidNodes(usize),
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("unknown corpus entry {0:?}")]
    UnknownEntry(String),
    #[error(transparent)]
    Mp(#[from] MpError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
}

const SHIPPED_CORPUS: &str = include_str!("../../../../data/corpus.json");

/// One evaluation `m(P) = multiple * L'(chi_D, -1)`.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub tag: String,
    pub display: String,
    pub poly: BivariatePoly,
    pub discriminant: i64,
    pub multiple: Rational,
}

#[derive(Deserialize)]
struct RawCorpus {
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    tag: String,
    display: String,
    terms: Vec<(u32, u32, String)>,
    discriminant: i64,
    multiple: String,
}

pub fn load_corpus(text: &str) -> Result<Vec<CorpusEntry>, MahlerError> {
    let raw: RawCorpus =
        serde_json::from_str(text).map_err(|e| MahlerError::Corpus(e.to_string()))?;
    raw.entries
        .into_iter()
        .map(|e| {
            let terms = e
                .terms
                .iter()
                .map(|(i, j, c)| {
                    c.parse::<Integer>().map(|c| (*i, *j, c)).map_err(|_| {
                        MahlerError::Corpus(format!("{}: bad coefficient {c:?}", e.tag))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let multiple = parse_rational(&e.multiple)
                .map_err(|err| MahlerError::Corpus(format!("{}: {err}", e.tag)))?;
            Ok(CorpusEntry {
                tag: e.tag,
                display: e.display,
                poly: BivariatePoly::new(terms)?,
                discriminant: e.discriminant,
                multiple,
            })
        })
        .collect()
}

pub fn load_corpus_file(path: &Path) -> Result<Vec<CorpusEntry>, MahlerError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| MahlerError::Corpus(format!("{}: {e}", path.display())))?;
    load_corpus(&text)
}

/// The six evaluations compiled into the crate.
pub fn shipped_corpus() -> Vec<CorpusEntry> {
    load_corpus(SHIPPED_CORPUS).expect("shipped corpus parses")
}

/// `(x^4+1) y^2 - 2(x^4-4x^2+1) y + x^4+1`.
pub fn ray_polynomial() -> BivariatePoly {
    BivariatePoly::from_i64(&[
        (4, 2, 1),
        (0, 2, 1),
        (4, 1, -2),
        (2, 1, 8),
        (0, 1, -2),
        (4, 0, 1),
        (0, 0, 1),
    ])
    .expect("valid polynomial")
}

#[derive(Clone, Debug)]
pub struct CorpusCheck {
    pub tag: String,
    pub display: String,
    pub measure: MahlerResult,
    /// `multiple * L'(chi_D, -1)`.
    pub target: Float,
    pub residual: Float,
    pub tolerance: Float,
    pub pass: bool,
}

/// Compares one corpus entry with its closed form. The tolerance is the
/// quadrature error estimate plus `2^(-bits + GUARD_BITS)`.
pub fn verify_entry(
    entry: &CorpusEntry,
    bits: u32,
    nodes: usize,
) -> Result<CorpusCheck, MahlerError> {
    verify_entry_with(entry, &computed_l, bits, nodes)
}

pub fn verify_entry_with(
    entry: &CorpusEntry,
    l: LProvider,
    bits: u32,
    nodes: usize,
) -> Result<CorpusCheck, MahlerError> {
    let measure = mahler_2var(&entry.poly, nodes, bits)?;
    let chi = DirichletCharacter::new(entry.discriminant)?;
    let lp = l_prime_minus_one_with(&chi, bits + 8, l)?;
    let target = Float::with_val(bits + GUARD_BITS, &lp * &entry.multiple);
    let residual = Float::with_val(bits, &measure.value - &target).abs();
    let tolerance = Float::with_val(64, &measure.error_estimate + check_tolerance(bits));
    let pass = residual <= tolerance;
    Ok(CorpusCheck {
        tag: entry.tag.clone(),
        display: entry.display.clone(),
        measure,
        target,
        residual,
        tolerance,
        pass,
    })
}

pub fn verify_corpus(bits: u32, nodes: usize) -> Result<Vec<CorpusCheck>, MahlerError> {
    verify_corpus_with(&shipped_corpus(), &computed_l, bits, nodes)
}

pub fn verify_corpus_with(
    entries: &[CorpusEntry],
    l: LProvider,
    bits: u32,
    nodes: usize,
) -> Result<Vec<CorpusCheck>, MahlerError> {
    entries
        .iter()
        .map(|e| verify_entry_with(e, l, bits, nodes))
        .collect()
}

#[derive(Clone, Debug)]
pub struct MainTheoremReport {
    pub apery: AperyLimit,
    pub l_value: Float,
    pub ray_measure: MahlerResult,
    /// `pi / (4 sqrt 2) * m(Ray)`.
    pub mahler_side: Float,
    /// Apéry limit vs `L`, Apéry limit vs Mahler side, `L` vs Mahler side.
    pub gaps: Vec<IdentityCheck>,
    /// `pi / (4 sqrt 2) = 4 pi / (N sqrt N)` at `N = 8`.
    pub prefactor: IdentityCheck,
    /// The same comparison with `x + y + 1` in place of the Ray polynomial;
    /// `pass` here means the gap exceeded the tolerance, as it should.
    pub negative_control: IdentityCheck,
    pub pass: bool,
}

/// `pi / (4 sqrt 2)`.
pub fn main_prefactor(prec: u32) -> Float {
    pi(prec) / (Float::with_val(prec, 2).sqrt() * 4u32)
}

/// Checks `lim p_n/q_n = L(chi_-8, 2) = pi/(4 sqrt 2) m(Ray)`.
///
/// The identity is often written with the right-hand side as `-1/(16 pi sqrt 2)` times the
/// torus integral of `log|P| dx/x dy/y`; that integral is `-(2 pi)^2 m(P)`
/// (see [`torus_integral_factor`]), which turns the prefactor into
/// `+pi/(4 sqrt 2)` on `m(P)`.
pub fn verify_main_theorem(
    bits: u32,
    n_max: i64,
    nodes: usize,
) -> Result<MainTheoremReport, MahlerError> {
    verify_main_theorem_with(
        &recurrence::main_theorem()?,
        &computed_l,
        bits,
        n_max,
        nodes,
    )
}

pub fn verify_main_theorem_with(
    data: &RecurrenceData,
    l: LProvider,
    bits: u32,
    n_max: i64,
    nodes: usize,
) -> Result<MainTheoremReport, MahlerError> {
    let wp = bits + GUARD_BITS;
    let apery = recurrence::apery_limit(
        &data.recurrence,
        data.initial("q")?,
        data.initial("p")?,
        n_max,
        bits,
    )?;
    let l_value = l(&DirichletCharacter::chi_minus_8(), bits)?;
    let ray_measure = mahler_2var(&ray_polynomial(), nodes, bits)?;
    let factor = main_prefactor(wp);
    let mahler_side = Float::with_val(wp, &ray_measure.value * &factor);

    // the torus-integral constant
    let torus_constant =
        -(Float::with_val(wp, 16u32) * pi(wp) * Float::with_val(wp, 2).sqrt()).recip();
    let via_torus = torus_constant * torus_integral_factor(wp);

    let slack = check_tolerance(bits);
    let rec_err = Float::with_val(64, &apery.error_estimate);
    let quad_err = Float::with_val(64, &ray_measure.error_estimate * &factor);
    let max_err = if quad_err > rec_err {
        quad_err.clone()
    } else {
        rec_err.clone()
    };
    let gaps = vec![
        IdentityCheck::compare(
            "apery-vs-L",
            "lim p_n/q_n = L(chi_-8, 2)",
            apery.value.clone(),
            l_value.clone(),
            Float::with_val(64, &rec_err + &slack),
        ),
        IdentityCheck::compare(
            "apery-vs-mahler",
            "lim p_n/q_n = pi/(4 sqrt 2) m(P_Ray)",
            apery.value.clone(),
            mahler_side.clone(),
            Float::with_val(64, &max_err + &slack),
        ),
        IdentityCheck::compare(
            "L-vs-mahler",
            "L(chi_-8, 2) = pi/(4 sqrt 2) m(P_Ray)",
            l_value.clone(),
            mahler_side.clone(),
            Float::with_val(64, &max_err + &slack),
        ),
    ];

    let prefactor = IdentityCheck::compare(
        "prefactor",
        "-1/(16 pi sqrt 2) * (-(2 pi)^2) = pi/(4 sqrt 2) = 4 pi/(8 sqrt 8)",
        via_torus,
        Float::with_val(wp, pi(wp) * 4u32)
            / (Float::with_val(wp, 8u32) * Float::with_val(wp, 8).sqrt()),
        slack.clone(),
    )
    .with_note(format!(
        "pi/(4 sqrt 2) = {}",
        factor.to_string_radix(10, Some(20))
    ));

    let smyth = BivariatePoly::from_i64(&[(1, 0, 1), (0, 1, 1), (0, 0, 1)]).expect("valid");
    let control_measure = mahler_2var(&smyth, nodes, bits)?;
    let control_side = Float::with_val(wp, &control_measure.value * &factor);
    let control_tol = Float::with_val(
        64,
        Float::with_val(64, &control_measure.error_estimate * &factor) + &max_err + &slack,
    );
    let mut negative_control = IdentityCheck::compare(
        "negative-control",
        "pi/(4 sqrt 2) m(x+y+1) differs from L(chi_-8, 2)",
        l_value.clone(),
        control_side,
        control_tol,
    );
    negative_control.pass = negative_control.residual.is_finite()
        && negative_control.residual > negative_control.tolerance;

    let pass = gaps.iter().all(|g| g.pass) && prefactor.pass && negative_control.pass;
    Ok(MainTheoremReport {
        apery,
        l_value,
        ray_measure,
        mahler_side,
        gaps,
        prefactor,
        negative_control,
        pass,
    })
}
