use std::fmt;

use aperion::characters::{computed_l, l_prime_minus_one_with, CharacterError, DirichletCharacter};
use aperion::check::IdentityCheck;
use aperion::mahler::{self, CorpusEntry, MahlerError};
use aperion::mpnum::{check_tolerance, decimal_digits, parse_rational, pi, to_decimal, GUARD_BITS};
use aperion::recurrence::{self, RecurrenceData, RecurrenceError};
use aperion::telescope;
use aperion::trigamma::{self, ShiftForm};
use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::cache::Cache;
use crate::config::RunConfig;
use crate::report::{decimal, Report};

/// The n from which `apery` turns growth statistics into pass/fail checks.
const GROWTH_CHECK_FROM: u32 = 200;
const MIN_GROWTH_TERMS: usize = 10;
/// Relative slope tolerance for the growth checks.
const GROWTH_TOLERANCE: f64 = 0.01;

/// Bad command arguments; the process exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub struct Context {
    pub cfg: RunConfig,
    pub cache: Cache,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Self {
        let cache = Cache::new(cfg.cache_dir.clone(), cfg.verify_cache);
        Context { cfg, cache }
    }

    /// `L(chi, 2)` through the cache.
    fn l(&self, chi: &DirichletCharacter, bits: u32) -> Result<Float, CharacterError> {
        let name = format!("L_chi{}_s2", chi.discriminant());
        self.cache
            .get_or_compute(&name, bits, || computed_l(chi, bits))
    }

    fn recurrence(&self) -> Result<RecurrenceData, RecurrenceError> {
        match &self.cfg.data_dir {
            Some(d) => recurrence::main_theorem_from(&d.join("recurrence.json")),
            None => recurrence::main_theorem(),
        }
    }

    fn corpus(&self) -> Result<Vec<CorpusEntry>, MahlerError> {
        match &self.cfg.data_dir {
            Some(d) => mahler::load_corpus_file(&d.join("corpus.json")),
            None => Ok(mahler::shipped_corpus()),
        }
    }

    fn digits(&self, x: &Float) -> String {
        decimal(x, decimal_digits(self.cfg.bits))
    }

    /// Appends a failed record if a verified cache hit disagreed with a
    /// recomputation.
    pub fn close(&self, report: &mut Report) {
        let bad = self.cache.mismatches();
        if !bad.is_empty() {
            report.push_error(
                "cache-consistency",
                "cached constants bit-match recomputation",
                format!("mismatched entries: {}", bad.join(", ")),
            );
        }
    }
}

pub fn verify_main_theorem(ctx: &Context) -> Report {
    let cfg = &ctx.cfg;
    let mut report = Report::new("verify-main-theorem", cfg);
    let data = match ctx.recurrence() {
        Ok(d) => d,
        Err(e) => {
            report.push_error("load-recurrence", "recurrence data loads and validates", e);
            return report;
        }
    };
    let l = |chi: &DirichletCharacter, bits: u32| ctx.l(chi, bits);
    match mahler::verify_main_theorem_with(&data, &l, cfg.bits, cfg.n_max as i64, cfg.nodes) {
        Ok(r) => {
            report.push_all(&r.gaps);
            report.push(&r.prefactor);
            report.push(&r.negative_control);
            report.info("apery_limit", ctx.digits(&r.apery.value));
            report.info("apery_error_estimate", decimal(&r.apery.error_estimate, 6));
            report.info("l_value", ctx.digits(&r.l_value));
            report.info("ray_measure", ctx.digits(&r.ray_measure.value));
            report.info("mahler_side", ctx.digits(&r.mahler_side));
            add_measure_info(&mut report, "ray", &r.ray_measure);
        }
        Err(e) => report.push_error(
            "main-theorem",
            "lim p_n/q_n = L(chi_-8, 2) = pi/(4 sqrt 2) m(P_Ray)",
            e,
        ),
    }
    report
}

fn add_measure_info(report: &mut Report, prefix: &str, m: &mahler::MahlerResult) {
    report.info(&format!("{prefix}.method"), m.method.as_str());
    report.info(&format!("{prefix}.nodes"), m.nodes.to_string());
    report.info(
        &format!("{prefix}.error_estimate"),
        decimal(&m.error_estimate, 6),
    );
    report.info(
        &format!("{prefix}.breakpoints"),
        m.breakpoints.len().to_string(),
    );
    if m.degenerate_nodes > 0 {
        report.info(
            &format!("{prefix}.degenerate_nodes"),
            m.degenerate_nodes.to_string(),
        );
    }
}

pub fn apery(ctx: &Context) -> Report {
    let cfg = &ctx.cfg;
    let mut report = Report::new("apery", cfg);
    if let Err(e) = apery_into(ctx, &mut report) {
        report.push_error("apery", "recurrence iteration", e);
    }
    report
}

#[derive(Debug)]
enum AperyError {
    Recurrence(RecurrenceError),
    Telescope(telescope::TelescopeError),
    Character(CharacterError),
}

impl fmt::Display for AperyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AperyError::Recurrence(e) => e.fmt(f),
            AperyError::Telescope(e) => e.fmt(f),
            AperyError::Character(e) => e.fmt(f),
        }
    }
}

impl From<RecurrenceError> for AperyError {
    fn from(e: RecurrenceError) -> Self {
        AperyError::Recurrence(e)
    }
}

impl From<telescope::TelescopeError> for AperyError {
    fn from(e: telescope::TelescopeError) -> Self {
        AperyError::Telescope(e)
    }
}

impl From<CharacterError> for AperyError {
    fn from(e: CharacterError) -> Self {
        AperyError::Character(e)
    }
}

fn apery_into(ctx: &Context, report: &mut Report) -> Result<(), AperyError> {
    let cfg = &ctx.cfg;
    let bits = cfg.bits;
    let data = ctx.recurrence()?;
    let rec = &data.recurrence;
    let n_max = cfg.n_max as i64;
    let q = recurrence::iterate(rec, data.initial("q")?, n_max)?;
    let p = recurrence::iterate(rec, data.initial("p")?, n_max)?;

    for (name, seq) in [("q", &q), ("p", &p)] {
        let worst = rec
            .residuals(seq)
            .into_iter()
            .map(|r| r.abs())
            .max()
            .unwrap_or_default();
        report.push(&IdentityCheck::compare(
            format!("recurrence-exact-{name}"),
            format!("sum_i a_i(n) {name}(n-1+i) = 0 exactly for every n <= {n_max}"),
            Float::with_val(bits, &worst),
            Float::new(bits),
            Float::new(64),
        ));
    }

    let cp = rec.characteristic_polynomial()?;
    report.info("characteristic_polynomial", format_char_poly(&cp));
    if let Some(stated) = &data.char_poly {
        let same = *stated == cp;
        let gap = if same { 0 } else { 1 };
        report.push(
            &IdentityCheck::compare(
                "characteristic-polynomial",
                "computed characteristic polynomial equals the stated one",
                Float::with_val(bits, gap),
                Float::new(bits),
                Float::new(64),
            )
            .with_note(format!("stated {}", format_char_poly(stated))),
        );
    }

    let lim = recurrence::apery_limit(rec, data.initial("q")?, data.initial("p")?, n_max, bits)?;
    let l = ctx.l(&DirichletCharacter::chi_minus_8(), bits)?;
    report.push(&IdentityCheck::compare(
        "apery-limit-vs-L",
        "p_n/q_n approaches L(chi_-8, 2) within the last-step difference",
        lim.value.clone(),
        l,
        Float::with_val(64, &lim.error_estimate + check_tolerance(bits)),
    ));
    report.info("apery_limit", ctx.digits(&lim.value));
    report.info("apery_error_estimate", decimal(&lim.error_estimate, 6));

    let den = q[q.len() - 1].denom().clone();
    let mid_den = q[q.len() / 2].denom().clone();
    report.info("q_denominator_bits", den.significant_bits().to_string());
    report.info(
        "q_denominator_bits_at_half",
        mid_den.significant_bits().to_string(),
    );
    report.info("q_denominator_small_primes", small_prime_valuations(&den));

    let Some((big, small)) = quadratic_roots(&cp, bits + GUARD_BITS) else {
        report.info(
            "growth",
            "characteristic polynomial is not quadratic; skipped",
        );
        return Ok(());
    };
    report.info("dominant_root", ctx.digits(&big));
    report.info("subdominant_root", ctx.digits(&small));

    if q.len() < MIN_GROWTH_TERMS {
        report.info(
            "growth",
            format!("needs at least {MIN_GROWTH_TERMS} terms; skipped"),
        );
        return Ok(());
    }
    // r_n shrinks like small^n, so the absolute accuracy is raised by that
    // many bits to keep `bits` significant bits at n_max
    let decay_bits = if small < 1 {
        let lg = Float::with_val(64, small.log2_ref()).abs() * cfg.n_max;
        lg.ceil().to_u32_saturating().unwrap_or(0)
    } else {
        0
    };
    report.info("remainder_absolute_bits", (bits + decay_bits).to_string());
    let l_seq = |chi: &DirichletCharacter, b: u32| ctx.l(chi, b);
    let r = telescope::remainders_from_with(&q, &p, bits + decay_bits, &l_seq)?;
    let half = q.len() / 2 + 1;
    let growth = [
        (
            "q",
            recurrence::growth_check(&q, &big, bits)?,
            recurrence::growth_check(&q[..half], &big, bits)?,
            &big,
        ),
        (
            "r",
            recurrence::growth_check_float(&r, &small, bits)?,
            recurrence::growth_check_float(&r[..half], &small, bits)?,
            &small,
        ),
    ];
    for (name, full, first_half, expected) in growth {
        let log_expected = Float::with_val(bits, expected.ln_ref());
        report.info(&format!("{name}_slope"), decimal(&full.slope, 12));
        report.info(
            &format!("{name}_slope_deviation"),
            decimal(&full.slope_deviation, 6),
        );
        report.info(
            &format!("{name}_slope_deviation_at_half"),
            decimal(&first_half.slope_deviation, 6),
        );
        if cfg.n_max < GROWTH_CHECK_FROM {
            continue;
        }
        let tol = Float::with_val(64, log_expected.abs_ref()) * GROWTH_TOLERANCE;
        report.push(&IdentityCheck::compare(
            format!("growth-{name}-slope"),
            format!("log-slope of |{name}_n| is within 1% of log|lambda|"),
            full.slope.clone(),
            log_expected,
            tol,
        ));
        let shrinks = full.slope_deviation < first_half.slope_deviation;
        report.push(
            &IdentityCheck::compare(
                format!("growth-{name}-tightens"),
                format!("slope deviation for {name} at n_max is below the one at n_max/2"),
                Float::with_val(bits, &full.slope_deviation),
                Float::with_val(bits, &first_half.slope_deviation),
                if shrinks {
                    Float::with_val(64, &first_half.slope_deviation)
                } else {
                    Float::new(64)
                },
            )
            .with_note(if shrinks {
                "deviation shrinks"
            } else {
                "deviation does not shrink"
            }),
        );
    }
    if cfg.n_max < GROWTH_CHECK_FROM {
        report.info(
            "growth",
            format!("informational below n_max = {GROWTH_CHECK_FROM}"),
        );
    }
    Ok(())
}

fn format_char_poly(cp: &[Integer]) -> String {
    let mut terms = Vec::new();
    for (k, c) in cp.iter().enumerate().rev() {
        if *c == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "lambda".into(),
            _ => format!("lambda^{k}"),
        };
        let mag = Integer::from(c.abs_ref());
        let body = if mag == 1 && k > 0 {
            mono
        } else if k == 0 {
            mag.to_string()
        } else {
            format!("{mag} {mono}")
        };
        let sign = if *c < 0 { "-" } else { "+" };
        terms.push((sign, body));
    }
    let mut out = String::new();
    for (i, (sign, body)) in terms.iter().enumerate() {
        match (i, *sign) {
            (0, "-") => out.push('-'),
            (0, _) => {}
            _ => out.push_str(&format!(" {sign} ")),
        }
        out.push_str(body);
    }
    out
}

/// `(|larger root|, |smaller root|)` of a real-rooted quadratic.
fn quadratic_roots(cp: &[Integer], wp: u32) -> Option<(Float, Float)> {
    if cp.len() != 3 {
        return None;
    }
    let (c, b, a) = (&cp[0], &cp[1], &cp[2]);
    let disc = Integer::from(b * b) - Integer::from(a * c) * 4u32;
    if disc < 0 {
        return None;
    }
    let s = Float::with_val(wp, &disc).sqrt();
    let two_a = Float::with_val(wp, a) * 2u32;
    let r1 = (-Float::with_val(wp, b) + &s) / &two_a;
    let r2 = (-Float::with_val(wp, b) - &s) / &two_a;
    let (r1, r2) = (r1.abs(), r2.abs());
    if r1 >= r2 {
        Some((r1, r2))
    } else {
        Some((r2, r1))
    }
}

fn small_prime_valuations(n: &Integer) -> String {
    let mut rest = n.clone();
    let mut parts = Vec::new();
    for p in [2u32, 3, 5, 7, 11, 13] {
        let mut v = 0;
        while rest.is_divisible_u(p) {
            rest /= p;
            v += 1;
        }
        if v > 0 {
            parts.push(format!("{p}^{v}"));
        }
    }
    if rest != 1 {
        parts.push(format!("({} more bits)", rest.significant_bits()));
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" * ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableKind {
    Gamma1,
    GammaHalf,
    All,
}

pub fn table(
    ctx: &Context,
    kind: TableKind,
    only: Option<&str>,
    printed: bool,
) -> Result<Report, UsageError> {
    let bits = ctx.cfg.bits;
    let known: Vec<&str> = trigamma::gamma1_identities()
        .iter()
        .map(|g| g.id)
        .chain(trigamma::gamma_half_identities().iter().map(|g| g.id))
        .collect();
    if let Some(id) = only {
        if !known.contains(&id) {
            return Err(UsageError(format!(
                "unknown identity {id:?}; known ids: {}",
                known.join(", ")
            )));
        }
    }
    let wanted = |id: &str| only.is_none_or(|o| id.strip_suffix("-printed").unwrap_or(id) == o);
    let mut report = Report::new("table", &ctx.cfg);
    if kind != TableKind::GammaHalf && only.is_none_or(|o| o.starts_with("g1-")) {
        match trigamma::verify_gamma1_table(bits) {
            Ok(cs) => report.push_all(cs.iter().filter(|c| wanted(&c.id))),
            Err(e) => report.push_error("gamma1-table", "C(alpha, beta, 1) identities", e),
        }
    }
    if kind != TableKind::Gamma1 && only.is_none_or(|o| o.starts_with("gh-")) {
        let form = if printed {
            ShiftForm::Printed
        } else {
            ShiftForm::Corrected
        };
        let l = |chi: &DirichletCharacter, b: u32| ctx.l(chi, b);
        match trigamma::verify_gamma_half_with(bits, form, &l) {
            Ok(cs) => report.push_all(cs.iter().filter(|c| wanted(&c.id))),
            Err(e) => report.push_error("gamma-half", "C(alpha, beta, 1/2) identities", e),
        }
    }
    if report.checks.is_empty() {
        return Err(UsageError(format!(
            "identity {:?} is not part of the selected table",
            only.unwrap_or("")
        )));
    }
    Ok(report)
}

pub fn mahler(ctx: &Context, selector: &str) -> Result<Report, UsageError> {
    let cfg = &ctx.cfg;
    let mut report = Report::new("mahler", cfg);
    let corpus = match ctx.corpus() {
        Ok(c) => c,
        Err(e) => {
            report.push_error("load-corpus", "corpus data loads and validates", e);
            return Ok(report);
        }
    };
    let entries: Vec<CorpusEntry> = if selector == "all" {
        corpus
    } else {
        let hit: Vec<_> = corpus
            .iter()
            .filter(|e| e.tag == selector)
            .cloned()
            .collect();
        if hit.is_empty() {
            let tags: Vec<_> = corpus.iter().map(|e| e.tag.as_str()).collect();
            return Err(UsageError(format!(
                "unknown polynomial {selector:?}; choose all or one of: {}",
                tags.join(", ")
            )));
        }
        hit
    };
    let l = |chi: &DirichletCharacter, b: u32| ctx.l(chi, b);
    for e in &entries {
        let description = format!(
            "m({}) = {} L'(chi_{}, -1)",
            e.display, e.multiple, e.discriminant
        );
        match mahler::verify_entry_with(e, &l, cfg.bits, cfg.nodes) {
            Ok(c) => {
                let check = IdentityCheck {
                    id: c.tag.clone(),
                    description,
                    lhs: c.measure.value.clone(),
                    rhs: c.target.clone(),
                    residual: c.residual.clone(),
                    tolerance: c.tolerance.clone(),
                    pass: c.pass,
                    note: Some(format!(
                        "{} quadrature, {} nodes, error estimate {}",
                        c.measure.method.as_str(),
                        c.measure.nodes,
                        decimal(&c.measure.error_estimate, 3)
                    )),
                };
                report.push(&check);
                add_measure_info(&mut report, &c.tag, &c.measure);
            }
            Err(err) => report.push_error(&e.tag, &description, err),
        }
    }
    Ok(report)
}

pub fn lvalue(ctx: &Context, discriminant: i64) -> Result<Report, UsageError> {
    let bits = ctx.cfg.bits;
    let chi = DirichletCharacter::new(discriminant).map_err(|e| UsageError(e.to_string()))?;
    let mut report = Report::new("lvalue", &ctx.cfg);
    let run = || -> Result<(Float, Float, Float), CharacterError> {
        let l = ctx.l(&chi, bits)?;
        let finer = computed_l(&chi, bits + 64)?;
        let provider = |c: &DirichletCharacter, b: u32| ctx.l(c, b);
        let lp = l_prime_minus_one_with(&chi, bits, &provider)?;
        Ok((l, finer, lp))
    };
    match run() {
        Ok((l, finer, lp)) => {
            report.push(&IdentityCheck::compare(
                "precision-agreement",
                format!("L({chi}, 2) at P and P + 64 bits agree"),
                l.clone(),
                finer,
                check_tolerance(bits),
            ));
            if discriminant == -4 {
                let catalan = Float::with_val(bits + GUARD_BITS, Constant::Catalan);
                report.push(&IdentityCheck::compare(
                    "catalan",
                    "L(chi_-4, 2) = Catalan's constant",
                    l.clone(),
                    catalan,
                    check_tolerance(bits),
                ));
            }
            report.info("character", chi.to_string());
            report.info("period", chi.period().to_string());
            report.info("l_value_s2", ctx.digits(&l));
            report.info("l_prime_minus_one", ctx.digits(&lp));
        }
        Err(e) => report.push_error("lvalue", &format!("L({chi}, 2)"), e),
    }
    Ok(report)
}

pub fn trigamma_cmd(ctx: &Context, x: &str) -> Result<Report, UsageError> {
    let bits = ctx.cfg.bits;
    let x = parse_rational(x).map_err(|e| UsageError(e.to_string()))?;
    if x <= 0 {
        return Err(UsageError(format!(
            "trigamma needs a positive argument, got {x}"
        )));
    }
    let mut report = Report::new("trigamma", &ctx.cfg);
    let tol = check_tolerance(bits);
    let run = |report: &mut Report| -> Result<(), trigamma::TrigammaError> {
        let v = trigamma::trigamma(&x, bits)?;
        let next = trigamma::trigamma(&Rational::from(&x + 1u32), bits)?;
        let wp = bits + GUARD_BITS;
        let inv_sq = Float::with_val(wp, Rational::from(x.square_ref()).recip());
        report.push(&IdentityCheck::compare(
            "shift",
            format!("psi1({x}) - psi1({x} + 1) = 1/({x})^2"),
            Float::with_val(wp, &v - &next),
            inv_sq,
            tol.clone(),
        ));
        let finer = trigamma::trigamma(&x, bits + 64)?;
        report.push(&IdentityCheck::compare(
            "precision-agreement",
            format!("psi1({x}) at P and P + 64 bits agree"),
            v.clone(),
            finer,
            tol.clone(),
        ));
        if x < 1 {
            let other = trigamma::trigamma(&Rational::from(1u32 - &x), bits)?;
            report.push(&IdentityCheck::compare(
                "reflection",
                format!("psi1({x}) + psi1(1 - {x}) = pi^2 / sin^2(pi {x})"),
                Float::with_val(wp, &v + &other),
                trigamma::reflection_value(&x, wp + 16),
                tol.clone(),
            ));
        }
        report.info("x", x.to_string());
        report.info("trigamma", to_decimal(&v, decimal_digits(bits)));
        report.info("pi^2/6", to_decimal(&(pi(wp).square() / 6u32), 20));
        Ok(())
    };
    if let Err(e) = run(&mut report) {
        report.push_error("trigamma", &format!("psi1({x})"), e);
    }
    Ok(report)
}

pub fn telescope_cmd(ctx: &Context, upto: u32) -> Report {
    let cfg = &ctx.cfg;
    let mut report = Report::new("telescope", cfg);
    let data = match ctx.recurrence() {
        Ok(d) => d,
        Err(e) => {
            report.push_error("load-recurrence", "recurrence data loads and validates", e);
            return report;
        }
    };
    let l = |chi: &DirichletCharacter, b: u32| ctx.l(chi, b);
    let scale = Rational::from((1, 512));
    match telescope::verify_with(&data, &l, scale, upto, cfg.bits, cfg.budget) {
        Ok(t) => {
            report.push(&IdentityCheck::compare(
                "recurrence-residuals",
                "q_n and p_n satisfy the recurrence exactly",
                Float::with_val(cfg.bits, if t.recurrence_residuals_zero { 0 } else { 1 }),
                Float::new(cfg.bits),
                Float::new(64),
            ));
            for row in &t.rows {
                let check = IdentityCheck {
                    id: format!("telescope-n{}", row.n),
                    description: format!(
                        "sum_nu R'_{}(nu) over nu <= {} matches q_{} L - p_{}",
                        row.n,
                        row.n as u64 + cfg.budget,
                        row.n,
                        row.n
                    ),
                    lhs: row.remainder.clone(),
                    rhs: row.expected.clone(),
                    residual: row.residual.clone(),
                    tolerance: row.tolerance.clone(),
                    pass: row.pass,
                    note: Some(format!("tail bound {}", decimal(&row.tail_bound, 3))),
                };
                report.push(&check);
            }
            if let Some(n) = t.first_failure {
                report.info("first_failure", n.to_string());
            }
        }
        Err(e) => report.push_error("telescope", "telescoped remainder identity", e),
    }
    report
}
