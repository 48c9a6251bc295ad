//! Linear recurrences with polynomial coefficients, iterated in exact
//! rational arithmetic.
//!
//! A recurrence of order `d` is `sum_{i=0}^{d} a_i(n) r(n-1+i) = 0` for
//! `n >= n_start`. The initial values are `r(n_start-1), ..., r(n_start+d-2)`
//! and sequences are returned starting at index `n_start - 1`.

mod data;

use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::mpnum::{with_abs_precision, RatPoly, GUARD_BITS};

pub use data::{
    check_degree, expanded_checksum, load_recurrence, load_recurrence_file, main_theorem,
    main_theorem_from, shipped_source, RecurrenceData, ABC_CONVENTION, GENERIC_CONVENTION,
    SHIPPED_DEGREE,
};

#[derive(Debug, Error)]
pub enum RecurrenceError {
    #[error("recurrence data: {0}")]
    Data(String),
    #[error("factored and expanded forms of block {0} disagree")]
    FactoredMismatch(String),
    #[error("checksum mismatch: file says {expected}, coefficients hash to {found}")]
    Checksum { expected: String, found: String },
    #[error("coefficient a_{index} has degree {found}, expected {expected}")]
    Degree {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("a_0 and a_d must be nonzero polynomials")]
    DegenerateCoefficients,
    #[error("leading coefficient vanishes at n = {0}")]
    VanishingLeading(i64),
    #[error("q_n = 0 at n = {0}")]
    ZeroDenominator(i64),
    #[error("expected {expected} initial values, got {found}")]
    InitLength { expected: usize, found: usize },
    #[error("nonzero residual at n = {0}")]
    Residual(i64),
    #[error("coefficients have unequal degrees; no characteristic polynomial")]
    UnequalDegrees,
    #[error("sequence needs at least {needed} terms, got {found}")]
    TooShort { needed: usize, found: usize },
    #[error("sequence entry at offset {0} is zero")]
    ZeroEntry(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Recurrence {
    name: String,
    coeffs: Vec<RatPoly>,
    n_start: i64,
}

impl Recurrence {
    /// `coeffs = [a_0, ..., a_d]`.
    pub fn new(coeffs: Vec<RatPoly>, n_start: i64) -> Result<Self, RecurrenceError> {
        if coeffs.len() < 2 {
            return Err(RecurrenceError::Data("order must be at least 1".into()));
        }
        if coeffs[0].is_zero() || coeffs[coeffs.len() - 1].is_zero() {
            return Err(RecurrenceError::DegenerateCoefficients);
        }
        for c in &coeffs {
            if c.coeffs().iter().any(|x| *x.denom() != 1) {
                return Err(RecurrenceError::Data(
                    "coefficients must be integral".into(),
                ));
            }
        }
        Ok(Recurrence {
            name: String::new(),
            coeffs,
            n_start,
        })
    }

    /// `A(n) r(n+1) - B(n) r(n) - C(n) r(n-1) = 0`.
    pub fn second_order(
        a: RatPoly,
        b: RatPoly,
        c: RatPoly,
        n_start: i64,
    ) -> Result<Self, RecurrenceError> {
        Self::new(vec![c.neg(), b.neg(), a], n_start)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn n_start(&self) -> i64 {
        self.n_start
    }

    /// `[a_0, ..., a_d]`.
    pub fn coefficients(&self) -> &[RatPoly] {
        &self.coeffs
    }

    fn leading(&self) -> &RatPoly {
        &self.coeffs[self.order()]
    }

    /// Confirms `a_d(n) != 0` for every integer `n >= n_start`, by scanning up
    /// to the Cauchy bound on the roots of `a_d`.
    pub fn check_leading_nonvanishing(&self) -> Result<(), RecurrenceError> {
        let lead = self.leading();
        let coeffs = lead.coeffs();
        let top = Rational::from(coeffs[coeffs.len() - 1].abs_ref());
        let mut bound = Rational::new();
        for c in &coeffs[..coeffs.len() - 1] {
            let r = Rational::from(c.abs_ref()) / &top;
            if r > bound {
                bound = r;
            }
        }
        // integer roots satisfy |n| <= 1 + max |c_i / c_d|
        let limit = (Integer::from(bound.numer() / bound.denom()) + 2u32)
            .to_i64()
            .unwrap_or(i64::MAX)
            .min(1_000_000);
        for n in self.n_start..=limit.max(self.n_start) {
            if lead.eval(&Rational::from(n)) == 0 {
                return Err(RecurrenceError::VanishingLeading(n));
            }
        }
        Ok(())
    }

    /// `sum_i a_i(n) r(n-1+i)` for every `n` whose window lies inside `seq`,
    /// where `seq[k] = r(n_start - 1 + k)`.
    pub fn residuals(&self, seq: &[Rational]) -> Vec<Rational> {
        let d = self.order();
        (0..(seq.len() + 1).saturating_sub(d + 1))
            .map(|k| self.residual_at(self.n_start + k as i64, &seq[k..k + d + 1]))
            .collect()
    }

    fn residual_at(&self, n: i64, window: &[Rational]) -> Rational {
        let nr = Rational::from(n);
        let mut acc = Rational::new();
        for (a, r) in self.coeffs.iter().zip(window) {
            acc += a.eval(&nr) * r;
        }
        acc
    }

    /// `sum_i lead(a_i) lambda^i`, divided by its content and made to have a
    /// positive leading coefficient. Constant term first.
    pub fn characteristic_polynomial(&self) -> Result<Vec<Integer>, RecurrenceError> {
        let degree = self.leading().degree();
        if self.coeffs.iter().any(|a| a.degree() != degree) {
            return Err(RecurrenceError::UnequalDegrees);
        }
        let mut lead: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|a| a.leading().expect("nonzero").numer().clone())
            .collect();
        let content = lead.iter().fold(Integer::new(), |g, c| g.gcd(c));
        let sign = if lead[lead.len() - 1] < 0 { -1 } else { 1 };
        for c in &mut lead {
            *c /= &content;
            *c *= sign;
        }
        Ok(lead)
    }
}

/// Iterates the recurrence from `init` up to index `n_max`.
///
/// Entry `k` of the result is `r(n_start - 1 + k)`. Every computed term is
/// substituted back into the recurrence and the residual is required to be
/// exactly zero.
pub fn iterate(
    rec: &Recurrence,
    init: &[Rational],
    n_max: i64,
) -> Result<Vec<Rational>, RecurrenceError> {
    let d = rec.order();
    if init.len() != d {
        return Err(RecurrenceError::InitLength {
            expected: d,
            found: init.len(),
        });
    }
    let first = rec.n_start - 1;
    let mut seq: Vec<Rational> = init.to_vec();
    let mut n = rec.n_start;
    while first + (seq.len() as i64) <= n_max {
        let nr = Rational::from(n);
        let lead = rec.leading().eval(&nr);
        if lead == 0 {
            return Err(RecurrenceError::VanishingLeading(n));
        }
        let base = (n - rec.n_start) as usize;
        let mut acc = Rational::new();
        for i in 0..d {
            acc += rec.coeffs[i].eval(&nr) * &seq[base + i];
        }
        let next = -acc / lead;
        seq.push(next);
        if rec.residual_at(n, &seq[base..base + d + 1]) != 0 {
            return Err(RecurrenceError::Residual(n));
        }
        n += 1;
    }
    Ok(seq)
}

/// One rational approximation `p_n / q_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationState {
    pub n: i64,
    pub q: Rational,
    pub p: Rational,
}

/// Iterates `q` and `p` as separate exact sequences and pairs them up.
pub fn approximations(
    rec: &Recurrence,
    q_init: &[Rational],
    p_init: &[Rational],
    n_max: i64,
) -> Result<Vec<ApproximationState>, RecurrenceError> {
    let q = iterate(rec, q_init, n_max)?;
    let p = iterate(rec, p_init, n_max)?;
    let first = rec.n_start - 1;
    q.into_iter()
        .zip(p)
        .enumerate()
        .map(|(k, (q, p))| {
            let n = first + k as i64;
            if q == 0 {
                Err(RecurrenceError::ZeroDenominator(n))
            } else {
                Ok(ApproximationState { n, q, p })
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct AperyLimit {
    /// `p_{n_max} / q_{n_max}`.
    pub value: Float,
    /// `|p_{n_max}/q_{n_max} - p_{n_max-1}/q_{n_max-1}|`.
    pub error_estimate: Float,
    pub n_max: i64,
    pub precision: u32,
    /// The exact final quotient.
    pub quotient: Rational,
}

/// Estimates `lim p_n / q_n` from the last two quotients.
pub fn apery_limit(
    rec: &Recurrence,
    q_init: &[Rational],
    p_init: &[Rational],
    n_max: i64,
    bits: u32,
) -> Result<AperyLimit, RecurrenceError> {
    if n_max < rec.n_start {
        return Err(RecurrenceError::Data(format!(
            "n_max = {n_max} is below the first computed index {}",
            rec.n_start
        )));
    }
    let states = approximations(rec, q_init, p_init, n_max)?;
    let last = &states[states.len() - 1];
    let prev = &states[states.len() - 2];
    let quotient = Rational::from(&last.p / &last.q);
    let prev_quotient = Rational::from(&prev.p / &prev.q);
    let diff = Rational::from(&quotient - &prev_quotient).abs();
    let wp = bits + GUARD_BITS;
    Ok(AperyLimit {
        value: with_abs_precision(&Float::with_val(wp, &quotient), bits),
        error_estimate: Float::with_val(64, &diff),
        n_max,
        precision: bits,
        quotient,
    })
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub last_index: usize,
    /// `|s_n|^(1/n)` at the last index.
    pub nth_root: Float,
    /// `|nth_root - expected| / expected`.
    pub nth_root_deviation: Float,
    /// Least-squares slope of `log|s_n|` against `n` over the last half.
    pub slope: Float,
    /// `|slope - log expected|`, relative to `|log expected|` when that is nonzero.
    pub slope_deviation: Float,
}

/// Compares the growth of `seq` (entry `k` is `s_k`) with `expected^n`.
pub fn growth_check(
    seq: &[Rational],
    expected: &Float,
    bits: u32,
) -> Result<GrowthReport, RecurrenceError> {
    let wp = bits + GUARD_BITS;
    check_growth_input(seq.len(), seq.iter().position(|s| *s == 0))?;
    let logs = seq
        .iter()
        .map(|s| Float::with_val(wp, Rational::from(s.abs_ref())).ln())
        .collect();
    Ok(growth_from_logs(logs, expected, wp))
}

/// [`growth_check`] for sequences that are only known numerically, such as
/// the remainders `q_n L - p_n`.
pub fn growth_check_float(
    seq: &[Float],
    expected: &Float,
    bits: u32,
) -> Result<GrowthReport, RecurrenceError> {
    let wp = bits + GUARD_BITS;
    check_growth_input(seq.len(), seq.iter().position(|s| s.is_zero()))?;
    let logs = seq
        .iter()
        .map(|s| Float::with_val(wp, s.abs_ref()).ln())
        .collect();
    Ok(growth_from_logs(logs, expected, wp))
}

fn check_growth_input(len: usize, zero_at: Option<usize>) -> Result<(), RecurrenceError> {
    const MIN_LEN: usize = 10;
    if len < MIN_LEN {
        return Err(RecurrenceError::TooShort {
            needed: MIN_LEN,
            found: len,
        });
    }
    match zero_at {
        Some(k) => Err(RecurrenceError::ZeroEntry(k)),
        None => Ok(()),
    }
}

fn growth_from_logs(logs: Vec<Float>, expected: &Float, wp: u32) -> GrowthReport {
    let last = logs.len() - 1;
    let nth_root = Float::with_val(wp, &logs[last] / last as u32).exp();
    let expected = Float::with_val(wp, expected);
    let nth_root_deviation = Float::with_val(wp, &nth_root - &expected).abs() / &expected;

    let start = logs.len() / 2;
    let m = (logs.len() - start) as u32;
    let mut sx = Float::new(wp);
    let mut sy = Float::new(wp);
    let mut sxx = Float::new(wp);
    let mut sxy = Float::new(wp);
    for (k, y) in logs.iter().enumerate().skip(start) {
        let x = Float::with_val(wp, k as u64);
        sxx += Float::with_val(wp, x.square_ref());
        sxy += Float::with_val(wp, &x * y);
        sx += &x;
        sy += y;
    }
    let num = Float::with_val(wp, &sxy * m) - Float::with_val(wp, &sx * &sy);
    let den = Float::with_val(wp, &sxx * m) - Float::with_val(wp, sx.square_ref());
    let slope = num / den;
    let log_expected = expected.ln();
    let mut slope_deviation = Float::with_val(wp, &slope - &log_expected).abs();
    if !log_expected.is_zero() {
        slope_deviation /= log_expected.abs();
    }
    GrowthReport {
        last_index: last,
        nth_root,
        nth_root_deviation,
        slope,
        slope_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{l_value_s2, DirichletCharacter};
    use proptest::prelude::*;

    fn fib() -> Recurrence {
        let one = RatPoly::from_integers(&[1]);
        Recurrence::second_order(one.clone(), one.clone(), one, 1).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn fibonacci_values_and_limit() {
        let seq = iterate(&fib(), &ints(&[1, 1]), 10).unwrap();
        assert_eq!(seq.len(), 11);
        assert_eq!(seq[10], 89);
        let lim = apery_limit(&fib(), &ints(&[1, 1]), &ints(&[0, 1]), 80, 128).unwrap();
        let golden = (Float::with_val(160, 5).sqrt() - 1u32) / 2u32;
        let gap = Float::with_val(128, &lim.value - &golden).abs();
        assert!(gap <= lim.error_estimate);
        assert!(gap < 1e-30);
    }

    #[test]
    fn residuals_flag_a_corrupted_term() {
        let mut seq = iterate(&fib(), &ints(&[1, 1]), 12).unwrap();
        let r = fib().residuals(&seq);
        assert_eq!(r.len(), seq.len() - 2);
        assert!(r.iter().all(|x| *x == 0));
        seq[7] += 1;
        let bad: Vec<usize> = fib()
            .residuals(&seq)
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0)
            .map(|(k, _)| k)
            .collect();
        assert_eq!(bad, vec![5, 6, 7]);
    }

    #[test]
    fn fibonacci_char_poly() {
        let cp = fib().characteristic_polynomial().unwrap();
        assert_eq!(
            cp,
            vec![Integer::from(-1), Integer::from(-1), Integer::from(1)]
        );
    }

    #[test]
    fn shipped_file_loads() {
        let data = main_theorem().unwrap();
        let rec = &data.recurrence;
        assert_eq!(rec.order(), 2);
        assert!(rec.coefficients().iter().all(|a| a.degree() == Some(21)));
        let cp = rec.characteristic_polynomial().unwrap();
        assert_eq!(
            cp,
            vec![Integer::from(-27), Integer::from(-270), Integer::from(1)]
        );
        // C(n) carries n^3, so a_0(0) = 0
        assert_eq!(rec.coefficients()[0].eval(&Rational::new()), 0);
    }

    #[test]
    fn a_contains_squared_factors() {
        let data = main_theorem().unwrap();
        let a = &data.recurrence.coefficients()[2];
        let mut f = RatPoly::from_integers(&[1]);
        for c in [3, 5, 7, 9] {
            f = f.mul(&RatPoly::from_integers(&[c, 8]).pow(2));
        }
        let (_, rem) = a.div_rem(&f).unwrap();
        assert!(rem.is_zero());
    }

    #[test]
    fn shipped_q2_matches_independent_value() {
        let data = main_theorem().unwrap();
        let q = iterate(&data.recurrence, data.initial("q").unwrap(), 3).unwrap();
        assert_eq!(q[2], Rational::from((69108673, 129024)));
        let p = iterate(&data.recurrence, data.initial("p").unwrap(), 2).unwrap();
        let p2: Rational = "43148406860368123261/75659162048870400".parse().unwrap();
        assert_eq!(p[2], p2);
    }

    #[test]
    fn shipped_limit_is_l_chi_minus_8() {
        let data = main_theorem().unwrap();
        let lim = apery_limit(
            &data.recurrence,
            data.initial("q").unwrap(),
            data.initial("p").unwrap(),
            50,
            256,
        )
        .unwrap();
        let l = l_value_s2(&DirichletCharacter::chi_minus_8(), 256)
            .unwrap()
            .value;
        let gap = Float::with_val(256, &lim.value - &l).abs();
        assert!(gap <= lim.error_estimate);
    }

    #[test]
    fn error_ratio_matches_dominant_root_quotient() {
        let data = main_theorem().unwrap();
        let (q0, p0) = (data.initial("q").unwrap(), data.initial("p").unwrap());
        let e50 = apery_limit(&data.recurrence, q0, p0, 50, 256)
            .unwrap()
            .error_estimate;
        let e49 = apery_limit(&data.recurrence, q0, p0, 49, 256)
            .unwrap()
            .error_estimate;
        let ratio = Float::with_val(64, &e50 / &e49).to_f64();
        let s3 = 3f64.sqrt();
        let expected = (78.0 * s3 - 135.0) / (78.0 * s3 + 135.0);
        assert!(
            (ratio / expected - 1.0).abs() < 0.1,
            "ratio {ratio} expected {expected}"
        );
    }

    #[test]
    fn later_estimate_within_earlier_error() {
        let data = main_theorem().unwrap();
        let (q0, p0) = (data.initial("q").unwrap(), data.initial("p").unwrap());
        for n in [10i64, 20, 30] {
            let a = apery_limit(&data.recurrence, q0, p0, n, 256).unwrap();
            let b = apery_limit(&data.recurrence, q0, p0, n + 5, 256).unwrap();
            let gap = Float::with_val(256, &a.value - &b.value).abs();
            assert!(gap < a.error_estimate, "n={n}");
        }
    }

    #[test]
    fn corrupted_files_rejected() {
        let text = shipped_source();
        // flip one digit of an expanded coefficient
        let bad = text.replacen("776998726875", "776998726876", 1);
        assert!(matches!(
            load_recurrence(&bad),
            Err(RecurrenceError::FactoredMismatch(_))
        ));
        let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
        v["checksum"] = serde_json::Value::String("sha256:00".into());
        assert!(matches!(
            load_recurrence(&v.to_string()),
            Err(RecurrenceError::Checksum { .. })
        ));
        let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
        v["char_poly"] = serde_json::json!(["-27", "-271", "1"]);
        assert!(load_recurrence(&v.to_string()).is_err());
        assert!(load_recurrence("{not json").is_err());
    }

    #[test]
    fn degree_guard() {
        let rec = fib();
        assert!(matches!(
            check_degree(&rec, 21),
            Err(RecurrenceError::Degree { found: 0, .. })
        ));
    }

    #[test]
    fn vanishing_leading_detected() {
        // (n - 3) r(n+1) = r(n) + r(n-1)
        let rec = Recurrence::second_order(
            RatPoly::from_integers(&[-3, 1]),
            RatPoly::from_integers(&[1]),
            RatPoly::from_integers(&[1]),
            1,
        )
        .unwrap();
        assert!(matches!(
            rec.check_leading_nonvanishing(),
            Err(RecurrenceError::VanishingLeading(3))
        ));
        assert!(matches!(
            iterate(&rec, &ints(&[1, 1]), 10),
            Err(RecurrenceError::VanishingLeading(3))
        ));
    }

    #[test]
    fn generic_order_three() {
        // tribonacci through the generic convention
        let text = format!(
            r#"{{"order": 3, "convention": "{GENERIC_CONVENTION}", "n_start": 1,
                "expanded": {{"a0": ["-1"], "a1": ["-1"], "a2": ["-1"], "a3": ["1"]}},
                "initial_values": {{"t": ["0", "0", "1"]}}}}"#
        );
        let data = load_recurrence(&text).unwrap();
        let seq = iterate(&data.recurrence, data.initial("t").unwrap(), 10).unwrap();
        assert_eq!(seq[10], 81);
    }

    #[test]
    fn growth_trivial_cases() {
        let ones = vec![Rational::from(1); 20];
        let r = growth_check(&ones, &Float::with_val(64, 1), 128).unwrap();
        assert!(r.slope_deviation.is_zero());
        assert!(r.nth_root_deviation.is_zero());
        let geo: Vec<Rational> = (0..30)
            .map(|k| Rational::from(Integer::from(Integer::u_pow_u(3, k))))
            .collect();
        let r = growth_check(&geo, &Float::with_val(64, 3), 128).unwrap();
        assert!(r.slope_deviation < Float::with_val(64, Float::i_exp(1, -96)));
        assert!(growth_check(&ones[..5], &Float::with_val(64, 1), 128).is_err());
        let mut z = ones.clone();
        z[4] = Rational::new();
        assert!(matches!(
            growth_check(&z, &Float::with_val(64, 1), 128),
            Err(RecurrenceError::ZeroEntry(4))
        ));
    }

    #[test]
    fn q_growth_tightens_with_n() {
        let data = main_theorem().unwrap();
        let q = iterate(&data.recurrence, data.initial("q").unwrap(), 120).unwrap();
        let lambda = Float::with_val(128, 3).sqrt() * 78u32 + 135u32;
        let half = growth_check(&q[..61], &lambda, 128).unwrap();
        let full = growth_check(&q, &lambda, 128).unwrap();
        assert!(full.slope_deviation < half.slope_deviation);
        assert!(full.slope_deviation < 0.02);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn iteration_is_linear(u0 in -50i64..50, u1 in -50i64..50, v0 in -50i64..50, v1 in -50i64..50) {
            let data = main_theorem().unwrap();
            let rec = &data.recurrence;
            let u = iterate(rec, &ints(&[u0, u1]), 12).unwrap();
            let v = iterate(rec, &ints(&[v0, v1]), 12).unwrap();
            let w = iterate(rec, &ints(&[u0 + v0, u1 + v1]), 12).unwrap();
            for k in 0..u.len() {
                prop_assert_eq!(Rational::from(&u[k] + &v[k]), w[k].clone());
            }
        }
    }
}
