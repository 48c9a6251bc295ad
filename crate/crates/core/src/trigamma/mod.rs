//! Trigamma at rational arguments and the four-term combination
//! `C(a, b, g) = psi1(1-a) - psi1(1-b) + psi1(1+a-g) - psi1(1+b-g)`.
//!
//! `psi1(x)` is evaluated by shifting `x` upward with the recurrence
//! `psi1(x) = psi1(x+1) + 1/x^2` until `x + m >= ceil(0.35 P)`, then summing the
//! asymptotic series `1/z + 1/(2z^2) + sum_k B_2k / z^(2k+1)`. On the positive
//! real axis that series is enveloping, so the first omitted term bounds the
//! truncation error; summation stops once that term is below `2^(-P-32)`.

mod bernoulli;
mod tables;

use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::mpnum::{pi, pow2, with_abs_precision, GUARD_BITS};

pub use bernoulli::bernoulli;
pub use tables::{
    gamma1_identities, gamma_half_identities, verify_gamma1_table, verify_gamma_half,
    verify_gamma_half_with, Gamma1Identity, GammaHalfIdentity, ShiftForm,
};

#[derive(Debug, Error)]
pub enum TrigammaError {
    #[error("trigamma argument must be positive, got {0}")]
    NonPositiveArgument(Rational),
    #[error("parameters are not admissible: {0}")]
    Inadmissible(String),
    #[error("precision must be at least 64 bits, got {0}")]
    PrecisionTooLow(u32),
    #[error("asymptotic series failed to reach the requested accuracy")]
    NoConvergence,
}

/// Admissible parameter triple for `C(a, b, g)`.
///
/// Requires `a != b`, `a + b != g`, and all four trigamma arguments
/// `1-a, 1-b, 1+a-g, 1+b-g` strictly positive. Negative `a` is allowed as long
/// as those arguments stay positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CParams {
    alpha: Rational,
    beta: Rational,
    gamma: Rational,
}

impl CParams {
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational) -> Result<Self, TrigammaError> {
        if alpha == beta {
            return Err(TrigammaError::Inadmissible(format!(
                "alpha = beta = {alpha}"
            )));
        }
        if Rational::from(&alpha + &beta) == gamma {
            return Err(TrigammaError::Inadmissible(format!(
                "alpha + beta = gamma = {gamma}"
            )));
        }
        let p = CParams { alpha, beta, gamma };
        for arg in p.arguments() {
            if arg <= 0 {
                return Err(TrigammaError::Inadmissible(format!(
                    "trigamma argument {arg} is not positive"
                )));
            }
        }
        Ok(p)
    }

    pub fn from_pairs(a: (i64, i64), b: (i64, i64), g: (i64, i64)) -> Result<Self, TrigammaError> {
        Self::new(Rational::from(a), Rational::from(b), Rational::from(g))
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// `[1-a, 1-b, 1+a-g, 1+b-g]`, entering `C` with signs `+ - + -`.
    pub fn arguments(&self) -> [Rational; 4] {
        let one = Rational::from(1);
        [
            Rational::from(&one - &self.alpha),
            Rational::from(&one - &self.beta),
            Rational::from(&one + &self.alpha) - &self.gamma,
            Rational::from(&one + &self.beta) - &self.gamma,
        ]
    }
}

/// Bits of `floor(log2(v))` for a positive rational, clamped at zero.
fn log2_ceil(v: &Rational) -> u32 {
    let n = v.numer().significant_bits() as i64;
    let d = v.denom().significant_bits() as i64;
    (n - d + 1).max(0) as u32
}

/// `psi1(x)` for rational `x > 0`, absolute error at most `2^-bits`.
pub fn trigamma(x: &Rational, bits: u32) -> Result<Float, TrigammaError> {
    if *x <= 0 {
        return Err(TrigammaError::NonPositiveArgument(x.clone()));
    }
    if bits < 64 {
        return Err(TrigammaError::PrecisionTooLow(bits));
    }
    // psi1(x) ~ 1/x^2 for small x; widen so the absolute target still holds
    let magnitude = 2 * log2_ceil(&Rational::from(x.recip_ref()));
    let wp = bits + GUARD_BITS + magnitude + 8;
    let mut threshold = (0.35 * bits as f64).ceil() as u64;
    for _ in 0..4 {
        if let Some(v) = trigamma_shifted(x, bits, wp, threshold) {
            return Ok(with_abs_precision(&v, bits));
        }
        threshold *= 2;
    }
    Err(TrigammaError::NoConvergence)
}

fn trigamma_shifted(x: &Rational, bits: u32, wp: u32, threshold: u64) -> Option<Float> {
    let num = x.numer();
    let den = x.denom();
    // number of unit shifts so that x + m >= threshold
    let floor_x = Integer::from(num / den);
    let m = if floor_x >= threshold {
        0u64
    } else {
        threshold - floor_x.to_u64().unwrap_or(0)
    };

    // sum_{k<m} 1/(x+k)^2 = sum den^2 / (num + k den)^2
    let den_sq = Float::with_val(wp, Integer::from(den.square_ref()));
    let mut shift_sum = Float::new(wp);
    let mut t = num.clone();
    for _ in 0..m {
        let sq = Float::with_val(wp, Integer::from(t.square_ref()));
        shift_sum += Float::with_val(wp, &den_sq / &sq);
        t += den;
    }

    let z = Float::with_val(wp, x + Rational::from(m));
    let zinv = Float::with_val(wp, z.recip_ref());
    let zinv2 = Float::with_val(wp, zinv.square_ref());
    let eps = pow2(-(bits as i32) - GUARD_BITS as i32, 64);

    let mut acc = Float::with_val(wp, &zinv) + Float::with_val(wp, &zinv2) / 2u32;
    let mut power = Float::with_val(wp, &zinv * &zinv2); // z^-(2k+1), k = 1
    let mut prev_mag: Option<Float> = None;
    let mut k = 1usize;
    loop {
        let b = bernoulli(2 * k);
        let term = Float::with_val(wp, &b * &power);
        let mag = Float::with_val(64, term.abs_ref());
        if mag < eps {
            break;
        }
        if let Some(prev) = &prev_mag {
            if mag >= *prev {
                // the series started diverging before reaching the target
                return None;
            }
        }
        acc += &term;
        prev_mag = Some(mag);
        power *= &zinv2;
        k += 1;
    }
    Some(acc + shift_sum)
}

/// `C(a, b, g)` with absolute error at most `2^-bits`.
pub fn c_value(params: &CParams, bits: u32) -> Result<Float, TrigammaError> {
    let inner = bits + 4;
    let [a1, a2, a3, a4] = params.arguments();
    let t1 = trigamma(&a1, inner)?;
    let t2 = trigamma(&a2, inner)?;
    let t3 = trigamma(&a3, inner)?;
    let t4 = trigamma(&a4, inner)?;
    let wp = [&t1, &t2, &t3, &t4]
        .iter()
        .map(|t| t.prec())
        .max()
        .unwrap_or(inner)
        + 4;
    let v = Float::with_val(wp, &t1 - &t2) + Float::with_val(wp, &t3 - &t4);
    Ok(with_abs_precision(&v, bits))
}

/// `pi^2 / sin^2(pi r)` at `wp` bits (the reflection value `psi1(r) + psi1(1-r)`).
pub fn reflection_value(r: &Rational, wp: u32) -> Float {
    let p = pi(wp);
    let s = Float::with_val(wp, &p * r).sin();
    Float::with_val(wp, p.square_ref()) / Float::with_val(wp, s.square_ref())
}

/// Closed form `C(a, b, 1) = pi^2 (1/sin^2(pi a) - 1/sin^2(pi b))`.
pub fn c_gamma1_closed_form(
    alpha: &Rational,
    beta: &Rational,
    bits: u32,
) -> Result<Float, TrigammaError> {
    if bits < 64 {
        return Err(TrigammaError::PrecisionTooLow(bits));
    }
    for v in [alpha, beta] {
        if *v <= 0 || *v >= 1 {
            return Err(TrigammaError::Inadmissible(format!(
                "closed form needs 0 < alpha, beta < 1, got {v}"
            )));
        }
    }
    if alpha == beta {
        return Err(TrigammaError::Inadmissible(format!(
            "alpha = beta = {alpha}"
        )));
    }
    let extra = 2
        * (log2_ceil(&Rational::from(alpha.recip_ref()))
            + log2_ceil(&Rational::from(beta.recip_ref())));
    let wp = bits + GUARD_BITS + extra + 8;
    let v = reflection_value(alpha, wp) - reflection_value(beta, wp);
    Ok(with_abs_precision(&v, bits))
}
