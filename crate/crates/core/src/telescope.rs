//! The remainder series `r_n = sum_{nu >= 1} R_n'(nu)` for the rational kernel
//!
//! ```text
//! R_n(t) = scale (-1)^(n+1) (2t+n-g) prod_{j=1}^{n} (t-j)^2 (t+n+j-g)^2
//!          / prod_{l=0}^{n} (t+l-a)(t+l-b)(t+l+a-g)(t+l+b-g)
//! ```
//!
//! and its comparison with `q_n L - p_n` built from the recurrence.

use rayon::prelude::*;
use rug::{Float, Rational};
use thiserror::Error;

use crate::characters::{computed_l, CharacterError, DirichletCharacter, LProvider};
use crate::mpnum::{pow2, GUARD_BITS};
use crate::recurrence::{self, RecurrenceData, RecurrenceError};
use crate::trigamma::{CParams, TrigammaError};

#[derive(Debug, Error)]
pub enum TelescopeError {
    #[error("kernel scale must be nonzero")]
    ZeroScale,
    #[error("denominator factor vanishes at t = {0}")]
    Pole(u64),
    #[error("budget {budget} is below n + 10 = {needed}")]
    BudgetTooSmall { budget: u64, needed: u64 },
    #[error("nu must be at least 1")]
    NuZero,
    #[error(transparent)]
    Trigamma(#[from] TrigammaError),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}

#[derive(Clone, Debug)]
pub struct HypergeometricKernel {
    params: CParams,
    scale: Rational,
    n: u32,
}

/// Linear factors `t + c` with multiplicities, split into numerator and
/// denominator.
struct Factors {
    num: Vec<(Rational, u32)>,
    den: Vec<Rational>,
    // the simple numerator factor is 2t + n - g = 2 (t + (n-g)/2)
    lead_factor: Rational,
}

impl HypergeometricKernel {
    pub fn new(params: CParams, scale: Rational, n: u32) -> Result<Self, TelescopeError> {
        if scale == 0 {
            return Err(TelescopeError::ZeroScale);
        }
        Ok(HypergeometricKernel { params, scale, n })
    }

    /// `a = -1/8, b = 1/8, g = 1/2`, scale `2^-9`.
    pub fn main_theorem(n: u32) -> Self {
        let params = CParams::from_pairs((-1, 8), (1, 8), (1, 2)).expect("admissible");
        Self::new(params, Rational::from((1, 512)), n).expect("nonzero scale")
    }

    /// `a = -1/12, b = 1/12, g = 1/2`, scale `1/1920`, for which `r_0 = C/160`.
    pub fn catalan(n: u32) -> Self {
        let params = CParams::from_pairs((-1, 12), (1, 12), (1, 2)).expect("admissible");
        Self::new(params, Rational::from((1, 1920)), n).expect("nonzero scale")
    }

    pub fn with_n(&self, n: u32) -> Self {
        HypergeometricKernel { n, ..self.clone() }
    }

    pub fn with_scale(&self, scale: Rational) -> Result<Self, TelescopeError> {
        Self::new(self.params.clone(), scale, self.n)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn params(&self) -> &CParams {
        &self.params
    }

    fn factors(&self) -> Factors {
        let n = self.n as i64;
        let (a, b, g) = (self.params.alpha(), self.params.beta(), self.params.gamma());
        let mut num = Vec::with_capacity(2 * self.n as usize);
        for j in 1..=n {
            num.push((Rational::from(-j), 2));
            num.push((Rational::from(n + j) - g, 2));
        }
        let mut den = Vec::with_capacity(4 * (self.n as usize + 1));
        for l in 0..=n {
            let l = Rational::from(l);
            den.push(Rational::from(&l - a));
            den.push(Rational::from(&l - b));
            den.push(Rational::from(&l + a) - g);
            den.push(Rational::from(&l + b) - g);
        }
        let lead_factor = (Rational::from(n) - g) / 2u32;
        Factors {
            num,
            den,
            lead_factor,
        }
    }

    /// `R_n(nu)` and `R_n'(nu)` at working precision `wp`.
    fn value_and_derivative(
        &self,
        f: &Factors,
        nu: u64,
        wp: u32,
    ) -> Result<(Float, Float), TelescopeError> {
        let t = Rational::from(nu);
        let mut value = Float::with_val(wp, &self.scale);
        if self.n.is_multiple_of(2) {
            value = -value;
        }
        let mut logd = Float::new(wp);
        for c in &f.den {
            let x = Rational::from(&t + c);
            if x == 0 {
                return Err(TelescopeError::Pole(nu));
            }
            let xf = Float::with_val(wp, &x);
            logd -= Float::with_val(wp, xf.recip_ref());
            value /= &xf;
        }
        for (c, mult) in &f.num {
            let x = Rational::from(&t + c);
            if x == 0 {
                // at least a double zero
                return Ok((Float::new(wp), Float::new(wp)));
            }
            let xf = Float::with_val(wp, &x);
            logd += Float::with_val(wp, xf.recip_ref()) * *mult;
            for _ in 0..*mult {
                value *= &xf;
            }
        }
        let x = Rational::from(&t + &f.lead_factor);
        if x == 0 {
            // simple zero: R' = 2 * (R / (2t + n - g)) at the zero
            return Ok((Float::new(wp), value * 2u32));
        }
        let xf = Float::with_val(wp, &x);
        logd += Float::with_val(wp, xf.recip_ref());
        value *= Float::with_val(wp, &xf * 2u32);
        let deriv = Float::with_val(wp, &value * &logd);
        Ok((value, deriv))
    }

    /// `R_n(nu)` at `bits` of precision.
    pub fn value_at(&self, nu: u64, bits: u32) -> Result<Float, TelescopeError> {
        Ok(self
            .value_and_derivative(&self.factors(), nu, bits + GUARD_BITS)?
            .0)
    }
}

/// `R_n'(nu)`. Exactly zero for `nu <= n`, where `(t - nu)^2` divides the
/// numerator.
pub fn kernel_derivative_at(
    k: &HypergeometricKernel,
    nu: u64,
    bits: u32,
) -> Result<Float, TelescopeError> {
    if nu == 0 {
        return Err(TelescopeError::NuZero);
    }
    if nu <= k.n as u64 {
        return Ok(Float::new(bits));
    }
    let wp = bits + GUARD_BITS + 16;
    let (_, d) = k.value_and_derivative(&k.factors(), nu, wp)?;
    Ok(Float::with_val(bits, d))
}

#[derive(Clone, Debug)]
pub struct Remainder {
    pub n: u32,
    pub value: Float,
    /// Bound on the omitted tail `sum_{nu > n + budget}`.
    pub tail_bound: Float,
    pub terms: u64,
}

/// Sums `R_n'(nu)` for `nu = n+1 ..= n+budget`.
///
/// Terms decay like `c nu^-4`, so the tail past `V = n + budget` is bounded by
/// `2 |t_V| V^4 / (3 V^3)`: the integral comparison for `nu^-4` with a factor
/// of two for the sub-leading corrections.
pub fn remainder(
    k: &HypergeometricKernel,
    bits: u32,
    budget: u64,
) -> Result<Remainder, TelescopeError> {
    let n = k.n as u64;
    if budget < n + 10 {
        return Err(TelescopeError::BudgetTooSmall {
            budget,
            needed: n + 10,
        });
    }
    let wp = bits + GUARD_BITS + 64 - budget.leading_zeros();
    let factors = k.factors();
    let first = n + 1;
    let last = n + budget;
    let terms: Vec<Float> = (first..=last)
        .into_par_iter()
        .map(|nu| k.value_and_derivative(&factors, nu, wp).map(|(_, d)| d))
        .collect::<Result<_, _>>()?;
    let mut value = Float::new(wp);
    for t in &terms {
        value += t;
    }
    let tail_term = Float::with_val(wp, terms[terms.len() - 1].abs_ref());
    let tail_bound = tail_term * last * 2u32 / 3u32;
    Ok(Remainder {
        n: k.n,
        value: Float::with_val(bits, value),
        tail_bound: Float::with_val(64, tail_bound),
        terms: budget,
    })
}

#[derive(Clone, Debug)]
pub struct TelescopeRow {
    pub n: u32,
    pub remainder: Float,
    pub tail_bound: Float,
    /// `q_n L - p_n`.
    pub expected: Float,
    pub residual: Float,
    pub tolerance: Float,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct TelescopeReport {
    pub rows: Vec<TelescopeRow>,
    /// `A(n) r_{n+1} - B(n) r_n - C(n) r_{n-1}` for `q` and `p` over the same
    /// range, all exactly zero when the recurrence iterates.
    pub recurrence_residuals_zero: bool,
    pub pass: bool,
    pub first_failure: Option<u32>,
}

/// `q_n L - p_n` for `n = 0..=n_max`, with `L` accurate enough that the
/// cancellation still leaves `bits` absolute bits.
pub fn recurrence_remainders(n_max: u32, bits: u32) -> Result<Vec<Float>, TelescopeError> {
    let data = recurrence::main_theorem()?;
    let q = recurrence::iterate(&data.recurrence, data.initial("q")?, n_max as i64)?;
    let p = recurrence::iterate(&data.recurrence, data.initial("p")?, n_max as i64)?;
    remainders_from(&q, &p, bits)
}

/// `q_k L(chi_-8, 2) - p_k` for given exact sequences.
pub fn remainders_from(
    q: &[Rational],
    p: &[Rational],
    bits: u32,
) -> Result<Vec<Float>, TelescopeError> {
    remainders_from_with(q, p, bits, &computed_l)
}

pub fn remainders_from_with(
    q: &[Rational],
    p: &[Rational],
    bits: u32,
    l: LProvider,
) -> Result<Vec<Float>, TelescopeError> {
    let max_q_bits = q
        .iter()
        .map(|x| {
            let f = Float::with_val(64, x);
            f.get_exp().unwrap_or(0).max(0) as u32
        })
        .max()
        .unwrap_or(0);
    let lbits = bits + max_q_bits + GUARD_BITS;
    let l = l(&DirichletCharacter::chi_minus_8(), lbits)?;
    let wp = lbits + GUARD_BITS;
    Ok(q.iter()
        .zip(p)
        .map(|(qk, pk)| {
            let v = Float::with_val(wp, qk) * &l - Float::with_val(wp, pk);
            Float::with_val(wp, v)
        })
        .collect())
}

/// Compares the telescoped series for `n = 0..=n_max` with `q_n L - p_n`.
pub fn verify_remainder_identity(
    n_max: u32,
    bits: u32,
    budget: u64,
) -> Result<TelescopeReport, TelescopeError> {
    verify_with_scale(Rational::from((1, 512)), n_max, bits, budget)
}

/// Same as [`verify_remainder_identity`] with the kernel scale replaced.
pub fn verify_with_scale(
    scale: Rational,
    n_max: u32,
    bits: u32,
    budget: u64,
) -> Result<TelescopeReport, TelescopeError> {
    verify_with(
        &recurrence::main_theorem()?,
        &computed_l,
        scale,
        n_max,
        bits,
        budget,
    )
}

/// The general form: recurrence data and `L` source supplied by the caller.
pub fn verify_with(
    data: &RecurrenceData,
    l: LProvider,
    scale: Rational,
    n_max: u32,
    bits: u32,
    budget: u64,
) -> Result<TelescopeReport, TelescopeError> {
    let rec = &data.recurrence;
    let q = recurrence::iterate(rec, data.initial("q")?, n_max.max(2) as i64)?;
    let p = recurrence::iterate(rec, data.initial("p")?, n_max.max(2) as i64)?;
    let recurrence_residuals_zero = [&q, &p]
        .iter()
        .all(|s| rec.residuals(s).iter().all(|r| *r == 0));
    let expected = remainders_from_with(&q, &p, bits, l)?;
    let base = HypergeometricKernel::main_theorem(0).with_scale(scale)?;
    let slack = pow2(-(bits as i32) + GUARD_BITS as i32, 64);
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let rem = remainder(&base.with_n(n), bits, budget)?;
        let exp = Float::with_val(bits, &expected[n as usize]);
        let residual = Float::with_val(bits, &rem.value - &exp).abs();
        let tolerance = Float::with_val(64, &rem.tail_bound + &slack);
        let pass = residual <= tolerance;
        rows.push(TelescopeRow {
            n,
            remainder: rem.value,
            tail_bound: rem.tail_bound,
            expected: exp,
            residual,
            tolerance,
            pass,
        });
    }
    let first_failure = rows.iter().find(|r| !r.pass).map(|r| r.n);
    Ok(TelescopeReport {
        pass: first_failure.is_none() && recurrence_residuals_zero,
        rows,
        recurrence_residuals_zero,
        first_failure,
    })
}

/// `|q_n L - p_n|^(1/n)` computed from the exact sequences.
pub fn decay_rate(n: u32, bits: u32) -> Result<Float, TelescopeError> {
    let r = recurrence_remainders(n, bits)?;
    let v = Float::with_val(bits, r[n as usize].abs_ref());
    Ok((v.ln() / n).exp())
}
