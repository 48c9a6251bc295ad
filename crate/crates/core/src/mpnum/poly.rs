use std::fmt;

use rug::{Float, Integer, Rational};

use super::{ComplexBF, MpError};

/// Dense univariate polynomial with complex coefficients, constant term first.
#[derive(Clone, Debug)]
pub struct DensePoly {
    coeffs: Vec<ComplexBF>,
}

impl DensePoly {
    /// Builds the polynomial, dropping trailing zero coefficients.
    pub fn new(mut coeffs: Vec<ComplexBF>) -> Self {
        while coeffs.last().is_some_and(ComplexBF::is_zero) {
            coeffs.pop();
        }
        DensePoly { coeffs }
    }

    pub fn from_integers(coeffs: &[i64], prec: u32) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| ComplexBF::from_f64(c as f64, 0.0, prec))
                .collect(),
        )
    }

    pub fn from_rationals(coeffs: &[Rational], prec: u32) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|c| ComplexBF::from_real(&Float::with_val(prec, c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[ComplexBF] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&ComplexBF> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &ComplexBF) -> ComplexBF {
        let mut acc = ComplexBF::zero(z.prec());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: &ComplexBF) -> (ComplexBF, ComplexBF) {
        let mut p = ComplexBF::zero(z.prec());
        let mut dp = ComplexBF::zero(z.prec());
        for c in self.coeffs.iter().rev() {
            dp = &(&dp * z) + &p;
            p = &(&p * z) + c;
        }
        (p, dp)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        DensePoly {
            coeffs: self.coeffs.iter().map(|c| c.with_prec(prec)).collect(),
        }
    }

    pub fn mul(&self, other: &DensePoly) -> DensePoly {
        if self.is_zero() || other.is_zero() {
            return DensePoly { coeffs: Vec::new() };
        }
        let prec = self.coeffs[0].prec().max(other.coeffs[0].prec());
        let mut out = vec![ComplexBF::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        DensePoly::new(out)
    }

    /// `x^deg * p(1/x)`.
    pub fn reversed(&self) -> DensePoly {
        DensePoly::new(self.coeffs.iter().rev().cloned().collect())
    }
}

/// Exact polynomial over the rationals, constant term first, trailing zeros
/// removed. Used for the symbolic side of singularity detection.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        RatPoly::new(vec![c])
    }

    pub fn from_integers<I: Into<Integer> + Clone>(coeffs: &[I]) -> Self {
        RatPoly::new(
            coeffs
                .iter()
                .map(|c| Rational::from(c.clone().into()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rational::new(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        RatPoly::new(out)
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        RatPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> RatPoly {
        let mut out = RatPoly::constant(Rational::from(1));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| Rational::from(c * k)).collect())
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * i as u32))
                .collect(),
        )
    }

    pub fn div_rem(&self, divisor: &RatPoly) -> Result<(RatPoly, RatPoly), MpError> {
        let dlead = divisor.leading().ok_or(MpError::DivisionByZero)?;
        let ddeg = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= ddeg {
            return Ok((RatPoly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::new(); rem.len() - ddeg];
        for k in (0..quot.len()).rev() {
            let c = Rational::from(&rem[k + ddeg] / dlead);
            if c != 0 {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= Rational::from(&c * d);
                }
            }
            quot[k] = c;
        }
        rem.truncate(ddeg);
        Ok((RatPoly::new(quot), RatPoly::new(rem)))
    }

    /// Exact division; errors if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &RatPoly) -> Result<RatPoly, MpError> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(MpError::InvalidArgument(
                "polynomial division is not exact".into(),
            ));
        }
        Ok(q)
    }

    pub fn monic(&self) -> RatPoly {
        match self.leading() {
            Some(l) => {
                let inv = Rational::from(l.recip_ref());
                self.scale(&inv)
            }
            None => RatPoly::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> RatPoly {
        if self.degree().is_none_or(|d| d == 0) {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).expect("gcd divides").monic()
    }

    pub fn to_dense(&self, prec: u32) -> DensePoly {
        DensePoly::from_rationals(&self.coeffs, prec)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(c: &[i64]) -> RatPoly {
        RatPoly::from_integers(c)
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        assert_eq!(rp(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(rp(&[0, 0]).is_zero());
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)^2 (x+2)
        let a = rp(&[-1, 1]).pow(2).mul(&rp(&[2, 1]));
        let b = rp(&[-1, 1]).mul(&rp(&[3, 1]));
        assert_eq!(a.gcd(&b), rp(&[-1, 1]));
        let (q, r) = a.div_rem(&rp(&[2, 1])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, rp(&[1, -2, 1]));
    }

    #[test]
    fn squarefree() {
        let a = rp(&[1, 1]).pow(3).mul(&rp(&[1, 0, 1]));
        assert_eq!(a.squarefree_part(), rp(&[1, 1]).mul(&rp(&[1, 0, 1])));
    }

    #[test]
    fn dense_horner_derivative() {
        let p = DensePoly::from_integers(&[1, -3, 0, 2], 128);
        let z = ComplexBF::from_f64(2.0, 0.0, 128);
        let (v, d) = p.eval_with_derivative(&z);
        assert_eq!(v.re, 11);
        assert_eq!(d.re, 21);
    }
}
