//! Real Dirichlet characters `(D/.)`, their values `L(chi, 2)`, and the
//! conversion to `L'(chi, -1)` through the functional equation.

use std::fmt;

use rug::{Float, Rational};
use thiserror::Error;

use crate::mpnum::{pi, with_abs_precision};
use crate::trigamma::{trigamma, TrigammaError};

#[derive(Debug, Error)]
pub enum CharacterError {
    #[error("discriminant {0} is not a negative discriminant (D < 0, D = 0 or 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("character of discriminant {0} is not odd")]
    NotOdd(i64),
    #[error("only s = 2 is supported, got s = {0}")]
    UnsupportedS(i64),
    #[error("precision must be at least 64 bits, got {0}")]
    PrecisionTooLow(u32),
    #[error(transparent)]
    Trigamma(#[from] TrigammaError),
}

const TAB8: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// Kronecker symbol `(d/n)` for `n >= 1`.
pub fn kronecker_symbol(d: i64, n: u64) -> i8 {
    let mut a = d as i128;
    let mut b = n as i128;
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut v = 0;
    while b % 2 == 0 {
        v += 1;
        b /= 2;
    }
    let mut k: i8 = if v % 2 == 0 {
        1
    } else {
        TAB8[(a & 7) as usize]
    };
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        v = 0;
        while a % 2 == 0 {
            v += 1;
            a /= 2;
        }
        if v % 2 == 1 {
            k *= TAB8[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The odd real character `(D/.)` of period `|D|`, stored as a value table.
#[derive(Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    discriminant: i64,
    table: Vec<i8>,
}

impl DirichletCharacter {
    pub fn new(discriminant: i64) -> Result<Self, CharacterError> {
        if discriminant >= 0 {
            return Err(CharacterError::NotOdd(discriminant));
        }
        if !matches!(discriminant.rem_euclid(4), 0 | 1) || discriminant > -3 {
            return Err(CharacterError::InvalidDiscriminant(discriminant));
        }
        let n = discriminant.unsigned_abs();
        let table: Vec<i8> = (0..n)
            .map(|a| kronecker_symbol(discriminant, if a == 0 { n } else { a }))
            .collect();
        let chi = DirichletCharacter {
            discriminant,
            table,
        };
        chi.validate()?;
        Ok(chi)
    }

    pub fn chi_minus_3() -> Self {
        Self::new(-3).expect("valid discriminant")
    }

    pub fn chi_minus_4() -> Self {
        Self::new(-4).expect("valid discriminant")
    }

    pub fn chi_minus_8() -> Self {
        Self::new(-8).expect("valid discriminant")
    }

    // (D/.) is a character mod |D| only for fundamental-type D; reject the rest
    fn validate(&self) -> Result<(), CharacterError> {
        let n = self.period();
        for a in 0..n {
            let va = self.table[a as usize];
            if (va == 0) != (gcd(a, n) > 1) {
                return Err(CharacterError::InvalidDiscriminant(self.discriminant));
            }
            for b in 0..n {
                if self.table[((a * b) % n) as usize] != va * self.table[b as usize] {
                    return Err(CharacterError::InvalidDiscriminant(self.discriminant));
                }
            }
        }
        if self.table[(n - 1) as usize] != -1 {
            return Err(CharacterError::NotOdd(self.discriminant));
        }
        Ok(())
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn period(&self) -> u64 {
        self.discriminant.unsigned_abs()
    }

    pub fn value(&self, a: u64) -> i8 {
        self.table[(a % self.period()) as usize]
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}", self.discriminant)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}", self.discriminant)
    }
}

#[derive(Clone, Debug)]
pub struct LValueResult {
    pub value: Float,
    pub character: DirichletCharacter,
    pub s: i64,
    pub precision: u32,
}

/// `L(chi, 2) = N^-2 sum_{a=1}^{N} chi(a) psi1(a/N)`, absolute error `<= 2^-bits`.
pub fn l_value_s2(chi: &DirichletCharacter, bits: u32) -> Result<LValueResult, CharacterError> {
    if bits < 64 {
        return Err(CharacterError::PrecisionTooLow(bits));
    }
    let n = chi.period();
    // each psi1 term carries error 2^-(bits+8); there are fewer than 2^8 of them
    let inner = bits + 8 + 64 - n.leading_zeros();
    let wp = inner + 16;
    let mut acc = Float::new(wp);
    for a in 1..n {
        let c = chi.value(a);
        if c == 0 {
            continue;
        }
        let t = trigamma(&Rational::from((a, n)), inner)?;
        if c > 0 {
            acc += &t;
        } else {
            acc -= &t;
        }
    }
    acc /= n * n;
    Ok(LValueResult {
        value: with_abs_precision(&acc, bits),
        character: chi.clone(),
        s: 2,
        precision: bits,
    })
}

/// `L(chi, s)`; only `s = 2` is in scope.
pub fn l_value(
    chi: &DirichletCharacter,
    s: i64,
    bits: u32,
) -> Result<LValueResult, CharacterError> {
    if s != 2 {
        return Err(CharacterError::UnsupportedS(s));
    }
    l_value_s2(chi, bits)
}

/// Source of `L(chi, 2)` at a requested precision, so callers can substitute
/// cached values for [`computed_l`].
pub type LProvider<'a> =
    &'a (dyn Fn(&DirichletCharacter, u32) -> Result<Float, CharacterError> + Sync);

/// [`l_value_s2`] without the metadata.
pub fn computed_l(chi: &DirichletCharacter, bits: u32) -> Result<Float, CharacterError> {
    Ok(l_value_s2(chi, bits)?.value)
}

/// `L'(chi, -1) = N sqrt(N) / (4 pi) * L(chi, 2)`.
pub fn l_prime_minus_one(chi: &DirichletCharacter, bits: u32) -> Result<Float, CharacterError> {
    l_prime_minus_one_with(chi, bits, &computed_l)
}

pub fn l_prime_minus_one_with(
    chi: &DirichletCharacter,
    bits: u32,
    l: LProvider,
) -> Result<Float, CharacterError> {
    // the prefactor N sqrt(N) / (4 pi) stays below 2^8 for periods up to 40
    let l = l(chi, bits + 8)?;
    let n = chi.period() as u32;
    let wp = bits + 40;
    let factor = Float::with_val(wp, n).sqrt() * n / (pi(wp) * 4u32);
    Ok(with_abs_precision(&(factor * &l), bits))
}
