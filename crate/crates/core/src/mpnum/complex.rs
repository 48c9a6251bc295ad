use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::Float;

/// Complex number with both parts at one shared precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBF {
    pub re: Float,
    pub im: Float,
}

impl ComplexBF {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        ComplexBF {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexBF {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_real(re: &Float) -> Self {
        ComplexBF {
            re: re.clone(),
            im: Float::new(re.prec()),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexBF {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    /// `e^{i theta}`.
    pub fn expi(theta: &Float) -> Self {
        let prec = theta.prec();
        let (s, c) = theta.clone().sin_cos(Float::new(prec));
        ComplexBF { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexBF {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Float {
        let prec = self.prec();
        Float::with_val(prec, self.re.square_ref()) + Float::with_val(prec, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn conj(&self) -> Self {
        ComplexBF {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn scale(&self, k: &Float) -> Self {
        ComplexBF {
            re: Float::with_val(self.prec(), &self.re * k),
            im: Float::with_val(self.prec(), &self.im * k),
        }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        ComplexBF {
            re: Float::with_val(self.prec(), &self.re / &n),
            im: -Float::with_val(self.prec(), &self.im / &n),
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.is_zero() {
            return ComplexBF::zero(prec);
        }
        let r = self.abs();
        if self.re >= 0 {
            let t = (Float::with_val(prec, &r + &self.re) / 2u32).sqrt();
            let im = Float::with_val(prec, &self.im / &t) / 2u32;
            ComplexBF { re: t, im }
        } else {
            let t = (Float::with_val(prec, &r - &self.re) / 2u32).sqrt();
            let re = Float::with_val(prec, self.im.abs_ref()) / &t / 2u32;
            let im = if self.im.is_sign_negative() { -t } else { t };
            ComplexBF { re, im }
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for ComplexBF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(
            f,
            "({} + {}i)",
            self.re.to_string_radix(10, Some(digits)),
            self.im.to_string_radix(10, Some(digits))
        )
    }
}

impl<'a> Add<&'a ComplexBF> for &'a ComplexBF {
    type Output = ComplexBF;
    fn add(self, rhs: &ComplexBF) -> ComplexBF {
        let p = self.prec();
        ComplexBF {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a ComplexBF> for &'a ComplexBF {
    type Output = ComplexBF;
    fn sub(self, rhs: &ComplexBF) -> ComplexBF {
        let p = self.prec();
        ComplexBF {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a ComplexBF> for &'a ComplexBF {
    type Output = ComplexBF;
    fn mul(self, rhs: &ComplexBF) -> ComplexBF {
        let p = self.prec();
        let ac = Float::with_val(p, &self.re * &rhs.re);
        let bd = Float::with_val(p, &self.im * &rhs.im);
        let ad = Float::with_val(p, &self.re * &rhs.im);
        let bc = Float::with_val(p, &self.im * &rhs.re);
        ComplexBF {
            re: ac - bd,
            im: ad + bc,
        }
    }
}

impl<'a> Div<&'a ComplexBF> for &'a ComplexBF {
    type Output = ComplexBF;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &ComplexBF) -> ComplexBF {
        self * &rhs.recip()
    }
}

impl Neg for ComplexBF {
    type Output = ComplexBF;
    fn neg(self) -> ComplexBF {
        ComplexBF {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for ComplexBF {
    type Output = ComplexBF;
    fn add(self, rhs: ComplexBF) -> ComplexBF {
        &self + &rhs
    }
}

impl Sub for ComplexBF {
    type Output = ComplexBF;
    fn sub(self, rhs: ComplexBF) -> ComplexBF {
        &self - &rhs
    }
}

impl Mul for ComplexBF {
    type Output = ComplexBF;
    fn mul(self, rhs: ComplexBF) -> ComplexBF {
        &self * &rhs
    }
}

impl Div for ComplexBF {
    type Output = ComplexBF;
    fn div(self, rhs: ComplexBF) -> ComplexBF {
        &self / &rhs
    }
}
