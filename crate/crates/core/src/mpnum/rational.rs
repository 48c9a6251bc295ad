use rug::Rational;

use super::MpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exact rational arithmetic. `rug` keeps results reduced with a positive
/// denominator; division by zero is reported instead of panicking.
pub fn rat_arith(a: &Rational, b: &Rational, op: RatOp) -> Result<Rational, MpError> {
    Ok(match op {
        RatOp::Add => Rational::from(a + b),
        RatOp::Sub => Rational::from(a - b),
        RatOp::Mul => Rational::from(a * b),
        RatOp::Div => {
            if *b == 0 {
                return Err(MpError::DivisionByZero);
            }
            Rational::from(a / b)
        }
    })
}

/// Parses `"p/q"` or `"p"` (decimal integers, optional sign).
pub fn parse_rational(s: &str) -> Result<Rational, MpError> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: rug::Integer = num.parse().map_err(|_| MpError::Parse(s.to_string()))?;
    let den: rug::Integer = den.parse().map_err(|_| MpError::Parse(s.to_string()))?;
    if den == 0 {
        return Err(MpError::DivisionByZero);
    }
    Ok(Rational::from((num, den)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn small_sum() {
        assert_eq!(rat_arith(&r(1, 2), &r(1, 3), RatOp::Add).unwrap(), r(5, 6));
    }

    #[test]
    fn initial_value_inverse_pair() {
        let q1 = r(1289, 160);
        let out = rat_arith(&q1, &r(160, 1289), RatOp::Mul).unwrap();
        assert_eq!(out, 1);
        assert_eq!(*out.denom(), 1);
    }

    #[test]
    fn self_difference_is_canonical_zero() {
        let p1 = parse_rational("136185509/15876000").unwrap();
        let z = rat_arith(&p1, &p1, RatOp::Sub).unwrap();
        assert_eq!(*z.numer(), 0);
        assert_eq!(*z.denom(), 1);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let err = rat_arith(&r(1, 2), &Rational::new(), RatOp::Div).unwrap_err();
        assert!(matches!(err, MpError::DivisionByZero));
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("-6/8").unwrap(), r(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), r(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    proptest! {
        #[test]
        fn canonical_form_is_closed(
            an in -10_000i64..10_000, ad in 1i64..10_000,
            bn in -10_000i64..10_000, bd in 1i64..10_000,
            k in 0usize..4,
        ) {
            let op = [RatOp::Add, RatOp::Sub, RatOp::Mul, RatOp::Div][k];
            let a = r(an, ad);
            let b = r(bn, bd);
            match rat_arith(&a, &b, op) {
                Ok(c) => {
                    prop_assert!(*c.denom() > 0);
                    let g = c.numer().clone().gcd(c.denom());
                    prop_assert_eq!(g, 1);
                }
                Err(_) => prop_assert!(op == RatOp::Div && bn == 0),
            }
        }
    }
}
