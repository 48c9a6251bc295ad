use std::collections::BTreeMap;
use std::fmt;

use rug::{Integer, Rational};

use super::MahlerError;
use crate::mpnum::RatPoly;

/// Integer polynomial in `x` and `y`, stored as sorted `(i, j, c)` terms for
/// `c x^i y^j` with distinct exponent pairs and nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePoly {
    terms: Vec<(u32, u32, Integer)>,
}

impl BivariatePoly {
    pub fn new(terms: Vec<(u32, u32, Integer)>) -> Result<Self, MahlerError> {
        let mut map = BTreeMap::new();
        for (i, j, c) in terms {
            if map.insert((i, j), c).is_some() {
                return Err(MahlerError::DuplicateTerm(i, j));
            }
        }
        let terms: Vec<_> = map
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|((i, j), c)| (i, j, c))
            .collect();
        if terms.is_empty() {
            return Err(MahlerError::ZeroPolynomial);
        }
        Ok(BivariatePoly { terms })
    }

    pub fn from_i64(terms: &[(u32, u32, i64)]) -> Result<Self, MahlerError> {
        Self::new(
            terms
                .iter()
                .map(|&(i, j, c)| (i, j, Integer::from(c)))
                .collect(),
        )
    }

    /// `sum_j coeffs[j](x) y^j`; the coefficient polynomials must be integral.
    pub fn from_y_coefficients(coeffs: &[RatPoly]) -> Result<Self, MahlerError> {
        let mut terms = Vec::new();
        for (j, cj) in coeffs.iter().enumerate() {
            for (i, c) in cj.coeffs().iter().enumerate() {
                if *c.denom() != 1 {
                    return Err(MahlerError::NonIntegral);
                }
                if *c != 0 {
                    terms.push((i as u32, j as u32, c.numer().clone()));
                }
            }
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(u32, u32, Integer)] {
        &self.terms
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }

    /// Divides out the largest monomial `x^a y^b`; monomials have measure 0.
    pub fn without_monomial_content(&self) -> (BivariatePoly, (u32, u32)) {
        let a = self.terms.iter().map(|t| t.0).min().unwrap_or(0);
        let b = self.terms.iter().map(|t| t.1).min().unwrap_or(0);
        let terms = self
            .terms
            .iter()
            .map(|(i, j, c)| (i - a, j - b, c.clone()))
            .collect();
        (BivariatePoly { terms }, (a, b))
    }

    /// `P(y, x)`.
    pub fn transpose(&self) -> BivariatePoly {
        let terms = self
            .terms
            .iter()
            .map(|(i, j, c)| (*j, *i, c.clone()))
            .collect();
        BivariatePoly::new(terms).expect("transpose keeps terms distinct")
    }

    /// `x^dx y^dy P(1/x, 1/y)`.
    pub fn reciprocal(&self) -> BivariatePoly {
        let (dx, dy) = (self.degree_x(), self.degree_y());
        let terms = self
            .terms
            .iter()
            .map(|(i, j, c)| (dx - i, dy - j, c.clone()))
            .collect();
        BivariatePoly::new(terms).expect("reflection keeps terms distinct")
    }

    pub fn scale(&self, k: &Integer) -> Result<BivariatePoly, MahlerError> {
        BivariatePoly::new(
            self.terms
                .iter()
                .map(|(i, j, c)| (*i, *j, Integer::from(c * k)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &BivariatePoly) -> BivariatePoly {
        let mut map: BTreeMap<(u32, u32), Integer> = BTreeMap::new();
        for (i, j, c) in &self.terms {
            for (k, l, d) in &other.terms {
                *map.entry((i + k, j + l)).or_default() += Integer::from(c * d);
            }
        }
        BivariatePoly::new(map.into_iter().map(|((i, j), c)| (i, j, c)).collect())
            .expect("product of nonzero polynomials is nonzero")
    }

    /// Coefficients of `y^0, ..., y^dy` as polynomials in `x`.
    pub fn y_coefficients(&self) -> Vec<RatPoly> {
        let dx = self.degree_x() as usize;
        let dy = self.degree_y() as usize;
        let mut rows = vec![vec![Rational::new(); dx + 1]; dy + 1];
        for (i, j, c) in &self.terms {
            rows[*j as usize][*i as usize] = Rational::from(c);
        }
        rows.into_iter().map(RatPoly::new).collect()
    }

    /// `dP/dy`, or `None` when `P` does not involve `y`.
    pub fn derivative_y(&self) -> Option<BivariatePoly> {
        let terms: Vec<_> = self
            .terms
            .iter()
            .filter(|t| t.1 > 0)
            .map(|(i, j, c)| (*i, j - 1, Integer::from(c * *j)))
            .collect();
        BivariatePoly::new(terms).ok()
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, c) in self.terms.iter().rev() {
            let neg = *c < 0;
            let mag = Integer::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mut parts = Vec::new();
            if mag != 1 || (*i == 0 && *j == 0) {
                parts.push(mag.to_string());
            }
            for (v, e) in [("x", *i), ("y", *j)] {
                match e {
                    0 => {}
                    1 => parts.push(v.to_string()),
                    _ => parts.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// `Res_y(f, g)` as a polynomial in `x`, by fraction-free elimination of the
/// Sylvester matrix.
pub fn resultant_y(f: &BivariatePoly, g: &BivariatePoly) -> RatPoly {
    let fc = f.y_coefficients();
    let gc = g.y_coefficients();
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    let size = m + n;
    if size == 0 {
        return RatPoly::constant(Rational::from(1));
    }
    let mut mat = vec![vec![RatPoly::zero(); size]; size];
    for r in 0..n {
        for (k, c) in fc.iter().rev().enumerate() {
            mat[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in gc.iter().rev().enumerate() {
            mat[n + r][r + k] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut mat: Vec<Vec<RatPoly>>) -> RatPoly {
    let size = mat.len();
    let mut negate = false;
    let mut prev = RatPoly::constant(Rational::from(1));
    for k in 0..size.saturating_sub(1) {
        if mat[k][k].is_zero() {
            match (k + 1..size).find(|&r| !mat[r][k].is_zero()) {
                Some(r) => {
                    mat.swap(k, r);
                    negate = !negate;
                }
                None => return RatPoly::zero(),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = mat[i][j].mul(&mat[k][k]).sub(&mat[i][k].mul(&mat[k][j]));
                mat[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = mat[k][k].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_content_and_transpose() {
        let p = BivariatePoly::from_i64(&[(2, 1, 1), (3, 2, -2)]).unwrap();
        let (q, m) = p.without_monomial_content();
        assert_eq!(m, (2, 1));
        assert_eq!(
            q,
            BivariatePoly::from_i64(&[(0, 0, 1), (1, 1, -2)]).unwrap()
        );
        assert_eq!(q.transpose().transpose(), q);
        assert!(BivariatePoly::from_i64(&[(0, 0, 0)]).is_err());
        assert!(BivariatePoly::from_i64(&[(1, 0, 1), (1, 0, 2)]).is_err());
    }

    #[test]
    fn display() {
        let p = BivariatePoly::from_i64(&[(1, 0, 1), (0, 1, 1), (0, 0, 1)]).unwrap();
        assert_eq!(p.to_string(), "x + y + 1");
    }

    #[test]
    fn smyth_resultant_is_cyclotomic() {
        let p = BivariatePoly::from_i64(&[(1, 0, 1), (0, 1, 1), (0, 0, 1)]).unwrap();
        let r = resultant_y(&p, &p.reciprocal()).monic();
        assert_eq!(r, RatPoly::from_integers(&[1, 1, 1]));
    }

    #[test]
    fn discriminant_of_ray_polynomial() {
        // (x^4+1) y^2 - 2 (x^4 - 4x^2 + 1) y + (x^4 + 1)
        let p = BivariatePoly::from_i64(&[
            (4, 2, 1),
            (0, 2, 1),
            (4, 1, -2),
            (2, 1, 8),
            (0, 1, -2),
            (4, 0, 1),
            (0, 0, 1),
        ])
        .unwrap();
        assert!(resultant_y(&p, &p.reciprocal()).is_zero());
        let d = resultant_y(&p, &p.derivative_y().unwrap());
        // Res(P, P_y) = -lead * disc and disc = -32 x^2 (x^2 - 1)^2
        let lead = RatPoly::from_integers(&[1, 0, 0, 0, 1]);
        let disc =
            RatPoly::from_integers(&[0, 0, -32]).mul(&RatPoly::from_integers(&[-1, 0, 1]).pow(2));
        assert_eq!(d, lead.mul(&disc).neg());
    }

    #[test]
    fn resultant_of_linear_forms() {
        // Res_y(a y + b, c y + d) = a d - b c
        let f = BivariatePoly::from_i64(&[(0, 1, 2), (1, 0, 3)]).unwrap();
        let g = BivariatePoly::from_i64(&[(0, 1, 5), (0, 0, 7)]).unwrap();
        assert_eq!(resultant_y(&f, &g), RatPoly::from_integers(&[14, -15]));
    }
}
