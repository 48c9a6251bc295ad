use rayon::prelude::*;
use rug::Float;

use super::poly::{resultant_y, BivariatePoly};
use super::MahlerError;
use crate::mpnum::{
    complex_roots, periodic_nodes, pi, pow2, with_abs_precision, ComplexBF, DensePoly,
    GaussLegendre, GUARD_BITS,
};

/// Ratio between consecutive panels of a geometrically graded mesh.
const GRADING: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureMethod {
    /// Closed form (the polynomial involves only one variable).
    Exact,
    /// Midpoint-offset trapezoid rule on the full circle.
    Trapezoid,
    /// Gauss–Legendre panels graded toward every non-smooth angle.
    GradedPanels,
}

impl QuadratureMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuadratureMethod::Exact => "exact",
            QuadratureMethod::Trapezoid => "trapezoid",
            QuadratureMethod::GradedPanels => "graded-panels",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MahlerResult {
    pub value: Float,
    /// Outer nodes used for `value`.
    pub nodes: usize,
    /// `|Q_N - Q_{N/2}|` for the accepted rule.
    pub error_estimate: Float,
    pub method: QuadratureMethod,
    /// Angles in `[0, 2 pi)` where the inner measure may fail to be smooth.
    pub breakpoints: Vec<Float>,
    /// Nodes at which the `y`-leading coefficient was numerically zero and the
    /// lower actual degree was used.
    pub degenerate_nodes: usize,
}

/// `m(p) = log|lead| + sum log+ |root|` (Jensen), accurate to about
/// `2^(-bits + GUARD_BITS)`.
pub fn mahler_1var(p: &DensePoly, bits: u32) -> Result<Float, MahlerError> {
    let wp = bits + GUARD_BITS;
    Ok(with_abs_precision(&jensen(p, wp)?, bits))
}

fn jensen(p: &DensePoly, wp: u32) -> Result<Float, MahlerError> {
    let lead = p.leading().ok_or(MahlerError::ZeroPolynomial)?;
    let mut acc = Float::with_val(wp, lead.abs().ln_ref());
    if p.degree().unwrap_or(0) >= 1 {
        for r in complex_roots(p, wp)? {
            let a = r.abs();
            if a > 1 {
                acc += a.ln();
            }
        }
    }
    Ok(acc)
}

/// Evaluates the inner measure `theta -> m_y(P(e^{i theta}, y))`.
struct Integrand {
    coeffs: Vec<DensePoly>,
    wp: u32,
    drop_below: Float,
}

impl Integrand {
    fn new(p: &BivariatePoly, wp: u32) -> Self {
        let coeffs = p.y_coefficients().iter().map(|c| c.to_dense(wp)).collect();
        Integrand {
            coeffs,
            wp,
            drop_below: pow2(-(wp as i32) + 24, 64),
        }
    }

    /// Inner measure and whether the leading coefficient had to be dropped.
    fn eval(&self, theta: &Float) -> Result<(Float, bool), MahlerError> {
        let x = ComplexBF::expi(&Float::with_val(self.wp, theta));
        let mut vals: Vec<ComplexBF> = self.coeffs.iter().map(|c| c.eval(&x)).collect();
        let scale = vals
            .iter()
            .map(|v| v.abs())
            .fold(Float::new(self.wp), |a, b| if b > a { b } else { a });
        let threshold = Float::with_val(self.wp, &scale * &self.drop_below);
        let mut degenerate = false;
        while vals.len() > 1 && vals[vals.len() - 1].abs() <= threshold {
            vals.pop();
            degenerate = true;
        }
        let q = DensePoly::new(vals);
        Ok((jensen(&q, self.wp)?, degenerate))
    }
}

/// Angles in `[0, 2 pi)` where a `y`-root of `P(e^{i theta}, y)` meets the unit
/// circle or the leading coefficient vanishes.
///
/// A root on `|y| = 1` over `|x| = 1` is a common zero of `P` and its
/// reciprocal, so these angles are unit-circle roots of `Res_y(P, P*)`. For
/// self-reciprocal `P` that resultant vanishes identically and roots can only
/// reach the circle in pairs, so the discriminant is used instead.
pub fn breakpoints(p: &BivariatePoly, wp: u32) -> Result<Vec<Float>, MahlerError> {
    let mut r = resultant_y(p, &p.reciprocal());
    if r.is_zero() {
        if let Some(dp) = p.derivative_y() {
            r = resultant_y(p, &dp);
        }
    }
    let lead = p.y_coefficients().pop().expect("nonempty");
    let mut crit = if r.is_zero() { lead } else { r.mul(&lead) };
    crit = crit.squarefree_part();
    let deg = crit.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let roots = complex_roots(&crit.to_dense(wp), wp)?;
    let tol = pow2(-(wp as i32) / 2, 64);
    let two_pi = pi(wp) * 2u32;
    let mut angles: Vec<Float> = roots
        .iter()
        .filter(|z| Float::with_val(wp, z.abs() - 1u32).abs() <= tol)
        .map(|z| {
            let a = z.arg();
            if a < 0 {
                a + &two_pi
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    angles.dedup_by(|a, b| Float::with_val(wp, &*a - &*b).abs() <= tol);
    Ok(angles)
}

fn sum_nodes(f: &Integrand, nodes: &[(Float, Float)]) -> Result<(Float, usize), MahlerError> {
    let vals: Vec<(Float, bool)> = nodes
        .par_iter()
        .map(|(t, w)| f.eval(t).map(|(v, d)| (v * w, d)))
        .collect::<Result<_, _>>()?;
    let mut acc = Float::new(f.wp);
    let mut degenerate = 0;
    for (v, d) in &vals {
        acc += v;
        degenerate += *d as usize;
    }
    let two_pi = pi(f.wp) * 2u32;
    Ok((acc / two_pi, degenerate))
}

/// Graded Gauss–Legendre nodes on `[a, b]` with the mesh refined toward `a`
/// (`toward_a`) or `b`.
fn graded_half_arc(
    a: &Float,
    b: &Float,
    toward_a: bool,
    panels: usize,
    rule: &GaussLegendre,
    wp: u32,
) -> Vec<(Float, Float)> {
    let len = Float::with_val(wp, b - a);
    let sigma = Float::with_val(wp, GRADING);
    // breakpoints of the mesh measured from the singular end: 0, s^(K-1) L, ..., s L, L
    let mut marks = vec![Float::new(wp)];
    for k in (0..panels.saturating_sub(1)).rev() {
        let mut m = len.clone();
        for _ in 0..=k {
            m *= &sigma;
        }
        marks.push(m);
    }
    marks.push(len.clone());
    let mut out = Vec::with_capacity(panels * rule.order());
    for w in marks.windows(2) {
        let (lo, hi) = if toward_a {
            (
                Float::with_val(wp, a + &w[0]),
                Float::with_val(wp, a + &w[1]),
            )
        } else {
            (
                Float::with_val(wp, b - &w[1]),
                Float::with_val(wp, b - &w[0]),
            )
        };
        out.extend(rule.map(&lo, &hi));
    }
    out
}

fn graded_nodes(
    angles: &[Float],
    budget: usize,
    wp: u32,
) -> Result<Vec<(Float, Float)>, MahlerError> {
    let two_pi = pi(wp) * 2u32;
    let arcs = angles.len();
    let per_half = (budget / (2 * arcs)).max(2);
    let order = ((per_half as f64).sqrt().ceil() as usize).max(2);
    let panels = (per_half / order).max(1);
    let rule = GaussLegendre::new(order, wp)?;
    let mut nodes = Vec::with_capacity(2 * arcs * panels * order);
    for k in 0..arcs {
        let a = angles[k].clone();
        let b = if k + 1 < arcs {
            angles[k + 1].clone()
        } else {
            Float::with_val(wp, &angles[0] + &two_pi)
        };
        let mid = Float::with_val(wp, &a + &b) / 2u32;
        nodes.extend(graded_half_arc(&a, &mid, true, panels, &rule, wp));
        nodes.extend(graded_half_arc(&mid, &b, false, panels, &rule, wp));
    }
    Ok(nodes)
}

/// `m(P)` for a two-variable polynomial as `(1/2 pi) int m_y(P(e^{i theta}, y)) d theta`.
///
/// The outer integral first uses the trapezoid rule with `nodes` and
/// `nodes/2` points. If the two disagree by more than `2^(-bits/2)` the
/// integrand is not smooth on the circle and the integral is recomputed with
/// Gauss–Legendre panels graded toward each breakpoint, with about `nodes`
/// and `nodes/2` points. The error estimate is the difference between the
/// two resolutions of the accepted rule.
pub fn mahler_2var(
    p: &BivariatePoly,
    nodes: usize,
    bits: u32,
) -> Result<MahlerResult, MahlerError> {
    if nodes < 8 || !nodes.is_multiple_of(2) {
        return Err(MahlerError::InvalidNodes(nodes));
    }
    let wp = bits + GUARD_BITS;
    let (p, _) = p.without_monomial_content();

    if p.degree_x() == 0 || p.degree_y() == 0 {
        let single = if p.degree_y() == 0 {
            p.clone()
        } else {
            p.transpose()
        };
        let coeffs = single.y_coefficients().remove(0);
        let value = jensen(&coeffs.to_dense(wp), wp)?;
        return Ok(MahlerResult {
            value: with_abs_precision(&value, bits),
            nodes: 0,
            error_estimate: Float::new(64),
            method: QuadratureMethod::Exact,
            breakpoints: Vec::new(),
            degenerate_nodes: 0,
        });
    }

    let f = Integrand::new(&p, wp);
    let target = pow2(-(bits as i32) / 2, 64);
    let (fine, deg_fine) = sum_nodes(&f, &periodic_nodes(nodes, wp)?)?;
    let (coarse, _) = sum_nodes(&f, &periodic_nodes(nodes / 2, wp)?)?;
    let diff = Float::with_val(64, Float::with_val(wp, &fine - &coarse).abs_ref());
    let angles = breakpoints(&p, wp)?;
    if diff <= target || angles.is_empty() {
        return Ok(MahlerResult {
            value: with_abs_precision(&fine, bits),
            nodes,
            error_estimate: diff,
            method: QuadratureMethod::Trapezoid,
            breakpoints: angles,
            degenerate_nodes: deg_fine,
        });
    }

    let fine_nodes = graded_nodes(&angles, nodes, wp)?;
    let (fine, deg_fine) = sum_nodes(&f, &fine_nodes)?;
    let (coarse, _) = sum_nodes(&f, &graded_nodes(&angles, nodes / 2, wp)?)?;
    let diff = Float::with_val(64, Float::with_val(wp, &fine - &coarse).abs_ref());
    Ok(MahlerResult {
        value: with_abs_precision(&fine, bits),
        nodes: fine_nodes.len(),
        error_estimate: diff,
        method: QuadratureMethod::GradedPanels,
        breakpoints: angles,
        degenerate_nodes: deg_fine,
    })
}

/// `m(P)` through the torus double integral: with `x = e^{i theta}` and
/// `y = e^{i phi}`, `dx/x dy/y = -d theta d phi`, so
/// `iint log|P| dx/x dy/y = -(2 pi)^2 m(P)`.
pub fn torus_integral_factor(bits: u32) -> Float {
    let two_pi = pi(bits) * 2u32;
    -Float::with_val(bits, two_pi.square_ref())
}
