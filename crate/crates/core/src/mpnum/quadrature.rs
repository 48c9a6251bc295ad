use rug::Float;

use super::{pi, MpError, GUARD_BITS};

/// Midpoint-offset trapezoid nodes on the circle: `theta_k = 2 pi (k + 1/2) / n`,
/// all weights `2 pi / n`.
///
/// The half-step offset keeps every node off the roots of unity of order
/// dividing `n`, where the corpus polynomials have their degenerate fibres.
pub fn periodic_nodes(n: usize, prec: u32) -> Result<Vec<(Float, Float)>, MpError> {
    if n < 4 {
        return Err(MpError::InvalidArgument(format!(
            "periodic rule needs at least 4 nodes, got {n}"
        )));
    }
    let two_pi = pi(prec) * 2u32;
    let w = Float::with_val(prec, &two_pi / n as u32);
    Ok((0..n)
        .map(|k| {
            let theta = Float::with_val(prec, &w * Float::with_val(prec, k as f64 + 0.5));
            (theta, w.clone())
        })
        .collect())
}

/// Gauss–Legendre rule on `[-1, 1]`, kept so panels can be mapped cheaply.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

impl GaussLegendre {
    pub fn new(order: usize, prec: u32) -> Result<Self, MpError> {
        if order == 0 {
            return Err(MpError::InvalidArgument(
                "Gauss-Legendre order must be >= 1".into(),
            ));
        }
        let wp = prec + GUARD_BITS;
        let mut nodes = vec![Float::new(prec); order];
        let mut weights = vec![Float::new(prec); order];
        let half = order.div_ceil(2);
        let tol = Float::with_val(64, Float::i_exp(1, -(wp as i32) + 6));
        for i in 0..half {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut x = Float::with_val(wp, guess);
            let mut converged = false;
            let mut deriv = Float::new(wp);
            for _ in 0..200 {
                let (p, dp) = legendre(order, &x);
                let dx = Float::with_val(wp, &p / &dp);
                x -= &dx;
                deriv = dp;
                if dx.abs() <= tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(MpError::LegendreNotConverged { order, index: i });
            }
            let (_, dp) = legendre(order, &x);
            deriv = if dp.is_zero() { deriv } else { dp };
            let one_minus = Float::with_val(wp, 1u32 - Float::with_val(wp, x.square_ref()));
            let w = Float::with_val(
                wp,
                2u32 / (one_minus * Float::with_val(wp, deriv.square_ref())),
            );
            // largest node first, mirrored into the lower half
            nodes[i] = Float::with_val(prec, &x);
            weights[i] = Float::with_val(prec, &w);
            nodes[order - 1 - i] = Float::with_val(prec, -&x);
            weights[order - 1 - i] = Float::with_val(prec, &w);
        }
        if order % 2 == 1 {
            nodes[order / 2] = Float::new(prec);
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights on `[a, b]`.
    pub fn map(&self, a: &Float, b: &Float) -> Vec<(Float, Float)> {
        let prec = a.prec().max(b.prec());
        let half = Float::with_val(prec, b - a) / 2u32;
        let mid = Float::with_val(prec, a + b) / 2u32;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| {
                (
                    Float::with_val(prec, &mid + Float::with_val(prec, &half * x)),
                    Float::with_val(prec, &half * w),
                )
            })
            .collect()
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 1..n {
        let kf = k as u32;
        let t = Float::with_val(prec, x * &p1) * (2 * kf + 1);
        let p2 = (t - Float::with_val(prec, &p0 * kf)) / (kf + 1);
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (Float::with_val(prec, 1), Float::new(prec));
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = Float::with_val(prec, x * &p1) - &p0;
    let den = Float::with_val(prec, x.square_ref()) - 1u32;
    let dp = num * n as u32 / den;
    (p1, dp)
}

/// `n`-point Gauss–Legendre nodes and weights on `[a, b]`, accurate to
/// `2^(-prec + GUARD_BITS)`.
pub fn gauss_legendre_nodes(
    n: usize,
    a: &Float,
    b: &Float,
    prec: u32,
) -> Result<Vec<(Float, Float)>, MpError> {
    if a >= b {
        return Err(MpError::InvalidArgument(
            "interval must satisfy a < b".into(),
        ));
    }
    let rule = GaussLegendre::new(n, prec)?;
    let a = Float::with_val(prec, a);
    let b = Float::with_val(prec, b);
    Ok(rule.map(&a, &b))
}
