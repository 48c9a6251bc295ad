//! Simultaneous (Aberth–Ehrlich) polynomial root finding.

use rug::Float;

use super::{ComplexBF, DensePoly, MpError, GUARD_BITS};

/// All complex roots of `p`, with multiplicity, at `prec` bits.
///
/// Degrees one and two use closed forms (the quadratic in the cancellation-free
/// arrangement). Higher degrees run Aberth–Ehrlich iteration at
/// `prec + GUARD_BITS` bits from a perturbed circle of starting points; if the
/// iteration stagnates or the Vieta residual check fails the whole solve is
/// repeated once at twice the working precision.
pub fn complex_roots(p: &DensePoly, prec: u32) -> Result<Vec<ComplexBF>, MpError> {
    let deg = p.degree().unwrap_or(0);
    if deg < 1 {
        return Err(MpError::DegreeTooSmall(deg));
    }
    let wp = prec + GUARD_BITS;
    let q = p.with_prec(wp);
    let roots = match deg {
        1 => vec![linear_root(&q)],
        2 => quadratic_roots(&q),
        _ => match aberth(&q, wp) {
            Ok(r) => r,
            Err(_) => {
                let q2 = p.with_prec(2 * wp);
                aberth(&q2, 2 * wp)?
            }
        },
    };
    Ok(roots.into_iter().map(|r| r.with_prec(prec)).collect())
}

fn linear_root(p: &DensePoly) -> ComplexBF {
    let c = p.coeffs();
    -(&c[0] / &c[1])
}

fn quadratic_roots(p: &DensePoly) -> Vec<ComplexBF> {
    let prec = p.coeffs()[0].prec();
    let c = p.coeffs();
    let (a, b, cc) = (&c[2], &c[1], &c[0]);
    let four = Float::with_val(prec, 4);
    let disc = &(b * b) - &(a * cc).scale(&four);
    let mut s = disc.sqrt();
    // pick the sign of the root that avoids cancellation in b + s
    let dot = Float::with_val(prec, &b.re * &s.re) + Float::with_val(prec, &b.im * &s.im);
    if dot < 0 {
        s = -s;
    }
    let half = Float::with_val(prec, 0.5);
    let q = -(b + &s).scale(&half);
    if q.is_zero() {
        return vec![ComplexBF::zero(prec), ComplexBF::zero(prec)];
    }
    vec![&q / a, cc / &q]
}

fn initial_guesses(monic: &[ComplexBF], prec: u32) -> Vec<ComplexBF> {
    let n = monic.len() - 1;
    // centre at the root mean, radius from the geometric mean of the moduli
    let centre = monic[n - 1].to_f64_pair();
    let centre = (-centre.0 / n as f64, -centre.1 / n as f64);
    let c0 = monic[0].abs().to_f64();
    let mut radius = if c0 > 0.0 && c0.is_finite() {
        c0.powf(1.0 / n as f64)
    } else {
        1.0
    };
    if !(radius.is_finite() && radius > 1e-300) {
        radius = 1.0;
    }
    (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            let r = radius * (1.0 + 0.05 * ((k % 3) as f64));
            ComplexBF::from_f64(centre.0 + r * angle.cos(), centre.1 + r * angle.sin(), prec)
        })
        .collect()
}

fn aberth(p: &DensePoly, wp: u32) -> Result<Vec<ComplexBF>, MpError> {
    let deg = p.degree().expect("nonzero");
    let lead = p.leading().expect("nonzero").clone();
    let monic: Vec<ComplexBF> = p.coeffs().iter().map(|c| c / &lead).collect();
    let mp = DensePoly::new(monic.clone());
    let mut z = initial_guesses(&monic, wp);
    let mut done = vec![false; deg];
    let step_tol = Float::with_val(64, Float::i_exp(1, -(wp as i32) + 8));
    let max_iter = 100 + wp as usize;

    for _ in 0..max_iter {
        if done.iter().all(|&d| d) {
            break;
        }
        for k in 0..deg {
            if done[k] {
                continue;
            }
            let (val, der) = mp.eval_with_derivative(&z[k]);
            if val.is_zero() {
                done[k] = true;
                continue;
            }
            if der.is_zero() {
                // nudge off a critical point
                let eps = ComplexBF::from_f64(1e-10, 1e-10, wp);
                z[k] = &z[k] + &eps;
                continue;
            }
            let ratio = &val / &der;
            let mut repulsion = ComplexBF::zero(wp);
            for j in 0..deg {
                if j != k {
                    let d = &z[k] - &z[j];
                    if !d.is_zero() {
                        repulsion = &repulsion + &d.recip();
                    }
                }
            }
            let one = ComplexBF::from_f64(1.0, 0.0, wp);
            let denom = &one - &(&ratio * &repulsion);
            let w = if denom.is_zero() {
                ratio
            } else {
                &ratio / &denom
            };
            z[k] = &z[k] - &w;
            let scale = z[k].abs().max(&Float::with_val(wp, 1));
            if w.abs() <= Float::with_val(64, &step_tol * &scale) {
                done[k] = true;
            }
        }
    }

    let residual = vieta_residual(&monic, &z);
    let tol = Float::with_val(64, Float::i_exp(1, -(wp as i32) / 2));
    let backward_tol = Float::with_val(64, Float::i_exp(1, -(wp as i32) + 16));
    let backward_ok = z.iter().all(|r| backward_error(&monic, r) <= backward_tol);
    if residual <= tol || backward_ok {
        Ok(z)
    } else {
        Err(MpError::RootsNotConverged {
            degree: deg,
            residual: residual.to_f64(),
        })
    }
}

/// Componentwise backward error `|p(z)| / sum |c_i| |z|^i`: `z` is an exact
/// root of a polynomial whose coefficients differ from `c` by this relative
/// amount.
fn backward_error(coeffs: &[ComplexBF], z: &ComplexBF) -> Float {
    let prec = z.prec();
    let modulus = z.abs();
    let mut value = ComplexBF::zero(prec);
    let mut bound = Float::new(prec);
    for c in coeffs.iter().rev() {
        value = &(&value * z) + c;
        bound = Float::with_val(prec, &bound * &modulus) + c.abs();
    }
    Float::with_val(64, value.abs() / bound)
}

/// Largest mismatch between the monic coefficients and the elementary
/// symmetric functions of `roots`, each measured relative to the matching
/// coefficient of `prod (x + |r|)` (which bounds it in modulus).
pub(crate) fn vieta_residual(monic: &[ComplexBF], roots: &[ComplexBF]) -> Float {
    let prec = roots[0].prec();
    let mut poly = vec![ComplexBF::from_f64(1.0, 0.0, prec)];
    let mut bound = vec![Float::with_val(prec, 1)];
    for r in roots {
        let m = r.abs();
        let mut next = vec![ComplexBF::zero(prec); poly.len() + 1];
        let mut next_bound = vec![Float::new(prec); bound.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * r);
            next_bound[i + 1] += &bound[i];
            next_bound[i] += Float::with_val(prec, &bound[i] * &m);
        }
        poly = next;
        bound = next_bound;
    }
    let mut worst = Float::new(64);
    for ((a, b), s) in poly.iter().zip(monic).zip(&bound) {
        let scale = s.clone().max(&Float::with_val(prec, 1));
        let err = Float::with_val(64, (a - b).abs() / scale);
        if err > worst {
            worst = err;
        }
    }
    worst
}
