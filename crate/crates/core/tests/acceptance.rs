//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are evaluated exactly as stated and
//! reported as FAIL, together with the measured discrepancy; they do not turn
//! the process status red. Any other failure does.

use std::process::ExitCode;
use std::time::Instant;

use aperion::characters::{kronecker_symbol, l_value_s2, DirichletCharacter};
use aperion::mahler::{self, mahler_1var};
use aperion::mpnum::{complex_roots, pow2, to_decimal, ComplexBF, DensePoly, GUARD_BITS};
use aperion::recurrence::{self, growth_check, growth_check_float};
use aperion::telescope;
use aperion::trigamma::{self, c_value, reflection_value, CParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

const P: u32 = 256;

/// Criteria whose printed form does not hold; see the detail line.
const KNOWN_FAILURES: &[u32] = &[5];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sci(x: &Float) -> String {
    if x.is_zero() {
        "0".into()
    } else {
        to_decimal(x, 3)
    }
}

fn tol_224() -> Float {
    pow2(-(P as i32) + GUARD_BITS as i32, 64)
}

fn recurrence_exactness() -> Outcome {
    let data = recurrence::main_theorem().expect("shipped data");
    let rec = &data.recurrence;
    let mut nonzero = 0;
    let mut steps = 0;
    for name in ["q", "p"] {
        let seq = match recurrence::iterate(rec, data.initial(name).unwrap(), 500) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("iterating {name}: {e}")),
        };
        let res = rec.residuals(&seq);
        steps += res.len();
        nonzero += res.iter().filter(|r| **r != 0).count();
    }
    outcome(
        nonzero == 0,
        format!("{steps} exact residuals through n = 500, {nonzero} nonzero"),
    )
}

fn asymptotics() -> Outcome {
    let data = recurrence::main_theorem().unwrap();
    let rec = &data.recurrence;
    let q = recurrence::iterate(rec, data.initial("q").unwrap(), 200).unwrap();
    let p = recurrence::iterate(rec, data.initial("p").unwrap(), 200).unwrap();
    let wp = P + GUARD_BITS;
    let s3 = Float::with_val(wp, 3).sqrt() * 78u32;
    let big = Float::with_val(wp, &s3 + 135u32);
    let small = Float::with_val(wp, &s3 - 135u32);
    // r_200 is about 10^-200; P significant bits need about 665 more absolute bits
    let extra = (200.0 * small.to_f64().log2().abs()).ceil() as u32;
    let r = telescope::remainders_from(&q, &p, P + extra).unwrap();
    let q100 = growth_check(&q[..=100], &big, P).unwrap();
    let q200 = growth_check(&q, &big, P).unwrap();
    let r100 = growth_check_float(&r[..=100], &small, P).unwrap();
    let r200 = growth_check_float(&r, &small, P).unwrap();
    let ok = r200.slope_deviation < 0.01
        && q200.slope_deviation < 0.01
        && r200.slope_deviation < r100.slope_deviation
        && q200.slope_deviation < q100.slope_deviation;
    outcome(
        ok,
        format!(
            "r slope {} vs log(78 sqrt3 - 135) = {}: deviation {} at n=200 ({} at n=100); \
             q deviation {} ({} at n=100)",
            to_decimal(&r200.slope, 6),
            to_decimal(&small.ln(), 6),
            sci(&r200.slope_deviation),
            sci(&r100.slope_deviation),
            sci(&q200.slope_deviation),
            sci(&q100.slope_deviation)
        ),
    )
}

fn characteristic_polynomial() -> Outcome {
    let data = recurrence::main_theorem().unwrap();
    let cp = data.recurrence.characteristic_polynomial().unwrap();
    let want: Vec<Integer> = [-27, -270, 1].iter().map(|&c| Integer::from(c)).collect();
    let shown: Vec<String> = cp.iter().map(Integer::to_string).collect();
    outcome(
        cp == want,
        format!("coefficients (constant first) [{}]", shown.join(", ")),
    )
}

fn gamma1_table() -> Outcome {
    let checks = trigamma::verify_gamma1_table(P).unwrap();
    let bound = tol_224();
    let worst = checks
        .iter()
        .map(|c| c.residual.clone())
        .fold(Float::new(64), |a, b| if b > a { b } else { a });
    let ok = checks.len() >= 11 && checks.iter().all(|c| c.residual < bound);
    outcome(
        ok,
        format!(
            "{} identities, largest residual {} < 2^-224 = {}",
            checks.len(),
            sci(&worst),
            sci(&bound)
        ),
    )
}

/// Catalan's constant from `sum (-1)^k / (2k+1)^2` with the Cohen,
/// Rodriguez Villegas and Zagier acceleration; the error after `n` terms is
/// about `5.83^-n` relative.
fn catalan_oracle(bits: u32) -> Float {
    let wp = bits + 64;
    let n = (bits as f64 / 5.828f64.log2()).ceil() as u64 + 8;
    let root8 = Float::with_val(wp, 8).sqrt();
    let mut d = Float::with_val(wp, root8 + 3u32).pow(n as u32);
    d = (Float::with_val(wp, d.recip_ref()) + &d) / 2u32;
    let mut b = Float::with_val(wp, -1);
    let mut c = Float::with_val(wp, -&d);
    let mut s = Float::new(wp);
    for k in 0..n {
        c = Float::with_val(wp, &b - &c);
        let a = Float::with_val(wp, (2 * k + 1) * (2 * k + 1)).recip();
        s += Float::with_val(wp, &c * &a);
        let num = Integer::from(k + n) * Integer::from(k as i64 - n as i64);
        let den = Rational::from((2 * k + 1, 2)) * Rational::from(k + 1);
        b *= Rational::from(num) / den;
    }
    s / d
}

fn gamma_half() -> Outcome {
    let wp = P + GUARD_BITS;
    let catalan = catalan_oracle(P);
    let mpfr = Float::with_val(wp, Constant::Catalan);
    let oracle_gap = Float::with_val(wp, &catalan - &mpfr).abs();
    let chi8 = l_value_s2(&DirichletCharacter::chi_minus_8(), P)
        .unwrap()
        .value;

    let c12 = c_value(
        &CParams::from_pairs((-1, 12), (1, 12), (1, 2)).unwrap(),
        P + 16,
    )
    .unwrap();
    let c8 = c_value(
        &CParams::from_pairs((-1, 8), (1, 8), (1, 2)).unwrap(),
        P + 16,
    )
    .unwrap();
    let printed12 = Float::with_val(wp, &c12 / 160u32) - Rational::from((1, 160));
    let printed8 = Float::with_val(wp, &c8 / 64u32) - Rational::from((1, 64));
    let gap12 = Float::with_val(wp, &catalan - &printed12);
    let gap8 = Float::with_val(wp, &chi8 - &printed8);
    let bound = tol_224();
    let ok = gap12.clone().abs() < bound && gap8.clone().abs() < bound;

    // the offsets that do hold, for the record
    let fixed12 = Float::with_val(wp, &c12 / 160u32) + Rational::from((9, 10));
    let fixed8 = Float::with_val(wp, &c8 / 64u32) + 1u32;
    let fixed12_gap = Float::with_val(wp, &catalan - &fixed12).abs();
    let fixed8_gap = Float::with_val(wp, &chi8 - &fixed8).abs();
    outcome(
        ok,
        format!(
            "C(-1/12,1/12,1/2)/160 - 1/160 misses Catalan (oracle, {} from MPFR) by {}; \
             C(-1/8,1/8,1/2)/64 - 1/64 misses L(chi_-8,2) by {}. \
             The gaps are exactly 145/160 and 65/64: with offsets +9/10 and +1 the residuals are {} and {}",
            sci(&oracle_gap),
            to_decimal(&gap12, 12),
            to_decimal(&gap8, 12),
            sci(&fixed12_gap),
            sci(&fixed8_gap)
        ),
    )
}

fn telescope_cross_check() -> Outcome {
    let report = telescope::verify_remainder_identity(5, P, 20_000).unwrap();
    let mut worst_bound = Float::new(64);
    let mut ok = report.recurrence_residuals_zero;
    let mut parts = Vec::new();
    for row in &report.rows {
        ok &= row.residual < row.tail_bound;
        if row.tail_bound > worst_bound {
            worst_bound = row.tail_bound.clone();
        }
        parts.push(format!(
            "n={}: {} < {}",
            row.n,
            sci(&row.residual),
            sci(&row.tail_bound)
        ));
    }
    ok &= worst_bound <= 1e-12;
    outcome(ok, parts.join("; "))
}

fn mahler_corpus() -> Outcome {
    let checks = mahler::verify_corpus(P, 4096).unwrap();
    let mut ok = checks.len() == 6;
    let mut parts = Vec::new();
    for c in &checks {
        let cap = if c.tag == "smyth81" { 1e-8 } else { 1e-6 };
        ok &= c.pass && c.measure.error_estimate <= cap;
        parts.push(format!(
            "{} residual {} (estimate {})",
            c.tag,
            sci(&c.residual),
            sci(&c.measure.error_estimate)
        ));
    }
    outcome(ok, parts.join("; "))
}

fn end_to_end() -> Outcome {
    let r = mahler::verify_main_theorem(P, 60, 4096).unwrap();
    let quad = r.ray_measure.error_estimate.clone();
    let rec_gap = &r.gaps[0];
    let ok = r.gaps.iter().all(|g| g.pass) && quad <= 1e-6 && rec_gap.residual < 1e-50;
    let gaps: Vec<String> = r
        .gaps
        .iter()
        .map(|g| format!("{} {}", g.id, sci(&g.residual)))
        .collect();
    outcome(
        ok,
        format!(
            "{}; quadrature estimate {}, recurrence estimate {}",
            gaps.join(", "),
            sci(&quad),
            sci(&r.apery.error_estimate)
        ),
    )
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let wp = P + GUARD_BITS;
    let tol = tol_224();
    let mut failures = Vec::new();

    // trigamma reflection
    let mut worst = Float::new(64);
    for _ in 0..50 {
        let b: u32 = rng.gen_range(2..1000);
        let a: u32 = rng.gen_range(1..b);
        let r = Rational::from((a, b));
        let s = trigamma::trigamma(&r, P).unwrap()
            + trigamma::trigamma(&Rational::from(1u32 - &r), P).unwrap();
        let gap = Float::with_val(wp, &s - reflection_value(&r, wp + 32)).abs();
        if gap > worst {
            worst = gap;
        }
    }
    if worst > tol {
        failures.push(format!("reflection residual {}", sci(&worst)));
    }
    let reflection = sci(&worst);

    // Jensen multiplicativity and reciprocal invariance
    let random_poly = |rng: &mut ChaCha8Rng| {
        let deg = rng.gen_range(1..=6);
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-9..=9)).collect();
        while c[deg] == 0 {
            c[deg] = rng.gen_range(-9..=9);
        }
        c
    };
    let mut worst_mult = Float::new(64);
    let mut worst_recip = Float::new(64);
    for _ in 0..40 {
        let f = DensePoly::from_integers(&random_poly(&mut rng), wp);
        let g = DensePoly::from_integers(&random_poly(&mut rng), wp);
        let mf = mahler_1var(&f, P).unwrap();
        let mg = mahler_1var(&g, P).unwrap();
        let mfg = mahler_1var(&f.mul(&g), P).unwrap();
        let d = Float::with_val(wp, &mfg - Float::with_val(wp, &mf + &mg)).abs();
        if d > worst_mult {
            worst_mult = d;
        }
        let rev = f.reversed();
        if !rev.is_zero() {
            let d = Float::with_val(wp, mahler_1var(&rev, P).unwrap() - &mf).abs();
            if d > worst_recip {
                worst_recip = d;
            }
        }
    }
    if worst_mult > tol || worst_recip > tol {
        failures.push(format!(
            "Jensen residuals {} / {}",
            sci(&worst_mult),
            sci(&worst_recip)
        ));
    }

    // Kronecker multiplicativity and periodicity
    let mut kron_bad = 0;
    for d in [-3i64, -4, -7, -8, -11, -15, -20, -24] {
        let period = d.unsigned_abs();
        for n in 1..=10_000u64 {
            if kronecker_symbol(d, n) != kronecker_symbol(d, n + period) {
                kron_bad += 1;
            }
        }
        for m in 1..=100u64 {
            for n in 1..=10_000 / m {
                if kronecker_symbol(d, m * n) != kronecker_symbol(d, m) * kronecker_symbol(d, n) {
                    kron_bad += 1;
                }
            }
        }
    }
    if kron_bad > 0 {
        failures.push(format!("{kron_bad} Kronecker violations"));
    }

    // Vieta: the monic polynomial rebuilt from the roots matches the input
    let mut worst_vieta = Float::new(64);
    for _ in 0..40 {
        let c = random_poly(&mut rng);
        let f = DensePoly::from_integers(&c, wp);
        let roots = complex_roots(&f, wp).unwrap();
        let mut rebuilt = DensePoly::new(vec![ComplexBF::from_f64(1.0, 0.0, wp)]);
        for r in &roots {
            let neg = ComplexBF::new(-Float::with_val(wp, &r.re), -Float::with_val(wp, &r.im));
            rebuilt = rebuilt.mul(&DensePoly::new(vec![
                neg,
                ComplexBF::from_f64(1.0, 0.0, wp),
            ]));
        }
        let lead = Float::with_val(wp, c[c.len() - 1]);
        for (k, ck) in c.iter().enumerate() {
            let got = &rebuilt.coeffs()[k];
            let re = Float::with_val(wp, &got.re * &lead) - *ck;
            let im = Float::with_val(wp, &got.im * &lead);
            let e = Float::with_val(wp, re.hypot(&im));
            let scaled = e / 64u32;
            if scaled > worst_vieta {
                worst_vieta = scaled;
            }
        }
    }
    if worst_vieta > tol {
        failures.push(format!("Vieta residual {}", sci(&worst_vieta)));
    }

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "reflection {}, Jensen {} / {}, Kronecker 0 violations, Vieta {}",
                reflection,
                sci(&worst_mult),
                sci(&worst_recip),
                sci(&worst_vieta)
            )
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "recurrence exactness", recurrence_exactness),
        (2, "asymptotics", asymptotics),
        (3, "characteristic polynomial", characteristic_polynomial),
        (4, "gamma = 1 identity table", gamma1_table),
        (5, "gamma = 1/2 identities", gamma_half),
        (6, "telescope cross-check", telescope_cross_check),
        (7, "Mahler corpus", mahler_corpus),
        (8, "end-to-end main identity", end_to_end),
        (9, "property suites", property_suites),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {id} ({name}, {:.1} s): {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if o.pass {
            passed += 1;
        } else if !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    println!("{passed}/9 criteria pass");
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
