//! Process-wide cache of Bernoulli numbers as exact rationals.

use std::sync::{OnceLock, RwLock};

use rug::{Integer, Rational};

static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();

fn cache() -> &'static RwLock<Vec<Rational>> {
    CACHE.get_or_init(|| RwLock::new(vec![Rational::from(1), Rational::from((-1, 2))]))
}

/// `B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Rational {
    {
        let table = cache().read().expect("bernoulli cache poisoned");
        if n < table.len() {
            return table[n].clone();
        }
    }
    let mut table = cache().write().expect("bernoulli cache poisoned");
    extend(&mut table, n);
    table[n].clone()
}

// sum_{k=0}^{m} C(m+1, k) B_k = 0, skipping the vanishing odd terms k >= 3
fn extend(table: &mut Vec<Rational>, n: usize) {
    while table.len() <= n {
        let m = table.len();
        if m % 2 == 1 {
            table.push(Rational::new());
            continue;
        }
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for (k, b) in table.iter().enumerate() {
            if k == 1 || k % 2 == 0 {
                acc += Rational::from(b * &binom);
            }
            // C(m+1, k+1) = C(m+1, k) (m+1-k) / (k+1)
            binom *= (m + 1 - k) as u64;
            binom /= (k + 1) as u64;
        }
        table.push(-acc / Rational::from((m + 1) as u64));
    }
}
