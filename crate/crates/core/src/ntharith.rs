//! Elementary integer number theory: factorization, divisors, the Möbius
//! function, divisor sums and the second Bernoulli polynomial.
//!
//! Indices are `u64` with the positivity precondition checked by assertion;
//! anything that accumulates (divisor sums of products, bounds) is returned
//! as a `BigUint`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_rational::BigRational;
#[cfg(test)]
use num_traits::Zero;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = BigRational;

const MEMO_LIMIT: u64 = 1 << 20;

type FactorCache = Mutex<HashMap<u64, Vec<(u64, u32)>>>;

fn memo() -> &'static FactorCache {
    static CACHE: OnceLock<FactorCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime factorization of `n` as ascending `(prime, exponent)` pairs.
///
/// Results for `n < 2^20` are memoized in a process-wide synchronized cache.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize requires n >= 1");
    if n >= MEMO_LIMIT {
        return trial_division(n);
    }
    if let Some(f) = memo().lock().unwrap().get(&n) {
        return f.clone();
    }
    let f = trial_division(n);
    memo().lock().unwrap().insert(n, f.clone());
    f
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Möbius function μ(n).
pub fn mobius(n: u64) -> i8 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Positive divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Sum of the positive divisors of `n`.
pub fn sigma1(n: u64) -> BigUint {
    divisors(n).into_iter().map(BigUint::from).sum()
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Second Bernoulli polynomial `x^2 - x + 1/6`.
pub fn bernoulli2(x: &Rational) -> Rational {
    let sixth = Rational::new(1.into(), 6.into());
    x * x - x + sixth
}

/// Σ_{d|n} μ(d); equals 1 for n = 1 and 0 otherwise.
pub fn mobius_sum(n: u64) -> i64 {
    divisors(n).into_iter().map(|d| mobius(d) as i64).sum()
}

#[cfg(test)]
pub(crate) fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
