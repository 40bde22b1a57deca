//! Growth bounds for the product exponents.
//!
//! For each n the chain
//!
//! ```text
//! |c(n)| ≤ b1 = (1/n) Σ_{d|n} Σ_{k|n/d} |t_{n/dk}(k)|
//!        ≤ b2 = ℓ·M_u·Σ_{d|n} σ₁(n/d)
//! ```
//! holds for every n. The envelope b3 = 4ℓ·M_u·(ln ln n)² is only reported
//! (from n = 16 on), never enforced per row.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::closedform::Kernel;
use crate::cyclofield::Embedder;
use crate::error::{Error, Result};
use crate::hpreal::HpReal;
use crate::ntharith::{divisors, sigma1, Rational};
use crate::unitvec::ExponentVector;

pub const DEFAULT_PRECISION_BITS: u32 = 128;
/// First n with ln ln n > 1.
pub const ENVELOPE_START: u64 = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub n: u64,
    pub abs_c: HpReal,
    pub b1: HpReal,
    pub b2: BigUint,
    pub b3: Option<HpReal>,
    pub chain_ok: bool,
}

impl BoundReport {
    /// `abs_c ≤ b1 + slack` and `b1 ≤ b2 + slack`.
    pub fn chain_holds_with(&self, slack: &HpReal) -> bool {
        let b2 = HpReal::from_int(self.b2.clone(), self.b1.bits());
        self.abs_c <= &self.b1 + slack && self.b1 <= &b2 + slack
    }

    pub fn envelope_violated(&self) -> bool {
        self.b3.as_ref().is_some_and(|b3| &self.abs_c > b3)
    }
}

/// Tolerance 2^(20−bits)·b2 used for `chain_ok`.
pub fn chain_tolerance(b2: &BigUint, bits: u32) -> HpReal {
    let b2 = HpReal::from_int(b2.clone(), bits);
    &b2 * &HpReal::pow2(20 - bits as i64, bits)
}

/// ℓ·M_u·Σ_{d|n} σ₁(n/d).
pub fn b2_sigma(v: &ExponentVector, n: u64) -> BigUint {
    let scale = BigUint::from(v.level().ell()) * BigUint::from(v.max_abs().unwrap_or(0));
    let total: BigUint = divisors(n).into_iter().map(|d| sigma1(n / d)).sum();
    scale * total
}

/// ℓ·M_u·Σ_{d|n} Σ_{k|n/d} k, by the double divisor loop.
pub fn b2_double_loop(v: &ExponentVector, n: u64) -> BigUint {
    let scale = BigUint::from(v.level().ell()) * BigUint::from(v.max_abs().unwrap_or(0));
    let mut total = BigUint::from(0u32);
    for d in divisors(n) {
        for k in divisors(n / d) {
            total += BigUint::from(k);
        }
    }
    scale * total
}

/// 4ℓ·M_u·(ln ln n)², natural logarithms; `None` below n = 16.
pub fn envelope(v: &ExponentVector, n: u64, bits: u32) -> Option<HpReal> {
    if n < ENVELOPE_START {
        return None;
    }
    let ll = HpReal::from_int(n, bits).ln().ln();
    let scale = HpReal::from_int(4 * v.level().ell() * v.max_abs().unwrap_or(0), bits);
    Some(&scale * &ll.square())
}

/// Evaluates bound rows for one vector, caching kernel sums and their
/// absolute values.
pub struct BoundChecker<'a> {
    kernel: Kernel<'a, Rational>,
    embedder: Embedder,
    abs_sums: HashMap<(u64, u64), HpReal>,
}

impl<'a> BoundChecker<'a> {
    pub fn new(v: &'a ExponentVector, precision_bits: u32) -> Self {
        assert!(precision_bits >= 64, "precision_bits must be at least 64");
        BoundChecker {
            kernel: Kernel::new(v),
            embedder: Embedder::new(v.level(), precision_bits),
            abs_sums: HashMap::new(),
        }
    }

    fn bits(&self) -> u32 {
        self.embedder.bits()
    }

    /// |t_m(k)| = k·|phase_sum(k mod ℓ, m mod ℓ)|.
    fn abs_t(&mut self, m: u64, k: u64) -> HpReal {
        let ell = self.kernel.vector().level().ell();
        let key = (k % ell, m % ell);
        if !self.abs_sums.contains_key(&key) {
            let sum = self.kernel.phase_sum(key.0, key.1).clone();
            self.abs_sums.insert(key, self.embedder.abs(&sum));
        }
        let bits = self.bits();
        &self.abs_sums[&key] * &HpReal::from_int(k, bits)
    }

    /// (1/n) Σ_{d|n} Σ_{k|n/d} |t_{n/dk}(k)|.
    pub fn b1(&mut self, n: u64) -> HpReal {
        let mut acc = HpReal::zero(self.bits());
        for d in divisors(n) {
            for k in divisors(n / d) {
                acc = &acc + &self.abs_t(n / (d * k), k);
            }
        }
        acc.div_int(n)
    }

    pub fn report(&mut self, n: u64) -> BoundReport {
        let c = self.kernel.c(n);
        let abs_c = self.embedder.abs(&c);
        self.report_with(n, abs_c)
    }

    fn report_with(&mut self, n: u64, abs_c: HpReal) -> BoundReport {
        let bits = self.bits();
        let v = self.kernel.vector();
        let b2 = b2_sigma(v, n);
        let b3 = envelope(v, n, bits);
        let b1 = self.b1(n);
        let mut report = BoundReport { n, abs_c, b1, b2, b3, chain_ok: false };
        report.chain_ok = report.chain_holds_with(&chain_tolerance(&report.b2, bits));
        report
    }
}

/// Bound chain for a single n.
pub fn bound_chain(v: &ExponentVector, n: u64, precision_bits: u32) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    Ok(BoundChecker::new(v, precision_bits).report(n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeScan {
    pub reports: Vec<BoundReport>,
    /// n ≥ 16 with |c(n)| > 4ℓM_u(ln ln n)².
    pub violations: Vec<u64>,
    /// Rows whose exact chain failed (expected empty).
    pub chain_failures: Vec<u64>,
    /// max over n ≥ 16 of |c(n)|/(ln ln n)², with its argument.
    pub max_ratio: Option<(u64, HpReal)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub violations: Vec<u64>,
    pub chain_failures: Vec<u64>,
    pub max_ratio_n: Option<u64>,
    pub max_ratio: Option<String>,
}

impl EnvelopeScan {
    pub fn summary(&self) -> ScanSummary {
        ScanSummary {
            violations: self.violations.clone(),
            chain_failures: self.chain_failures.clone(),
            max_ratio_n: self.max_ratio.as_ref().map(|(n, _)| *n),
            max_ratio: self.max_ratio.as_ref().map(|(_, r)| r.to_decimal(30)),
        }
    }
}

/// Bound reports for n = 1..=nmax plus the envelope summary.
pub fn envelope_scan(v: &ExponentVector, nmax: u64, precision_bits: u32) -> Result<EnvelopeScan> {
    if nmax < ENVELOPE_START {
        return Err(Error::Parse(format!("envelope scan needs nmax >= {ENVELOPE_START}")));
    }
    let table = crate::closedform::ExponentTable::<Rational>::compute(v, nmax);
    let mut checker = BoundChecker::new(v, precision_bits);
    let bits = precision_bits;
    let mut reports = Vec::with_capacity(nmax as usize);
    let mut max_ratio: Option<(u64, HpReal)> = None;
    for n in 1..=nmax {
        let abs_c = checker.embedder.abs(table.get(n).expect("n within table"));
        let report = checker.report_with(n, abs_c);
        if n >= ENVELOPE_START {
            let ll = HpReal::from_int(n, bits).ln().ln();
            let ratio = report.abs_c.div(&ll.square());
            if max_ratio.as_ref().is_none_or(|(_, best)| &ratio > best) {
                max_ratio = Some((n, ratio));
            }
        }
        reports.push(report);
    }
    let violations = reports.iter().filter(|r| r.envelope_violated()).map(|r| r.n).collect();
    let chain_failures = reports.iter().filter(|r| !r.chain_ok).map(|r| r.n).collect();
    Ok(EnvelopeScan { reports, violations, chain_failures, max_ratio })
}
