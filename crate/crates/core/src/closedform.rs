//! Product exponents from the divisor-sum kernel.
//!
//! For an exponent vector {m_a} the kernel is
//!
//! ```text
//! t_m(n) = n · Σ_{s ∈ Z_ℓ}      m(n̄, s) ζ^{ε(n)·m·s}         gcd(n, p) = 1
//!        = n · Σ_{s ∈ Z_ℓ*}     m(n̄, s) ζ^{ε(n)·m·s}         p | n, ℓ ∤ n
//!        = n · Σ_{s ∈ Z_ℓ*/±1}  m(0̄, s) (ζ^{ms} + ζ^{-ms})   ℓ | n
//! ```
//!
//! with F(n) = Σ_{d|n} t_d(n/d) = Σ_{d|n} d·c(d), so that
//! c(n) = (1/n) Σ_{d|n} μ(d) F(n/d).
//!
//! The ℓ | n row is the real part 2·cos(2πms/ℓ) written exactly in Q(ζ_ℓ).

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::cyclofield::CycNumber;
use crate::ntharith::{bernoulli2, divisors, mobius, Rational};
use crate::scalar::Scalar;
use crate::torsion::{classify, epsilon, Level, ResidueKind};
use crate::unitvec::ExponentVector;

/// Kernel evaluator with a memo of the s-sums.
///
/// t_m(n) depends on n only through n mod ℓ and the scalar factor n, and on
/// m only through m mod ℓ, so the s-sum is cached per (n mod ℓ, m mod ℓ).
pub struct Kernel<'a, T> {
    vector: &'a ExponentVector,
    sums: HashMap<(u64, u64), CycNumber<T>>,
}

impl<'a, T: Scalar> Kernel<'a, T> {
    pub fn new(vector: &'a ExponentVector) -> Self {
        Kernel { vector, sums: HashMap::new() }
    }

    pub fn vector(&self) -> &ExponentVector {
        self.vector
    }

    /// The s-sum of the kernel: t_m(n) = n · phase_sum(n mod ℓ, m mod ℓ).
    pub fn phase_sum(&mut self, n_mod: u64, m_mod: u64) -> &CycNumber<T> {
        let v = self.vector;
        self.sums
            .entry((n_mod, m_mod))
            .or_insert_with(|| compute_phase_sum(v, n_mod, m_mod))
    }

    pub fn t(&mut self, m: u64, n: u64) -> CycNumber<T> {
        assert!(m >= 1 && n >= 1, "t_m(n) needs m, n >= 1");
        let ell = self.vector.level().ell();
        let sum = self.phase_sum(n % ell, m % ell);
        sum.scale(&T::from_i64(n as i64))
    }

    /// F(n) = Σ_{d|n} t_d(n/d).
    pub fn aggregate(&mut self, n: u64) -> CycNumber<T> {
        let level = self.vector.level();
        divisors(n)
            .into_iter()
            .fold(CycNumber::zero(level), |acc, d| &acc + &self.t(d, n / d))
    }

    /// c(n) = (1/n) Σ_{d|n} μ(d) Σ_{k | n/d} t_k(n/(dk)).
    pub fn c(&mut self, n: u64) -> CycNumber<T> {
        let level = self.vector.level();
        let mut acc = CycNumber::zero(level);
        for d in divisors(n) {
            let mu = mobius(d);
            if mu == 0 {
                continue;
            }
            let f = self.aggregate(n / d);
            acc = if mu > 0 { &acc + &f } else { &acc - &f };
        }
        acc.scale(&(T::one() / T::from_i64(n as i64)))
    }
}

fn compute_phase_sum<T: Scalar>(v: &ExponentVector, n_mod: u64, m_mod: u64) -> CycNumber<T> {
    let level = v.level();
    let ell = level.ell();
    let m = m_mod as i64;
    let mut coeffs = vec![T::zero(); ell as usize];
    let mut bump = |k: i64, weight: i64| {
        let idx = level.reduce(k) as usize;
        coeffs[idx] = coeffs[idx].clone() + T::from_i64(weight);
    };
    let class = classify(level, if n_mod == 0 { ell } else { n_mod });
    match class.kind {
        ResidueKind::EllDivides => {
            for s in (1..=level.half()).filter(|&s| level.is_unit(s)) {
                let weight = v.lookup(class, s).expect("canonical zero-sector coordinate");
                if weight != 0 {
                    bump(m * s as i64, weight);
                    bump(-m * s as i64, weight);
                }
            }
        }
        kind => {
            let eps = epsilon(level, n_mod).expect("ℓ ∤ n") as i64;
            let units_only = kind == ResidueKind::PDividesNotEll;
            for s in (0..ell).filter(|&s| !units_only || level.is_unit(s)) {
                let weight = v.lookup(class, s).expect("s in range for class");
                if weight != 0 {
                    bump(eps * m * s as i64, weight);
                }
            }
        }
    }
    CycNumber::from_coeffs(level, coeffs)
}

/// t_m(n) for a single pair; use [`Kernel`] when evaluating many.
pub fn t<T: Scalar>(v: &ExponentVector, m: u64, n: u64) -> CycNumber<T> {
    Kernel::new(v).t(m, n)
}

/// F(n) = Σ_{d|n} t_d(n/d), the q_ℓ^n coefficient of the logarithmic
/// derivative series.
pub fn divisor_aggregate<T: Scalar>(v: &ExponentVector, n: u64) -> CycNumber<T> {
    Kernel::new(v).aggregate(n)
}

/// The product exponent c(n).
pub fn c<T: Scalar>(v: &ExponentVector, n: u64) -> CycNumber<T> {
    Kernel::new(v).c(n)
}

/// Leading exponents: α = Σ m_a·B₂(r/ℓ)/2 in q, and β = ℓ·α in q_ℓ.
pub fn leading_order(v: &ExponentVector) -> (Rational, Rational) {
    let ell = v.level().ell();
    let half = Rational::new(1.into(), 2.into());
    let alpha: Rational = v
        .entries()
        .iter()
        .map(|(p, &m)| {
            let a1 = Rational::new(BigInt::from(p.r()), BigInt::from(ell));
            bernoulli2(&a1) * &half * Rational::from_integer(m.into())
        })
        .sum();
    let beta = &alpha * Rational::from_integer(ell.into());
    (alpha, beta)
}

/// c(1..=nmax) for one vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentTable<T> {
    vector: ExponentVector,
    values: Vec<CycNumber<T>>,
}

impl<T: Scalar> ExponentTable<T> {
    /// Fills the table through the aggregate recursion: F(n) is computed once
    /// per n and c(n) = (1/n) Σ_{d|n} μ(d) F(n/d).
    pub fn compute(vector: &ExponentVector, nmax: u64) -> Self {
        assert!(nmax >= 1);
        let level = vector.level();
        let mut kernel = Kernel::new(vector);
        let aggregates: Vec<CycNumber<T>> = (1..=nmax).map(|n| kernel.aggregate(n)).collect();
        let values = (1..=nmax)
            .map(|n| {
                let mut acc = CycNumber::<T>::zero(level);
                for d in divisors(n) {
                    match mobius(d) {
                        1 => acc = &acc + &aggregates[(n / d - 1) as usize],
                        -1 => acc = &acc - &aggregates[(n / d - 1) as usize],
                        _ => {}
                    }
                }
                acc.scale(&(T::one() / T::from_i64(n as i64)))
            })
            .collect();
        ExponentTable { vector: vector.clone(), values }
    }

    pub fn vector(&self) -> &ExponentVector {
        &self.vector
    }

    pub fn level(&self) -> Level {
        self.vector.level()
    }

    pub fn nmax(&self) -> u64 {
        self.values.len() as u64
    }

    /// c(n) for 1 ≤ n ≤ nmax.
    pub fn get(&self, n: u64) -> Option<&CycNumber<T>> {
        n.checked_sub(1).and_then(|i| self.values.get(i as usize))
    }

    pub fn values(&self) -> &[CycNumber<T>] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cyc;

    fn l5() -> Level {
        Level::new(5, 1).unwrap()
    }

    fn vec5(items: &[(i64, i64, i64)]) -> ExponentVector {
        ExponentVector::from_entries(l5(), items.iter().copied()).unwrap()
    }

    fn int(x: i64) -> Cyc {
        Cyc::from_i64(l5(), x)
    }

    #[test]
    fn kernel_examples() {
        let v0 = vec5(&[(1, 0, 60)]);
        assert_eq!(t::<Rational>(&v0, 1, 1), int(60));
        assert!(t::<Rational>(&v0, 1, 3).is_zero());
        assert_eq!(t::<Rational>(&v0, 1, 4), int(240));
        let v1 = vec5(&[(1, 1, 60)]);
        assert_eq!(t::<Rational>(&v1, 1, 1), Cyc::root_of_unity(l5(), 1).scale_i64(60));
        // ε(4) = −1 conjugates the phase
        assert_eq!(t::<Rational>(&v1, 1, 4), Cyc::root_of_unity(l5(), -1).scale_i64(240));
    }

    #[test]
    fn aggregate_examples() {
        let v0 = vec5(&[(1, 0, 60)]);
        assert_eq!(divisor_aggregate::<Rational>(&v0, 1), int(60));
        assert_eq!(divisor_aggregate::<Rational>(&v0, 2), int(60));
        assert_eq!(divisor_aggregate::<Rational>(&v0, 4), int(300));
    }

    #[test]
    fn exponent_examples() {
        let v0 = vec5(&[(1, 0, 60)]);
        assert_eq!(c::<Rational>(&v0, 1), int(60));
        assert!(c::<Rational>(&v0, 2).is_zero());
        let v1 = vec5(&[(1, 1, 60)]);
        assert_eq!(c::<Rational>(&v1, 1), Cyc::root_of_unity(l5(), 1).scale_i64(60));
    }

    #[test]
    fn ell_divides_row_is_real() {
        let v = vec5(&[(0, 1, 60)]);
        let x = t::<Rational>(&v, 2, 5);
        // 5·60·(ζ² + ζ⁻²)
        let expected = (Cyc::root_of_unity(l5(), 2) + Cyc::root_of_unity(l5(), -2)).scale_i64(300);
        assert_eq!(x, expected);
        assert_eq!(x.conj(), x);
    }

    #[test]
    fn leading_order_examples() {
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        assert_eq!(leading_order(&vec5(&[(1, 0, 60)])), (r(1, 5), r(1, 1)));
        assert_eq!(leading_order(&ExponentVector::empty(l5())), (r(0, 1), r(0, 1)));
        assert_eq!(leading_order(&vec5(&[(0, 1, 60)])), (r(5, 1), r(25, 1)));
    }

    #[test]
    fn table_matches_pointwise() {
        let v = vec5(&[(1, 1, 60), (2, 3, -24), (0, 2, 12)]);
        let table = ExponentTable::<Rational>::compute(&v, 30);
        for n in 1..=30 {
            assert_eq!(table.get(n).unwrap(), &c::<Rational>(&v, n), "n = {n}");
        }
        assert!(table.get(0).is_none() && table.get(31).is_none());
    }

    #[test]
    fn inversion_consistency() {
        let v = vec5(&[(1, 1, 60), (2, 3, -24), (0, 2, 12)]);
        let table = ExponentTable::<Rational>::compute(&v, 60);
        for n in 1..=60u64 {
            let lhs = divisors(n).into_iter().fold(Cyc::zero(l5()), |acc, d| {
                &acc + &table.get(d).unwrap().scale_i64(d as i64)
            });
            assert_eq!(lhs, divisor_aggregate::<Rational>(&v, n));
        }
    }

    #[test]
    fn float_scalar_tracks_exact() {
        let v = vec5(&[(1, 1, 60)]);
        let exact = ExponentTable::<Rational>::compute(&v, 20);
        let approx = ExponentTable::<f64>::compute(&v, 20);
        for (a, b) in exact.values().iter().zip(approx.values()) {
            let (ar, ai) = a.approx();
            let (br, bi) = b.approx();
            assert!((ar - br).abs() < 1e-9 && (ai - bi).abs() < 1e-9);
        }
    }
}
