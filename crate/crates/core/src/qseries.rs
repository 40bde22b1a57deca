//! Truncated power series in q_ℓ over Q(ζ_ℓ) and the independent route to
//! the product exponents: expand the Siegel product, take −Θ(U)/U, and peel
//! off c(n) from A(n) = Σ_{d|n} d·c(d).
//!
//! The q^{B₂(a₁)/2} prefactors are left out of the expansion and the leading
//! power is handled by [`crate::closedform::leading_order`]. The oracle also
//! drops the constant factors (1 − ζ^s)^m, which Θ(U)/U does not see.

use crate::cyclofield::CycNumber;
use crate::error::{Error, Result};
use crate::ntharith::{divisors, Rational};
use crate::scalar::Scalar;
use crate::torsion::{Level, TorsionPoint};
use crate::unitvec::ExponentVector;

/// Σ_{k=0}^{N} a_k q_ℓ^k + O(q_ℓ^{N+1}).
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<T> {
    level: Level,
    coeffs: Vec<CycNumber<T>>,
}

impl<T: Scalar> QSeries<T> {
    pub fn zero(level: Level, truncation: usize) -> Self {
        QSeries { level, coeffs: vec![CycNumber::zero(level); truncation + 1] }
    }

    pub fn one(level: Level, truncation: usize) -> Self {
        Self::constant(level, truncation, CycNumber::one(level))
    }

    pub fn constant(level: Level, truncation: usize, c: CycNumber<T>) -> Self {
        let mut s = Self::zero(level, truncation);
        s.coeffs[0] = c;
        s
    }

    /// Builds from the first coefficients; missing ones are zero and extra
    /// ones beyond the truncation are dropped.
    pub fn from_coeffs(level: Level, truncation: usize, mut coeffs: Vec<CycNumber<T>>) -> Self {
        coeffs.resize(truncation + 1, CycNumber::zero(level));
        QSeries { level, coeffs }
    }

    /// 1 − c·q^k (just 1 when k exceeds the truncation).
    pub fn binomial(level: Level, truncation: usize, k: usize, c: &CycNumber<T>) -> Self {
        let mut s = Self::one(level, truncation);
        if k <= truncation {
            s.coeffs[k] = &s.coeffs[k] - c;
        }
        s
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &CycNumber<T> {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[CycNumber<T>] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: CycNumber<T>) {
        self.coeffs[k] = c;
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level.ell(), other.level.ell()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let n = self.truncation().min(other.truncation());
        let coeffs = (0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect();
        Ok(QSeries { level: self.level, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let n = self.truncation().min(other.truncation());
        let coeffs = (0..=n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect();
        Ok(QSeries { level: self.level, coeffs })
    }

    /// Cauchy product truncated at the smaller truncation.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let n = self.truncation().min(other.truncation());
        let mut out = Self::zero(self.level, n);
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j].add_mul_assign(a, b);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CycNumber<T>) -> Self {
        QSeries {
            level: self.level,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// b with a·b = 1 + O(q^{N+1}), via b_k = −a_0⁻¹ Σ_{j=1}^{k} a_j b_{k−j}.
    pub fn inverse(&self) -> Result<Self> {
        let a0_inv = self.coeffs[0].invert().map_err(|_| Error::ZeroConstantTerm)?;
        let n = self.truncation();
        let mut b = Self::zero(self.level, n);
        b.coeffs[0] = a0_inv.clone();
        for k in 1..=n {
            let mut acc = CycNumber::zero(self.level);
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !b.coeffs[k - j].is_zero() {
                    acc.add_mul_assign(&self.coeffs[j], &b.coeffs[k - j]);
                }
            }
            b.coeffs[k] = -(&acc * &a0_inv);
        }
        Ok(b)
    }

    /// a^m by square-and-multiply; negative m inverts first.
    pub fn ipow(&self, m: i64) -> Result<Self> {
        let mut base = if m < 0 { self.inverse()? } else { self.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = Self::one(self.level, self.truncation());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Θ = q_ℓ·d/dq_ℓ: coefficient k becomes k·a_k.
    pub fn theta(&self) -> Self {
        QSeries {
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale_i64(k as i64))
                .collect(),
        }
    }

    /// Multiplies in place by (1 − c·q^k)^m, expanded binomially; only the
    /// terms at multiples of k are touched. m may be negative.
    pub fn mul_binomial_power(&mut self, k: usize, c: &CycNumber<T>, m: i64) {
        assert!(k >= 1);
        let n = self.truncation();
        if m == 0 || k > n {
            return;
        }
        // b_j = C(m, j)·(−c)^j
        let neg_c = -c;
        let mut terms = vec![CycNumber::one(self.level)];
        let mut binom = T::one();
        let mut power = CycNumber::one(self.level);
        for j in 1..=n / k {
            let j_i = j as i64;
            binom = binom * T::from_i64(m - j_i + 1) / T::from_i64(j_i);
            if binom.is_zero() {
                break;
            }
            power = &power * &neg_c;
            terms.push(power.scale(&binom));
        }
        for idx in (0..=n).rev() {
            let mut acc = self.coeffs[idx].clone();
            for (j, b) in terms.iter().enumerate().skip(1) {
                if j * k > idx {
                    break;
                }
                let src = &self.coeffs[idx - j * k];
                if !src.is_zero() {
                    acc.add_mul_assign(b, src);
                }
            }
            self.coeffs[idx] = acc;
        }
    }
}

/// Exponents of the q_ℓ-factors of one Siegel product: every pair
/// `(k, phase)` stands for a factor 1 − ζ^phase·q_ℓ^k with 1 ≤ k ≤ N, plus the
/// phase of the constant factor for r = 0.
fn siegel_factors(level: Level, a: &TorsionPoint, truncation: usize) -> (Option<i64>, Vec<(usize, i64)>) {
    let ell = level.ell() as usize;
    let (r, s) = (a.r() as usize, a.s() as i64);
    let mut constant = None;
    let mut factors = Vec::new();
    for n in 1.. {
        let first = ell * (n - 1) + r;
        let second = ell * n - r;
        if first > truncation && second > truncation {
            break;
        }
        if first == 0 {
            constant = Some(s);
        } else if first <= truncation {
            factors.push((first, s));
        }
        if second <= truncation {
            factors.push((second, -s));
        }
    }
    (constant, factors)
}

/// ∏_{n≥1} (1 − q_ℓ^{ℓ(n−1)+r} ζ^s)(1 − q_ℓ^{ℓn−r} ζ^{−s}) + O(q_ℓ^{N+1}),
/// without the q-power and root-of-unity prefactor.
pub fn siegel_factor<T: Scalar>(level: Level, a: &TorsionPoint, truncation: usize) -> QSeries<T> {
    let (constant, factors) = siegel_factors(level, a, truncation);
    let mut out = QSeries::one(level, truncation);
    if let Some(s) = constant {
        let c = &CycNumber::one(level) - &CycNumber::root_of_unity(level, s);
        out = out.scale(&c);
    }
    for (k, phase) in factors {
        let z = CycNumber::root_of_unity(level, phase);
        out = out
            .mul(&QSeries::binomial(level, truncation, k, &z))
            .expect("same level");
    }
    out
}

/// ∏_a siegel_factor(a)^{m_a} + O(q_ℓ^{N+1}).
///
/// Requires a valid vector unless `allow_invalid` is set. Each linear factor
/// is raised to its power binomially, which agrees with multiplying
/// `siegel_factor(a).ipow(m_a)` over the support.
pub fn unit_series<T: Scalar>(v: &ExponentVector, truncation: usize, allow_invalid: bool) -> Result<QSeries<T>> {
    if !allow_invalid && !v.is_valid() {
        return Err(Error::InvalidVector);
    }
    let level = v.level();
    let mut out = QSeries::one(level, truncation);
    let mut constant = CycNumber::one(level);
    for (a, &m) in v.entries() {
        let (c0, factors) = siegel_factors(level, a, truncation);
        if let Some(s) = c0 {
            let base = &CycNumber::one(level) - &CycNumber::root_of_unity(level, s);
            constant = &constant * &base.pow(m)?;
        }
        for (k, phase) in factors {
            out.mul_binomial_power(k, &CycNumber::root_of_unity(level, phase), m);
        }
    }
    Ok(out.scale(&constant))
}

/// −Θ(U)·U⁻¹ for the unit series U.
pub fn log_derivative<T: Scalar>(u: &QSeries<T>) -> Result<QSeries<T>> {
    let g = u.theta().mul(&u.inverse()?)?;
    Ok(g.scale(&CycNumber::from_i64(u.level(), -1)))
}

/// Recovers c(1..=nmax) from A(n) = Σ_{d|n} d·c(d).
pub fn exponents_from_log_derivative<T: Scalar>(g: &QSeries<T>, nmax: usize) -> Result<Vec<CycNumber<T>>> {
    if !g.coeff(0).is_zero() {
        return Err(Error::Internal("log-derivative series has a constant term".into()));
    }
    let level = g.level();
    let mut c: Vec<CycNumber<T>> = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let mut acc = g.coeff(n).clone();
        for d in divisors(n as u64) {
            let d = d as usize;
            if d < n {
                acc = &acc - &c[d - 1].scale_i64(d as i64);
            }
        }
        c.push(acc.scale(&(T::one() / T::from_i64(n as i64))));
    }
    debug_assert!(c.iter().all(|x| x.level() == level));
    Ok(c)
}

/// Integral arithmetic in Z[ζ_ℓ] for the oracle. The monic part of the unit
/// series lives in Z[ζ][[q]], so its log-derivative needs no division.
mod zcyc {
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    use crate::torsion::Level;

    pub type Z = Vec<BigInt>;

    pub fn zero(level: Level) -> Z {
        vec![BigInt::zero(); level.phi()]
    }

    pub fn is_zero(x: &[BigInt]) -> bool {
        x.iter().all(Zero::is_zero)
    }

    /// Unreduced buffer holding products of two reduced elements.
    pub fn wide(level: Level) -> Z {
        vec![BigInt::zero(); 2 * level.phi() - 1]
    }

    pub fn root_of_unity(level: Level, k: i64) -> Z {
        let k = level.reduce(k) as usize;
        let mut buf = vec![BigInt::zero(); k.max(level.phi() - 1) + 1];
        buf[k] = BigInt::one();
        reduce(level, buf)
    }

    pub fn reduce(level: Level, mut buf: Z) -> Z {
        let phi = level.phi();
        let stride = level.stride();
        let p = level.p() as usize;
        for d in (phi..buf.len()).rev() {
            if buf[d].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut buf[d]);
            let base = d - phi;
            for j in 0..p - 1 {
                buf[base + j * stride] -= &c;
            }
        }
        buf.truncate(phi);
        buf.resize(phi, BigInt::zero());
        buf
    }

    /// acc += a·b with acc unreduced.
    pub fn mul_acc(acc: &mut [BigInt], a: &[BigInt], b: &[BigInt]) {
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    acc[i + j] += x * y;
                }
            }
        }
    }

    pub fn mul(level: Level, a: &[BigInt], b: &[BigInt]) -> Z {
        let mut buf = wide(level);
        mul_acc(&mut buf, a, b);
        reduce(level, buf)
    }
}

/// Monic part of [`unit_series`] over Z[ζ]: the product of every
/// non-constant factor (1 − ζ^phase·q^k)^m.
fn monic_unit_series(v: &ExponentVector, truncation: usize) -> Vec<zcyc::Z> {
    use num_bigint::BigInt;
    use num_traits::Zero;

    let level = v.level();
    let mut u = vec![zcyc::zero(level); truncation + 1];
    u[0][0] = BigInt::from(1);
    for (a, &m) in v.entries() {
        let (_, factors) = siegel_factors(level, a, truncation);
        for (k, phase) in factors {
            // b_j = C(m, j)·(−ζ^phase)^j, each binomial an exact integer
            let neg_z: zcyc::Z = zcyc::root_of_unity(level, phase).into_iter().map(|x| -x).collect();
            let mut terms: Vec<zcyc::Z> = vec![u[0].clone()];
            let mut binom = BigInt::from(1);
            let mut power = u[0].clone();
            for j in 1..=truncation / k {
                let j = j as i64;
                binom = binom * (m - j + 1) / j;
                if binom.is_zero() {
                    break;
                }
                power = zcyc::mul(level, &power, &neg_z);
                terms.push(power.iter().map(|x| x * &binom).collect());
            }
            for idx in (k..=truncation).rev() {
                let mut acc = zcyc::wide(level);
                for (j, b) in terms.iter().enumerate().skip(1) {
                    if j * k > idx {
                        break;
                    }
                    let src = &u[idx - j * k];
                    if !zcyc::is_zero(src) {
                        zcyc::mul_acc(&mut acc, b, src);
                    }
                }
                let acc = zcyc::reduce(level, acc);
                for (x, y) in u[idx].iter_mut().zip(acc) {
                    *x += y;
                }
            }
        }
    }
    u
}

/// Product exponents c(1..=nmax) read off the expanded Siegel product.
///
/// Works with the monic part U of the product over Z[ζ] and gets
/// G = −Θ(U)/U from U·G = −Θ(U), i.e. G_n = −n·U_n − Σ_{k=1}^{n−1} U_k·G_{n−k};
/// division only enters when c(n) is peeled off G.
pub fn oracle_c(v: &ExponentVector, nmax: u64) -> Result<Vec<CycNumber<Rational>>> {
    use num_bigint::BigInt;

    if nmax == 0 {
        return Err(Error::ZeroArgument);
    }
    let level = v.level();
    let n = nmax as usize;
    let u = monic_unit_series(v, n);
    let mut g: Vec<zcyc::Z> = vec![zcyc::zero(level); n + 1];
    for k in 1..=n {
        let mut acc = zcyc::wide(level);
        for j in 1..k {
            if !zcyc::is_zero(&u[j]) && !zcyc::is_zero(&g[k - j]) {
                zcyc::mul_acc(&mut acc, &u[j], &g[k - j]);
            }
        }
        let kk = BigInt::from(k);
        for (x, y) in acc.iter_mut().zip(&u[k]) {
            *x += y * &kk;
        }
        g[k] = zcyc::reduce(level, acc).into_iter().map(|x| -x).collect();
    }
    let g = g
        .into_iter()
        .map(|z| CycNumber::from_coeffs(level, z.into_iter().map(Rational::from_integer).collect()))
        .collect();
    exponents_from_log_derivative(&QSeries::from_coeffs(level, n, g), n)
}
