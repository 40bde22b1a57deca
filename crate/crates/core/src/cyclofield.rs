//! Exact arithmetic in Q(ζ_ℓ), ℓ = p^f, in the power basis 1, ζ, …, ζ^(φ(ℓ)-1).
//!
//! Reduction uses the sparse minimal polynomial
//! Φ_ℓ(x) = Σ_{j<p} x^(j·p^(f-1)), i.e. ζ^φ = −Σ_{j≤p-2} ζ^(j·p^(f-1)).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hpreal::{HpComplex, HpReal};
use crate::scalar::Scalar;
use crate::torsion::Level;

#[derive(Clone, Debug, PartialEq)]
pub struct CycNumber<T> {
    level: Level,
    coeffs: Vec<T>,
}

/// Folds every monomial of degree ≥ φ back into the power basis.
fn reduce_in_place<T: Scalar>(level: Level, buf: &mut Vec<T>) {
    let phi = level.phi();
    let stride = level.stride();
    let p = level.p() as usize;
    for d in (phi..buf.len()).rev() {
        if buf[d].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut buf[d], T::zero());
        let base = d - phi;
        for j in 0..p - 1 {
            let idx = base + j * stride;
            buf[idx] = buf[idx].clone() - c.clone();
        }
    }
    buf.truncate(phi);
    buf.resize(phi, T::zero());
}

impl<T: Scalar> CycNumber<T> {
    pub fn zero(level: Level) -> Self {
        CycNumber { level, coeffs: vec![T::zero(); level.phi()] }
    }

    pub fn one(level: Level) -> Self {
        Self::from_scalar(level, T::one())
    }

    pub fn from_scalar(level: Level, x: T) -> Self {
        let mut z = Self::zero(level);
        z.coeffs[0] = x;
        z
    }

    pub fn from_i64(level: Level, x: i64) -> Self {
        Self::from_scalar(level, T::from_i64(x))
    }

    /// Builds from an arbitrary-length coefficient list on 1, ζ, ζ², …,
    /// reducing as needed.
    pub fn from_coeffs(level: Level, mut coeffs: Vec<T>) -> Self {
        if coeffs.len() < level.phi() {
            coeffs.resize(level.phi(), T::zero());
        }
        reduce_in_place(level, &mut coeffs);
        CycNumber { level, coeffs }
    }

    /// ζ_ℓ^k = e(k/ℓ).
    pub fn root_of_unity(level: Level, k: i64) -> Self {
        let k = level.reduce(k) as usize;
        let mut buf = vec![T::zero(); k.max(level.phi() - 1) + 1];
        buf[k] = T::one();
        Self::from_coeffs(level, buf)
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// `Some(x)` when the number is the rational `x`.
    pub fn as_scalar(&self) -> Option<&T> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level.ell(), other.level.ell()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(CycNumber { level: self.level, coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(CycNumber { level: self.level, coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        if let Some(x) = self.as_scalar() {
            return Ok(other.scale(x));
        }
        if let Some(y) = other.as_scalar() {
            return Ok(self.scale(y));
        }
        let phi = self.level.phi();
        let mut buf = vec![T::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                buf[i + j] = buf[i + j].clone() + a.clone() * b.clone();
            }
        }
        reduce_in_place(self.level, &mut buf);
        Ok(CycNumber { level: self.level, coeffs: buf })
    }

    /// `self += a·b`, the inner step of every convolution.
    pub fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        let prod = a.checked_mul(b).expect("level mismatch");
        for (c, p) in self.coeffs.iter_mut().zip(prod.coeffs) {
            if !p.is_zero() {
                *c = c.clone() + p;
            }
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        if k.is_zero() {
            return Self::zero(self.level);
        }
        CycNumber {
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| if c.is_zero() { T::zero() } else { c.clone() * k.clone() })
                .collect(),
        }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&T::from_i64(k))
    }

    /// Multiplicative inverse by an exact linear solve: the columns of the
    /// system are the coordinates of x·ζ^j.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(x) = self.as_scalar() {
            return Ok(Self::from_scalar(self.level, T::one() / x.clone()));
        }
        let n = self.level.phi();
        // a[row][col], augmented with e_0
        let mut a: Vec<Vec<T>> = vec![vec![T::zero(); n + 1]; n];
        let mut col = self.clone();
        let zeta = Self::root_of_unity(self.level, 1);
        for j in 0..n {
            for (i, c) in col.coeffs.iter().enumerate() {
                a[i][j] = c.clone();
            }
            col = col.checked_mul(&zeta)?;
        }
        a[0][n] = T::one();
        for c in 0..n {
            let pivot = (c..n)
                .find(|&r| !a[r][c].is_zero())
                .ok_or_else(|| Error::Internal("singular multiplication matrix".into()))?;
            a.swap(c, pivot);
            let inv = T::one() / a[c][c].clone();
            for k in c..=n {
                a[c][k] = a[c][k].clone() * inv.clone();
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let factor = a[r][c].clone();
                for k in c..=n {
                    let sub = factor.clone() * a[c][k].clone();
                    a[r][k] = a[r][k].clone() - sub;
                }
            }
        }
        let coeffs = a.into_iter().map(|mut row| row.pop().unwrap()).collect();
        Ok(CycNumber { level: self.level, coeffs })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.invert()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.level);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Complex conjugation ζ ↦ ζ⁻¹.
    pub fn conj(&self) -> Self {
        let ell = self.level.ell() as usize;
        let mut buf = vec![T::zero(); ell];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                buf[(ell - j) % ell] = c.clone();
            }
        }
        Self::from_coeffs(self.level, buf)
    }

    /// Quick double-precision value at ζ = e^{2πi/ℓ}.
    pub fn approx(&self) -> (f64, f64) {
        let ell = self.level.ell() as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, c)| {
            let c = c.to_f64();
            let th = std::f64::consts::TAU * j as f64 / ell;
            (re + c * th.cos(), im + c * th.sin())
        })
    }
}

/// Evaluates cyclotomic numbers at ζ = e^{2πi/ℓ} with precomputed powers.
///
/// Internally works with 32 extra bits. Each power ζ^j and each coefficient
/// conversion is within 2^-(bits+32) of its true value, so the returned
/// value carries absolute error at most (Σ|c_j| + φ(ℓ) + 2)·2^-(bits+30),
/// which is below 2^(1-bits) relative to max(1, Σ|c_j|) for φ(ℓ) < 2^28.
pub struct Embedder {
    level: Level,
    bits: u32,
    powers: Vec<HpComplex>,
}

const EMBED_GUARD: u32 = 32;

impl Embedder {
    pub fn new(level: Level, bits: u32) -> Self {
        let w = bits + EMBED_GUARD;
        let powers = (0..level.phi())
            .map(|j| HpComplex::root_of_unity(j as i64, level.ell(), w))
            .collect();
        Embedder { level, bits, powers }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn embed<T: Scalar>(&self, x: &CycNumber<T>) -> HpComplex {
        assert_eq!(x.level, self.level, "level mismatch");
        let acc = self.embed_wide(x, self.bits + EMBED_GUARD);
        HpComplex { re: acc.re.rescale(self.bits), im: acc.im.rescale(self.bits) }
    }

    pub fn abs<T: Scalar>(&self, x: &CycNumber<T>) -> HpReal {
        assert_eq!(x.level, self.level, "level mismatch");
        let w = self.bits + EMBED_GUARD;
        let v = self.embed_wide(x, w);
        v.abs().rescale(self.bits)
    }

    fn embed_wide<T: Scalar>(&self, x: &CycNumber<T>, w: u32) -> HpComplex {
        let mut acc = HpComplex::zero(w);
        for (c, z) in x.coeffs.iter().zip(&self.powers) {
            if !c.is_zero() {
                acc = &acc + &z.scale(&c.to_hp(w));
            }
        }
        acc
    }
}

/// Evaluation at ζ = e^{2πi/ℓ}; see [`Embedder`] for the error bound.
pub fn embed_complex<T: Scalar>(x: &CycNumber<T>, precision_bits: u32) -> HpComplex {
    assert!(precision_bits >= 64, "precision_bits must be at least 64");
    Embedder::new(x.level, precision_bits).embed(x)
}

impl CycNumber<BigRational> {
    /// Coefficients as `"num/den"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect()
    }

    /// Parses `"num/den"` or plain integer strings; the list length must be φ(ℓ).
    pub fn from_strings<S: AsRef<str>>(level: Level, items: &[S]) -> Result<Self> {
        if items.len() != level.phi() {
            return Err(Error::Parse(format!(
                "expected {} coefficients, got {}",
                level.phi(),
                items.len()
            )));
        }
        let coeffs = items
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(CycNumber { level, coeffs })
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl<T: Scalar + fmt::Display> fmt::Display for CycNumber<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<'a, T: Scalar> Add<&'a CycNumber<T>> for &'a CycNumber<T> {
    type Output = CycNumber<T>;
    fn add(self, o: &CycNumber<T>) -> CycNumber<T> {
        self.checked_add(o).expect("level mismatch")
    }
}

impl<'a, T: Scalar> Sub<&'a CycNumber<T>> for &'a CycNumber<T> {
    type Output = CycNumber<T>;
    fn sub(self, o: &CycNumber<T>) -> CycNumber<T> {
        self.checked_sub(o).expect("level mismatch")
    }
}

impl<'a, T: Scalar> Mul<&'a CycNumber<T>> for &'a CycNumber<T> {
    type Output = CycNumber<T>;
    fn mul(self, o: &CycNumber<T>) -> CycNumber<T> {
        self.checked_mul(o).expect("level mismatch")
    }
}

impl<T: Scalar> Add for CycNumber<T> {
    type Output = CycNumber<T>;
    fn add(self, o: CycNumber<T>) -> CycNumber<T> {
        &self + &o
    }
}

impl<T: Scalar> Sub for CycNumber<T> {
    type Output = CycNumber<T>;
    fn sub(self, o: CycNumber<T>) -> CycNumber<T> {
        &self - &o
    }
}

impl<T: Scalar> Mul for CycNumber<T> {
    type Output = CycNumber<T>;
    fn mul(self, o: CycNumber<T>) -> CycNumber<T> {
        &self * &o
    }
}

impl<T: Scalar> Neg for CycNumber<T> {
    type Output = CycNumber<T>;
    fn neg(self) -> CycNumber<T> {
        CycNumber {
            level: self.level,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<T: Scalar> Neg for &CycNumber<T> {
    type Output = CycNumber<T>;
    fn neg(self) -> CycNumber<T> {
        -self.clone()
    }
}
