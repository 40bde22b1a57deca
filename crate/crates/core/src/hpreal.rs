//! Binary fixed-point reals of configurable precision.
//!
//! An [`HpReal`] stores `mant / 2^bits`. Transcendental helpers (π, cos/sin of
//! rational multiples of 2π, natural log) evaluate with 32 guard bits and
//! truncate, so each returned value is within `2^(1-bits)` of the true value
//! for arguments of moderate size. Ring operations truncate toward negative
//! infinity and lose at most one unit in the last place per step.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const GUARD: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpReal {
    mant: BigInt,
    bits: u32,
}

impl HpReal {
    pub fn zero(bits: u32) -> Self {
        HpReal { mant: BigInt::zero(), bits }
    }

    pub fn from_int(v: impl Into<BigInt>, bits: u32) -> Self {
        HpReal { mant: v.into() << bits, bits }
    }

    pub fn from_rational(x: &BigRational, bits: u32) -> Self {
        let mant = (x.numer() << bits).div_floor(x.denom());
        HpReal { mant, bits }
    }

    /// Exact conversion of a finite `f64`, truncated to `bits`.
    pub fn from_f64(x: f64, bits: u32) -> Self {
        match BigRational::from_float(x) {
            Some(r) => Self::from_rational(&r, bits),
            None => Self::zero(bits),
        }
    }

    /// `2^exp` at the given precision (zero if it underflows).
    pub fn pow2(exp: i64, bits: u32) -> Self {
        let shift = exp + bits as i64;
        if shift < 0 {
            Self::zero(bits)
        } else {
            HpReal { mant: BigInt::one() << shift as u64, bits }
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        HpReal { mant: self.mant.abs(), bits: self.bits }
    }

    /// The same value at another precision (truncating when reducing).
    pub fn rescale(&self, bits: u32) -> Self {
        let mant = match bits.cmp(&self.bits) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => &self.mant << (bits - self.bits),
            Ordering::Less => &self.mant >> (self.bits - bits),
        };
        HpReal { mant, bits }
    }

    pub fn div(&self, other: &HpReal) -> Self {
        assert_eq!(self.bits, other.bits, "precision mismatch");
        assert!(!other.mant.is_zero(), "division by zero");
        HpReal {
            mant: (&self.mant << self.bits).div_floor(&other.mant),
            bits: self.bits,
        }
    }

    pub fn div_int(&self, d: u64) -> Self {
        HpReal {
            mant: self.mant.div_floor(&BigInt::from(d)),
            bits: self.bits,
        }
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "sqrt of a negative value");
        HpReal {
            mant: (&self.mant << self.bits).sqrt(),
            bits: self.bits,
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pi(bits: u32) -> Self {
        let w = bits + GUARD;
        // π = 16·atan(1/5) − 4·atan(1/239)
        let mant = atan_inv(5, w) * 16 - atan_inv(239, w) * 4;
        HpReal { mant, bits: w }.rescale(bits)
    }

    /// `(cos θ, sin θ)` for θ = 2π·num/den.
    pub fn cos_sin_turn(num: i64, den: u64, bits: u32) -> (Self, Self) {
        assert!(den > 0);
        let den_i = den as i64;
        let mut k = num.rem_euclid(den_i);
        if 2 * k > den_i {
            k -= den_i;
        }
        let w = bits + GUARD;
        let pi = Self::pi(w);
        let theta = HpReal {
            mant: (pi.mant * BigInt::from(2 * k)).div_floor(&BigInt::from(den)),
            bits: w,
        };
        let one = BigInt::one() << w;
        let mut cos = BigInt::zero();
        let mut sin = BigInt::zero();
        let mut term = one;
        let mut i: u64 = 0;
        while !term.is_zero() {
            match i % 4 {
                0 => cos += &term,
                1 => sin += &term,
                2 => cos -= &term,
                _ => sin -= &term,
            }
            i += 1;
            term = ((term * &theta.mant) >> w) / BigInt::from(i);
        }
        (
            HpReal { mant: cos, bits: w }.rescale(bits),
            HpReal { mant: sin, bits: w }.rescale(bits),
        )
    }

    /// Natural logarithm of a positive value.
    pub fn ln(&self) -> Self {
        assert!(self.mant.is_positive(), "ln of a non-positive value");
        let w = self.bits + GUARD;
        let x = self.rescale(w);
        // x = 2^k · y with y in [1, 2)
        let k = x.mant.bits() as i64 - 1 - w as i64;
        let y = if k >= 0 {
            &x.mant >> k as u64
        } else {
            &x.mant << (-k) as u64
        };
        let one = BigInt::one() << w;
        let z = ((&y - &one) << w) / (&y + &one);
        let ln_y = atanh_fixed(&z, w) * 2;
        let ln2 = atanh_fixed(&((BigInt::one() << w) / BigInt::from(3)), w) * 2;
        let mant = ln_y + ln2 * BigInt::from(k);
        HpReal { mant, bits: w }.rescale(self.bits)
    }

    pub fn to_f64(&self) -> f64 {
        let r = BigRational::new(self.mant.clone(), BigInt::one() << self.bits);
        r.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` fractional digits, truncated toward zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = (self.mant.abs() * scale) >> self.bits;
        let s = scaled.to_string();
        let s = format!("{:0>width$}", s, width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if self.mant.sign() == Sign::Minus && !scaled.is_zero() {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

fn atan_inv(x: u64, w: u32) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = (BigInt::one() << w) / &x;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

fn atanh_fixed(z: &BigInt, w: u32) -> BigInt {
    let z2 = (z * z) >> w;
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = (power * &z2) >> w;
        k += 1;
    }
    sum
}

impl PartialOrd for HpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.bits == other.bits {
            return Some(self.mant.cmp(&other.mant));
        }
        let b = self.bits.max(other.bits);
        Some(self.rescale(b).mant.cmp(&other.rescale(b).mant))
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(f.precision().unwrap_or(30)))
    }
}

impl<'a> Add<&'a HpReal> for &'a HpReal {
    type Output = HpReal;
    fn add(self, o: &HpReal) -> HpReal {
        assert_eq!(self.bits, o.bits, "precision mismatch");
        HpReal { mant: &self.mant + &o.mant, bits: self.bits }
    }
}

impl<'a> Sub<&'a HpReal> for &'a HpReal {
    type Output = HpReal;
    fn sub(self, o: &HpReal) -> HpReal {
        assert_eq!(self.bits, o.bits, "precision mismatch");
        HpReal { mant: &self.mant - &o.mant, bits: self.bits }
    }
}

impl<'a> Mul<&'a HpReal> for &'a HpReal {
    type Output = HpReal;
    fn mul(self, o: &HpReal) -> HpReal {
        assert_eq!(self.bits, o.bits, "precision mismatch");
        HpReal { mant: (&self.mant * &o.mant) >> self.bits, bits: self.bits }
    }
}

impl Add for HpReal {
    type Output = HpReal;
    fn add(self, o: HpReal) -> HpReal {
        &self + &o
    }
}

impl Sub for HpReal {
    type Output = HpReal;
    fn sub(self, o: HpReal) -> HpReal {
        &self - &o
    }
}

impl Mul for HpReal {
    type Output = HpReal;
    fn mul(self, o: HpReal) -> HpReal {
        &self * &o
    }
}

impl Neg for HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal { mant: -self.mant, bits: self.bits }
    }
}

/// A complex number with [`HpReal`] parts.
#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    pub re: HpReal,
    pub im: HpReal,
}

impl HpComplex {
    pub fn zero(bits: u32) -> Self {
        HpComplex { re: HpReal::zero(bits), im: HpReal::zero(bits) }
    }

    /// e^{2πi·num/den}
    pub fn root_of_unity(num: i64, den: u64, bits: u32) -> Self {
        let (re, im) = HpReal::cos_sin_turn(num, den, bits);
        HpComplex { re, im }
    }

    pub fn abs(&self) -> HpReal {
        (&self.re.square() + &self.im.square()).sqrt()
    }

    pub fn scale(&self, k: &HpReal) -> Self {
        HpComplex { re: &self.re * k, im: &self.im * k }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<'a> Add<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn add(self, o: &HpComplex) -> HpComplex {
        HpComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn sub(self, o: &HpComplex) -> HpComplex {
        HpComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a HpComplex> for &'a HpComplex {
    type Output = HpComplex;
    fn mul(self, o: &HpComplex) -> HpComplex {
        HpComplex {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &HpReal, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn pi_digits() {
        let pi = HpReal::pi(200);
        assert_eq!(
            pi.to_decimal(50),
            "3.14159265358979323846264338327950288419716939937510"
        );
    }

    #[test]
    fn fifth_root_of_unity() {
        let z = HpComplex::root_of_unity(1, 5, 128);
        assert!(close(&z.re, 0.309016994374947, 1e-14));
        assert!(close(&z.im, 0.951056516295154, 1e-14));
        // cos 72° = (√5 − 1)/4
        let five = HpReal::from_int(5, 128).sqrt();
        let expected = (&five - &HpReal::from_int(1, 128)).div_int(4);
        assert!((&z.re - &expected).abs() <= HpReal::pow2(-120, 128));
    }

    #[test]
    fn angle_reduction_consistent() {
        let a = HpComplex::root_of_unity(3, 7, 128);
        let b = HpComplex::root_of_unity(-4, 7, 128);
        assert!((&a.re - &b.re).abs() <= HpReal::pow2(-125, 128));
        assert!((&a.im - &b.im).abs() <= HpReal::pow2(-125, 128));
    }

    #[test]
    fn ln_values() {
        let l = HpReal::from_int(16, 128).ln();
        assert!(close(&l, 16f64.ln(), 1e-14));
        let half = HpReal::from_rational(&BigRational::new(1.into(), 2.into()), 128);
        assert!(close(&half.ln(), -std::f64::consts::LN_2, 1e-15));
        let e2 = HpReal::from_int(1, 128).ln();
        assert!(e2.is_zero() || e2.abs() <= HpReal::pow2(-120, 128));
    }

    #[test]
    fn decimal_rendering() {
        let x = HpReal::from_rational(&BigRational::new((-7).into(), 4.into()), 64);
        assert_eq!(x.to_decimal(3), "-1.750");
        assert_eq!(HpReal::from_int(42, 64).to_decimal(0), "42");
    }
}
