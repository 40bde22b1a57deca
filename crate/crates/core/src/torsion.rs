//! Levels, the index set of order-ℓ torsion points modulo ±1, and the
//! residue bookkeeping (ε, classes of n) used by the product exponents.
//!
//! Canonical orbit representatives: a point (r, s) with r ≠ 0 is stored with
//! r in `1..=(ℓ-1)/2`; a point (0, s) is stored with s in `1..=(ℓ-1)/2`. This
//! half is exactly where ε = +1, so the exponent attached to the class of n is
//! found at `(classify(n).rep, s)` with the phase sign ε(n).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ntharith::{gcd, is_prime};

/// A prime power ℓ = p^f with p ≥ 5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level {
    p: u64,
    f: u32,
    ell: u64,
}

impl Level {
    pub fn new(p: u64, f: u32) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidLevel { p, f, reason: reason.to_string() };
        if f == 0 {
            return Err(invalid("exponent must be at least 1"));
        }
        if !is_prime(p) {
            return Err(invalid("p is not prime"));
        }
        if p == 2 || p == 3 {
            return Err(invalid("p must not be 2 or 3"));
        }
        let ell = p
            .checked_pow(f)
            .filter(|&e| e <= 1 << 31)
            .ok_or_else(|| invalid("level too large"))?;
        Ok(Level { p, f, ell })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// φ(ℓ) = p^(f-1)(p-1), the degree of Q(ζ_ℓ).
    pub fn phi(&self) -> usize {
        (self.ell / self.p * (self.p - 1)) as usize
    }

    /// p^(f-1), the stride of the sparse minimal polynomial.
    pub fn stride(&self) -> usize {
        (self.ell / self.p) as usize
    }

    /// (ℓ-1)/2, the top of the canonical half.
    pub fn half(&self) -> u64 {
        (self.ell - 1) / 2
    }

    pub fn reduce(&self, k: i64) -> u64 {
        k.rem_euclid(self.ell as i64) as u64
    }

    pub fn is_unit(&self, x: u64) -> bool {
        x % self.p != 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Sector {
    /// gcd(r, ℓ) = 1
    UnitR,
    /// p | r, r ≠ 0
    CompositeR,
    /// r = 0
    ZeroR,
}

/// Canonical representative (r/ℓ, s/ℓ) of a ±1-orbit of points of exact
/// order ℓ. Ordered by sector, then r, then s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    sector: Sector,
    r: u64,
    s: u64,
}

impl TorsionPoint {
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }
}

impl Serialize for TorsionPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            r: u64,
            s: u64,
        }
        Repr { r: self.r, s: self.s }.serialize(serializer)
    }
}

/// Order of (r/ℓ, s/ℓ) in (1/ℓ)Z²/Z².
pub fn order(level: Level, r: i64, s: i64) -> u64 {
    let g = gcd(gcd(level.reduce(r), level.reduce(s)), level.ell);
    level.ell / g
}

/// Canonical representative of the orbit {(r, s), (-r, -s)} together with the
/// sign σ such that (r, s) ≡ σ·canonical (mod ℓ).
pub fn canonicalize(level: Level, r: i64, s: i64) -> Result<(TorsionPoint, i8)> {
    if order(level, r, s) != level.ell {
        return Err(Error::NotFullOrder { r, s, ell: level.ell });
    }
    let (r0, s0) = (level.reduce(r), level.reduce(s));
    let lead = if r0 != 0 { r0 } else { s0 };
    let (r1, s1, sign) = if lead <= level.half() {
        (r0, s0, 1)
    } else {
        (level.reduce(-(r0 as i64)), level.reduce(-(s0 as i64)), -1)
    };
    let sector = if r1 == 0 {
        Sector::ZeroR
    } else if level.is_unit(r1) {
        Sector::UnitR
    } else {
        Sector::CompositeR
    };
    Ok((TorsionPoint { sector, r: r1, s: s1 }, sign))
}

/// The canonical list realizing T*_ℓ: unit r with any s, composite r with
/// unit s, then r = 0 with s a unit in the canonical half. The middle block
/// is empty when f = 1.
pub fn representatives(level: Level) -> Vec<TorsionPoint> {
    let ell = level.ell;
    let mut out = Vec::new();
    for r in (1..=level.half()).filter(|&r| level.is_unit(r)) {
        for s in 0..ell {
            out.push(TorsionPoint { sector: Sector::UnitR, r, s });
        }
    }
    for r in (1..=level.half()).filter(|&r| !level.is_unit(r)) {
        for s in (0..ell).filter(|&s| level.is_unit(s)) {
            out.push(TorsionPoint { sector: Sector::CompositeR, r, s });
        }
    }
    for s in (1..=level.half()).filter(|&s| level.is_unit(s)) {
        out.push(TorsionPoint { sector: Sector::ZeroR, r: 0, s });
    }
    out
}

/// ε(n): +1 when n mod ℓ lies in `1..=(ℓ-1)/2`, −1 in the upper half.
pub fn epsilon(level: Level, n: u64) -> Result<i8> {
    let x = n % level.ell;
    if x == 0 {
        Err(Error::EpsilonUndefined { n, ell: level.ell })
    } else if x <= level.half() {
        Ok(1)
    } else {
        Ok(-1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResidueKind {
    /// gcd(n, p) = 1
    Coprime,
    /// p | n, ℓ ∤ n
    PDividesNotEll,
    /// ℓ | n
    EllDivides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ResidueClass {
    pub kind: ResidueKind,
    /// Canonical representative of {n, -n} mod ℓ; `None` when ℓ | n.
    pub rep: Option<u64>,
}

pub fn classify(level: Level, n: u64) -> ResidueClass {
    let x = n % level.ell;
    if x == 0 {
        return ResidueClass { kind: ResidueKind::EllDivides, rep: None };
    }
    let rep = if x <= level.half() { x } else { level.ell - x };
    let kind = if level.is_unit(x) {
        ResidueKind::Coprime
    } else {
        ResidueKind::PDividesNotEll
    };
    ResidueClass { kind, rep: Some(rep) }
}
