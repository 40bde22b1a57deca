//! Exponent vectors {m_a} of Siegel products, the unit congruences, and
//! the lookups used by the closed-form kernel.

use std::collections::BTreeMap;

use log::warn;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torsion::{canonicalize, Level, ResidueClass, ResidueKind, TorsionPoint};

/// Residues of the four congruence sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub sum_r2: u64,
    pub sum_s2: u64,
    pub sum_rs: u64,
    pub sum_m: u64,
    pub valid: bool,
}

/// Integer exponents m_a keyed by canonical torsion points. Zero exponents
/// are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentVector {
    level: Level,
    entries: BTreeMap<TorsionPoint, i64>,
    report: ValidityReport,
}

impl ExponentVector {
    pub fn empty(level: Level) -> Self {
        Self::from_canonical(level, BTreeMap::new())
    }

    fn from_canonical(level: Level, entries: BTreeMap<TorsionPoint, i64>) -> Self {
        let report = compute_report(level, &entries);
        ExponentVector { level, entries, report }
    }

    /// Builds from raw `(r, s, m)` triples. Each point is canonicalized (the
    /// exponent is attached to the ±1-orbit, so the sign does not touch m);
    /// repeated orbits merge by summing, and zero totals are dropped.
    pub fn from_entries<I>(level: Level, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, i64, i64)>,
    {
        let mut entries: BTreeMap<TorsionPoint, i64> = BTreeMap::new();
        for (r, s, m) in items {
            let (point, _) = canonicalize(level, r, s)?;
            match entries.get_mut(&point) {
                Some(existing) => {
                    warn!(
                        "entry ({r}, {s}) merges into ({}, {})",
                        point.r(),
                        point.s()
                    );
                    *existing = existing.checked_add(m).ok_or(Error::Overflow)?;
                }
                None => {
                    entries.insert(point, m);
                }
            }
        }
        entries.retain(|p, m| {
            if *m == 0 {
                warn!("dropping zero exponent at ({}, {})", p.r(), p.s());
            }
            *m != 0
        });
        Ok(Self::from_canonical(level, entries))
    }

    pub fn from_points<I>(level: Level, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TorsionPoint, i64)>,
    {
        Self::from_entries(
            level,
            items.into_iter().map(|(p, m)| (p.r() as i64, p.s() as i64, m)),
        )
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn entries(&self) -> &BTreeMap<TorsionPoint, i64> {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, point: &TorsionPoint) -> i64 {
        self.entries.get(point).copied().unwrap_or(0)
    }

    pub fn validate(&self) -> ValidityReport {
        self.report
    }

    pub fn is_valid(&self) -> bool {
        self.report.valid
    }

    /// Entrywise sum.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level.ell(), other.level.ell()));
        }
        let mut entries = self.entries.clone();
        for (p, m) in &other.entries {
            let slot = entries.entry(*p).or_insert(0);
            *slot = slot.checked_add(*m).ok_or(Error::Overflow)?;
        }
        entries.retain(|_, m| *m != 0);
        Ok(Self::from_canonical(self.level, entries))
    }

    /// The vector with every point (r, s) replaced by (r, −s).
    pub fn conjugate(&self) -> Self {
        let items = self
            .entries
            .iter()
            .map(|(p, m)| (p.r() as i64, -(p.s() as i64), *m));
        Self::from_entries(self.level, items).expect("conjugate of an order-ℓ point has order ℓ")
    }

    /// m(n̄, s) at the canonical point selected by `class`.
    ///
    /// `s` must lie in Z_ℓ for a coprime class, in Z_ℓ* when p | n, and be a
    /// canonical second coordinate (a unit in `1..=(ℓ-1)/2`) when ℓ | n.
    pub fn lookup(&self, class: ResidueClass, s: u64) -> Result<i64> {
        let level = self.level;
        let ell = level.ell();
        let usage = |msg: String| Err(Error::Lookup(msg));
        let (r, s) = match class.kind {
            ResidueKind::Coprime => {
                if s >= ell {
                    return usage(format!("s={s} outside Z_{ell}"));
                }
                (class.rep, s)
            }
            ResidueKind::PDividesNotEll => {
                if s >= ell || !level.is_unit(s) {
                    return usage(format!("s={s} is not a unit mod {ell}"));
                }
                (class.rep, s)
            }
            ResidueKind::EllDivides => {
                if s == 0 || s > level.half() || !level.is_unit(s) {
                    return usage(format!("s={s} is not a canonical zero-sector coordinate"));
                }
                (Some(0), s)
            }
        };
        let r = r.ok_or_else(|| Error::Lookup("residue class without representative".into()))?;
        let (point, sign) = canonicalize(level, r as i64, s as i64)?;
        if sign != 1 {
            return usage(format!("({r}, {s}) is not canonical"));
        }
        Ok(self.get(&point))
    }

    /// M_u = max |m_a|.
    pub fn max_abs(&self) -> Result<u64> {
        self.entries
            .values()
            .map(|m| m.unsigned_abs())
            .max()
            .ok_or(Error::EmptyVector)
    }
}

fn compute_report(level: Level, entries: &BTreeMap<TorsionPoint, i64>) -> ValidityReport {
    let ell = BigInt::from(level.ell());
    let mut r2 = BigInt::zero();
    let mut s2 = BigInt::zero();
    let mut rs = BigInt::zero();
    let mut sm = BigInt::zero();
    for (p, &m) in entries {
        let m = BigInt::from(m);
        let (r, s) = (BigInt::from(p.r()), BigInt::from(p.s()));
        r2 += &m * &r * &r;
        s2 += &m * &s * &s;
        rs += &m * &r * &s;
        sm += &m;
    }
    let modulo = |x: BigInt, k: &BigInt| -> u64 {
        let v = ((x % k) + k) % k;
        v.to_u64().unwrap()
    };
    let twelve = BigInt::from(12);
    let report = ValidityReport {
        sum_r2: modulo(r2, &ell),
        sum_s2: modulo(s2, &ell),
        sum_rs: modulo(rs, &ell),
        sum_m: modulo(sm, &twelve),
        valid: false,
    };
    ValidityReport {
        valid: report.sum_r2 == 0 && report.sum_s2 == 0 && report.sum_rs == 0 && report.sum_m == 0,
        ..report
    }
}

pub const SEARCH_MAX_SUPPORT: usize = 6;
pub const SEARCH_MAX_BOUND: u64 = 120;
pub const SEARCH_STEP: i64 = 12;

/// All valid vectors on `support` whose entries are multiples of 12 with
/// |m| ≤ bound, excluding the zero vector.
///
/// Entries step by 12 so the mod-12 congruence holds automatically; this is
/// a sublattice scan, not an exhaustive search over all integers. Results are
/// in odometer order with the first support point varying slowest, starting
/// from the most negative values.
pub fn search_valid(level: Level, support: &[TorsionPoint], bound: u64) -> Result<Vec<ExponentVector>> {
    if support.len() > SEARCH_MAX_SUPPORT {
        return Err(Error::SearchTooLarge(format!(
            "support size {} exceeds {SEARCH_MAX_SUPPORT}",
            support.len()
        )));
    }
    if bound > SEARCH_MAX_BOUND {
        return Err(Error::SearchTooLarge(format!("bound {bound} exceeds {SEARCH_MAX_BOUND}")));
    }
    let mut points: Vec<TorsionPoint> = Vec::new();
    for p in support {
        let (canon, _) = canonicalize(level, p.r() as i64, p.s() as i64)?;
        if !points.contains(&canon) {
            points.push(canon);
        }
    }
    let k = bound as i64 / SEARCH_STEP;
    if points.is_empty() || k == 0 {
        return Ok(Vec::new());
    }
    let ell = level.ell() as i64;
    let values: Vec<i64> = (-k..=k).map(|j| j * SEARCH_STEP).collect();
    let coords: Vec<(i64, i64, i64)> = points
        .iter()
        .map(|p| {
            let (r, s) = (p.r() as i64, p.s() as i64);
            ((r * r) % ell, (s * s) % ell, (r * s) % ell)
        })
        .collect();
    let mut idx = vec![0usize; points.len()];
    let mut out = Vec::new();
    loop {
        let ms: Vec<i64> = idx.iter().map(|&i| values[i]).collect();
        if ms.iter().any(|&m| m != 0) {
            let (mut a, mut b, mut c) = (0i64, 0i64, 0i64);
            for (m, (r2, s2, rs)) in ms.iter().zip(&coords) {
                let m = m.rem_euclid(ell);
                a = (a + m * r2) % ell;
                b = (b + m * s2) % ell;
                c = (c + m * rs) % ell;
            }
            if a == 0 && b == 0 && c == 0 {
                let entries = points
                    .iter()
                    .zip(&ms)
                    .filter(|(_, &m)| m != 0)
                    .map(|(p, &m)| (*p, m))
                    .collect();
                let v = ExponentVector::from_canonical(level, entries);
                debug_assert!(v.is_valid());
                out.push(v);
            }
        }
        // odometer, last position fastest
        let mut pos = points.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < values.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// On-disk form: `{"level": {"p", "f"}, "entries": [{"r", "s", "m"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorFile {
    pub level: LevelSpec,
    pub entries: Vec<EntrySpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub p: u64,
    pub f: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntrySpec {
    pub r: i64,
    pub s: i64,
    pub m: i64,
}

impl VectorFile {
    pub fn to_vector(&self) -> Result<ExponentVector> {
        let level = Level::new(self.level.p, self.level.f)?;
        for (i, e) in self.entries.iter().enumerate() {
            canonicalize(level, e.r, e.s).map_err(|err| {
                Error::Parse(format!("entry {i} (r={}, s={}, m={}): {err}", e.r, e.s, e.m))
            })?;
        }
        ExponentVector::from_entries(level, self.entries.iter().map(|e| (e.r, e.s, e.m)))
    }

    pub fn from_vector(v: &ExponentVector) -> Self {
        VectorFile {
            level: LevelSpec { p: v.level.p(), f: v.level.f() },
            entries: v
                .entries
                .iter()
                .map(|(p, &m)| EntrySpec { r: p.r() as i64, s: p.s() as i64, m })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<ExponentVector> {
        let file: VectorFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.to_vector()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::{classify, representatives};

    fn l5() -> Level {
        Level::new(5, 1).unwrap()
    }

    fn vec5(items: &[(i64, i64, i64)]) -> ExponentVector {
        ExponentVector::from_entries(l5(), items.iter().copied()).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(vec5(&[(1, 0, 60)]).is_valid());
        let r = vec5(&[(1, 0, 12)]).validate();
        assert!(!r.valid);
        assert_eq!(r.sum_r2, 2);
        assert_eq!(r.sum_m, 0);
        assert!(vec5(&[(1, 0, 60), (2, 0, -60)]).is_valid());
        let r = vec5(&[(1, 0, 5)]).validate();
        assert_eq!((r.sum_r2, r.sum_m, r.valid), (0, 5, false));
        assert!(ExponentVector::empty(l5()).is_valid());
    }

    #[test]
    fn canonicalization_merges_orbit_members() {
        let v = vec5(&[(4, 0, 30), (1, 0, 30)]);
        assert_eq!(v, vec5(&[(1, 0, 60)]));
        let zero = vec5(&[(4, 0, 30), (1, 0, -30)]);
        assert!(zero.is_empty());
        assert!(ExponentVector::from_entries(l5(), [(0, 0, 12)]).is_err());
    }

    #[test]
    fn quadratic_sums_invariant_under_sign() {
        // r², s², rs are unchanged by (r, s) ↦ (−r, −s); the raw sums
        // evaluated on non-canonical inputs agree with the canonical report.
        let l = Level::new(7, 1).unwrap();
        let raw = [(6i64, 3i64, 12i64), (5, 0, 24), (0, 6, -36)];
        let v = ExponentVector::from_entries(l, raw).unwrap();
        let ell = 7i64;
        let mut sums = [0i64; 3];
        for (r, s, m) in raw {
            sums[0] += m * r * r;
            sums[1] += m * s * s;
            sums[2] += m * r * s;
        }
        let rep = v.validate();
        assert_eq!(
            [rep.sum_r2, rep.sum_s2, rep.sum_rs],
            sums.map(|x| x.rem_euclid(ell) as u64)
        );
    }

    #[test]
    fn siegel_power_units_are_valid() {
        for l in [l5(), Level::new(7, 1).unwrap(), Level::new(11, 1).unwrap(), Level::new(5, 2).unwrap()] {
            for p in representatives(l) {
                let v = ExponentVector::from_points(l, [(p, 12 * l.ell() as i64)]).unwrap();
                assert!(v.is_valid(), "{p:?}");
            }
        }
    }

    #[test]
    fn lookup_examples() {
        let v0 = vec5(&[(1, 0, 60)]);
        assert_eq!(v0.lookup(classify(l5(), 1), 0).unwrap(), 60);
        assert_eq!(v0.lookup(classify(l5(), 4), 0).unwrap(), 60);
        assert_eq!(v0.lookup(classify(l5(), 2), 0).unwrap(), 0);
        assert_eq!(v0.lookup(classify(l5(), 5), 1).unwrap(), 0);
        assert!(v0.lookup(classify(l5(), 5), 3).is_err());
        assert!(v0.lookup(classify(l5(), 5), 0).is_err());
        assert!(v0.lookup(classify(l5(), 1), 5).is_err());
        let l25 = Level::new(5, 2).unwrap();
        let v = ExponentVector::from_entries(l25, [(5, 1, 300)]).unwrap();
        assert_eq!(v.lookup(classify(l25, 5), 1).unwrap(), 300);
        assert!(v.lookup(classify(l25, 5), 10).is_err());
    }

    #[test]
    fn max_abs_examples() {
        assert_eq!(vec5(&[(1, 0, 60)]).max_abs().unwrap(), 60);
        assert_eq!(vec5(&[(1, 0, 60), (2, 0, -60)]).max_abs().unwrap(), 60);
        assert_eq!(vec5(&[(1, 1, -24), (2, 3, 12)]).max_abs().unwrap(), 24);
        assert_eq!(ExponentVector::empty(l5()).max_abs(), Err(Error::EmptyVector));
    }

    #[test]
    fn search_examples() {
        let (a, _) = canonicalize(l5(), 1, 0).unwrap();
        let (b, _) = canonicalize(l5(), 2, 0).unwrap();
        let single = search_valid(l5(), &[a], 60).unwrap();
        assert_eq!(single, vec![vec5(&[(1, 0, -60)]), vec5(&[(1, 0, 60)])]);
        // exhaustive over all integers |m| ≤ 60 as an independent oracle
        let brute: Vec<i64> = (-60..=60)
            .filter(|&m| m != 0 && vec5(&[(1, 0, m)]).is_valid())
            .collect();
        assert_eq!(brute, vec![-60, 60]);

        let pair = search_valid(l5(), &[a, b], 60).unwrap();
        assert!(pair.contains(&vec5(&[(1, 0, 60), (2, 0, -60)])));
        assert!(pair.iter().all(|v| v.is_valid()));
        assert!(search_valid(l5(), &[a, b], 0).unwrap().is_empty());
        assert!(search_valid(l5(), &[a; 7], 12).is_err());
        assert!(search_valid(l5(), &[a], 121).is_err());
    }

    #[test]
    fn file_round_trip() {
        let text = r#"{"level": {"p": 5, "f": 1}, "entries": [{"r": 4, "s": 0, "m": 60}]}"#;
        let v = VectorFile::parse(text).unwrap();
        assert_eq!(v, vec5(&[(1, 0, 60)]));
        let back = serde_json::to_string(&VectorFile::from_vector(&v)).unwrap();
        assert_eq!(VectorFile::parse(&back).unwrap(), v);
        let bad = r#"{"level": {"p": 5, "f": 1}, "entries": [{"r": 0, "s": 0, "m": 60}]}"#;
        let err = VectorFile::parse(bad).unwrap_err();
        assert!(err.to_string().contains("entry 0"));
    }
}
