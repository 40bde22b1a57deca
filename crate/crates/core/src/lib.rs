//! Product exponents of modular units of prime-power level.
//!
//! A modular unit of level ℓ = p^f (p ≥ 5) is a product of Siegel functions
//! g_a^{m_a} over order-ℓ torsion points a, with exponents obeying quadratic
//! congruences mod ℓ and a sum congruence mod 12. Written as
//! κ·q_ℓ^β·∏(1 − q_ℓ^n)^{c(n)}, its exponents c(n) lie in Q(ζ_ℓ).
//!
//! This crate computes c(n) two independent ways:
//!
//! * [`closedform`] evaluates the divisor-sum kernel t_m(n) and Möbius-inverts;
//! * [`qseries`] expands the Siegel product as a truncated series over
//!   Q(ζ_ℓ) and reads c(n) off its logarithmic derivative,
//!
//! and [`bounds`] checks the growth-bound chain for the result.
//!
//! All arithmetic is generic over a coefficient [`Scalar`]; the aliases below
//! fix it to exact big rationals.

pub mod bounds;
pub mod cli;
pub mod closedform;
pub mod cyclofield;
pub mod error;
pub mod hpreal;
pub mod ntharith;
pub mod qseries;
pub mod scalar;
pub mod torsion;
pub mod unitvec;

pub use cyclofield::CycNumber;
pub use error::{Error, Result};
pub use ntharith::Rational;
pub use qseries::QSeries;
pub use scalar::Scalar;
pub use torsion::{Level, ResidueClass, ResidueKind, Sector, TorsionPoint};
pub use unitvec::{ExponentVector, ValidityReport};

use num_rational::BigRational;

/// Exact element of Q(ζ_ℓ).
pub type Cyc = CycNumber<BigRational>;
/// Exact truncated series in q_ℓ over Q(ζ_ℓ).
pub type Series = QSeries<BigRational>;
/// Exact table of product exponents.
pub type Table = closedform::ExponentTable<BigRational>;
/// Double-precision cyclotomic numbers, for quick screening only.
pub type CycF64 = CycNumber<f64>;
