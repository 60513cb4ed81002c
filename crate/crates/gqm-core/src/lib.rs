//! Mixed commutator lengths, filling norms and quasimorphism certificates
//! for groups with solvable normal forms.
//!
//! The crate computes, for a group `G` with a distinguished normal
//! subgroup `N` given as the kernel of a quotient map:
//!
//! - mixed commutator lengths (exact on finite groups, bounded search
//!   elsewhere) with explicit witnesses,
//! - the associated ℓ¹ filling norm on boundaries, solved as an
//!   exact-rational linear program with primal and dual certificates,
//! - two-sided bounds on the stable mixed commutator length: lower bounds
//!   from homogeneous invariant quasimorphisms, upper bounds from search
//!   and from the filling-norm relaxation,
//! - triangulated labelled surfaces realizing commutator decompositions,
//! - abelian invariants of free-product quotients via Smith normal form.
//!
//! All certificate arithmetic is exact (big rationals / big integers);
//! no floating point enters any verified value.

pub mod error;
pub mod word;
pub mod group;
pub mod hom;
pub mod fixtures;
pub mod simplex;
pub mod chains;
pub mod commlength;
pub mod surfaces;
pub mod qm;
pub mod abelian;
pub mod jsonio;
pub mod verify;

pub use error::{Error, Result};
pub use group::{Element, FiniteTable, Group, GroupSpec};
pub use hom::{GroupContext, Homomorphism};
pub use word::{Letter, Word};

/// Default cap on enumerated canonical elements.
pub const DEFAULT_ELEMENT_CAP: usize = 2_000_000;

/// Exact scalar used everywhere a certificate carries a number.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(p: i64, q: i64) -> Rational {
    use num_bigint::BigInt;
    Rational::new(BigInt::from(p), BigInt::from(q))
}
