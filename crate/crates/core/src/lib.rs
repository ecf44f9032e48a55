//! Exact computational calculus of framed formal curves.
//!
//! Everything is computed over truncated Artin local rings
//! `Q[e1..em]/m^(N+1)` with exact rational coefficients, so all identities
//! tested here hold bit-exactly. The crate provides, bottom up:
//!
//! * [`artin`] / [`laurent`] — the coefficient universe and finite Laurent
//!   polynomials over it, with substitution and compositional inversion;
//! * [`witt`] — the automorphism group of the formal torus over an Artin
//!   ring, its positive/negative unipotent subgroups, the normal-ordered
//!   factorization and the monoid law it induces;
//! * [`annuli`] — framed nodal annuli in universal coordinates, the gluing
//!   semigroup and an independent generic-parameter transition oracle;
//! * [`graphs`] / [`corolla`] — graphs with half-edges, corolla collapse,
//!   the colored-operad categories of multicorollas and their axiom checks;
//! * [`curves`] — genus-0 framed curves as decorated dual trees, stable
//!   gluing, the annuli-monoid action and angle maps;
//! * [`dsl`] — the s-expression front end used by the `ffc` binary.

pub mod annuli;
pub mod artin;
pub mod corolla;
pub mod curves;
pub mod dsl;
pub mod graphs;
pub mod laurent;
pub mod mobius;
pub mod suites;
pub mod witt;

pub use annuli::FramedAnnulus;
pub use artin::{ArtinSpec, RingElem};
pub use laurent::LaurentPoly;
pub use witt::{NegAut, NormalForm, PosAut, WittAut};

use thiserror::Error;

/// Errors shared by every module of the kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring spec mismatch: {0} vs {1}")]
    SpecMismatch(String, String),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element is not nilpotent")]
    NotNilpotent,
    #[error("substitution target is not of unit form")]
    NotSubstitutable,
    #[error("element has no compositional inverse")]
    NotInvertible,
    #[error("normal form mid coordinate is not a unit")]
    MidNotAUnit,
    #[error("framing slot {0} out of range")]
    SlotOutOfRange(usize),
    #[error("curve violates stability: {0}")]
    UnstableCurve(String),
    #[error("edge {0} not in graph")]
    EdgeNotInGraph(usize),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("color mismatch: {0}")]
    ColorMismatch(String),
    #[error("invalid object: {0}")]
    Invalid(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("type error: {0}")]
    Type(String),
}

pub type Result<T> = std::result::Result<T, Error>;
