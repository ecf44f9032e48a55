//! Points of the projective line over the Artin base and exact Möbius
//! transformations.
//!
//! A point is stored in one of two normal forms: affine `[a : 1]` or near
//! infinity `[1 : η]` with nilpotent `η` (the reduction decides which).
//! Möbius transformations are 2×2 matrices with invertible determinant,
//! kept exact; no normalization of the matrix is needed because every use
//! is projective.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::artin::{ArtinSpec, RingElem};
use crate::{Error, Result};

/// Point of `P¹` over the Artin ring, in residue-normalized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum P1Point {
    Affine(RingElem),
    /// `[1 : η]`, the reduction being the point at infinity.
    NearInfinity(RingElem),
}

impl P1Point {
    pub fn affine(x: RingElem) -> P1Point {
        P1Point::Affine(x)
    }

    pub fn infinity(spec: ArtinSpec) -> P1Point {
        P1Point::NearInfinity(RingElem::zero(spec))
    }

    pub fn spec(&self) -> ArtinSpec {
        match self {
            P1Point::Affine(x) | P1Point::NearInfinity(x) => x.spec(),
        }
    }

    /// Homogeneous coordinates `[x : y]`.
    pub fn homogeneous(&self) -> (RingElem, RingElem) {
        match self {
            P1Point::Affine(a) => (a.clone(), RingElem::one(a.spec())),
            P1Point::NearInfinity(eta) => (RingElem::one(eta.spec()), eta.clone()),
        }
    }

    /// Normalize homogeneous coordinates into a point; one coordinate must
    /// be a unit.
    pub fn from_homogeneous(x: RingElem, y: RingElem) -> Result<P1Point> {
        if y.is_unit() {
            Ok(P1Point::Affine(x.mul(&y.invert()?)))
        } else if x.is_unit() {
            Ok(P1Point::NearInfinity(y.mul(&x.invert()?)))
        } else {
            Err(Error::Invalid("homogeneous pair does not generate".into()))
        }
    }

    /// The reduced point; `None` encodes the point at infinity.
    pub fn reduce(&self) -> Option<BigRational> {
        match self {
            P1Point::Affine(a) => Some(a.reduce_mod_m().constant_term()),
            P1Point::NearInfinity(_) => None,
        }
    }

    pub fn distinct_mod_m(&self, other: &P1Point) -> bool {
        self.reduce() != other.reduce()
    }

    /// Kill all nilpotents.
    pub fn reduce_point(&self) -> P1Point {
        match self {
            P1Point::Affine(a) => P1Point::Affine(a.reduce_mod_m()),
            P1Point::NearInfinity(e) => P1Point::NearInfinity(e.reduce_mod_m()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            P1Point::Affine(a) => a.to_json(),
            P1Point::NearInfinity(e) => json!({"inf": e.to_json()}),
        }
    }

    pub fn from_json(spec: ArtinSpec, v: &Value) -> Result<P1Point> {
        if let Some(obj) = v.as_object() {
            if let Some(e) = obj.get("inf") {
                return Ok(P1Point::NearInfinity(RingElem::from_json(spec, e)?));
            }
        }
        Ok(P1Point::Affine(RingElem::from_json(spec, v)?))
    }
}

/// Exact Möbius transformation `z ↦ (a z + b)/(c z + d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mobius {
    pub a: RingElem,
    pub b: RingElem,
    pub c: RingElem,
    pub d: RingElem,
}

impl Mobius {
    pub fn identity(spec: ArtinSpec) -> Mobius {
        Mobius {
            a: RingElem::one(spec),
            b: RingElem::zero(spec),
            c: RingElem::zero(spec),
            d: RingElem::one(spec),
        }
    }

    pub fn det(&self) -> RingElem {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    pub fn apply(&self, p: &P1Point) -> Result<P1Point> {
        let (x, y) = p.homogeneous();
        P1Point::from_homogeneous(
            self.a.mul(&x).add(&self.b.mul(&y)),
            self.c.mul(&x).add(&self.d.mul(&y)),
        )
    }

    /// Matrix product: `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a.mul(&other.a).add(&self.b.mul(&other.c)),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.d)),
            c: self.c.mul(&other.a).add(&self.d.mul(&other.c)),
            d: self.c.mul(&other.b).add(&self.d.mul(&other.d)),
        }
    }

    /// Projective inverse (the adjugate).
    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        }
    }

    /// The unique transformation with `p0 ↦ 0`, `p1 ↦ 1`, `pinf ↦ ∞`;
    /// requires the three points pairwise distinct mod the maximal ideal.
    pub fn through(p0: &P1Point, p1: &P1Point, pinf: &P1Point) -> Result<Mobius> {
        for (a, b) in [(p0, p1), (p0, pinf), (p1, pinf)] {
            if !a.distinct_mod_m(b) {
                return Err(Error::Invalid(
                    "gauge points collide mod the maximal ideal".into(),
                ));
            }
        }
        let (x0, y0) = p0.homogeneous();
        let (x1, y1) = p1.homogeneous();
        let (xi, yi) = pinf.homogeneous();
        // rows (a,b) ∝ (y0, -x0) and (c,d) ∝ (yi, -xi), scaled so p1 ↦ 1
        let mu = yi.mul(&x1).sub(&xi.mul(&y1));
        let nu = y0.mul(&x1).sub(&x0.mul(&y1));
        let m = Mobius {
            a: mu.mul(&y0),
            b: mu.mul(&x0).neg(),
            c: nu.mul(&yi),
            d: nu.mul(&xi).neg(),
        };
        debug_assert!(m.is_invertible());
        Ok(m)
    }
}

/// The crossing scalar of a component between two boundary points. With
/// `λ_a`, `λ_b` the chosen local coordinates, parametrize the component as
/// a torus by `α₁` (0 ↦ a, ∞ ↦ b, derivative one against `λ_a` at `a`) and
/// `α₂` (same endpoints, normalized antipodally against `λ_b` at `b`); the
/// comparison `α₂⁻¹ ∘ α₁` fixes 0 and ∞, hence is the pure scaling
/// returned here.
pub fn crossing_scale(
    a: &P1Point,
    lambda_a: &Mobius,
    b: &P1Point,
    lambda_b: &Mobius,
) -> Result<RingElem> {
    let (xa, ya) = a.homogeneous();
    let (xb, yb) = b.homogeneous();
    // α(t) = [[xb·t, xa], [yb·t, ya]] maps 0 ↦ a, ∞ ↦ b for any unit t.
    // K := λ_a·α has vanishing upper-right entry, so d(λ_a∘α)/dζ|₀ is
    // k1/k4; solve for t making it one.
    let k1_unscaled = lambda_a.a.mul(&xb).add(&lambda_a.b.mul(&yb));
    let k4 = lambda_a.c.mul(&xa).add(&lambda_a.d.mul(&ya));
    let t1 = k4.mul(&k1_unscaled.invert().map_err(|_| {
        Error::Invalid("boundary point is singular for the chosen coordinate".into())
    })?);
    // K' := λ_b·α has vanishing upper-left entry and λ_b(α(ξ))·ξ → k2/k3
    // as ξ → ∞; solve for the antipodal normalization k2/k3 = 1.
    let k2p = lambda_b.a.mul(&xa).add(&lambda_b.b.mul(&ya));
    let k3p_unscaled = lambda_b.c.mul(&xb).add(&lambda_b.d.mul(&yb));
    let t2 = k2p.mul(&k3p_unscaled.invert().map_err(|_| {
        Error::Invalid("boundary point is singular for the chosen coordinate".into())
    })?);
    let alpha = |t: &RingElem| Mobius {
        a: xb.mul(t),
        b: xa.clone(),
        c: yb.mul(t),
        d: ya.clone(),
    };
    let g = alpha(&t2).inverse().compose(&alpha(&t1));
    if !g.b.is_zero() || !g.c.is_zero() {
        return Err(Error::Invalid("crossing comparison is not diagonal".into()));
    }
    Ok(g.a.mul(&g.d.invert()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp() -> ArtinSpec {
        ArtinSpec::new(1, 2)
    }

    fn aff(n: i64) -> P1Point {
        P1Point::Affine(RingElem::from_int(sp(), n))
    }

    #[test]
    fn through_standard_triple_is_identity() {
        let m = Mobius::through(&aff(0), &aff(1), &P1Point::infinity(sp())).unwrap();
        assert_eq!(m.apply(&aff(0)).unwrap(), aff(0));
        assert_eq!(m.apply(&aff(1)).unwrap(), aff(1));
        assert_eq!(
            m.apply(&P1Point::infinity(sp())).unwrap(),
            P1Point::infinity(sp())
        );
        assert_eq!(m.apply(&aff(2)).unwrap(), aff(2));
    }

    #[test]
    fn through_moves_arbitrary_triples() {
        let s = sp();
        let e = RingElem::var(s, 0);
        let p0 = P1Point::Affine(RingElem::from_int(s, 3).add(&e));
        let p1 = P1Point::infinity(s);
        let pi = P1Point::Affine(RingElem::from_int(s, -2));
        let m = Mobius::through(&p0, &p1, &pi).unwrap();
        assert_eq!(m.apply(&p0).unwrap(), aff(0));
        assert_eq!(m.apply(&p1).unwrap(), aff(1));
        assert_eq!(m.apply(&pi).unwrap(), P1Point::infinity(s));
    }

    #[test]
    fn through_rejects_colliding_points() {
        let s = sp();
        let e = RingElem::var(s, 0);
        let p0 = aff(1);
        let p1 = P1Point::Affine(RingElem::from_int(s, 1).add(&e));
        assert!(Mobius::through(&p0, &p1, &P1Point::infinity(s)).is_err());
    }

    #[test]
    fn crossing_scale_standard_positions() {
        // entry at 0 with coordinate z, exit at ∞ with coordinate
        // 1/(1-z): α₁ = id, α₂ = -ξ, so the crossing scale is -1
        let s = sp();
        let zero = aff(0);
        let one = aff(1);
        let inf = P1Point::infinity(s);
        let lambda_zero = Mobius::through(&zero, &one, &inf).unwrap();
        let lambda_inf = Mobius::through(&inf, &zero, &one).unwrap();
        let c = crossing_scale(&zero, &lambda_zero, &inf, &lambda_inf).unwrap();
        assert_eq!(c, RingElem::from_int(s, -1));
    }

    #[test]
    fn crossing_scale_is_a_unit_with_deformed_points() {
        let s = sp();
        let e = RingElem::var(s, 0);
        let zero = P1Point::Affine(e.clone());
        let one = aff(1);
        let inf = P1Point::NearInfinity(e);
        let lambda_zero = Mobius::through(&zero, &one, &inf).unwrap();
        let lambda_one = Mobius::through(&one, &zero, &inf).unwrap();
        let c = crossing_scale(&zero, &lambda_zero, &one, &lambda_one).unwrap();
        assert!(c.is_unit());
    }

    #[test]
    fn json_round_trip() {
        let s = sp();
        let p = P1Point::Affine(RingElem::rational(s, 7, 2).add(&RingElem::var(s, 0)));
        assert_eq!(P1Point::from_json(s, &p.to_json()).unwrap(), p);
        let q = P1Point::NearInfinity(RingElem::var(s, 0));
        assert_eq!(P1Point::from_json(s, &q.to_json()).unwrap(), q);
    }
}
