//! Finite Laurent polynomials in one variable over a truncated Artin ring.
//!
//! These represent framings, transition functions and automorphism data.
//! All substitution targets we meet are of *unit form* `u·w` with `w` a
//! unit plus nilpotent Laurent corrections, which keeps every power
//! `g^k` (k any integer) finite: the corrections die past the nilpotency
//! order.

use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

use crate::artin::{ArtinSpec, RingElem};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    spec: ArtinSpec,
    terms: BTreeMap<i64, RingElem>,
}

impl LaurentPoly {
    pub fn zero(spec: ArtinSpec) -> Self {
        LaurentPoly {
            spec,
            terms: BTreeMap::new(),
        }
    }

    /// The identity map `u`.
    pub fn identity(spec: ArtinSpec) -> Self {
        let mut p = Self::zero(spec);
        p.set_coeff(1, RingElem::one(spec));
        p
    }

    pub fn constant(spec: ArtinSpec, c: RingElem) -> Self {
        let mut p = Self::zero(spec);
        p.set_coeff(0, c);
        p
    }

    /// Single term `c·u^k`.
    pub fn term(spec: ArtinSpec, exp: i64, c: RingElem) -> Self {
        let mut p = Self::zero(spec);
        p.set_coeff(exp, c);
        p
    }

    pub fn from_terms(spec: ArtinSpec, terms: Vec<(i64, RingElem)>) -> Self {
        let mut p = Self::zero(spec);
        for (e, c) in terms {
            p.set_coeff(e, p.coeff(e).add(&c));
        }
        p
    }

    pub fn spec(&self) -> ArtinSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> RingElem {
        self.terms
            .get(&exp)
            .cloned()
            .unwrap_or_else(|| RingElem::zero(self.spec))
    }

    pub fn set_coeff(&mut self, exp: i64, c: RingElem) {
        if c.is_zero() {
            self.terms.remove(&exp);
        } else {
            assert_eq!(c.spec(), self.spec, "coefficient spec mismatch");
            self.terms.insert(exp, c);
        }
    }

    pub fn support(&self) -> Vec<i64> {
        self.terms.keys().cloned().collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &RingElem)> {
        self.terms.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.terms.len() == 1 && self.coeff(1).is_one()
    }

    fn check_spec(&self, other: &LaurentPoly) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(
                self.spec.to_string(),
                other.spec.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        self.check_spec(other).expect("spec mismatch in add");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.set_coeff(*e, out.coeff(*e).add(c));
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            spec: self.spec,
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        self.check_spec(other).expect("spec mismatch in mul");
        let mut out = Self::zero(self.spec);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                let c = out.coeff(e).add(&ca.mul(cb));
                out.set_coeff(e, c);
            }
        }
        out
    }

    pub fn scale(&self, c: &RingElem) -> LaurentPoly {
        let mut out = Self::zero(self.spec);
        for (e, k) in &self.terms {
            out.set_coeff(*e, k.mul(c));
        }
        out
    }

    pub fn shift(&self, by: i64) -> LaurentPoly {
        LaurentPoly {
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + by, c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        let mut out = Self::identity_of_mul(self.spec);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    fn identity_of_mul(spec: ArtinSpec) -> LaurentPoly {
        Self::constant(spec, RingElem::one(spec))
    }

    /// Every coefficient nilpotent except possibly at `u^1`.
    pub fn nilpotent_tail(&self) -> bool {
        self.terms.iter().all(|(e, c)| *e == 1 || c.is_nilpotent())
    }

    /// `f = u·w` with unit `u^1`-coefficient and all other coefficients
    /// nilpotent; such maps substitute into anything.
    pub fn unit_form(&self) -> bool {
        self.coeff(1).is_unit() && self.nilpotent_tail()
    }

    /// Multiplicative reciprocal. Defined when the reduction mod the
    /// maximal ideal is a single invertible monomial `c·u^d`; then
    /// `f = c·u^d (1 + n)` with nilpotent `n` and the geometric series is
    /// finite.
    pub fn invert(&self) -> Result<LaurentPoly> {
        let mut lead: Option<i64> = None;
        for (e, c) in &self.terms {
            if !c.is_nilpotent() {
                if lead.is_some() {
                    return Err(Error::NotAUnit);
                }
                lead = Some(*e);
            }
        }
        let d = lead.ok_or(Error::NotAUnit)?;
        let c = self.coeff(d);
        let c_inv = c.invert()?;
        // n = c^(-1) u^(-d) f - 1, nilpotent coefficients
        let n = self
            .scale(&c_inv)
            .shift(-d)
            .sub(&Self::identity_of_mul(self.spec));
        let mut out = Self::identity_of_mul(self.spec);
        let mut power = Self::identity_of_mul(self.spec);
        for _ in 0..self.spec.order {
            power = power.mul(&n).neg();
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out.scale(&c_inv).shift(-d))
    }

    /// `f ∘ g = Σ f_k g^k`, exact and finite for unit-form `g`.
    /// Substitution is a ring map: `(f1·f2)∘g = (f1∘g)(f2∘g)`.
    pub fn substitute(&self, g: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_spec(g)?;
        if !g.unit_form() {
            return Err(Error::NotSubstitutable);
        }
        let g_inv = g.invert()?;
        let mut out = Self::zero(self.spec);
        // cache powers as we walk the support
        let mut pos = Self::identity_of_mul(self.spec);
        let mut pos_exp = 0i64;
        let mut parts: Vec<(i64, LaurentPoly)> = Vec::new();
        for e in self.terms.keys() {
            if *e >= 0 {
                while pos_exp < *e {
                    pos = pos.mul(g);
                    pos_exp += 1;
                }
                parts.push((*e, pos.clone()));
            }
        }
        let mut neg = Self::identity_of_mul(self.spec);
        let mut neg_exp = 0i64;
        for (e, _) in self.terms.iter().rev() {
            if *e < 0 {
                while neg_exp > *e {
                    neg = neg.mul(&g_inv);
                    neg_exp -= 1;
                }
                parts.push((*e, neg.clone()));
            }
        }
        for (e, p) in parts {
            out = out.add(&p.scale(&self.coeff(e)));
        }
        Ok(out)
    }

    /// Compositional inverse `h` with `g∘h = h∘g = u`, for unit-form `g`.
    /// Solved order by order along the nilpotency filtration.
    pub fn compositional_inverse(&self) -> Result<LaurentPoly> {
        if !self.unit_form() {
            return Err(Error::NotInvertible);
        }
        let c = self.coeff(1);
        let c_inv = c.invert()?;
        // g = m_c ∘ g1 with g1 = u + s, s nilpotent
        let g1 = self.scale(&c_inv);
        let s = g1.sub(&Self::identity(self.spec));
        let mut h = Self::identity(self.spec);
        for _ in 0..=self.spec.order {
            let next = Self::identity(self.spec).sub(&s.substitute(&h)?);
            if next == h {
                break;
            }
            h = next;
        }
        // full inverse is h ∘ m_{c^(-1)}
        let scaled_u = Self::term(self.spec, 1, c_inv);
        h.substitute(&scaled_u)
    }

    /// Precompose with the antipode `u ↦ u^(-1)`: negates every exponent.
    pub fn antipode(&self) -> LaurentPoly {
        LaurentPoly {
            spec: self.spec,
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Reduce every coefficient mod the maximal ideal.
    pub fn reduce_mod_m(&self) -> LaurentPoly {
        let mut out = Self::zero(self.spec);
        for (e, c) in &self.terms {
            out.set_coeff(*e, c.reduce_mod_m());
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&RingElem) -> RingElem) -> LaurentPoly {
        let mut out = Self::zero(self.spec);
        for (e, c) in &self.terms {
            out.set_coeff(*e, f(c));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| json!({"exp": e, "coeff": c.to_json()}))
                .collect(),
        )
    }

    pub fn from_json(spec: ArtinSpec, v: &Value) -> Result<LaurentPoly> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Invalid("laurent polynomial must be a JSON array".into()))?;
        let mut out = Self::zero(spec);
        for t in arr {
            let e = t["exp"]
                .as_i64()
                .ok_or_else(|| Error::Invalid("missing exponent".into()))?;
            let c = RingElem::from_json(spec, &t["coeff"])?;
            out.set_coeff(e, out.coeff(e).add(&c));
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => format!("({})", c),
                1 => format!("({})*u", c),
                _ => format!("({})*u^{}", c, e),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sp(m: u32, n: u32) -> ArtinSpec {
        ArtinSpec::new(m, n)
    }

    fn e(spec: ArtinSpec, i: u32) -> RingElem {
        RingElem::var(spec, i)
    }

    #[test]
    fn substitute_scaling() {
        // f = u^-1, g = 2u -> (1/2) u^-1
        let s = sp(1, 2);
        let f = LaurentPoly::term(s, -1, RingElem::one(s));
        let g = LaurentPoly::term(s, 1, RingElem::from_int(s, 2));
        let r = f.substitute(&g).unwrap();
        assert_eq!(r, LaurentPoly::term(s, -1, RingElem::rational(s, 1, 2)));
    }

    #[test]
    fn substitute_first_order_expansion() {
        // f = u^-1, g = u + e over Q[e]/e^2 -> u^-1 - e u^-2
        let s = sp(1, 1);
        let f = LaurentPoly::term(s, -1, RingElem::one(s));
        let g = LaurentPoly::from_terms(s, vec![(1, RingElem::one(s)), (0, e(s, 0))]);
        let r = f.substitute(&g).unwrap();
        let expected =
            LaurentPoly::from_terms(s, vec![(-1, RingElem::one(s)), (-2, e(s, 0).neg())]);
        assert_eq!(r, expected);
    }

    #[test]
    fn substitute_identity() {
        let s = sp(2, 3);
        let f = LaurentPoly::from_terms(
            s,
            vec![(-2, e(s, 0)), (0, RingElem::from_int(s, 5)), (3, e(s, 1))],
        );
        assert_eq!(f.substitute(&LaurentPoly::identity(s)).unwrap(), f);
    }

    #[test]
    fn substitution_rejects_bad_targets() {
        let s = sp(1, 2);
        let f = LaurentPoly::identity(s);
        // g = u^2 is not of unit form
        let g = LaurentPoly::term(s, 2, RingElem::one(s));
        assert_eq!(f.substitute(&g), Err(Error::NotSubstitutable));
        // neither is g = e*u
        let g2 = LaurentPoly::term(s, 1, e(s, 0));
        assert_eq!(f.substitute(&g2), Err(Error::NotSubstitutable));
    }

    #[test]
    fn compositional_inverse_shift() {
        // g = u + e over Q[e]/e^2 -> u - e
        let s = sp(1, 1);
        let g = LaurentPoly::from_terms(s, vec![(1, RingElem::one(s)), (0, e(s, 0))]);
        let h = g.compositional_inverse().unwrap();
        let expected = LaurentPoly::from_terms(s, vec![(1, RingElem::one(s)), (0, e(s, 0).neg())]);
        assert_eq!(h, expected);
        assert_eq!(g.substitute(&h).unwrap(), LaurentPoly::identity(s));
        assert_eq!(h.substitute(&g).unwrap(), LaurentPoly::identity(s));
    }

    #[test]
    fn compositional_inverse_quadratic() {
        // g = u(1+e*u) over Q[e]/e^2 -> u(1-e*u), verified both orders
        let s = sp(1, 1);
        let g = LaurentPoly::from_terms(s, vec![(1, RingElem::one(s)), (2, e(s, 0))]);
        let h = g.compositional_inverse().unwrap();
        let expected = LaurentPoly::from_terms(s, vec![(1, RingElem::one(s)), (2, e(s, 0).neg())]);
        assert_eq!(h, expected);
        assert_eq!(g.substitute(&h).unwrap(), LaurentPoly::identity(s));
        assert_eq!(h.substitute(&g).unwrap(), LaurentPoly::identity(s));
    }

    #[test]
    fn compositional_inverse_of_identity() {
        let s = sp(1, 3);
        let id = LaurentPoly::identity(s);
        assert_eq!(id.compositional_inverse().unwrap(), id);
    }

    #[test]
    fn multiplicative_inverse() {
        let s = sp(1, 2);
        let f = LaurentPoly::from_terms(
            s,
            vec![(1, RingElem::from_int(s, 3)), (0, e(s, 0)), (-2, e(s, 0))],
        );
        let g = f.invert().unwrap();
        assert_eq!(f.mul(&g), LaurentPoly::constant(s, RingElem::one(s)));
    }

    // randomized structural checks

    fn arb_nilpotent_laurent(spec: ArtinSpec) -> impl Strategy<Value = LaurentPoly> {
        let var_count = spec.vars;
        prop::collection::vec((-3i64..=3, 0u32..var_count, -4i64..=4), 0..4).prop_map(
            move |triples| {
                let mut p = LaurentPoly::zero(spec);
                for (exp, var, num) in triples {
                    let c = RingElem::var(spec, var)
                        .scale(&num_rational::BigRational::from_integer(num.into()));
                    p.set_coeff(exp, p.coeff(exp).add(&c));
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn substitution_associative(
            a in arb_nilpotent_laurent(sp(2, 3)),
            b in arb_nilpotent_laurent(sp(2, 3)),
            f in arb_nilpotent_laurent(sp(2, 3)),
        ) {
            let s = sp(2, 3);
            let g = LaurentPoly::identity(s).add(&a);
            let h = LaurentPoly::identity(s).add(&b);
            let lhs = f.substitute(&g).unwrap().substitute(&h).unwrap();
            let rhs = f.substitute(&g.substitute(&h).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn substitution_is_ring_map(
            a in arb_nilpotent_laurent(sp(2, 3)),
            f1 in arb_nilpotent_laurent(sp(2, 3)),
            f2 in arb_nilpotent_laurent(sp(2, 3)),
        ) {
            let s = sp(2, 3);
            let g = LaurentPoly::identity(s).add(&a);
            let lhs = f1.mul(&f2).substitute(&g).unwrap();
            let rhs = f1.substitute(&g).unwrap().mul(&f2.substitute(&g).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn compositional_inverse_two_sided(a in arb_nilpotent_laurent(sp(2, 3))) {
            let s = sp(2, 3);
            let g = LaurentPoly::identity(s).add(&a);
            let h = g.compositional_inverse().unwrap();
            prop_assert_eq!(g.substitute(&h).unwrap(), LaurentPoly::identity(s));
            prop_assert_eq!(h.substitute(&g).unwrap(), LaurentPoly::identity(s));
        }
    }
}
