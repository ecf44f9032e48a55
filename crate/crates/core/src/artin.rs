//! Truncated Artin local rings over Q, with exact rational coefficients.
//!
//! The base ring is `Q[e1..em]/m^(N+1)`: every monomial in the nilpotent
//! generators of total degree > N is identically zero. A spec may also
//! adjoin invertible generic parameters `t1..tg` (Laurent monomials in the
//! t's are never truncated); these are used by the generic-fiber transition
//! oracle where a smoothing parameter is treated as an invertible
//! indeterminate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

/// Shape of the coefficient ring: `m` nilpotent generators truncated past
/// total degree `N`, plus `generics` invertible indeterminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ArtinSpec {
    pub vars: u32,
    pub order: u32,
    pub generics: u32,
}

impl ArtinSpec {
    pub fn new(vars: u32, order: u32) -> Self {
        assert!(order >= 1, "truncation order must be positive");
        ArtinSpec {
            vars,
            order,
            generics: 0,
        }
    }

    pub fn with_generics(vars: u32, order: u32, generics: u32) -> Self {
        assert!(order >= 1, "truncation order must be positive");
        ArtinSpec {
            vars,
            order,
            generics,
        }
    }

    /// Same nilpotent part, `g` invertible parameters adjoined.
    pub fn extended(&self, g: u32) -> Self {
        ArtinSpec {
            vars: self.vars,
            order: self.order,
            generics: self.generics + g,
        }
    }

    pub fn header_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("vars".into(), json!(self.vars));
        obj.insert("order".into(), json!(self.order));
        if self.generics > 0 {
            obj.insert("generic".into(), json!(self.generics));
        }
        Value::Object(obj)
    }
}

impl fmt::Display for ArtinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generics > 0 {
            write!(
                f,
                "Q[e1..e{}]/m^{}[t1..t{}±]",
                self.vars,
                self.order + 1,
                self.generics
            )
        } else {
            write!(f, "Q[e1..e{}]/m^{}", self.vars, self.order + 1)
        }
    }
}

/// Exponent vector: nilpotent part (total degree ≤ N) and generic part
/// (arbitrary integers, the parameters being invertible).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub eps: Vec<u16>,
    pub gens: Vec<i64>,
}

impl Monomial {
    pub fn unit(spec: &ArtinSpec) -> Self {
        Monomial {
            eps: vec![0; spec.vars as usize],
            gens: vec![0; spec.generics as usize],
        }
    }

    pub fn eps_degree(&self) -> u32 {
        self.eps.iter().map(|&e| e as u32).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            eps: self
                .eps
                .iter()
                .zip(&other.eps)
                .map(|(a, b)| a + b)
                .collect(),
            gens: self
                .gens
                .iter()
                .zip(&other.gens)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn inverse_of_generic_part(&self) -> Monomial {
        Monomial {
            eps: self.eps.clone(),
            gens: self.gens.iter().map(|g| -g).collect(),
        }
    }
}

/// Element of the truncated ring, in canonical sparse form: no zero
/// coefficients are ever stored, so structural equality is ring equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElem {
    spec: ArtinSpec,
    terms: BTreeMap<Monomial, BigRational>,
}

impl RingElem {
    pub fn zero(spec: ArtinSpec) -> Self {
        RingElem {
            spec,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(spec: ArtinSpec) -> Self {
        Self::constant(spec, BigRational::one())
    }

    pub fn constant(spec: ArtinSpec, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(&spec), c);
        }
        RingElem { spec, terms }
    }

    pub fn from_int(spec: ArtinSpec, n: i64) -> Self {
        Self::constant(spec, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(spec: ArtinSpec, num: i64, den: i64) -> Self {
        Self::constant(spec, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The nilpotent generator `e_{i+1}` (zero-based index).
    pub fn var(spec: ArtinSpec, i: u32) -> Self {
        assert!(i < spec.vars, "epsilon index out of range");
        let mut m = Monomial::unit(&spec);
        m.eps[i as usize] = 1;
        let mut terms = BTreeMap::new();
        if spec.order >= 1 {
            terms.insert(m, BigRational::one());
        }
        RingElem { spec, terms }
    }

    /// The invertible generic parameter `t_{i+1}` (zero-based index).
    pub fn generic(spec: ArtinSpec, i: u32) -> Self {
        assert!(i < spec.generics, "generic index out of range");
        let mut m = Monomial::unit(&spec);
        m.gens[i as usize] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, BigRational::one());
        RingElem { spec, terms }
    }

    pub fn from_terms(spec: ArtinSpec, terms: Vec<(Monomial, BigRational)>) -> Self {
        let mut out = RingElem::zero(spec);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn spec(&self) -> ArtinSpec {
        self.spec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::unit(&self.spec))
                .is_some_and(|c| c.is_one())
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() || m.eps_degree() > self.spec.order {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            // key lookup again to drop the now-zero coefficient
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn check_spec(&self, other: &RingElem) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(
                self.spec.to_string(),
                other.spec.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElem) -> RingElem {
        self.check_spec(other).expect("spec mismatch in add");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &RingElem) -> RingElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RingElem {
        RingElem {
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    /// Exact product, monomials of nilpotent degree > N dropped.
    pub fn mul(&self, other: &RingElem) -> RingElem {
        self.check_spec(other).expect("spec mismatch in mul");
        let mut out = RingElem::zero(self.spec);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if m.eps_degree() <= self.spec.order {
                    out.add_term(m, ca * cb);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> RingElem {
        if c.is_zero() {
            return RingElem::zero(self.spec);
        }
        RingElem {
            spec: self.spec,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> RingElem {
        let mut out = RingElem::one(self.spec);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Image under `ε_i ↦ 0`: the reduced part, still a Laurent polynomial
    /// in the generic parameters.
    pub fn reduce_mod_m(&self) -> RingElem {
        RingElem {
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.eps_degree() == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The nilpotent part `x - reduce_mod_m(x)`.
    pub fn nilpotent_part(&self) -> RingElem {
        RingElem {
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.eps_degree() > 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Rational coefficient of the unit monomial.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::unit(&self.spec))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.terms.keys().all(|m| m.eps_degree() > 0)
    }

    /// Units are the elements whose reduction mod the maximal ideal is a
    /// single invertible monomial (for a plain Artin ring: nonzero constant
    /// term).
    pub fn is_unit(&self) -> bool {
        let red = self.reduce_mod_m();
        red.terms.len() == 1
    }

    /// Exact inverse of a unit via the finite geometric series
    /// `(c + n)^(-1) = c^(-1) Σ_{k≤N} (-n/c)^k`.
    pub fn invert(&self) -> Result<RingElem> {
        let red = self.reduce_mod_m();
        if red.terms.len() != 1 {
            return Err(Error::NotAUnit);
        }
        let (mono, coeff) = red.terms.iter().next().unwrap();
        // leading inverse c^(-1)
        let mut c_inv = RingElem::zero(self.spec);
        c_inv
            .terms
            .insert(mono.inverse_of_generic_part(), coeff.recip());
        // n/c is nilpotent
        let n_over_c = self.nilpotent_part().mul(&c_inv);
        let mut out = RingElem::one(self.spec);
        let mut power = RingElem::one(self.spec);
        for _ in 0..self.spec.order {
            power = power.mul(&n_over_c).neg();
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out.mul(&c_inv))
    }

    /// Substitute values for the generic parameters. Only legal when every
    /// generic exponent appearing is nonnegative (our glued data is always
    /// polynomial in the parameters). The result lives in `target` spec.
    pub fn specialize_generics(&self, target: ArtinSpec, values: &[RingElem]) -> Result<RingElem> {
        assert_eq!(values.len(), self.spec.generics as usize);
        let mut out = RingElem::zero(target);
        for (m, c) in &self.terms {
            let mut term = RingElem::constant(target, c.clone());
            let mut em = Monomial::unit(&target);
            em.eps[..m.eps.len()].copy_from_slice(&m.eps);
            term = term.mul(&RingElem {
                spec: target,
                terms: [(em, BigRational::one())].into(),
            });
            for (i, &g) in m.gens.iter().enumerate() {
                if g < 0 {
                    return Err(Error::Invalid(
                        "cannot specialize a negative generic power".into(),
                    ));
                }
                term = term.mul(&values[i].pow(g as u32));
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Embed into a spec with more generic parameters.
    pub fn extend_spec(&self, target: ArtinSpec) -> RingElem {
        assert!(target.vars == self.spec.vars && target.order == self.spec.order);
        assert!(target.generics >= self.spec.generics);
        let pad = (target.generics - self.spec.generics) as usize;
        RingElem {
            spec: target,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut gens = m.gens.clone();
                    gens.extend(std::iter::repeat_n(0, pad));
                    (
                        Monomial {
                            eps: m.eps.clone(),
                            gens,
                        },
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut obj = serde_json::Map::new();
                obj.insert("monomial".into(), json!(m.eps));
                if self.spec.generics > 0 {
                    obj.insert("generic".into(), json!(m.gens));
                }
                obj.insert("num".into(), json!(c.numer().to_string()));
                obj.insert("den".into(), json!(c.denom().to_string()));
                Value::Object(obj)
            })
            .collect();
        Value::Array(terms)
    }

    pub fn from_json(spec: ArtinSpec, v: &Value) -> Result<RingElem> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Invalid("ring element must be a JSON array".into()))?;
        let mut out = RingElem::zero(spec);
        for t in arr {
            let eps: Vec<u16> = t["monomial"]
                .as_array()
                .ok_or_else(|| Error::Invalid("missing monomial".into()))?
                .iter()
                .map(|x| x.as_u64().unwrap_or(0) as u16)
                .collect();
            let gens: Vec<i64> = match t.get("generic") {
                Some(g) => g
                    .as_array()
                    .ok_or_else(|| Error::Invalid("bad generic exponents".into()))?
                    .iter()
                    .map(|x| x.as_i64().unwrap_or(0))
                    .collect(),
                None => vec![0; spec.generics as usize],
            };
            if eps.len() != spec.vars as usize || gens.len() != spec.generics as usize {
                return Err(Error::Invalid("monomial length does not match spec".into()));
            }
            let num: BigInt = t["num"]
                .as_str()
                .ok_or_else(|| Error::Invalid("num must be a string".into()))?
                .parse()
                .map_err(|_| Error::Invalid("bad numerator".into()))?;
            let den: BigInt = t["den"]
                .as_str()
                .ok_or_else(|| Error::Invalid("den must be a string".into()))?
                .parse()
                .map_err(|_| Error::Invalid("bad denominator".into()))?;
            if den.is_zero() {
                return Err(Error::Invalid("zero denominator".into()));
            }
            out.add_term(Monomial { eps, gens }, BigRational::new(num, den));
        }
        Ok(out)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.eps.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("e{}", i + 1));
                } else if e > 1 {
                    factors.push(format!("e{}^{}", i + 1, e));
                }
            }
            for (i, &g) in m.gens.iter().enumerate() {
                if g == 1 {
                    factors.push(format!("t{}", i + 1));
                } else if g != 0 {
                    factors.push(format!("t{}^{}", i + 1, g));
                }
            }
            if factors.is_empty() {
                write!(f, "{}", abs)?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", abs)?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn spec13() -> ArtinSpec {
        // Q[e]/e^3
        ArtinSpec::new(1, 2)
    }

    #[test]
    fn mul_truncates_by_total_degree() {
        let s = spec13();
        let e = RingElem::var(s, 0);
        let one = RingElem::one(s);
        // (1+e)(1-e) = 1 - e^2
        let p = one.add(&e).mul(&one.sub(&e));
        let expected = one.sub(&e.mul(&e));
        assert_eq!(p, expected);
        // e * e^2 = 0 by truncation
        assert!(e.mul(&e.pow(2)).is_zero());
        // 1 * x = x
        let x = one.add(&e.scale(&q(7, 3)));
        assert_eq!(one.mul(&x), x);
    }

    #[test]
    fn invert_geometric_series() {
        let s = spec13();
        let e = RingElem::var(s, 0);
        let one = RingElem::one(s);
        // (1+e)^(-1) = 1 - e + e^2
        let inv = one.add(&e).invert().unwrap();
        let expected = one.sub(&e).add(&e.mul(&e));
        assert_eq!(inv, expected);
        assert!(one.add(&e).mul(&inv).is_one());
        // constants invert to constants
        let two = RingElem::from_int(s, 2);
        assert_eq!(two.invert().unwrap(), RingElem::rational(s, 1, 2));
        // nilpotents are not units
        assert_eq!(e.invert(), Err(Error::NotAUnit));
    }

    #[test]
    fn unit_and_nilpotent_predicates() {
        let s = ArtinSpec::new(2, 3);
        let e1 = RingElem::var(s, 0);
        let e2 = RingElem::var(s, 1);
        let x = RingElem::from_int(s, 3).add(&e1.mul(&e2));
        assert!(x.is_unit());
        assert!(!x.is_nilpotent());
        assert!(e1.add(&e2).is_nilpotent());
        assert!(!RingElem::zero(s).is_unit());
    }

    #[test]
    fn generic_parameters_are_invertible() {
        let s = ArtinSpec::with_generics(1, 2, 1);
        let t = RingElem::generic(s, 0);
        let e = RingElem::var(s, 0);
        let x = t.mul(&RingElem::one(s).add(&e));
        let inv = x.invert().unwrap();
        assert!(x.mul(&inv).is_one());
        // 1 + t is not a unit in Q[t, t^-1]
        assert!(!RingElem::one(s).add(&t).is_unit());
    }

    #[test]
    fn specialization_is_a_ring_map() {
        let plain = ArtinSpec::new(1, 3);
        let ext = plain.extended(1);
        let e = RingElem::var(ext, 0);
        let t = RingElem::generic(ext, 0);
        let val = RingElem::var(plain, 0).scale(&q(2, 1)); // t -> 2e
        let a = t.mul(&t).add(&e);
        let b = t.add(&RingElem::one(ext));
        let lhs = a
            .mul(&b)
            .specialize_generics(plain, &[val.clone()])
            .unwrap();
        let rhs = a
            .specialize_generics(plain, &[val.clone()])
            .unwrap()
            .mul(&b.specialize_generics(plain, &[val]).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_round_trip() {
        let s = ArtinSpec::new(2, 3);
        let x = RingElem::from_terms(
            s,
            vec![
                (
                    Monomial {
                        eps: vec![0, 0],
                        gens: vec![],
                    },
                    q(1, 2),
                ),
                (
                    Monomial {
                        eps: vec![1, 2],
                        gens: vec![],
                    },
                    q(-7, 5),
                ),
            ],
        );
        let j = x.to_json();
        assert_eq!(RingElem::from_json(s, &j).unwrap(), x);
    }

    #[test]
    fn nilpotency_bound() {
        let s = ArtinSpec::new(2, 3);
        let x = RingElem::var(s, 0)
            .add(&RingElem::var(s, 1).scale(&q(3, 2)))
            .add(&RingElem::var(s, 0).mul(&RingElem::var(s, 1)));
        assert!(x.pow(s.order + 1).is_zero());
    }
}
