//! Framed nodal annuli in universal coordinates.
//!
//! An annulus is the formal curve `xy = t` with incoming framing
//! `x = α_in(u)` and outgoing framing `y = α_out(u)`, both reparametrized
//! by lower-triangular maps `u + e(u^(-1))`. The monoid chart sends this to
//! `(α_in^(-1), t, ι(α_out))` where `ι` is conjugation by the antipode;
//! with that convention the gluing semigroup is exactly the normal-form
//! monoid, and the generic-fiber transition functions compose by
//! `T(A·B) = T_B ∘ J ∘ T_A` with `J(u) = u^(-1)`.

use serde_json::{json, Value};

use crate::artin::{ArtinSpec, RingElem};
use crate::laurent::LaurentPoly;
use crate::witt::{normal_product, NegAut, NormalForm};
use crate::{Error, Result};

/// Framed formal annulus `(α_in, t, α_out)` over the Artin base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedAnnulus {
    alpha_in: NegAut,
    smoothing: RingElem,
    alpha_out: NegAut,
}

impl FramedAnnulus {
    /// Moduli point: nilpotent smoothing parameter.
    pub fn new(alpha_in: NegAut, smoothing: RingElem, alpha_out: NegAut) -> Result<FramedAnnulus> {
        if !smoothing.is_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        Ok(FramedAnnulus {
            alpha_in,
            smoothing,
            alpha_out,
        })
    }

    /// Generic-fiber variant: the smoothing parameter is an invertible
    /// indeterminate, used by the transition oracle.
    pub fn new_generic(
        alpha_in: NegAut,
        smoothing: RingElem,
        alpha_out: NegAut,
    ) -> Result<FramedAnnulus> {
        if !smoothing.is_unit() {
            return Err(Error::NotAUnit);
        }
        Ok(FramedAnnulus {
            alpha_in,
            smoothing,
            alpha_out,
        })
    }

    pub fn nodal(spec: ArtinSpec) -> FramedAnnulus {
        FramedAnnulus {
            alpha_in: NegAut::identity(spec),
            smoothing: RingElem::zero(spec),
            alpha_out: NegAut::identity(spec),
        }
    }

    pub fn spec(&self) -> ArtinSpec {
        self.smoothing.spec()
    }

    pub fn alpha_in(&self) -> &NegAut {
        &self.alpha_in
    }

    pub fn smoothing(&self) -> &RingElem {
        &self.smoothing
    }

    pub fn alpha_out(&self) -> &NegAut {
        &self.alpha_out
    }

    /// Chart change onto the normal-form monoid. Fixed by requiring the
    /// transition composition law below; the smoothing parameter maps to
    /// the mid coordinate on the nose.
    pub fn to_monoid_chart(&self) -> NormalForm {
        NormalForm::new(
            self.alpha_in.invert(),
            self.smoothing.clone(),
            self.alpha_out.antipodal(),
        )
    }

    /// Inverse chart; exact two-sided inverse of [`Self::to_monoid_chart`].
    pub fn from_monoid_chart(nf: &NormalForm) -> Result<FramedAnnulus> {
        let smoothing = nf.mid.clone();
        if !(smoothing.is_nilpotent() || smoothing.is_unit()) {
            return Err(Error::Invalid(
                "smoothing parameter must be nilpotent or invertible".into(),
            ));
        }
        Ok(FramedAnnulus {
            alpha_in: nf.neg.invert(),
            smoothing,
            alpha_out: nf.pos.antipodal(),
        })
    }

    /// Stable gluing: the semigroup law, computed through the monoid chart.
    pub fn glue(&self, other: &FramedAnnulus) -> Result<FramedAnnulus> {
        let prod = normal_product(&self.to_monoid_chart(), &other.to_monoid_chart())?;
        FramedAnnulus::from_monoid_chart(&prod)
    }

    /// The reduced annulus: all nilpotents killed. Strictly nodal for
    /// moduli points.
    pub fn reduce(&self) -> RingElem {
        self.smoothing.reduce_mod_m()
    }

    /// Transition between the two framing charts over the generic fiber:
    /// `u ↦ α_out^(-1)(t / α_in(u))`, finite because the reparametrization
    /// corrections are nilpotent. Requires an invertible smoothing
    /// parameter; this is the geometric oracle, computed without the
    /// monoid machinery.
    pub fn transition_generic(&self) -> Result<LaurentPoly> {
        let t_inv = self.smoothing.invert().map_err(|_| Error::NotAUnit)?;
        // J∘T is the honest automorphism ι(α_out)^(-1) ∘ m_{1/t} ∘ α_in;
        // T itself is its pointwise reciprocal.
        let inner = self.alpha_in.to_laurent().scale(&t_inv);
        let bracket = self
            .alpha_out
            .antipodal()
            .invert()
            .to_laurent()
            .substitute(&inner)?;
        bracket.invert()
    }

    /// Lift to a spec with extra invertible parameters, replacing the
    /// smoothing parameter by the `which`-th generic parameter.
    pub fn lift_generic(&self, target: ArtinSpec, which: u32) -> FramedAnnulus {
        let embed = |a: &NegAut| -> NegAut {
            let coeffs = (1..=a.coeffs().map(|(n, _)| *n).max().unwrap_or(0))
                .map(|n| a.coeff(n).extend_spec(target))
                .collect();
            NegAut::from_coeffs(target, coeffs).expect("nilpotency is preserved by embedding")
        };
        FramedAnnulus {
            alpha_in: embed(&self.alpha_in),
            smoothing: RingElem::generic(target, which),
            alpha_out: embed(&self.alpha_out),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha_in": self.alpha_in.coeff_json(),
            "t": self.smoothing.to_json(),
            "alpha_out": self.alpha_out.coeff_json(),
        })
    }

    pub fn from_json(spec: ArtinSpec, v: &Value) -> Result<FramedAnnulus> {
        FramedAnnulus::new(
            NegAut::from_coeff_json(spec, &v["alpha_in"])?,
            RingElem::from_json(spec, &v["t"])?,
            NegAut::from_coeff_json(spec, &v["alpha_out"])?,
        )
    }
}

/// `T(glue(A,B)) = T(B) ∘ J ∘ T(A)` over the ring with both smoothing
/// parameters inverted; this single identity pins the chart convention.
pub fn transition_law_holds(a: &FramedAnnulus, b: &FramedAnnulus) -> bool {
    let ext = a.spec().extended(2);
    let base = a.spec().generics;
    let a2 = a.lift_generic(ext, base);
    let b2 = b.lift_generic(ext, base + 1);
    let glued = match a2.glue(&b2) {
        Ok(g) => g,
        Err(_) => return false,
    };
    let lhs = match glued.transition_generic() {
        Ok(t) => t,
        Err(_) => return false,
    };
    let ta = a2.transition_generic().unwrap();
    let tb = b2.transition_generic().unwrap();
    // J ∘ T_A is the pointwise reciprocal of T_A, which is of unit form
    let j_ta = match ta.invert() {
        Ok(x) => x,
        Err(_) => return false,
    };
    match tb.substitute(&j_ta) {
        Ok(rhs) => lhs == rhs,
        Err(_) => false,
    }
}
