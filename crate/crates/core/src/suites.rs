//! Seeded random generators and the named property suites behind
//! `ffc --check`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::annuli::FramedAnnulus;
use crate::artin::{ArtinSpec, RingElem};
use crate::laurent::LaurentPoly;
use crate::witt::{birkhoff_factor, normal_product, NegAut, NormalForm, PosAut, WittAut};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    let num = rng.gen_range(-6i64..=6);
    let den = rng.gen_range(1i64..=4);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Sparse random element; `nilpotent` forces a zero constant term.
pub fn random_ring_elem<R: Rng>(rng: &mut R, spec: ArtinSpec, nilpotent: bool) -> RingElem {
    let mut out = if nilpotent {
        RingElem::zero(spec)
    } else {
        RingElem::constant(spec, small_rational(rng))
    };
    let tries = rng.gen_range(1..=3);
    for _ in 0..tries {
        if spec.vars == 0 {
            break;
        }
        let mut term = RingElem::constant(spec, small_rational(rng));
        let deg = rng.gen_range(1..=spec.order.min(3));
        for _ in 0..deg {
            let v = rng.gen_range(0..spec.vars);
            term = term.mul(&RingElem::var(spec, v));
        }
        out = out.add(&term);
    }
    out
}

pub fn random_unit<R: Rng>(rng: &mut R, spec: ArtinSpec) -> RingElem {
    loop {
        let x = random_ring_elem(rng, spec, false);
        if x.is_unit() {
            return x;
        }
    }
}

pub fn random_nilpotent<R: Rng>(rng: &mut R, spec: ArtinSpec) -> RingElem {
    random_ring_elem(rng, spec, true)
}

pub fn random_neg_aut<R: Rng>(rng: &mut R, spec: ArtinSpec) -> NegAut {
    let k = rng.gen_range(0..=2);
    let coeffs = (0..k).map(|_| random_nilpotent(rng, spec)).collect();
    NegAut::from_coeffs(spec, coeffs).expect("nilpotent coefficients")
}

pub fn random_pos_aut<R: Rng>(rng: &mut R, spec: ArtinSpec) -> PosAut {
    let k = rng.gen_range(0..=2);
    let coeffs = (0..k).map(|_| random_nilpotent(rng, spec)).collect();
    PosAut::from_coeffs(spec, coeffs).expect("nilpotent coefficients")
}

pub fn random_witt_aut<R: Rng>(rng: &mut R, spec: ArtinSpec) -> WittAut {
    let c = random_unit(rng, spec);
    let mut n = LaurentPoly::zero(spec);
    let k = rng.gen_range(0..=3);
    for _ in 0..k {
        let e = rng.gen_range(-2i64..=2);
        n.set_coeff(e, n.coeff(e).add(&random_nilpotent(rng, spec)));
    }
    WittAut::new(c, n).expect("random data is a valid automorphism")
}

/// Random normal form; `unit_mid` keeps the scaling invertible, otherwise
/// the mid may be a unit, nilpotent or zero.
pub fn random_normal_form<R: Rng>(rng: &mut R, spec: ArtinSpec, unit_mid: bool) -> NormalForm {
    let mid = if unit_mid {
        random_unit(rng, spec)
    } else {
        match rng.gen_range(0..3) {
            0 => random_unit(rng, spec),
            1 => random_nilpotent(rng, spec),
            _ => RingElem::zero(spec),
        }
    };
    NormalForm::new(random_neg_aut(rng, spec), mid, random_pos_aut(rng, spec))
}

pub fn random_annulus<R: Rng>(rng: &mut R, spec: ArtinSpec) -> FramedAnnulus {
    FramedAnnulus::new(
        random_neg_aut(rng, spec),
        random_nilpotent(rng, spec),
        random_neg_aut(rng, spec),
    )
    .expect("nilpotent smoothing parameter")
}

/// One pass/fail line per named suite; used by the CLI `--check` flag.
pub struct SuiteReport {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub detail: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.into(),
            passed: 0,
            failed: 0,
            detail: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.detail.push(format!("FAILED: {}", label));
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

pub fn run_suite(name: &str, spec: ArtinSpec, seed: u64, iterations: usize) -> Option<SuiteReport> {
    match name {
        "artin" => Some(artin_suite(spec, seed, iterations)),
        "witt" => Some(witt_suite(spec, seed, iterations)),
        "annuli" => Some(annuli_suite(spec, seed, iterations)),
        "corolla" => Some(crate::corolla::corolla_suite()),
        "fld" => Some(crate::curves::fld_suite(spec, seed, iterations)),
        _ => None,
    }
}

pub fn suite_names() -> &'static [&'static str] {
    &["artin", "witt", "annuli", "corolla", "fld"]
}

fn artin_suite(spec: ArtinSpec, seed: u64, iterations: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("artin");
    let mut rng = rng_from_seed(seed);
    for _ in 0..iterations {
        let u = random_unit(&mut rng, spec);
        rep.check("unit inverse", u.mul(&u.invert().unwrap()).is_one());
        let n = random_nilpotent(&mut rng, spec);
        rep.check("nilpotency bound", n.pow(spec.order + 1).is_zero());
        let f = random_laurent(&mut rng, spec);
        let g = unit_form_target(&mut rng, spec);
        let h = unit_form_target(&mut rng, spec);
        let lhs = f.substitute(&g).unwrap().substitute(&h).unwrap();
        let rhs = f.substitute(&g.substitute(&h).unwrap()).unwrap();
        rep.check("substitution associativity", lhs == rhs);
        let inv = g.compositional_inverse().unwrap();
        rep.check(
            "compositional inverse",
            g.substitute(&inv).unwrap() == LaurentPoly::identity(spec)
                && inv.substitute(&g).unwrap() == LaurentPoly::identity(spec),
        );
    }
    rep
}

pub fn random_laurent<R: Rng>(rng: &mut R, spec: ArtinSpec) -> LaurentPoly {
    let mut f = LaurentPoly::zero(spec);
    for _ in 0..rng.gen_range(1..=3) {
        let e = rng.gen_range(-3i64..=3);
        f.set_coeff(e, f.coeff(e).add(&random_ring_elem(rng, spec, false)));
    }
    f
}

pub fn unit_form_target<R: Rng>(rng: &mut R, spec: ArtinSpec) -> LaurentPoly {
    let mut g = LaurentPoly::term(spec, 1, random_unit(rng, spec));
    for _ in 0..rng.gen_range(0..=2) {
        let e = rng.gen_range(-2i64..=3);
        if e != 1 {
            g.set_coeff(e, g.coeff(e).add(&random_nilpotent(rng, spec)));
        }
    }
    g
}

fn witt_suite(spec: ArtinSpec, seed: u64, iterations: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("witt");
    let mut rng = rng_from_seed(seed);
    for _ in 0..iterations {
        let f = random_witt_aut(&mut rng, spec);
        let nf = birkhoff_factor(&f);
        rep.check(
            "factorization round trip",
            nf.as_automorphism().unwrap() == f,
        );
        let t = random_normal_form(&mut rng, spec, true);
        rep.check(
            "factorization uniqueness",
            birkhoff_factor(&t.as_automorphism().unwrap()) == t,
        );
        let a = random_normal_form(&mut rng, spec, false);
        let b = random_normal_form(&mut rng, spec, false);
        let c = random_normal_form(&mut rng, spec, false);
        let lhs = normal_product(&normal_product(&a, &b).unwrap(), &c).unwrap();
        let rhs = normal_product(&a, &normal_product(&b, &c).unwrap()).unwrap();
        rep.check("monoid associativity", lhs == rhs);
        let prod = normal_product(&a, &b).unwrap();
        rep.check(
            "reduced mid multiplicativity",
            prod.reduce() == a.reduce().mul(&b.reduce()),
        );
    }
    rep
}

fn annuli_suite(spec: ArtinSpec, seed: u64, iterations: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("annuli");
    let mut rng = rng_from_seed(seed);
    for _ in 0..iterations {
        let a = random_annulus(&mut rng, spec);
        let b = random_annulus(&mut rng, spec);
        let c = random_annulus(&mut rng, spec);
        let ab_c = a.glue(&b).unwrap().glue(&c).unwrap();
        let a_bc = a.glue(&b.glue(&c).unwrap()).unwrap();
        rep.check("gluing associativity", ab_c == a_bc);
        rep.check(
            "chart round trip",
            FramedAnnulus::from_monoid_chart(&a.to_monoid_chart()).unwrap() == a,
        );
        rep.check(
            "transition oracle law",
            crate::annuli::transition_law_holds(&a, &b),
        );
    }
    rep
}
