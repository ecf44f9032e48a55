//! The s-expression front end: a small prefix DSL for constructing ring
//! elements, automorphisms, normal forms, annuli, graphs and curves, and
//! applying the kernel operations to them.
//!
//! Atoms are rationals `p/q`, nilpotent generators `e1..em` (`eps` aliases
//! `e1`), invertible parameters `t1..tg` (`t` and `s` alias the first
//! two), the Laurent variable `u`, and `inf` for the point at infinity;
//! everything else is a head applied to arguments. Parse errors carry line
//! and column.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value as Json};

use crate::annuli::FramedAnnulus;
use crate::artin::{ArtinSpec, RingElem};
use crate::corolla::{morphism_stable, Morphism, Tag};
use crate::curves::{CurveEdge, FramingSlot, MarkPoint, StableTreeCurve};
use crate::graphs::{collapse, split, CorollaShape, Dir, End, Graph, ModularGraph, Multicorolla};
use crate::laurent::LaurentPoly;
use crate::mobius::P1Point;
use crate::witt::{birkhoff_factor, normal_product, NegAut, NormalForm, PosAut, WittAut};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Atom(String, Pos),
    List(Vec<Expr>, Pos),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Atom(_, p) | Expr::List(_, p) => *p,
        }
    }

    /// Render back to source; parsing the result recovers the tree.
    pub fn to_sexp(&self) -> String {
        match self {
            Expr::Atom(s, _) => s.clone(),
            Expr::List(items, _) => {
                let inner: Vec<String> = items.iter().map(|e| e.to_sexp()).collect();
                format!("({})", inner.join(" "))
            }
        }
    }

    /// Structural equality ignoring positions.
    pub fn same(&self, other: &Expr) -> bool {
        match (self, other) {
            (Expr::Atom(a, _), Expr::Atom(b, _)) => a == b,
            (Expr::List(xs, _), Expr::List(ys, _)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.same(y))
            }
            _ => false,
        }
    }
}

pub fn parse(source: &str) -> Result<Expr> {
    let mut p = Parser {
        src: source.as_bytes(),
        i: 0,
        line: 1,
        col: 1,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if !p.eof() {
        return Err(p.err("trailing input after expression"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    i: usize,
    line: usize,
    col: usize,
}

impl<'a> Parser<'a> {
    fn eof(&self) -> bool {
        self.i >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.i).cloned()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.i += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b';') => {
                    while let Some(c) = self.bump() {
                        if c == b'\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn here(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        self.skip_ws();
        let pos = self.here();
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(self.err("unclosed parenthesis")),
                        Some(b')') => {
                            self.bump();
                            return Ok(Expr::List(items, pos));
                        }
                        _ => items.push(self.expr()?),
                    }
                }
            }
            Some(b')') => Err(self.err("unexpected closing parenthesis")),
            Some(_) => {
                let mut atom = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    atom.push(self.bump().unwrap() as char);
                }
                Ok(Expr::Atom(atom, pos))
            }
        }
    }
}

/// Evaluated values.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Ring(RingElem),
    Laurent(LaurentPoly),
    Aut(WittAut),
    Nf(NormalForm),
    Ann(FramedAnnulus),
    Graph(ModularGraph),
    Mc(Multicorolla),
    Morph(Morphism),
    Curve(StableTreeCurve),
    Tuple(Vec<Value>),
    Bool(bool),
    Json(Json),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Ring(_) => "ring",
            Value::Laurent(_) => "laurent",
            Value::Aut(_) => "aut",
            Value::Nf(_) => "normalform",
            Value::Ann(_) => "annulus",
            Value::Graph(_) => "graph",
            Value::Mc(_) => "multicorolla",
            Value::Morph(_) => "morphism",
            Value::Curve(_) => "curve",
            Value::Tuple(_) => "tuple",
            Value::Bool(_) => "bool",
            Value::Json(_) => "json",
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Ring(x) => x.to_json(),
            Value::Laurent(x) => x.to_json(),
            Value::Aut(x) => x.to_json(),
            Value::Nf(x) => x.to_json(),
            Value::Ann(x) => x.to_json(),
            Value::Graph(x) => x.to_json(),
            Value::Mc(x) => x.to_json(),
            Value::Morph(x) => x.to_json(),
            Value::Curve(x) => x.to_json(),
            Value::Tuple(xs) => Json::Array(xs.iter().map(|x| x.to_json()).collect()),
            Value::Bool(b) => json!(b),
            Value::Json(j) => j.clone(),
        }
    }
}

pub struct Env {
    pub spec: ArtinSpec,
}

impl Env {
    pub fn new(spec: ArtinSpec) -> Env {
        Env { spec }
    }

    /// Evaluate a program and wrap the result with the ring header.
    pub fn run(&self, source: &str) -> Result<Json> {
        let expr = parse(source)?;
        let value = self.eval(&expr)?;
        Ok(json!({
            "spec": self.spec.header_json(),
            "kind": value.kind(),
            "value": value.to_json(),
        }))
    }

    fn type_err(&self, e: &Expr, expected: &str, got: &str) -> Error {
        let p = e.pos();
        Error::Type(format!(
            "{}:{}: expected {}, got {}",
            p.line, p.col, expected, got
        ))
    }

    fn ring(&self, e: &Expr) -> Result<RingElem> {
        match self.eval(e)? {
            Value::Ring(x) => Ok(x),
            v => Err(self.type_err(e, "ring element", v.kind())),
        }
    }

    fn laurent(&self, e: &Expr) -> Result<LaurentPoly> {
        match self.eval(e)? {
            Value::Laurent(x) => Ok(x),
            Value::Ring(c) => Ok(LaurentPoly::constant(self.spec, c)),
            v => Err(self.type_err(e, "laurent polynomial", v.kind())),
        }
    }

    fn aut(&self, e: &Expr) -> Result<WittAut> {
        match self.eval(e)? {
            Value::Aut(x) => Ok(x),
            v => Err(self.type_err(e, "automorphism", v.kind())),
        }
    }

    fn nf(&self, e: &Expr) -> Result<NormalForm> {
        match self.eval(e)? {
            Value::Nf(x) => Ok(x),
            v => Err(self.type_err(e, "normal form", v.kind())),
        }
    }

    fn ann(&self, e: &Expr) -> Result<FramedAnnulus> {
        match self.eval(e)? {
            Value::Ann(x) => Ok(x),
            v => Err(self.type_err(e, "annulus", v.kind())),
        }
    }

    fn graph(&self, e: &Expr) -> Result<ModularGraph> {
        match self.eval(e)? {
            Value::Graph(x) => Ok(x),
            v => Err(self.type_err(e, "graph", v.kind())),
        }
    }

    fn mc(&self, e: &Expr) -> Result<Multicorolla> {
        match self.eval(e)? {
            Value::Mc(x) => Ok(x),
            v => Err(self.type_err(e, "multicorolla", v.kind())),
        }
    }

    fn morph(&self, e: &Expr) -> Result<Morphism> {
        match self.eval(e)? {
            Value::Morph(x) => Ok(x),
            v => Err(self.type_err(e, "morphism", v.kind())),
        }
    }

    fn curve(&self, e: &Expr) -> Result<StableTreeCurve> {
        match self.eval(e)? {
            Value::Curve(x) => Ok(x),
            v => Err(self.type_err(e, "curve", v.kind())),
        }
    }

    fn usize_arg(&self, e: &Expr) -> Result<usize> {
        if let Expr::Atom(s, _) = e {
            if let Ok(n) = s.parse::<usize>() {
                return Ok(n);
            }
        }
        Err(self.type_err(e, "nonnegative integer", "expression"))
    }

    fn point(&self, e: &Expr) -> Result<P1Point> {
        if let Expr::Atom(s, _) = e {
            if s == "inf" {
                return Ok(P1Point::infinity(self.spec));
            }
        }
        Ok(P1Point::affine(self.ring(e)?))
    }

    fn atom_value(&self, s: &str, e: &Expr) -> Result<Value> {
        let spec = self.spec;
        if s == "u" {
            return Ok(Value::Laurent(LaurentPoly::identity(spec)));
        }
        if s == "id" {
            return Ok(Value::Aut(WittAut::identity(spec)));
        }
        if s == "eps" {
            if spec.vars == 0 {
                return Err(self.type_err(e, "a ring with nilpotent variables", "m=0"));
            }
            return Ok(Value::Ring(RingElem::var(spec, 0)));
        }
        if let Some(rest) = s.strip_prefix('e') {
            if let Ok(k) = rest.parse::<u32>() {
                if k >= 1 && k <= spec.vars {
                    return Ok(Value::Ring(RingElem::var(spec, k - 1)));
                }
                return Err(Error::Type(format!("epsilon variable {} out of range", s)));
            }
        }
        if s == "t" || s == "s" {
            let idx = if s == "t" { 0 } else { 1 };
            if idx < spec.generics {
                return Ok(Value::Ring(RingElem::generic(spec, idx)));
            }
            return Err(Error::Type(format!(
                "generic parameter {} needs a ring with g >= {}",
                s,
                idx + 1
            )));
        }
        if let Some(rest) = s.strip_prefix('t') {
            if let Ok(k) = rest.parse::<u32>() {
                if k >= 1 && k <= spec.generics {
                    return Ok(Value::Ring(RingElem::generic(spec, k - 1)));
                }
                return Err(Error::Type(format!("generic parameter {} out of range", s)));
            }
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: BigInt = num
            .parse()
            .map_err(|_| Error::Type(format!("unknown atom `{}`", s)))?;
        let d: BigInt = den
            .parse()
            .map_err(|_| Error::Type(format!("bad denominator in `{}`", s)))?;
        if d == BigInt::from(0) {
            return Err(Error::Type("zero denominator".into()));
        }
        Ok(Value::Ring(RingElem::constant(
            spec,
            BigRational::new(n, d),
        )))
    }

    fn coeff_list(&self, e: &Expr, head: &str) -> Result<Vec<RingElem>> {
        match e {
            Expr::List(items, _) => {
                let rest = if items
                    .first()
                    .is_some_and(|h| matches!(h, Expr::Atom(s, _) if s == head))
                {
                    &items[1..]
                } else {
                    &items[..]
                };
                rest.iter().map(|c| self.ring(c)).collect()
            }
            _ => Err(self.type_err(e, "a coefficient list", "atom")),
        }
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        let spec = self.spec;
        match e {
            Expr::Atom(s, _) => self.atom_value(s, e),
            Expr::List(items, pos) => {
                let Some(Expr::Atom(head, _)) = items.first() else {
                    return Err(Error::Parse {
                        line: pos.line,
                        col: pos.col,
                        msg: "expected an operation head".into(),
                    });
                };
                let args = &items[1..];
                let need = |n: usize| -> Result<()> {
                    if args.len() != n {
                        Err(Error::Type(format!(
                            "{}:{}: `{}` takes {} arguments, got {}",
                            pos.line,
                            pos.col,
                            head,
                            n,
                            args.len()
                        )))
                    } else {
                        Ok(())
                    }
                };
                let need_at_least = |n: usize| -> Result<()> {
                    if args.len() < n {
                        Err(Error::Type(format!(
                            "{}:{}: `{}` needs at least {} arguments",
                            pos.line, pos.col, head, n
                        )))
                    } else {
                        Ok(())
                    }
                };
                match head.as_str() {
                    "radd" | "rmul" => {
                        need_at_least(1)?;
                        let mut acc = self.ring(&args[0])?;
                        for a in &args[1..] {
                            let x = self.ring(a)?;
                            acc = if head == "radd" {
                                acc.add(&x)
                            } else {
                                acc.mul(&x)
                            };
                        }
                        Ok(Value::Ring(acc))
                    }
                    "rsub" => {
                        need(2)?;
                        Ok(Value::Ring(self.ring(&args[0])?.sub(&self.ring(&args[1])?)))
                    }
                    "rneg" => {
                        need(1)?;
                        Ok(Value::Ring(self.ring(&args[0])?.neg()))
                    }
                    "rinv" => {
                        need(1)?;
                        Ok(Value::Ring(self.ring(&args[0])?.invert()?))
                    }
                    "lp" => {
                        let mut p = LaurentPoly::zero(spec);
                        for term in args {
                            let Expr::List(pair, _) = term else {
                                return Err(self.type_err(term, "(exp coeff) pair", "atom"));
                            };
                            if pair.len() != 2 {
                                return Err(self.type_err(term, "(exp coeff) pair", "list"));
                            }
                            let exp = match &pair[0] {
                                Expr::Atom(s, _) => s.parse::<i64>().map_err(|_| {
                                    self.type_err(&pair[0], "integer exponent", "atom")
                                })?,
                                other => {
                                    return Err(self.type_err(other, "integer exponent", "list"))
                                }
                            };
                            let c = self.ring(&pair[1])?;
                            p.set_coeff(exp, p.coeff(exp).add(&c));
                        }
                        Ok(Value::Laurent(p))
                    }
                    "ladd" | "lmul" => {
                        need_at_least(1)?;
                        let mut acc = self.laurent(&args[0])?;
                        for a in &args[1..] {
                            let x = self.laurent(a)?;
                            acc = if head == "ladd" {
                                acc.add(&x)
                            } else {
                                acc.mul(&x)
                            };
                        }
                        Ok(Value::Laurent(acc))
                    }
                    "lneg" => {
                        need(1)?;
                        Ok(Value::Laurent(self.laurent(&args[0])?.neg()))
                    }
                    "lscale" => {
                        need(2)?;
                        Ok(Value::Laurent(
                            self.laurent(&args[1])?.scale(&self.ring(&args[0])?),
                        ))
                    }
                    "linv" => {
                        need(1)?;
                        Ok(Value::Laurent(self.laurent(&args[0])?.invert()?))
                    }
                    "lsubst" => {
                        need(2)?;
                        Ok(Value::Laurent(
                            self.laurent(&args[0])?
                                .substitute(&self.laurent(&args[1])?)?,
                        ))
                    }
                    "lcompinv" => {
                        need(1)?;
                        Ok(Value::Laurent(
                            self.laurent(&args[0])?.compositional_inverse()?,
                        ))
                    }
                    "aut" => {
                        need(2)?;
                        Ok(Value::Aut(WittAut::new(
                            self.ring(&args[0])?,
                            self.laurent(&args[1])?,
                        )?))
                    }
                    "acomp" => {
                        need_at_least(1)?;
                        let mut acc = self.aut(&args[0])?;
                        for a in &args[1..] {
                            acc = acc.compose(&self.aut(a)?)?;
                        }
                        Ok(Value::Aut(acc))
                    }
                    "ainv" => {
                        need(1)?;
                        Ok(Value::Aut(self.aut(&args[0])?.invert()?))
                    }
                    "factor" => {
                        need(1)?;
                        Ok(Value::Nf(birkhoff_factor(&self.aut(&args[0])?)))
                    }
                    "asaut" => {
                        need(1)?;
                        Ok(Value::Aut(self.nf(&args[0])?.as_automorphism()?))
                    }
                    "nf" => {
                        need(3)?;
                        let neg = NegAut::from_coeffs(spec, self.coeff_list(&args[0], "neg")?)?;
                        let mid = self.ring(&args[1])?;
                        let pos = PosAut::from_coeffs(spec, self.coeff_list(&args[2], "pos")?)?;
                        Ok(Value::Nf(NormalForm::new(neg, mid, pos)))
                    }
                    "nprod" => {
                        need_at_least(1)?;
                        let mut acc = self.nf(&args[0])?;
                        for a in &args[1..] {
                            acc = normal_product(&acc, &self.nf(a)?)?;
                        }
                        Ok(Value::Nf(acc))
                    }
                    "ann" => {
                        need(3)?;
                        let alpha_in = NegAut::from_coeffs(spec, self.coeff_list(&args[0], "in")?)?;
                        let smoothing = self.ring(&args[1])?;
                        let alpha_out =
                            NegAut::from_coeffs(spec, self.coeff_list(&args[2], "out")?)?;
                        if smoothing.is_nilpotent() {
                            Ok(Value::Ann(FramedAnnulus::new(
                                alpha_in, smoothing, alpha_out,
                            )?))
                        } else {
                            Ok(Value::Ann(FramedAnnulus::new_generic(
                                alpha_in, smoothing, alpha_out,
                            )?))
                        }
                    }
                    "glue" => {
                        need_at_least(1)?;
                        let mut acc = self.ann(&args[0])?;
                        for a in &args[1..] {
                            acc = acc.glue(&self.ann(a)?)?;
                        }
                        Ok(Value::Ann(acc))
                    }
                    "tochart" => {
                        need(1)?;
                        Ok(Value::Nf(self.ann(&args[0])?.to_monoid_chart()))
                    }
                    "fromchart" => {
                        need(1)?;
                        Ok(Value::Ann(FramedAnnulus::from_monoid_chart(
                            &self.nf(&args[0])?,
                        )?))
                    }
                    "transition" => {
                        need(1)?;
                        Ok(Value::Laurent(self.ann(&args[0])?.transition_generic()?))
                    }
                    "mgraph" => {
                        let mut vertices: Vec<(usize, u32)> = Vec::new();
                        let mut edges: Vec<(usize, End, End)> = Vec::new();
                        for item in args {
                            let Expr::List(parts, _) = item else {
                                return Err(self.type_err(item, "(v ...) or (edge ...)", "atom"));
                            };
                            match parts.first() {
                                Some(Expr::Atom(k, _)) if k == "v" => {
                                    if parts.len() != 3 {
                                        return Err(self.type_err(item, "(v id genus)", "list"));
                                    }
                                    vertices.push((
                                        self.usize_arg(&parts[1])?,
                                        self.usize_arg(&parts[2])? as u32,
                                    ));
                                }
                                Some(Expr::Atom(k, _)) if k == "edge" => {
                                    if parts.len() != 4 {
                                        return Err(self.type_err(
                                            item,
                                            "(edge id src dst)",
                                            "list",
                                        ));
                                    }
                                    let end = |x: &Expr| -> Result<End> {
                                        if let Expr::Atom(s, _) = x {
                                            if s == "*" {
                                                return Ok(End::Star);
                                            }
                                        }
                                        Ok(End::Vertex(self.usize_arg(x)?))
                                    };
                                    edges.push((
                                        self.usize_arg(&parts[1])?,
                                        end(&parts[2])?,
                                        end(&parts[3])?,
                                    ));
                                }
                                _ => return Err(self.type_err(item, "v or edge clause", "list")),
                            }
                        }
                        let genus = vertices.iter().cloned().collect();
                        let g = Graph::new(vertices.iter().map(|(v, _)| *v), edges);
                        Ok(Value::Graph(ModularGraph::new(g, genus)?))
                    }
                    "collapse" => {
                        need(1)?;
                        Ok(Value::Mc(collapse(&self.graph(&args[0])?).multicorolla))
                    }
                    "split" => {
                        need_at_least(1)?;
                        let g = self.graph(&args[0])?;
                        let mut mults = Vec::new();
                        for m in &args[1..] {
                            let Expr::List(pair, _) = m else {
                                return Err(self.type_err(m, "(edge mult) pair", "atom"));
                            };
                            if pair.len() != 2 {
                                return Err(self.type_err(m, "(edge mult) pair", "list"));
                            }
                            mults.push((self.usize_arg(&pair[0])?, self.usize_arg(&pair[1])?));
                        }
                        let sg = split(&g.graph, &mults)?;
                        Ok(Value::Graph(ModularGraph::new(sg, g.genus.clone())?))
                    }
                    "mc" => {
                        let mut corollas = Vec::new();
                        for item in args {
                            let Expr::List(parts, _) = item else {
                                return Err(self.type_err(item, "(cor genus dirs...)", "atom"));
                            };
                            let Some(Expr::Atom(k, _)) = parts.first() else {
                                return Err(self.type_err(item, "cor clause", "list"));
                            };
                            if k != "cor" || parts.len() < 2 {
                                return Err(self.type_err(item, "(cor genus dirs...)", "list"));
                            }
                            let genus = self.usize_arg(&parts[1])? as u32;
                            let dirs = parts[2..]
                                .iter()
                                .map(|d| match d {
                                    Expr::Atom(s, _) if s == "in" => Ok(Dir::In),
                                    Expr::Atom(s, _) if s == "out" => Ok(Dir::Out),
                                    other => Err(self.type_err(other, "`in` or `out`", "atom")),
                                })
                                .collect::<Result<Vec<_>>>()?;
                            corollas.push(CorollaShape { genus, dirs });
                        }
                        Ok(Value::Mc(Multicorolla { corollas }))
                    }
                    "idm" => {
                        need(1)?;
                        Ok(Value::Morph(Morphism::identity(&self.mc(&args[0])?, true)))
                    }
                    "morph" => {
                        need_at_least(2)?;
                        let source = self.mc(&args[0])?;
                        let target = self.mc(&args[1])?;
                        let mut m = Morphism {
                            directed: true,
                            source,
                            target,
                            pairs: Default::default(),
                            closed_components: Default::default(),
                            circles: Default::default(),
                        };
                        for clause in &args[2..] {
                            let Expr::List(parts, _) = clause else {
                                return Err(self.type_err(clause, "morphism clause", "atom"));
                            };
                            let Some(Expr::Atom(k, _)) = parts.first() else {
                                return Err(self.type_err(clause, "morphism clause", "list"));
                            };
                            match k.as_str() {
                                "pair" => {
                                    if parts.len() != 3 {
                                        return Err(self.type_err(
                                            clause,
                                            "(pair tag tag)",
                                            "list",
                                        ));
                                    }
                                    let tag = |x: &Expr| -> Result<Tag> {
                                        let Expr::List(t, _) = x else {
                                            return Err(self.type_err(
                                                x,
                                                "(ms v l) or (ts v l)",
                                                "atom",
                                            ));
                                        };
                                        if t.len() != 3 {
                                            return Err(self.type_err(
                                                x,
                                                "(ms v l) or (ts v l)",
                                                "list",
                                            ));
                                        }
                                        let v = self.usize_arg(&t[1])?;
                                        let l = self.usize_arg(&t[2])?;
                                        if v == 0 || l == 0 {
                                            return Err(Error::Type("tags are 1-based".into()));
                                        }
                                        match &t[0] {
                                            Expr::Atom(s, _) if s == "ms" => Ok(Tag::Src {
                                                vertex: v - 1,
                                                label: l - 1,
                                            }),
                                            Expr::Atom(s, _) if s == "ts" => Ok(Tag::Tgt {
                                                vertex: v - 1,
                                                label: l - 1,
                                            }),
                                            other => Err(self.type_err(other, "ms or ts", "atom")),
                                        }
                                    };
                                    m.pairs.insert((tag(&parts[1])?, tag(&parts[2])?));
                                }
                                "closed" => {
                                    if parts.len() != 3 {
                                        return Err(self.type_err(clause, "(closed v j)", "list"));
                                    }
                                    let v = self.usize_arg(&parts[1])?;
                                    let j = self.usize_arg(&parts[2])?;
                                    if v == 0 || j == 0 {
                                        return Err(Error::Type("indices are 1-based".into()));
                                    }
                                    m.closed_components.insert(v - 1, j - 1);
                                }
                                "circle" => {
                                    if parts.len() != 2 {
                                        return Err(self.type_err(clause, "(circle j)", "list"));
                                    }
                                    let j = self.usize_arg(&parts[1])?;
                                    if j == 0 {
                                        return Err(Error::Type("indices are 1-based".into()));
                                    }
                                    m.circles.insert(j - 1);
                                }
                                _ => {
                                    return Err(self.type_err(clause, "pair/closed/circle", "list"))
                                }
                            }
                        }
                        m.validate()?;
                        Ok(Value::Morph(m))
                    }
                    "mcompose" => {
                        need(2)?;
                        Ok(Value::Morph(
                            self.morph(&args[0])?.then(&self.morph(&args[1])?)?,
                        ))
                    }
                    "pifun" => {
                        need(1)?;
                        let f = self.morph(&args[0])?.project_to_fin()?;
                        Ok(Value::Json(Json::Array(
                            f.iter().map(|j| json!(j + 1)).collect(),
                        )))
                    }
                    "mstable" => {
                        need(1)?;
                        Ok(Value::Bool(morphism_stable(&self.morph(&args[0])?)))
                    }
                    "stabled" | "stableu" => {
                        need(1)?;
                        let mc = self.mc(&args[0])?;
                        Ok(Value::Bool(crate::corolla::multicorolla_stable(
                            &mc,
                            head == "stabled",
                        )))
                    }
                    "curve" => {
                        need_at_least(1)?;
                        let Expr::List(first, _) = &args[0] else {
                            return Err(self.type_err(&args[0], "(comps n)", "atom"));
                        };
                        if first.len() != 2
                            || !matches!(&first[0], Expr::Atom(s, _) if s == "comps")
                        {
                            return Err(self.type_err(&args[0], "(comps n)", "list"));
                        }
                        let comps = self.usize_arg(&first[1])?;
                        let mut slots_raw: Vec<(usize, P1Point, NegAut)> = Vec::new();
                        let mut marks = Vec::new();
                        let mut edges = Vec::new();
                        for clause in &args[1..] {
                            let Expr::List(parts, _) = clause else {
                                return Err(self.type_err(clause, "curve clause", "atom"));
                            };
                            let Some(Expr::Atom(k, _)) = parts.first() else {
                                return Err(self.type_err(clause, "curve clause", "list"));
                            };
                            match k.as_str() {
                                "slot" => {
                                    if parts.len() != 4 {
                                        return Err(self.type_err(
                                            clause,
                                            "(slot vertex point (reparam...))",
                                            "list",
                                        ));
                                    }
                                    slots_raw.push((
                                        self.usize_arg(&parts[1])?,
                                        self.point(&parts[2])?,
                                        NegAut::from_coeffs(
                                            spec,
                                            self.coeff_list(&parts[3], "reparam")?,
                                        )?,
                                    ));
                                }
                                "mark" => {
                                    if parts.len() != 3 {
                                        return Err(self.type_err(
                                            clause,
                                            "(mark vertex point)",
                                            "list",
                                        ));
                                    }
                                    marks.push(MarkPoint {
                                        vertex: self.usize_arg(&parts[1])?,
                                        point: self.point(&parts[2])?,
                                    });
                                }
                                "cedge" => {
                                    if parts.len() != 6 {
                                        return Err(self.type_err(
                                            clause,
                                            "(cedge child cpt parent ppt q)",
                                            "list",
                                        ));
                                    }
                                    edges.push(CurveEdge {
                                        child: self.usize_arg(&parts[1])?,
                                        child_point: self.point(&parts[2])?,
                                        parent: self.usize_arg(&parts[3])?,
                                        parent_point: self.point(&parts[4])?,
                                        node: NormalForm::scaling(self.ring(&parts[5])?),
                                    });
                                }
                                _ => return Err(self.type_err(clause, "slot/mark/cedge", "list")),
                            }
                        }
                        let count = slots_raw.len();
                        let slots: Vec<FramingSlot> = slots_raw
                            .into_iter()
                            .enumerate()
                            .map(|(k, (vertex, point, alpha))| {
                                let data = if k + 1 == count {
                                    NormalForm::new(
                                        NegAut::identity(spec),
                                        RingElem::one(spec),
                                        alpha.antipodal(),
                                    )
                                } else {
                                    NormalForm::new(
                                        alpha.invert(),
                                        RingElem::one(spec),
                                        PosAut::identity(spec),
                                    )
                                };
                                FramingSlot {
                                    vertex,
                                    point,
                                    data,
                                }
                            })
                            .collect();
                        Ok(Value::Curve(StableTreeCurve::new(
                            spec, comps, slots, marks, edges,
                        )?))
                    }
                    "cglue" => {
                        need(3)?;
                        let x = self.curve(&args[0])?;
                        let i = self.usize_arg(&args[1])?;
                        if i == 0 {
                            return Err(Error::Type("slots are 1-based".into()));
                        }
                        let y = self.curve(&args[2])?;
                        Ok(Value::Curve(x.stable_glue(i - 1, &y)?))
                    }
                    "act" => {
                        need(3)?;
                        let a = self.nf(&args[0])?;
                        let x = self.curve(&args[1])?;
                        let i = self.usize_arg(&args[2])?;
                        if i == 0 {
                            return Err(Error::Type("slots are 1-based".into()));
                        }
                        Ok(Value::Curve(x.annulus_act(&a, i - 1)?))
                    }
                    "angle" => {
                        need(2)?;
                        let x = self.curve(&args[0])?;
                        let i = self.usize_arg(&args[1])?;
                        if i == 0 {
                            return Err(Error::Type("slots are 1-based".into()));
                        }
                        Ok(Value::Nf(x.angle(i - 1)?.0))
                    }
                    "commg" => {
                        need(1)?;
                        let x = self.curve(&args[0])?;
                        Ok(Value::Tuple(
                            x.comm_g_map()?
                                .into_iter()
                                .map(|a| Value::Nf(a.0))
                                .collect(),
                        ))
                    }
                    "hour" => {
                        need(1)?;
                        let t = self.curve(&args[0])?.hour_reduced()?;
                        Ok(Value::Json(json!({
                            "components": t.components,
                            "marks": t.marks.iter().map(|(v, p)| json!({
                                "vertex": v, "point": p.to_json()
                            })).collect::<Vec<_>>(),
                            "edges": t.edges.iter().map(|(c, cp, p, pp)| json!({
                                "child": c, "child_point": cp.to_json(),
                                "parent": p, "parent_point": pp.to_json(),
                            })).collect::<Vec<_>>(),
                        })))
                    }
                    "canon" => {
                        need(1)?;
                        let mut x = self.curve(&args[0])?;
                        x.canonicalize()?;
                        Ok(Value::Curve(x))
                    }
                    "creduce" => {
                        need(1)?;
                        Ok(Value::Curve(self.curve(&args[0])?.reduce()))
                    }
                    _ => Err(Error::Type(format!(
                        "{}:{}: unknown operation `{}`",
                        pos.line, pos.col, head
                    ))),
                }
            }
        }
    }
}
