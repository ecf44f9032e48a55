//! Genus-zero framed formal curves as decorated dual trees.
//!
//! A curve is a tree of projective lines: each vertex carries marked
//! points and framing attachment points (pairwise distinct mod the maximal
//! ideal), each interior edge carries the normal form of its node (the
//! smoothing parameter is the mid coordinate), and each framing slot
//! carries a monoid element relating the boundary to the canonically
//! chosen local coordinate at the attachment point. The last slot is the
//! outgoing one; the tree is rooted at its host.
//!
//! Local coordinates at special points are cross-ratio coordinates pinned
//! by the component's three gauge anchors, so they are Möbius-equivariant
//! on the nose: a projective twist moves point positions and nothing else,
//! and canonicalization just moves the anchors back to 0, 1, ∞.
//!
//! Angles are ordered products along tree paths: slot data, a pure-scaling
//! comparison per component crossed, the node normal form per edge, the
//! outgoing slot data, and a final strictly nodal factor for the outgoing
//! pinch. Stable gluing stores the consumed slot data (with the pinch
//! between) on the new edge, so the angle identity along glued curves is
//! literally associativity of the monoid.

use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::artin::{ArtinSpec, RingElem};
use crate::mobius::{crossing_scale, Mobius, P1Point};
use crate::suites::SuiteReport;
use crate::witt::{normal_product, NegAut, NormalForm};
use crate::{Error, Result};

/// Reference to a special point of a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PtRef {
    Mark(usize),
    Slot(usize),
    EdgeChild(usize),
    EdgeParent(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramingSlot {
    pub vertex: usize,
    pub point: P1Point,
    /// Entry contribution: for a geometric reparametrization `α` of the
    /// standard framing this is `(α^(-1), 1, id)`; annuli acting on the
    /// slot accumulate here.
    pub data: NormalForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkPoint {
    pub vertex: usize,
    pub point: P1Point,
}

/// Interior edge; `child` is the side away from the root. Crossing the
/// edge rootwards contributes `node`, whose mid coordinate is the
/// smoothing parameter of the node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveEdge {
    pub child: usize,
    pub child_point: P1Point,
    pub parent: usize,
    pub parent_point: P1Point,
    pub node: NormalForm,
}

/// Gauge anchors of one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub anchors: [PtRef; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableTreeCurve {
    spec: ArtinSpec,
    pub components: Vec<Component>,
    pub slots: Vec<FramingSlot>,
    pub marks: Vec<MarkPoint>,
    pub edges: Vec<CurveEdge>,
}

/// Angle values are points of the annuli monoid completion: the outgoing
/// pinch makes every mid strictly nilpotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleValue(pub NormalForm);

impl StableTreeCurve {
    /// Assemble and canonicalize a curve. Anchors are chosen per component
    /// as the first three special points in (marks, slots, edge ends)
    /// order.
    pub fn new(
        spec: ArtinSpec,
        component_count: usize,
        slots: Vec<FramingSlot>,
        marks: Vec<MarkPoint>,
        edges: Vec<CurveEdge>,
    ) -> Result<StableTreeCurve> {
        let mut components = Vec::new();
        for v in 0..component_count {
            let mut refs: Vec<PtRef> = Vec::new();
            for (i, m) in marks.iter().enumerate() {
                if m.vertex == v {
                    refs.push(PtRef::Mark(i));
                }
            }
            for (i, s) in slots.iter().enumerate() {
                if s.vertex == v {
                    refs.push(PtRef::Slot(i));
                }
            }
            for (i, e) in edges.iter().enumerate() {
                if e.child == v {
                    refs.push(PtRef::EdgeChild(i));
                }
                if e.parent == v {
                    refs.push(PtRef::EdgeParent(i));
                }
            }
            if refs.len() < 3 {
                return Err(Error::UnstableCurve(format!(
                    "component {} has {} special points",
                    v,
                    refs.len()
                )));
            }
            components.push(Component {
                anchors: [refs[0], refs[1], refs[2]],
            });
        }
        let mut curve = StableTreeCurve {
            spec,
            components,
            slots,
            marks,
            edges,
        };
        curve.validate()?;
        curve.canonicalize()?;
        Ok(curve)
    }

    pub fn spec(&self) -> ArtinSpec {
        self.spec
    }

    /// Number of framing slots; the last one is outgoing.
    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn incoming_count(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn mark_count(&self) -> usize {
        self.marks.len()
    }

    pub fn root(&self) -> usize {
        self.slots
            .last()
            .expect("curves carry an outgoing slot")
            .vertex
    }

    pub fn position(&self, r: &PtRef) -> &P1Point {
        match r {
            PtRef::Mark(i) => &self.marks[*i].point,
            PtRef::Slot(i) => &self.slots[*i].point,
            PtRef::EdgeChild(i) => &self.edges[*i].child_point,
            PtRef::EdgeParent(i) => &self.edges[*i].parent_point,
        }
    }

    fn special_points(&self, v: usize) -> Vec<(PtRef, P1Point)> {
        let mut out = Vec::new();
        for (i, m) in self.marks.iter().enumerate() {
            if m.vertex == v {
                out.push((PtRef::Mark(i), m.point.clone()));
            }
        }
        for (i, s) in self.slots.iter().enumerate() {
            if s.vertex == v {
                out.push((PtRef::Slot(i), s.point.clone()));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.child == v {
                out.push((PtRef::EdgeChild(i), e.child_point.clone()));
            }
            if e.parent == v {
                out.push((PtRef::EdgeParent(i), e.parent_point.clone()));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots.is_empty() {
            return Err(Error::UnstableCurve("no outgoing framing".into()));
        }
        let n = self.components.len();
        for s in &self.slots {
            if s.vertex >= n {
                return Err(Error::Invalid("slot on a missing component".into()));
            }
        }
        for m in &self.marks {
            if m.vertex >= n {
                return Err(Error::Invalid("mark on a missing component".into()));
            }
        }
        for e in &self.edges {
            if e.child >= n || e.parent >= n || e.child == e.parent {
                return Err(Error::Invalid("bad edge endpoints".into()));
            }
            if !e.node.mid.is_nilpotent() {
                return Err(Error::NotNilpotent);
            }
        }
        // stability and distinctness per component
        for v in 0..n {
            let pts = self.special_points(v);
            if pts.len() < 3 {
                return Err(Error::UnstableCurve(format!(
                    "component {} has {} special points",
                    v,
                    pts.len()
                )));
            }
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if !pts[i].1.distinct_mod_m(&pts[j].1) {
                        return Err(Error::Invalid(format!(
                            "special points collide mod the maximal ideal on component {}",
                            v
                        )));
                    }
                }
            }
            let a = &self.components[v].anchors;
            for r in a {
                let host = match r {
                    PtRef::Mark(i) => self.marks.get(*i).map(|m| m.vertex),
                    PtRef::Slot(i) => self.slots.get(*i).map(|s| s.vertex),
                    PtRef::EdgeChild(i) => self.edges.get(*i).map(|e| e.child),
                    PtRef::EdgeParent(i) => self.edges.get(*i).map(|e| e.parent),
                };
                if host != Some(v) {
                    return Err(Error::Invalid(
                        "anchor points at a foreign component".into(),
                    ));
                }
            }
        }
        // tree rooted at the outgoing host, edges oriented rootwards
        let root = self.root();
        let mut parent_edge: Vec<Option<usize>> = vec![None; n];
        for (i, e) in self.edges.iter().enumerate() {
            if parent_edge[e.child].replace(i).is_some() {
                return Err(Error::Invalid("component has two parent edges".into()));
            }
        }
        if parent_edge[root].is_some() {
            return Err(Error::Invalid("the outgoing host must be the root".into()));
        }
        for v in 0..n {
            // climb to the root, watching for cycles
            let mut cur = v;
            let mut steps = 0;
            while cur != root {
                let Some(e) = parent_edge[cur] else {
                    return Err(Error::Invalid("tree is disconnected".into()));
                };
                cur = self.edges[e].parent;
                steps += 1;
                if steps > n {
                    return Err(Error::Invalid("edge orientation has a cycle".into()));
                }
            }
        }
        Ok(())
    }

    /// Local coordinate at a special point: the cross-ratio coordinate
    /// through the first two anchors away from the point.
    fn local_coordinate(&self, v: usize, p: &P1Point) -> Result<Mobius> {
        let mut refs: Vec<&P1Point> = Vec::new();
        for r in &self.components[v].anchors {
            let pos = self.position(r);
            if pos != p {
                refs.push(pos);
            }
            if refs.len() == 2 {
                break;
            }
        }
        if refs.len() < 2 {
            return Err(Error::Invalid(
                "not enough anchors for a local coordinate".into(),
            ));
        }
        Mobius::through(p, refs[0], refs[1])
    }

    /// Canonicalize in place: first apply the per-component gauge moving
    /// the anchors to 0, 1, ∞ (anchor data is ordering-free), then
    /// renumber vertices by rooted traversal with children ordered by a
    /// data-complete subtree signature, renumber edges by discovery, and
    /// sort the marks. Signature ties are genuine twins, for which either
    /// order yields the same curve.
    pub fn canonicalize(&mut self) -> Result<()> {
        self.validate()?;
        let n = self.components.len();
        for v in 0..n {
            let a = self.components[v].anchors;
            let m = Mobius::through(
                self.position(&a[0]),
                self.position(&a[1]),
                self.position(&a[2]),
            )?;
            if m != Mobius::identity(self.spec) {
                self.apply_mobius_component(v, &m)?;
            }
        }
        let root = self.root();
        let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (edge, child)
        for (i, e) in self.edges.iter().enumerate() {
            children[e.parent].push((i, e.child));
        }
        fn signature(
            curve: &StableTreeCurve,
            children: &[Vec<(usize, usize)>],
            v: usize,
        ) -> String {
            let mut slots: Vec<String> = Vec::new();
            for (i, s) in curve.slots.iter().enumerate() {
                if s.vertex == v {
                    slots.push(format!("s{}@{}", i, s.point.to_json()));
                }
            }
            let mut marks: Vec<String> = Vec::new();
            for m in &curve.marks {
                if m.vertex == v {
                    marks.push(format!("m@{}", m.point.to_json()));
                }
            }
            marks.sort();
            let mut kids: Vec<String> = children[v]
                .iter()
                .map(|(e, c)| {
                    let edge = &curve.edges[*e];
                    format!(
                        "[{}|{}|{}|{}]",
                        edge.node.to_json(),
                        edge.child_point.to_json(),
                        edge.parent_point.to_json(),
                        signature(curve, children, *c)
                    )
                })
                .collect();
            kids.sort();
            format!(
                "({};{};{})",
                slots.join(","),
                marks.join(","),
                kids.join(",")
            )
        }
        fn order(
            curve: &StableTreeCurve,
            children: &[Vec<(usize, usize)>],
            v: usize,
            vert_order: &mut Vec<usize>,
            edge_order: &mut Vec<usize>,
        ) {
            vert_order.push(v);
            let mut kids = children[v].clone();
            kids.sort_by_cached_key(|(e, c)| {
                let edge = &curve.edges[*e];
                format!(
                    "[{}|{}|{}|{}]",
                    edge.node.to_json(),
                    edge.child_point.to_json(),
                    edge.parent_point.to_json(),
                    signature(curve, children, *c)
                )
            });
            for (e, c) in kids {
                edge_order.push(e);
                order(curve, children, c, vert_order, edge_order);
            }
        }
        let mut vert_order = Vec::new();
        let mut edge_order = Vec::new();
        order(self, &children, root, &mut vert_order, &mut edge_order);
        let mut vmap = vec![0usize; n];
        for (new, old) in vert_order.iter().enumerate() {
            vmap[*old] = new;
        }
        let mut emap = vec![0usize; self.edges.len()];
        for (new, old) in edge_order.iter().enumerate() {
            emap[*old] = new;
        }
        // marks sort by (new vertex, exact position)
        let mut mark_order: Vec<usize> = (0..self.marks.len()).collect();
        mark_order.sort_by_cached_key(|i| {
            let m = &self.marks[*i];
            (vmap[m.vertex], m.point.to_json().to_string())
        });
        let mut mmap = vec![0usize; self.marks.len()];
        for (new, old) in mark_order.iter().enumerate() {
            mmap[*old] = new;
        }
        let remap_ref = |r: &PtRef| match r {
            PtRef::Mark(i) => PtRef::Mark(mmap[*i]),
            PtRef::Slot(i) => PtRef::Slot(*i),
            PtRef::EdgeChild(i) => PtRef::EdgeChild(emap[*i]),
            PtRef::EdgeParent(i) => PtRef::EdgeParent(emap[*i]),
        };
        let placeholder = Component {
            anchors: [PtRef::Mark(0), PtRef::Mark(0), PtRef::Mark(0)],
        };
        let mut components = vec![placeholder; n];
        for (old, c) in self.components.iter().enumerate() {
            components[vmap[old]] = Component {
                anchors: [
                    remap_ref(&c.anchors[0]),
                    remap_ref(&c.anchors[1]),
                    remap_ref(&c.anchors[2]),
                ],
            };
        }
        let mut edges = vec![None; self.edges.len()];
        for (old, e) in self.edges.iter().enumerate() {
            edges[emap[old]] = Some(CurveEdge {
                child: vmap[e.child],
                child_point: e.child_point.clone(),
                parent: vmap[e.parent],
                parent_point: e.parent_point.clone(),
                node: e.node.clone(),
            });
        }
        let edges: Vec<CurveEdge> = edges.into_iter().map(Option::unwrap).collect();
        let slots = self
            .slots
            .iter()
            .map(|s| FramingSlot {
                vertex: vmap[s.vertex],
                point: s.point.clone(),
                data: s.data.clone(),
            })
            .collect();
        let mut marks = vec![None; self.marks.len()];
        for (old, m) in self.marks.iter().enumerate() {
            marks[mmap[old]] = Some(MarkPoint {
                vertex: vmap[m.vertex],
                point: m.point.clone(),
            });
        }
        let marks: Vec<MarkPoint> = marks.into_iter().map(Option::unwrap).collect();
        self.components = components;
        self.slots = slots;
        self.marks = marks;
        self.edges = edges;
        Ok(())
    }

    /// Transform every point position of one component; decorations are
    /// untouched because local coordinates are anchor-relative.
    pub fn apply_mobius_component(&mut self, v: usize, m: &Mobius) -> Result<()> {
        if !m.is_invertible() {
            return Err(Error::NotAUnit);
        }
        for s in &mut self.slots {
            if s.vertex == v {
                s.point = m.apply(&s.point)?;
            }
        }
        for mk in &mut self.marks {
            if mk.vertex == v {
                mk.point = m.apply(&mk.point)?;
            }
        }
        for e in &mut self.edges {
            if e.child == v {
                e.child_point = m.apply(&e.child_point)?;
            }
            if e.parent == v {
                e.parent_point = m.apply(&e.parent_point)?;
            }
        }
        Ok(())
    }

    fn parent_edge(&self, v: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.child == v)
    }

    /// The angle of an incoming slot: the ordered product of the slot
    /// data, a scaling per component crossed, the node data per edge, the
    /// outgoing data and the final pinch.
    pub fn angle(&self, i: usize) -> Result<AngleValue> {
        if i + 1 >= self.slots.len() {
            return Err(Error::SlotOutOfRange(i));
        }
        let root = self.root();
        let mut factors: Vec<NormalForm> = vec![self.slots[i].data.clone()];
        let mut v = self.slots[i].vertex;
        let mut entry = self.slots[i].point.clone();
        while v != root {
            let e = self.parent_edge(v).expect("validated tree");
            let exit = self.edges[e].child_point.clone();
            factors.push(self.crossing(v, &entry, &exit)?);
            factors.push(self.edges[e].node.clone());
            entry = self.edges[e].parent_point.clone();
            v = self.edges[e].parent;
        }
        let out = self.slots.last().unwrap();
        factors.push(self.crossing(root, &entry, &out.point)?);
        factors.push(out.data.clone());
        factors.push(NormalForm::nodal(self.spec));
        let mut acc = factors[0].clone();
        for f in &factors[1..] {
            acc = normal_product(&acc, f)?;
        }
        Ok(AngleValue(acc))
    }

    fn crossing(&self, v: usize, a: &P1Point, b: &P1Point) -> Result<NormalForm> {
        let la = self.local_coordinate(v, a)?;
        let lb = self.local_coordinate(v, b)?;
        Ok(NormalForm::scaling(crossing_scale(a, &la, b, &lb)?))
    }

    /// Act on a slot by a monoid element: incoming slots are
    /// left-multiplied (an annulus inserted before the boundary), the
    /// outgoing slot is right-multiplied.
    pub fn annulus_act(&self, a: &NormalForm, i: usize) -> Result<StableTreeCurve> {
        if i >= self.slots.len() {
            return Err(Error::SlotOutOfRange(i));
        }
        let mut out = self.clone();
        out.slots[i].data = if i + 1 == self.slots.len() {
            normal_product(&out.slots[i].data, a)?
        } else {
            normal_product(a, &out.slots[i].data)?
        };
        Ok(out)
    }

    /// Stable gluing: the outgoing slot of `inner` is glued into incoming
    /// slot `i`; the two consumed slots' data combine with the pinch into
    /// the new node. Slot numbering follows the operad convention: the
    /// inner curve's incoming slots replace slot `i` in place.
    pub fn stable_glue(&self, i: usize, inner: &StableTreeCurve) -> Result<StableTreeCurve> {
        if self.spec != inner.spec {
            return Err(Error::SpecMismatch(
                self.spec.to_string(),
                inner.spec.to_string(),
            ));
        }
        if i + 1 >= self.slots.len() {
            return Err(Error::SlotOutOfRange(i));
        }
        let shift = self.components.len();
        let outer_slot = &self.slots[i];
        let inner_out = inner.slots.last().unwrap();
        let pinch = normal_product(
            &normal_product(&inner_out.data, &NormalForm::nodal(self.spec))?,
            &outer_slot.data,
        )?;
        let new_edge = CurveEdge {
            child: inner_out.vertex + shift,
            child_point: inner_out.point.clone(),
            parent: outer_slot.vertex,
            parent_point: outer_slot.point.clone(),
            node: pinch,
        };
        let new_edge_index = self.edges.len() + inner.edges.len();
        // slots: outer 0..i, inner incoming, outer i+1.., outer outgoing
        let mut slots: Vec<FramingSlot> = Vec::new();
        let mut slot_remap_outer: BTreeMap<usize, usize> = BTreeMap::new();
        let mut slot_remap_inner: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, s) in self.slots.iter().enumerate().take(i) {
            slot_remap_outer.insert(k, slots.len());
            slots.push(s.clone());
        }
        for (k, s) in inner.slots.iter().enumerate().take(inner.slots.len() - 1) {
            slot_remap_inner.insert(k, slots.len());
            slots.push(FramingSlot {
                vertex: s.vertex + shift,
                point: s.point.clone(),
                data: s.data.clone(),
            });
        }
        for (k, s) in self.slots.iter().enumerate().skip(i + 1) {
            slot_remap_outer.insert(k, slots.len());
            slots.push(s.clone());
        }
        let mut marks: Vec<MarkPoint> = self.marks.clone();
        let mut mark_remap_inner: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, m) in inner.marks.iter().enumerate() {
            mark_remap_inner.insert(k, marks.len());
            marks.push(MarkPoint {
                vertex: m.vertex + shift,
                point: m.point.clone(),
            });
        }
        let mut edges: Vec<CurveEdge> = self.edges.clone();
        let inner_edge_shift = edges.len();
        for e in &inner.edges {
            edges.push(CurveEdge {
                child: e.child + shift,
                child_point: e.child_point.clone(),
                parent: e.parent + shift,
                parent_point: e.parent_point.clone(),
                node: e.node.clone(),
            });
        }
        edges.push(new_edge);
        // components with remapped anchors; the consumed slots become the
        // ends of the new edge, keeping their positions
        let remap_outer = |r: &PtRef| -> PtRef {
            match r {
                PtRef::Mark(k) => PtRef::Mark(*k),
                PtRef::Slot(k) => {
                    if *k == i {
                        PtRef::EdgeParent(new_edge_index)
                    } else {
                        PtRef::Slot(slot_remap_outer[k])
                    }
                }
                PtRef::EdgeChild(k) => PtRef::EdgeChild(*k),
                PtRef::EdgeParent(k) => PtRef::EdgeParent(*k),
            }
        };
        let remap_inner = |r: &PtRef| -> PtRef {
            match r {
                PtRef::Mark(k) => PtRef::Mark(mark_remap_inner[k]),
                PtRef::Slot(k) => {
                    if *k + 1 == inner.slots.len() {
                        PtRef::EdgeChild(new_edge_index)
                    } else {
                        PtRef::Slot(slot_remap_inner[k])
                    }
                }
                PtRef::EdgeChild(k) => PtRef::EdgeChild(k + inner_edge_shift),
                PtRef::EdgeParent(k) => PtRef::EdgeParent(k + inner_edge_shift),
            }
        };
        let mut components: Vec<Component> = Vec::new();
        for c in &self.components {
            components.push(Component {
                anchors: [
                    remap_outer(&c.anchors[0]),
                    remap_outer(&c.anchors[1]),
                    remap_outer(&c.anchors[2]),
                ],
            });
        }
        for c in &inner.components {
            components.push(Component {
                anchors: [
                    remap_inner(&c.anchors[0]),
                    remap_inner(&c.anchors[1]),
                    remap_inner(&c.anchors[2]),
                ],
            });
        }
        let mut curve = StableTreeCurve {
            spec: self.spec,
            components,
            slots,
            marks,
            edges,
        };
        curve.canonicalize()?;
        Ok(curve)
    }

    /// Permute the incoming slots (the symmetric group action).
    pub fn relabel_slots(&self, perm: &[usize]) -> Result<StableTreeCurve> {
        let n = self.incoming_count();
        if perm.len() != n {
            return Err(Error::Invalid("permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for p in perm {
            if *p >= n || seen[*p] {
                return Err(Error::Invalid("not a permutation".into()));
            }
            seen[*p] = true;
        }
        let mut out = self.clone();
        // slot k of the result is slot perm[k] of the original
        let mut slots: Vec<FramingSlot> = Vec::with_capacity(self.slots.len());
        for p in perm {
            slots.push(self.slots[*p].clone());
        }
        slots.push(self.slots[n].clone());
        // anchors referencing slots follow the renaming
        let mut inverse = vec![0usize; n];
        for (k, p) in perm.iter().enumerate() {
            inverse[*p] = k;
        }
        for c in &mut out.components {
            for a in &mut c.anchors {
                if let PtRef::Slot(s) = a {
                    if *s < n {
                        *a = PtRef::Slot(inverse[*s]);
                    }
                }
            }
        }
        out.slots = slots;
        out.canonicalize()?;
        Ok(out)
    }

    /// Kill all nilpotents: the reduced stable nodal marked tree,
    /// re-canonicalized (the traversal order is recomputed from the
    /// reduced data).
    pub fn reduce(&self) -> StableTreeCurve {
        let reduce_nf = |nf: &NormalForm| NormalForm::scaling(nf.mid.reduce_mod_m());
        let mut out = StableTreeCurve {
            spec: self.spec,
            components: self.components.clone(),
            slots: self
                .slots
                .iter()
                .map(|s| FramingSlot {
                    vertex: s.vertex,
                    point: s.point.reduce_point(),
                    data: reduce_nf(&s.data),
                })
                .collect(),
            marks: self
                .marks
                .iter()
                .map(|m| MarkPoint {
                    vertex: m.vertex,
                    point: m.point.reduce_point(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| CurveEdge {
                    child: e.child,
                    child_point: e.child_point.reduce_point(),
                    parent: e.parent,
                    parent_point: e.parent_point.reduce_point(),
                    node: reduce_nf(&e.node),
                })
                .collect(),
        };
        out.canonicalize().expect("reduction preserves validity");
        out
    }

    /// The angle tuple of all incoming slots: the map into the
    /// G-decorated commutative operad over the annuli monoid.
    pub fn comm_g_map(&self) -> Result<Vec<AngleValue>> {
        (0..self.incoming_count()).map(|i| self.angle(i)).collect()
    }

    /// Reduced hourglass shadow: each framing slot contributes a fresh
    /// three-pointed projective line carrying the two extra marks, giving
    /// a stable marked tree with `n + 2f` marks.
    pub fn hour_reduced(&self) -> Result<ReducedMarkedTree> {
        let reduced = self.reduce();
        let mut components = reduced.components.len();
        let mut marks: Vec<(usize, P1Point)> = reduced
            .marks
            .iter()
            .map(|m| (m.vertex, m.point.clone()))
            .collect();
        let mut edges: Vec<(usize, P1Point, usize, P1Point)> = reduced
            .edges
            .iter()
            .map(|e| {
                (
                    e.child,
                    e.child_point.clone(),
                    e.parent,
                    e.parent_point.clone(),
                )
            })
            .collect();
        for s in &reduced.slots {
            let v = components;
            components += 1;
            // the new line carries its node at ∞ and the marks at 0 and 1
            edges.push((v, P1Point::infinity(self.spec), s.vertex, s.point.clone()));
            marks.push((v, P1Point::affine(RingElem::zero(self.spec))));
            marks.push((v, P1Point::affine(RingElem::one(self.spec))));
        }
        let tree = ReducedMarkedTree {
            components,
            marks,
            edges,
        };
        tree.check_stable()?;
        Ok(tree)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "spec": self.spec.header_json(),
            "components": self.components.len(),
            "edges": self.edges.iter().map(|e| json!({
                "ends": [
                    {"vertex": e.child, "point": e.child_point.to_json()},
                    {"vertex": e.parent, "point": e.parent_point.to_json()},
                ],
                "q": e.node.mid.to_json(),
                "node": e.node.to_json(),
            })).collect::<Vec<_>>(),
            "framings": self.slots.iter().map(|s| json!({
                "vertex": s.vertex,
                "point": s.point.to_json(),
                "reparam": s.data.to_json(),
            })).collect::<Vec<_>>(),
            "marks": self.marks.iter().map(|m| json!({
                "vertex": m.vertex,
                "point": m.point.to_json(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(spec: ArtinSpec, v: &Value) -> Result<StableTreeCurve> {
        let comps = v["components"]
            .as_u64()
            .ok_or_else(|| Error::Invalid("missing component count".into()))?
            as usize;
        let empty = Vec::new();
        let mut slots = Vec::new();
        for s in v["framings"].as_array().unwrap_or(&empty) {
            slots.push(FramingSlot {
                vertex: s["vertex"].as_u64().unwrap_or(0) as usize,
                point: P1Point::from_json(spec, &s["point"])?,
                data: NormalForm::from_json(spec, &s["reparam"])?,
            });
        }
        let mut marks = Vec::new();
        for m in v["marks"].as_array().unwrap_or(&empty) {
            marks.push(MarkPoint {
                vertex: m["vertex"].as_u64().unwrap_or(0) as usize,
                point: P1Point::from_json(spec, &m["point"])?,
            });
        }
        let mut edges = Vec::new();
        for e in v["edges"].as_array().unwrap_or(&empty) {
            let ends = e["ends"]
                .as_array()
                .ok_or_else(|| Error::Invalid("edge ends missing".into()))?;
            if ends.len() != 2 {
                return Err(Error::Invalid("edge needs two ends".into()));
            }
            edges.push(CurveEdge {
                child: ends[0]["vertex"].as_u64().unwrap_or(0) as usize,
                child_point: P1Point::from_json(spec, &ends[0]["point"])?,
                parent: ends[1]["vertex"].as_u64().unwrap_or(0) as usize,
                parent_point: P1Point::from_json(spec, &ends[1]["point"])?,
                node: NormalForm::from_json(spec, &e["node"])?,
            });
        }
        StableTreeCurve::new(spec, comps, slots, marks, edges)
    }
}

/// Combinatorial point of the Deligne-Mumford space of stable marked
/// trees: the reduced hourglass image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedMarkedTree {
    pub components: usize,
    pub marks: Vec<(usize, P1Point)>,
    pub edges: Vec<(usize, P1Point, usize, P1Point)>,
}

impl ReducedMarkedTree {
    pub fn check_stable(&self) -> Result<()> {
        for v in 0..self.components {
            let mut pts: Vec<&P1Point> = Vec::new();
            for (w, p) in &self.marks {
                if *w == v {
                    pts.push(p);
                }
            }
            for (c, pc, pa, ppt) in &self.edges {
                if *c == v {
                    pts.push(pc);
                }
                if *pa == v {
                    pts.push(ppt);
                }
            }
            if pts.len() < 3 {
                return Err(Error::UnstableCurve(format!(
                    "reduced component {} has {} special points",
                    v,
                    pts.len()
                )));
            }
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if !pts[i].distinct_mod_m(pts[j]) {
                        return Err(Error::Invalid("reduced marks collide".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------
// random generation and the named suite

use rand::Rng;

/// Random stable curve: a small tree with enough marks for stability,
/// random distinct positions and random slot and node data.
pub fn random_curve<R: Rng>(
    rng: &mut R,
    spec: ArtinSpec,
    incoming: usize,
) -> Result<StableTreeCurve> {
    use crate::suites::{random_nilpotent, random_normal_form};
    let comps = rng.gen_range(1..=2usize);
    // positions 0, 1, 2, ... plus nilpotent fuzz keep distinctness easy
    let mut counters = vec![0i64; comps];
    let fresh_point = |rng: &mut R, v: usize, spec: ArtinSpec, counter: &mut Vec<i64>| {
        let base = counter[v];
        counter[v] += 1;
        let mut x = RingElem::from_int(spec, base);
        x = x.add(&random_nilpotent(rng, spec));
        P1Point::affine(x)
    };
    let mut slots = Vec::new();
    let mut marks = Vec::new();
    let mut edges = Vec::new();
    // spread the incoming slots over the components, outgoing on 0
    for k in 0..incoming {
        let v = if comps == 1 { 0 } else { k % comps };
        let point = fresh_point(rng, v, spec, &mut counters);
        let neg = crate::suites::random_neg_aut(rng, spec);
        let mut data = NormalForm::new(
            neg.invert(),
            RingElem::one(spec),
            crate::witt::PosAut::identity(spec),
        );
        if rng.gen_bool(0.4) {
            data = normal_product(&random_normal_form(rng, spec, false), &data)?;
        }
        slots.push(FramingSlot {
            vertex: v,
            point,
            data,
        });
    }
    // chain edges v -> v-1 with random nilpotent node data
    for v in 1..comps {
        let child_point = fresh_point(rng, v, spec, &mut counters);
        let parent_point = fresh_point(rng, v - 1, spec, &mut counters);
        let node = NormalForm::new(
            crate::suites::random_neg_aut(rng, spec),
            random_nilpotent(rng, spec),
            crate::suites::random_pos_aut(rng, spec),
        );
        edges.push(CurveEdge {
            child: v,
            child_point,
            parent: v - 1,
            parent_point,
            node,
        });
    }
    // outgoing slot on the root
    let out_point = fresh_point(rng, 0, spec, &mut counters);
    let out_neg = crate::suites::random_neg_aut(rng, spec);
    slots.push(FramingSlot {
        vertex: 0,
        point: out_point,
        data: NormalForm::new(
            NegAut::identity(spec),
            RingElem::one(spec),
            out_neg.antipodal(),
        ),
    });
    // marks until every component is stable
    for v in 0..comps {
        loop {
            let count = slots.iter().filter(|s| s.vertex == v).count()
                + marks.iter().filter(|m: &&MarkPoint| m.vertex == v).count()
                + edges
                    .iter()
                    .filter(|e| e.child == v || e.parent == v)
                    .count();
            if count >= 3 {
                break;
            }
            let point = fresh_point(rng, v, spec, &mut counters);
            marks.push(MarkPoint { vertex: v, point });
        }
    }
    let marks = marks.into_iter().collect();
    StableTreeCurve::new(spec, comps, slots, marks, edges)
}

/// Named suite behind `ffc --check fld`.
pub fn fld_suite(spec: ArtinSpec, seed: u64, iterations: usize) -> SuiteReport {
    let mut rep = SuiteReport {
        name: "fld".into(),
        passed: 0,
        failed: 0,
        detail: Vec::new(),
    };
    let check = |rep: &mut SuiteReport, label: &str, ok: bool| {
        if ok {
            rep.passed += 1;
        } else {
            rep.failed += 1;
            rep.detail.push(format!("FAILED: {}", label));
        }
    };
    let mut rng = crate::suites::rng_from_seed(seed);
    for _ in 0..iterations {
        let x = random_curve(&mut rng, spec, 2).unwrap();
        let y = random_curve(&mut rng, spec, 1).unwrap();
        let z = random_curve(&mut rng, spec, 1).unwrap();
        // nested associativity
        let lhs = x.stable_glue(0, &y).and_then(|xy| xy.stable_glue(0, &z));
        let rhs = y.stable_glue(0, &z).and_then(|yz| x.stable_glue(0, &yz));
        check(
            &mut rep,
            "nested associativity",
            lhs.is_ok() && lhs.ok() == rhs.ok(),
        );
        // angle multiplicativity
        let glued = x.stable_glue(0, &y).unwrap();
        let want = normal_product(&y.angle(0).unwrap().0, &x.angle(0).unwrap().0).unwrap();
        check(
            &mut rep,
            "angle multiplicativity",
            glued.angle(0).unwrap().0 == want,
        );
        // unit action
        let acted = x.annulus_act(&NormalForm::identity(spec), 0).unwrap();
        check(&mut rep, "unit action", acted == x);
        // reduced locus
        let reduced = glued.reduce();
        let expected = x.reduce().stable_glue(0, &y.reduce()).unwrap();
        check(&mut rep, "reduced nodal union", reduced == expected);
    }
    rep
}
