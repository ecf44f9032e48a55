//! The colored-operad categories of labeled modular multicorollas.
//!
//! Objects are labeled multicorollas; a morphism `M → N` is a graph whose
//! full splitting's in-part is identified with `M` and whose corolla
//! collapse is identified with `N`. Because both identifications are by
//! labels, a morphism is stored as a perfect matching on the labeled slots
//! of `M` and `N` (every matched pair is one edge of the graph), plus an
//! assignment of closed components and vertexless circles to target
//! vertices. Composition grafts a component of the inner graph into every
//! vertex of the outer one, which on matchings is chain splicing.

use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

use crate::graphs::{collapse, full_split, CorollaShape, Dir, Multicorolla};
use crate::suites::SuiteReport;
use crate::{Error, Result};

/// Labeled slot of the source or target multicorolla (0-based internally;
/// JSON and display are 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Src { vertex: usize, label: usize },
    Tgt { vertex: usize, label: usize },
}

impl Tag {
    fn vertex(&self) -> usize {
        match self {
            Tag::Src { vertex, .. } | Tag::Tgt { vertex, .. } => *vertex,
        }
    }
}

/// Morphism of the (directed or undirected) multicorolla category.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Morphism {
    pub directed: bool,
    pub source: Multicorolla,
    pub target: Multicorolla,
    /// One entry per edge of the graph. Directed morphisms store the pair
    /// as (source end, target end); undirected ones store it sorted.
    pub pairs: BTreeSet<(Tag, Tag)>,
    /// Closed components (no half-edges), keyed by smallest source vertex,
    /// mapped to the edgeless target vertex they collapse to.
    pub closed_components: BTreeMap<usize, usize>,
    /// Target vertices realized by vertexless circles.
    pub circles: BTreeSet<usize>,
}

/// Derived component structure of a morphism.
#[derive(Debug, Clone)]
pub struct Analysis {
    /// Component index of every source vertex.
    pub component_of: Vec<usize>,
    /// Target vertex of every component (vertexful components first, then
    /// open edges and circles).
    pub target_of_component: Vec<usize>,
}

fn normalize_pair(p: (Tag, Tag), directed: bool) -> (Tag, Tag) {
    if directed || p.0 <= p.1 {
        p
    } else {
        (p.1, p.0)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

impl Morphism {
    /// Identity: the multicorolla as its own graph.
    pub fn identity(mc: &Multicorolla, directed: bool) -> Morphism {
        let mut pairs = BTreeSet::new();
        for (v, c) in mc.corollas.iter().enumerate() {
            for (l, d) in c.dirs.iter().enumerate() {
                let s = Tag::Src {
                    vertex: v,
                    label: l,
                };
                let t = Tag::Tgt {
                    vertex: v,
                    label: l,
                };
                let pair = match d {
                    // an In edge of the corolla is an incoming half-edge:
                    // its star end (the target slot) is the edge source
                    Dir::In => (t, s),
                    Dir::Out => (s, t),
                };
                pairs.insert(normalize_pair(pair, directed));
            }
        }
        let closed_components = mc
            .corollas
            .iter()
            .enumerate()
            .filter(|(_, c)| c.dirs.is_empty())
            .map(|(v, _)| (v, v))
            .collect();
        Morphism {
            directed,
            source: mc.clone(),
            target: mc.clone(),
            pairs,
            closed_components,
            circles: BTreeSet::new(),
        }
    }

    fn dir_of(&self, t: &Tag) -> Dir {
        match t {
            Tag::Src { vertex, label } => self.source.corollas[*vertex].dirs[*label],
            Tag::Tgt { vertex, label } => self.target.corollas[*vertex].dirs[*label],
        }
    }

    /// A tag qualifies as the source end of a directed edge when it is an
    /// outgoing corolla edge of `M` or an incoming one of `N`.
    fn is_edge_src(&self, t: &Tag) -> bool {
        match t {
            Tag::Src { .. } => self.dir_of(t) == Dir::Out,
            Tag::Tgt { .. } => self.dir_of(t) == Dir::In,
        }
    }

    fn is_edge_dst(&self, t: &Tag) -> bool {
        match t {
            Tag::Src { .. } => self.dir_of(t) == Dir::In,
            Tag::Tgt { .. } => self.dir_of(t) == Dir::Out,
        }
    }

    fn tag_in_range(&self, t: &Tag) -> bool {
        match t {
            Tag::Src { vertex, label } => self
                .source
                .corollas
                .get(*vertex)
                .is_some_and(|c| *label < c.degree()),
            Tag::Tgt { vertex, label } => self
                .target
                .corollas
                .get(*vertex)
                .is_some_and(|c| *label < c.degree()),
        }
    }

    /// Full validation: matching structure, orientations, the component
    /// map, and the genus bookkeeping against the cycle rank.
    pub fn validate(&self) -> Result<Analysis> {
        let mut seen: BTreeSet<Tag> = BTreeSet::new();
        for (a, b) in &self.pairs {
            if a == b {
                return Err(Error::LabelMismatch("edge with identical ends".into()));
            }
            for t in [a, b] {
                if !seen.insert(*t) {
                    return Err(Error::LabelMismatch(format!("slot used twice: {:?}", t)));
                }
                if !self.tag_in_range(t) {
                    return Err(Error::LabelMismatch(format!("slot out of range: {:?}", t)));
                }
            }
            if self.directed {
                if !self.is_edge_src(a) || !self.is_edge_dst(b) {
                    return Err(Error::LabelMismatch(format!(
                        "orientation violated on edge {:?} -> {:?}",
                        a, b
                    )));
                }
            } else if normalize_pair((*a, *b), false) != (*a, *b) {
                return Err(Error::Invalid("undirected pair not stored sorted".into()));
            }
        }
        let mut expected = 0usize;
        for (v, c) in self.source.corollas.iter().enumerate() {
            for l in 0..c.degree() {
                expected += 1;
                if !seen.contains(&Tag::Src {
                    vertex: v,
                    label: l,
                }) {
                    return Err(Error::LabelMismatch(format!(
                        "unused source slot ({}, {})",
                        v, l
                    )));
                }
            }
        }
        for (v, c) in self.target.corollas.iter().enumerate() {
            for l in 0..c.degree() {
                expected += 1;
                if !seen.contains(&Tag::Tgt {
                    vertex: v,
                    label: l,
                }) {
                    return Err(Error::LabelMismatch(format!(
                        "unused target slot ({}, {})",
                        v, l
                    )));
                }
            }
        }
        if seen.len() != expected {
            return Err(Error::LabelMismatch("stray slots in matching".into()));
        }

        // components of the source vertices under interior edges
        let n = self.source.len();
        let mut uf = UnionFind::new(n);
        for (a, b) in &self.pairs {
            if let (Tag::Src { vertex: u, .. }, Tag::Src { vertex: w, .. }) = (a, b) {
                uf.union(*u, *w);
            }
        }
        let mut comp_index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut component_of = vec![0usize; n];
        let mut comp_vertices: Vec<Vec<usize>> = Vec::new();
        for (v, slot) in component_of.iter_mut().enumerate() {
            let r = uf.find(v);
            let idx = *comp_index.entry(r).or_insert_with(|| {
                comp_vertices.push(Vec::new());
                comp_vertices.len() - 1
            });
            *slot = idx;
            comp_vertices[idx].push(v);
        }
        let mut interior_count = vec![0usize; comp_vertices.len()];
        let mut has_half = vec![false; comp_vertices.len()];
        let mut target_of: Vec<Option<usize>> = vec![None; comp_vertices.len()];
        for (a, b) in &self.pairs {
            match (a, b) {
                (Tag::Src { vertex: u, .. }, Tag::Src { .. }) => {
                    interior_count[component_of[*u]] += 1;
                }
                (Tag::Src { vertex: u, .. }, Tag::Tgt { vertex: j, .. })
                | (Tag::Tgt { vertex: j, .. }, Tag::Src { vertex: u, .. }) => {
                    let c = component_of[*u];
                    has_half[c] = true;
                    match target_of[c] {
                        None => target_of[c] = Some(*j),
                        Some(prev) if prev == *j => {}
                        Some(prev) => {
                            return Err(Error::LabelMismatch(format!(
                                "component maps to targets {} and {}",
                                prev, j
                            )))
                        }
                    }
                }
                _ => {}
            }
        }
        // closed components take their target from the explicit assignment
        let mut closed_seen = 0usize;
        for (c, verts) in comp_vertices.iter().enumerate() {
            let min = *verts.iter().min().unwrap();
            if has_half[c] {
                if self.closed_components.contains_key(&min) {
                    return Err(Error::LabelMismatch(
                        "closed assignment given for a component with half-edges".into(),
                    ));
                }
                continue;
            }
            closed_seen += 1;
            let j = self.closed_components.get(&min).ok_or_else(|| {
                Error::LabelMismatch(format!(
                    "closed component at vertex {} lacks a target assignment",
                    min
                ))
            })?;
            if self.target.corollas.get(*j).is_none_or(|t| t.degree() != 0) {
                return Err(Error::LabelMismatch(
                    "closed component must map to an edgeless corolla".into(),
                ));
            }
            target_of[c] = Some(*j);
        }
        if closed_seen != self.closed_components.len() {
            return Err(Error::LabelMismatch(
                "stray closed-component assignments".into(),
            ));
        }
        let mut target_of_component: Vec<usize> =
            target_of.into_iter().map(Option::unwrap).collect();

        // open edges: both halves on the same two-valent genus-zero vertex
        for (a, b) in &self.pairs {
            if let (Tag::Tgt { vertex: j1, .. }, Tag::Tgt { vertex: j2, .. }) = (a, b) {
                if j1 != j2 {
                    return Err(Error::LabelMismatch(
                        "open edge split between two target vertices".into(),
                    ));
                }
                let c = &self.target.corollas[*j1];
                if c.genus != 0 || c.degree() != 2 {
                    return Err(Error::LabelMismatch(
                        "open edge must collapse to a two-valent genus-zero corolla".into(),
                    ));
                }
                target_of_component.push(*j1);
            }
        }
        for j in &self.circles {
            let c = self
                .target
                .corollas
                .get(*j)
                .ok_or_else(|| Error::LabelMismatch("circle target out of range".into()))?;
            if c.genus != 1 || c.degree() != 0 {
                return Err(Error::LabelMismatch(
                    "a circle collapses to an edgeless genus-one corolla".into(),
                ));
            }
            target_of_component.push(*j);
        }
        // component-to-target assignment is a bijection
        let mut used = BTreeSet::new();
        for j in &target_of_component {
            if !used.insert(*j) {
                return Err(Error::LabelMismatch(format!(
                    "target vertex {} covered twice",
                    j
                )));
            }
        }
        if used.len() != self.target.len() {
            return Err(Error::LabelMismatch("target vertex not covered".into()));
        }
        // genus: vertex genera plus cycle rank of the interior
        for (c, verts) in comp_vertices.iter().enumerate() {
            let g_sum: u32 = verts.iter().map(|v| self.source.corollas[*v].genus).sum();
            let b1 = (interior_count[c] + 1 - verts.len()) as u32;
            let j = target_of_component[c];
            if g_sum + b1 != self.target.corollas[j].genus {
                return Err(Error::LabelMismatch(format!(
                    "genus mismatch: component {} has {}+{} vs target {}",
                    c, g_sum, b1, self.target.corollas[j].genus
                )));
            }
        }
        Ok(Analysis {
            component_of,
            target_of_component,
        })
    }

    /// The finite-set shadow: which target vertex each source vertex lands
    /// in (`π₀` of the in-part mapped to `π₀` of the collapse).
    pub fn project_to_fin(&self) -> Result<Vec<usize>> {
        let a = self.validate()?;
        Ok(a.component_of
            .iter()
            .map(|c| a.target_of_component[*c])
            .collect())
    }

    /// Composition by grafting: each vertex of `outer`'s graph is replaced
    /// by the matching connected component of `self`'s graph; on matchings
    /// this splices chains through the middle slots. `self` is the inner
    /// morphism `L → M`, `outer` maps `M → N`.
    pub fn then(&self, outer: &Morphism) -> Result<Morphism> {
        let inner = self;
        if inner.directed != outer.directed {
            return Err(Error::LabelMismatch("mixed directedness".into()));
        }
        if inner.target != outer.source {
            return Err(Error::LabelMismatch(
                "middle multicorollas do not agree".into(),
            ));
        }
        let outer_an = outer.validate()?;
        let inner_an = inner.validate()?;

        #[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
        enum Seg {
            Inner(usize),
            Outer(usize),
        }
        let inner_pairs: Vec<(Tag, Tag)> = inner.pairs.iter().cloned().collect();
        let outer_pairs: Vec<(Tag, Tag)> = outer.pairs.iter().cloned().collect();
        // connector (middle slot) -> the segment end it splices
        let mut inner_end: BTreeMap<(usize, usize), (usize, bool)> = BTreeMap::new();
        let mut outer_end: BTreeMap<(usize, usize), (usize, bool)> = BTreeMap::new();
        for (idx, (a, b)) in inner_pairs.iter().enumerate() {
            if let Tag::Tgt { vertex, label } = a {
                inner_end.insert((*vertex, *label), (idx, true));
            }
            if let Tag::Tgt { vertex, label } = b {
                inner_end.insert((*vertex, *label), (idx, false));
            }
        }
        for (idx, (a, b)) in outer_pairs.iter().enumerate() {
            if let Tag::Src { vertex, label } = a {
                outer_end.insert((*vertex, *label), (idx, true));
            }
            if let Tag::Src { vertex, label } = b {
                outer_end.insert((*vertex, *label), (idx, false));
            }
        }
        let ends = |seg: Seg| -> (Tag, Tag) {
            match seg {
                Seg::Inner(i) => inner_pairs[i],
                Seg::Outer(i) => outer_pairs[i],
            }
        };
        let is_free = |seg: Seg, first: bool| -> bool {
            let (a, b) = ends(seg);
            let t = if first { a } else { b };
            matches!(
                (seg, t),
                (Seg::Inner(_), Tag::Src { .. }) | (Seg::Outer(_), Tag::Tgt { .. })
            )
        };
        let is_src_tag = |t: &Tag| -> bool {
            match t {
                Tag::Src { vertex, label } => {
                    inner.source.corollas[*vertex].dirs[*label] == Dir::Out
                }
                Tag::Tgt { vertex, label } => {
                    outer.target.corollas[*vertex].dirs[*label] == Dir::In
                }
            }
        };
        let step = |seg: Seg, exit_tag: Tag| -> (Seg, bool) {
            match (seg, exit_tag) {
                (Seg::Inner(_), Tag::Tgt { vertex, label }) => {
                    let (i, first) = outer_end[&(vertex, label)];
                    (Seg::Outer(i), first)
                }
                (Seg::Outer(_), Tag::Src { vertex, label }) => {
                    let (i, first) = inner_end[&(vertex, label)];
                    (Seg::Inner(i), first)
                }
                _ => unreachable!("end is neither free nor a connector"),
            }
        };

        let mut visited: BTreeSet<Seg> = BTreeSet::new();
        let mut pairs: BTreeSet<(Tag, Tag)> = BTreeSet::new();
        let all_segs: Vec<Seg> = (0..inner_pairs.len())
            .map(Seg::Inner)
            .chain((0..outer_pairs.len()).map(Seg::Outer))
            .collect();
        for &start in &all_segs {
            for start_first in [true, false] {
                if !is_free(start, start_first) || visited.contains(&start) {
                    continue;
                }
                let (a, b) = ends(start);
                let start_tag = if start_first { a } else { b };
                let mut seg = start;
                let mut entered_first = start_first;
                let exit = loop {
                    visited.insert(seg);
                    let (a, b) = ends(seg);
                    let exit_tag = if entered_first { b } else { a };
                    if is_free(seg, !entered_first) {
                        break exit_tag;
                    }
                    let (next, next_first) = step(seg, exit_tag);
                    seg = next;
                    entered_first = next_first;
                };
                let pair = if inner.directed {
                    if is_src_tag(&start_tag) {
                        (start_tag, exit)
                    } else {
                        (exit, start_tag)
                    }
                } else {
                    normalize_pair((start_tag, exit), false)
                };
                pairs.insert(pair);
            }
        }
        // leftover segments form vertexless circles over the target vertex
        // of the outer component they pass through
        let mut circles: BTreeSet<usize> = outer.circles.clone();
        for &seg0 in &all_segs {
            if visited.contains(&seg0) {
                continue;
            }
            let mut seg = seg0;
            let mut entered_first = true;
            let mut outer_vertex = None;
            loop {
                visited.insert(seg);
                let (a, b) = ends(seg);
                if matches!(seg, Seg::Outer(_)) {
                    let t = if entered_first { a } else { b };
                    outer_vertex = Some(t.vertex());
                }
                let exit_tag = if entered_first { b } else { a };
                let (next, next_first) = step(seg, exit_tag);
                if next == seg0 {
                    break;
                }
                seg = next;
                entered_first = next_first;
            }
            let v = outer_vertex.expect("every cycle alternates through the outer graph");
            let j = outer_an.target_of_component[outer_an.component_of[v]];
            if !circles.insert(j) {
                return Err(Error::LabelMismatch(
                    "two circles over one target vertex".into(),
                ));
            }
        }
        // inner circles sit over middle vertices; push them through outer
        for j_mid in &inner.circles {
            let j = outer_an.target_of_component[outer_an.component_of[*j_mid]];
            if !circles.insert(j) {
                return Err(Error::LabelMismatch(
                    "two circles over one target vertex".into(),
                ));
            }
        }
        // closed components of the composite, routed through both maps
        let n = inner.source.len();
        let mut uf = UnionFind::new(n);
        let mut has_half = vec![false; n];
        for (a, b) in &pairs {
            match (a, b) {
                (Tag::Src { vertex: u, .. }, Tag::Src { vertex: w, .. }) => uf.union(*u, *w),
                (Tag::Src { vertex: u, .. }, Tag::Tgt { .. })
                | (Tag::Tgt { .. }, Tag::Src { vertex: u, .. }) => has_half[*u] = true,
                _ => {}
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = uf.find(v);
            groups.entry(r).or_default().push(v);
        }
        let mut closed_components = BTreeMap::new();
        for verts in groups.values() {
            if verts.iter().any(|v| has_half[*v]) {
                continue;
            }
            let min = *verts.iter().min().unwrap();
            let rep = verts[0];
            let j_mid = inner_an.target_of_component[inner_an.component_of[rep]];
            let j = outer_an.target_of_component[outer_an.component_of[j_mid]];
            closed_components.insert(min, j);
        }
        let result = Morphism {
            directed: inner.directed,
            source: inner.source.clone(),
            target: outer.target.clone(),
            pairs,
            closed_components,
            circles,
        };
        result.validate()?;
        Ok(result)
    }

    /// Forget orientations: the image in the undirected category.
    pub fn forget_orientation(&self) -> Morphism {
        Morphism {
            directed: false,
            source: self.source.clone(),
            target: self.target.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|p| normalize_pair(*p, false))
                .collect(),
            closed_components: self.closed_components.clone(),
            circles: self.circles.clone(),
        }
    }

    /// Place two morphisms side by side (monoidal structure).
    pub fn disjoint_union(&self, other: &Morphism) -> Morphism {
        let sv = self.source.len();
        let tv = self.target.len();
        let shift = |t: &Tag| match t {
            Tag::Src { vertex, label } => Tag::Src {
                vertex: vertex + sv,
                label: *label,
            },
            Tag::Tgt { vertex, label } => Tag::Tgt {
                vertex: vertex + tv,
                label: *label,
            },
        };
        let mut pairs = self.pairs.clone();
        for (a, b) in &other.pairs {
            pairs.insert(normalize_pair((shift(a), shift(b)), self.directed));
        }
        let mut closed = self.closed_components.clone();
        for (v, j) in &other.closed_components {
            closed.insert(v + sv, j + tv);
        }
        let mut circles = self.circles.clone();
        for j in &other.circles {
            circles.insert(j + tv);
        }
        Morphism {
            directed: self.directed,
            source: self.source.disjoint_union(&other.source),
            target: self.target.disjoint_union(&other.target),
            pairs,
            closed_components: closed,
            circles,
        }
    }

    pub fn to_json(&self) -> Value {
        let tag = |t: &Tag| match t {
            Tag::Src { vertex, label } => {
                json!({"side": "src", "vertex": vertex + 1, "label": label + 1})
            }
            Tag::Tgt { vertex, label } => {
                json!({"side": "tgt", "vertex": vertex + 1, "label": label + 1})
            }
        };
        json!({
            "directed": self.directed,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "edges": self.pairs.iter().map(|(a, b)| json!([tag(a), tag(b)])).collect::<Vec<_>>(),
            "closed": self.closed_components.iter()
                .map(|(v, j)| json!([v + 1, j + 1])).collect::<Vec<_>>(),
            "circles": self.circles.iter().map(|j| json!(j + 1)).collect::<Vec<_>>(),
        })
    }
}

/// Directed stability: `2(m+n) + 3g ≥ 3`.
pub fn is_stable_directed(c: &CorollaShape) -> bool {
    2 * (c.inputs() + c.outputs()) as u32 + 3 * c.genus >= 3
}

/// Undirected stability, the verbatim predicate: `n ≥ 1 or g ≥ 2`.
pub fn is_stable_undirected(c: &CorollaShape) -> bool {
    c.degree() >= 1 || c.genus >= 2
}

/// The geometric three-special-points condition `2g + n ≥ 3`, exposed
/// separately from the combinatorial predicate above.
pub fn is_geometrically_stable(c: &CorollaShape) -> bool {
    2 * c.genus + c.degree() as u32 >= 3
}

pub fn multicorolla_stable(mc: &Multicorolla, directed: bool) -> bool {
    mc.corollas.iter().all(|c| {
        if directed {
            is_stable_directed(c)
        } else {
            is_stable_undirected(c)
        }
    })
}

/// Source, target, and every vertex corolla of the graph (the source
/// again) must be stable.
pub fn morphism_stable(m: &Morphism) -> bool {
    multicorolla_stable(&m.source, m.directed) && multicorolla_stable(&m.target, m.directed)
}

/// Directed bush morphisms are root-oriented forests: from every vertex
/// and half-edge there is a unique oriented path to the root of its
/// component. Checked structurally.
pub fn is_bush_forest(m: &Morphism) -> Result<bool> {
    if !m.directed {
        return Ok(false);
    }
    let bushes = m
        .source
        .corollas
        .iter()
        .chain(m.target.corollas.iter())
        .all(|c| c.genus == 0 && c.outputs() == 1);
    if !bushes {
        return Ok(false);
    }
    m.validate()?;
    // out-degree is one; follow the unique out-edge, no cycles allowed
    let mut next_of: BTreeMap<usize, Option<usize>> = BTreeMap::new();
    for (a, b) in &m.pairs {
        if let Tag::Src { vertex: u, label } = a {
            if m.source.corollas[*u].dirs[*label] == Dir::Out {
                let next = match b {
                    Tag::Src { vertex: w, .. } => Some(*w),
                    Tag::Tgt { .. } => None,
                };
                if next_of.insert(*u, next).is_some() {
                    return Ok(false);
                }
            }
        }
    }
    for v in 0..m.source.len() {
        let mut seen = BTreeSet::new();
        let mut cur = v;
        loop {
            if !seen.insert(cur) {
                return Ok(false);
            }
            match next_of.get(&cur) {
                Some(Some(next)) => cur = *next,
                Some(None) => break,
                None => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// Reads a modular graph as a morphism: the source is the multicorolla of
/// vertex stars (vertices in id order, incidences in `(edge, source end
/// first)` order), the target the canonical collapse.
pub fn morphism_from_graph(mg: &crate::graphs::ModularGraph, directed: bool) -> Result<Morphism> {
    use crate::graphs::End;
    let verts: Vec<usize> = mg.graph.vertices.iter().cloned().collect();
    let v_index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    // incidence keys order the source-end of an edge before its target
    // end, matching the id order of the pieces under splitting
    let mut incidences: BTreeMap<usize, Vec<(usize, u8)>> = BTreeMap::new();
    for e in &mg.graph.edges {
        if let End::Vertex(u) = e.src {
            incidences.entry(u).or_default().push((e.id, 0));
        }
        if let End::Vertex(u) = e.dst {
            incidences.entry(u).or_default().push((e.id, 1));
        }
    }
    let mut source = Multicorolla::default();
    let mut src_tag_of: BTreeMap<(usize, bool), Tag> = BTreeMap::new();
    for (i, v) in verts.iter().enumerate() {
        let mut inc = incidences.remove(v).unwrap_or_default();
        inc.sort();
        let dirs = inc
            .iter()
            .map(|(_, end)| if *end == 0 { Dir::Out } else { Dir::In })
            .collect();
        for (l, (e, end)) in inc.iter().enumerate() {
            src_tag_of.insert(
                (*e, *end == 0),
                Tag::Src {
                    vertex: i,
                    label: l,
                },
            );
        }
        source.corollas.push(CorollaShape {
            genus: mg.genus[v],
            dirs,
        });
    }
    let coll = collapse(mg);
    let mut tgt_tag_of: BTreeMap<(usize, bool), Tag> = BTreeMap::new();
    for (j, slots) in coll.slot_map.iter().enumerate() {
        for (l, s) in slots.iter().enumerate() {
            tgt_tag_of.insert(
                (s.edge, s.at_src),
                Tag::Tgt {
                    vertex: j,
                    label: l,
                },
            );
        }
    }
    let mut pairs = BTreeSet::new();
    for e in &mg.graph.edges {
        let src_tag = match e.src {
            End::Vertex(_) => src_tag_of[&(e.id, true)],
            End::Star => tgt_tag_of[&(e.id, true)],
        };
        let dst_tag = match e.dst {
            End::Vertex(_) => src_tag_of[&(e.id, false)],
            End::Star => tgt_tag_of[&(e.id, false)],
        };
        pairs.insert(normalize_pair((src_tag, dst_tag), directed));
    }
    let mut closed_components = BTreeMap::new();
    for (j, comp) in mg.graph.components().iter().enumerate() {
        if let crate::graphs::Component::Vertices {
            vertices, slots, ..
        } = comp
        {
            if slots.is_empty() {
                let min = vertices.iter().map(|v| v_index[v]).min().unwrap();
                closed_components.insert(min, j);
            }
        }
    }
    let circles = (0..mg.graph.circles)
        .map(|k| coll.multicorolla.len() - mg.graph.circles + k)
        .collect();
    let m = Morphism {
        directed,
        source,
        target: coll.multicorolla,
        pairs,
        closed_components,
        circles,
    };
    m.validate()?;
    Ok(m)
}

/// The in-part of the full splitting: the multicorolla of vertex stars of
/// the original graph, in vertex order. The collapse/split adjunction says
/// this is exactly what collapsing the splitting recovers over the
/// original vertices.
pub fn full_split_in_part(mg: &crate::graphs::ModularGraph) -> Result<Multicorolla> {
    let split = full_split(&mg.graph)?;
    let smg = crate::graphs::ModularGraph::new(split, mg.genus.clone())?;
    let coll = collapse(&smg);
    let mut corollas = Vec::new();
    for v in mg.graph.vertices.iter() {
        let j = coll.vertex_map[v];
        corollas.push(coll.multicorolla.corollas[j].clone());
    }
    Ok(Multicorolla { corollas })
}

// ---------------------------------------------------------------------
// enumeration

/// Size limits for exhaustive checks.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub max_vertices: usize,
    pub max_degree: usize,
    pub max_genus: u32,
    pub directed: bool,
}

/// All corolla shapes within the bounds.
pub fn enumerate_corollas(b: &Bounds) -> Vec<CorollaShape> {
    let mut out = Vec::new();
    for d in 0..=b.max_degree {
        for mask in 0..(1usize << d) {
            let dirs: Vec<Dir> = (0..d)
                .map(|i| {
                    if mask & (1 << i) != 0 {
                        Dir::Out
                    } else {
                        Dir::In
                    }
                })
                .collect();
            for g in 0..=b.max_genus {
                out.push(CorollaShape {
                    genus: g,
                    dirs: dirs.clone(),
                });
            }
        }
    }
    out
}

/// All multicorollas within the bounds (including the empty one).
pub fn enumerate_objects(b: &Bounds) -> Vec<Multicorolla> {
    let shapes = enumerate_corollas(b);
    let mut out = vec![Multicorolla::default()];
    let mut level = vec![Multicorolla::default()];
    for _ in 0..b.max_vertices {
        let mut next = Vec::new();
        for mc in &level {
            for s in &shapes {
                let mut bigger = mc.clone();
                bigger.corollas.push(s.clone());
                next.push(bigger);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Every morphism between two multicorollas, by exhausting perfect
/// matchings of the labeled slots plus closed-component assignments;
/// leftover edgeless genus-one targets become circles.
pub fn enumerate_morphisms(
    source: &Multicorolla,
    target: &Multicorolla,
    directed: bool,
) -> Vec<Morphism> {
    let mut tags: Vec<Tag> = Vec::new();
    for (v, c) in source.corollas.iter().enumerate() {
        for l in 0..c.degree() {
            tags.push(Tag::Src {
                vertex: v,
                label: l,
            });
        }
    }
    for (v, c) in target.corollas.iter().enumerate() {
        for l in 0..c.degree() {
            tags.push(Tag::Tgt {
                vertex: v,
                label: l,
            });
        }
    }
    let mut out = Vec::new();
    if !tags.len().is_multiple_of(2) {
        return out;
    }
    let mut acc: Vec<(Tag, Tag)> = Vec::new();
    enumerate_matchings(&tags, &mut acc, &mut |pairs| {
        let mut m = Morphism {
            directed,
            source: source.clone(),
            target: target.clone(),
            pairs: BTreeSet::new(),
            closed_components: BTreeMap::new(),
            circles: BTreeSet::new(),
        };
        for (a, b) in pairs {
            let pair = if directed {
                if m.is_edge_src(a) && m.is_edge_dst(b) {
                    (*a, *b)
                } else if m.is_edge_src(b) && m.is_edge_dst(a) {
                    (*b, *a)
                } else {
                    return;
                }
            } else {
                normalize_pair((*a, *b), false)
            };
            m.pairs.insert(pair);
        }
        if m.pairs.len() != pairs.len() {
            return;
        }
        let closed = closed_component_mins(&m);
        let taken: BTreeSet<usize> = m
            .pairs
            .iter()
            .flat_map(|(a, b)| [a, b])
            .filter_map(|t| match t {
                Tag::Tgt { vertex, .. } => Some(*vertex),
                _ => None,
            })
            .collect();
        let mut free_targets: Vec<usize> = (0..target.len())
            .filter(|j| target.corollas[*j].degree() == 0 && !taken.contains(j))
            .collect();
        assign_closed(&mut m, &closed, &mut free_targets, 0, &mut |m| {
            if m.validate().is_ok() {
                out.push(m.clone());
            }
        });
    });
    out.sort();
    out.dedup();
    out
}

fn enumerate_matchings(
    tags: &[Tag],
    acc: &mut Vec<(Tag, Tag)>,
    f: &mut impl FnMut(&Vec<(Tag, Tag)>),
) {
    if tags.is_empty() {
        f(acc);
        return;
    }
    let first = tags[0];
    for i in 1..tags.len() {
        let second = tags[i];
        let mut rest: Vec<Tag> = Vec::with_capacity(tags.len() - 2);
        rest.extend(tags[1..i].iter().cloned());
        rest.extend(tags[i + 1..].iter().cloned());
        acc.push((first, second));
        enumerate_matchings(&rest, acc, f);
        acc.pop();
    }
}

fn closed_component_mins(m: &Morphism) -> Vec<usize> {
    let n = m.source.len();
    let mut uf = UnionFind::new(n);
    let mut has_half = vec![false; n];
    for (a, b) in &m.pairs {
        match (a, b) {
            (Tag::Src { vertex: u, .. }, Tag::Src { vertex: w, .. }) => uf.union(*u, *w),
            (Tag::Src { vertex: u, .. }, Tag::Tgt { .. })
            | (Tag::Tgt { .. }, Tag::Src { vertex: u, .. }) => has_half[*u] = true,
            _ => {}
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = uf.find(v);
        groups.entry(r).or_default().push(v);
    }
    // a component is closed when no vertex in it touches a half-edge
    groups
        .values()
        .filter(|vs| !vs.iter().any(|v| has_half[*v]))
        .map(|vs| *vs.iter().min().unwrap())
        .collect()
}

fn assign_closed(
    m: &mut Morphism,
    closed: &[usize],
    free_targets: &mut Vec<usize>,
    k: usize,
    f: &mut impl FnMut(&Morphism),
) {
    if k == closed.len() {
        m.circles = free_targets.iter().cloned().collect();
        f(m);
        m.circles.clear();
        return;
    }
    for i in 0..free_targets.len() {
        let j = free_targets.remove(i);
        m.closed_components.insert(closed[k], j);
        assign_closed(m, closed, free_targets, k + 1, f);
        m.closed_components.remove(&closed[k]);
        free_targets.insert(i, j);
    }
}

// ---------------------------------------------------------------------
// algebras and edge contraction

/// Cluster element during contraction: a value per tracked slot, keyed by
/// the morphism's own tags.
pub type AlgElem<V> = BTreeMap<Tag, V>;

/// A finite algebra over the corolla operad, given by its single-edge
/// contraction tables.
pub trait ContractionAlgebra {
    type Value: Clone + Eq + Ord + std::fmt::Debug;

    fn supports(&self, c: &CorollaShape) -> bool;

    /// Contract an edge between two clusters: the `inner` cluster hangs on
    /// slot `dst` of `outer`.
    fn graft(
        &self,
        outer: &AlgElem<Self::Value>,
        dst: Tag,
        inner: &AlgElem<Self::Value>,
        src: Tag,
    ) -> Result<AlgElem<Self::Value>>;

    /// Contract a loop inside a single cluster.
    fn self_graft(
        &self,
        elem: &AlgElem<Self::Value>,
        a: Tag,
        b: Tag,
    ) -> Result<AlgElem<Self::Value>>;

    /// Value of an open edge (the pass-through corolla).
    fn open_edge(&self, in_slot: Tag, out_slot: Tag) -> Result<AlgElem<Self::Value>>;

    /// Value of a vertexless circle.
    fn circle(&self) -> Result<AlgElem<Self::Value>>;
}

/// The terminal modular operad: one element per color.
pub struct TerminalAlgebra;

impl ContractionAlgebra for TerminalAlgebra {
    type Value = ();

    fn supports(&self, _c: &CorollaShape) -> bool {
        true
    }

    fn graft(&self, _o: &AlgElem<()>, _d: Tag, _i: &AlgElem<()>, _s: Tag) -> Result<AlgElem<()>> {
        Ok(BTreeMap::new())
    }

    fn self_graft(&self, _e: &AlgElem<()>, _a: Tag, _b: Tag) -> Result<AlgElem<()>> {
        Ok(BTreeMap::new())
    }

    fn open_edge(&self, _i: Tag, _o: Tag) -> Result<AlgElem<()>> {
        Ok(BTreeMap::new())
    }

    fn circle(&self) -> Result<AlgElem<()>> {
        Ok(BTreeMap::new())
    }
}

/// Finite monoid as a multiplication table.
#[derive(Debug, Clone)]
pub struct MonoidTable {
    pub names: Vec<String>,
    pub unit: usize,
    pub table: Vec<Vec<usize>>,
}

impl MonoidTable {
    pub fn trivial() -> MonoidTable {
        MonoidTable {
            names: vec!["1".into()],
            unit: 0,
            table: vec![vec![0]],
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn is_monoid(&self) -> bool {
        let n = self.size();
        for a in 0..n {
            if self.mul(self.unit, a) != a || self.mul(a, self.unit) != a {
                return false;
            }
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The genus-zero directed algebra over a finite monoid: corollas
/// `C_{m,1|0}` carry one monoid element per input, and grafting
/// premultiplies the inner tuple by the outer slot value (the annuli-angle
/// composition rule).
pub struct CommMonoidAlgebra {
    pub monoid: MonoidTable,
}

impl ContractionAlgebra for CommMonoidAlgebra {
    type Value = usize;

    fn supports(&self, c: &CorollaShape) -> bool {
        c.genus == 0 && c.outputs() == 1
    }

    fn graft(
        &self,
        outer: &AlgElem<usize>,
        dst: Tag,
        inner: &AlgElem<usize>,
        _src: Tag,
    ) -> Result<AlgElem<usize>> {
        let g0 = *outer
            .get(&dst)
            .ok_or_else(|| Error::ColorMismatch("grafting into an untracked slot".into()))?;
        let mut out = outer.clone();
        out.remove(&dst);
        for (k, v) in inner {
            out.insert(*k, self.monoid.mul(*v, g0));
        }
        Ok(out)
    }

    fn self_graft(&self, _e: &AlgElem<usize>, _a: Tag, _b: Tag) -> Result<AlgElem<usize>> {
        Err(Error::ColorMismatch(
            "loops leave the genus-zero colors".into(),
        ))
    }

    fn open_edge(&self, in_slot: Tag, _out_slot: Tag) -> Result<AlgElem<usize>> {
        Ok([(in_slot, self.monoid.unit)].into())
    }

    fn circle(&self) -> Result<AlgElem<usize>> {
        Err(Error::ColorMismatch(
            "circles leave the genus-zero colors".into(),
        ))
    }
}

/// Evaluate a morphism in an algebra by contracting its interior and open
/// edges one at a time in the given order; the result is independent of
/// the order.
pub fn evaluate_contraction<A: ContractionAlgebra>(
    m: &Morphism,
    alg: &A,
    order: &[(Tag, Tag)],
    inputs: &[AlgElem<A::Value>],
) -> Result<Vec<AlgElem<A::Value>>> {
    let an = m.validate()?;
    for c in m.source.corollas.iter().chain(m.target.corollas.iter()) {
        if !alg.supports(c) {
            return Err(Error::ColorMismatch(format!("unsupported color {:?}", c)));
        }
    }
    if inputs.len() != m.source.len() {
        return Err(Error::Invalid(
            "one input element per source vertex required".into(),
        ));
    }
    let contractible: BTreeSet<(Tag, Tag)> = contractible_edges(m).into_iter().collect();
    let given: BTreeSet<(Tag, Tag)> = order.iter().cloned().collect();
    if given != contractible || order.len() != contractible.len() {
        return Err(Error::Invalid(
            "order must list each contractible edge exactly once".into(),
        ));
    }
    let mut cluster_of: Vec<usize> = (0..m.source.len()).collect();
    let mut elems: Vec<Option<AlgElem<A::Value>>> = inputs.iter().cloned().map(Some).collect();
    let mut open_cluster: BTreeMap<(Tag, Tag), usize> = BTreeMap::new();
    fn find(cluster_of: &mut [usize], mut v: usize) -> usize {
        while cluster_of[v] != v {
            cluster_of[v] = cluster_of[cluster_of[v]];
            v = cluster_of[v];
        }
        v
    }
    for e in order {
        match e {
            (ta @ Tag::Src { vertex: u, .. }, tb @ Tag::Src { vertex: w, .. }) => {
                let ru = find(&mut cluster_of, *u);
                let rw = find(&mut cluster_of, *w);
                if ru == rw {
                    let elem = elems[ru].take().expect("live cluster");
                    elems[ru] = Some(alg.self_graft(&elem, *ta, *tb)?);
                } else {
                    // the edge runs out of `u` into slot `tb` of `w`
                    let inner = elems[ru].take().expect("live cluster");
                    let outer = elems[rw].take().expect("live cluster");
                    let merged = alg.graft(&outer, *tb, &inner, *ta)?;
                    cluster_of[ru] = rw;
                    elems[rw] = Some(merged);
                }
            }
            (ta @ Tag::Tgt { .. }, tb @ Tag::Tgt { .. }) => {
                let idx = elems.len();
                elems.push(Some(alg.open_edge(*ta, *tb)?));
                cluster_of.push(idx);
                open_cluster.insert((*ta, *tb), idx);
            }
            _ => unreachable!("half-edges are not contractible"),
        }
    }
    // assemble the result per target vertex, remapping surviving slots to
    // target labels through the half-edge pairs
    let mut out: Vec<AlgElem<A::Value>> = vec![BTreeMap::new(); m.target.len()];
    let half_of: BTreeMap<Tag, Tag> = m
        .pairs
        .iter()
        .filter_map(|(a, b)| match (a, b) {
            (s @ Tag::Src { .. }, t @ Tag::Tgt { .. }) => Some((*s, *t)),
            (t @ Tag::Tgt { .. }, s @ Tag::Src { .. }) => Some((*s, *t)),
            _ => None,
        })
        .collect();
    let mut seen_cluster: BTreeSet<usize> = BTreeSet::new();
    for v in 0..m.source.len() {
        let j = an.target_of_component[an.component_of[v]];
        let r = find(&mut cluster_of, v);
        if seen_cluster.insert(r) {
            let elem = elems[r].clone().expect("live cluster");
            let mut remapped: AlgElem<A::Value> = BTreeMap::new();
            for (k, val) in elem {
                let tgt = half_of
                    .get(&k)
                    .ok_or_else(|| Error::Invalid("surviving slot is not a half-edge".into()))?;
                remapped.insert(*tgt, val);
            }
            out[j] = remapped;
        }
    }
    for ((a, _), idx) in &open_cluster {
        if let Tag::Tgt { vertex, .. } = a {
            out[*vertex] = elems[*idx].clone().expect("live cluster");
        }
    }
    for j in &m.circles {
        out[*j] = alg.circle()?;
    }
    Ok(out)
}

/// All contractible (interior and open) edges in canonical order.
pub fn contractible_edges(m: &Morphism) -> Vec<(Tag, Tag)> {
    m.pairs
        .iter()
        .filter(|(a, b)| {
            matches!(
                (a, b),
                (Tag::Src { .. }, Tag::Src { .. }) | (Tag::Tgt { .. }, Tag::Tgt { .. })
            )
        })
        .cloned()
        .collect()
}

/// Compare every contraction order; `Ok(true)` when all agree.
pub fn contraction_order_independent<A: ContractionAlgebra>(
    m: &Morphism,
    alg: &A,
    inputs: &[AlgElem<A::Value>],
) -> Result<bool> {
    let edges = contractible_edges(m);
    let reference = evaluate_contraction(m, alg, &edges, inputs)?;
    let mut perm = edges;
    let mut agree = true;
    permute(
        &mut perm,
        0,
        &mut |order| match evaluate_contraction(m, alg, order, inputs) {
            Ok(v) => {
                if v != reference {
                    agree = false;
                }
            }
            Err(_) => agree = false,
        },
    );
    Ok(agree)
}

fn permute<T: Clone>(xs: &mut Vec<T>, k: usize, f: &mut impl FnMut(&[T])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

// ---------------------------------------------------------------------
// operadic axioms and the mutation harness

#[derive(Debug, Default)]
pub struct AxiomReport {
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn note(&mut self, ok: bool, msg: impl Fn() -> String) {
        self.checked += 1;
        if !ok {
            self.counterexamples.push(msg());
        }
    }
}

/// Exhaustively verify the operadic-pair axioms within the bounds: the
/// hom-set bijection under disjoint union, existence and bijectivity of
/// relabeling lifts over set isomorphisms, and count factorization of
/// `C_S × C_T ≅ C_{S⊔T}`.
pub fn check_operadic_axioms(bounds: &Bounds) -> AxiomReport {
    let mut rep = AxiomReport::default();
    if bounds.max_vertices == 0 {
        return rep; // vacuous pass
    }
    let single = Bounds {
        max_vertices: 1,
        ..*bounds
    };
    let objects1: Vec<Multicorolla> = enumerate_objects(&single)
        .into_iter()
        .filter(|m| m.len() == 1)
        .collect();

    // object part of C_S × C_T ≅ C_{S⊔T}: count factorization
    let two_vertex = enumerate_objects(&Bounds {
        max_vertices: 2,
        ..*bounds
    })
    .into_iter()
    .filter(|m| m.len() == 2)
    .count();
    let squared = objects1.len() * objects1.len();
    rep.note(two_vertex == squared, || {
        format!(
            "object count over <2>: {} vs {}^2",
            two_vertex,
            objects1.len()
        )
    });

    // hom-set bijection under disjoint union
    let mut hom_cache: BTreeMap<(usize, usize), Vec<Morphism>> = BTreeMap::new();
    for (xi, x) in objects1.iter().enumerate() {
        for (yi, y) in objects1.iter().enumerate() {
            hom_cache.insert((xi, yi), enumerate_morphisms(x, y, bounds.directed));
        }
    }
    let interesting: Vec<(usize, usize)> = hom_cache
        .iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(k, _)| *k)
        .collect();
    for &(x1, y1) in interesting.iter().take(10) {
        for &(x2, y2) in interesting.iter().take(10) {
            let union_src = objects1[x1].disjoint_union(&objects1[x2]);
            let union_tgt = objects1[y1].disjoint_union(&objects1[y2]);
            let all = enumerate_morphisms(&union_src, &union_tgt, bounds.directed);
            let blockwise: Vec<&Morphism> = all
                .iter()
                .filter(|m| m.project_to_fin().is_ok_and(|f| f == vec![0, 1]))
                .collect();
            // the monoidal pairing realizes every blockwise morphism once
            let mut built = BTreeSet::new();
            for p in &hom_cache[&(x1, y1)] {
                for q in &hom_cache[&(x2, y2)] {
                    built.insert(p.disjoint_union(q));
                }
            }
            let product = hom_cache[&(x1, y1)].len() * hom_cache[&(x2, y2)].len();
            rep.note(
                built.len() == product
                    && blockwise.len() == product
                    && blockwise.iter().all(|m| built.contains(*m)),
                || {
                    format!(
                        "hom bijection: built {} of {}, blockwise {}",
                        built.len(),
                        product,
                        blockwise.len()
                    )
                },
            );
        }
    }

    // relabeling lifts: swapping the two blocks admits a lift which is
    // bijective on homs into everything in range
    for (xi, x) in objects1.iter().enumerate().take(6) {
        for (yi, y) in objects1.iter().enumerate().take(6) {
            if xi == yi {
                continue;
            }
            let src = x.disjoint_union(y);
            let swapped = y.disjoint_union(x);
            let lift = swap_lift(&src, x.len(), bounds.directed);
            rep.note(
                lift.source == src && lift.target == swapped && lift.validate().is_ok(),
                || "swap lift does not exist".to_string(),
            );
            for z in objects1.iter().take(4) {
                let from_swapped = enumerate_morphisms(&swapped, z, bounds.directed);
                let from_src = enumerate_morphisms(&src, z, bounds.directed);
                let composed: BTreeSet<Morphism> = from_swapped
                    .iter()
                    .filter_map(|q| lift.then(q).ok())
                    .collect();
                rep.note(
                    composed.len() == from_swapped.len()
                        && from_swapped.len() == from_src.len()
                        && composed.iter().all(|c| from_src.contains(c)),
                    || {
                        format!(
                            "swap lift not bijective on homs: {} composed, {} vs {}",
                            composed.len(),
                            from_swapped.len(),
                            from_src.len()
                        )
                    },
                );
            }
        }
    }
    rep
}

/// Relabeling lift for the block swap of `A ⊔ B`, `A` being the first
/// `k` corollas.
fn swap_lift(src: &Multicorolla, k: usize, directed: bool) -> Morphism {
    let l = src.len() - k;
    let mut target = Multicorolla::default();
    for c in &src.corollas[k..] {
        target.corollas.push(c.clone());
    }
    for c in &src.corollas[..k] {
        target.corollas.push(c.clone());
    }
    let mut pairs = BTreeSet::new();
    let mut closed = BTreeMap::new();
    for (v, c) in src.corollas.iter().enumerate() {
        let w = if v < k { v + l } else { v - k };
        if c.degree() == 0 {
            closed.insert(v, w);
        }
        for (lab, d) in c.dirs.iter().enumerate() {
            let s = Tag::Src {
                vertex: v,
                label: lab,
            };
            let t = Tag::Tgt {
                vertex: w,
                label: lab,
            };
            let pair = match d {
                Dir::In => (t, s),
                Dir::Out => (s, t),
            };
            pairs.insert(normalize_pair(pair, directed));
        }
    }
    Morphism {
        directed,
        source: src.clone(),
        target,
        pairs,
        closed_components: closed,
        circles: BTreeSet::new(),
    }
}

/// Structural mutations for the detection harness. Returns `None` when the
/// mutation cannot apply or would not change the morphism.
pub fn corrupt(m: &Morphism, kind: usize) -> Option<Morphism> {
    let mut out = m.clone();
    match kind % 5 {
        0 => {
            let pairs: Vec<(Tag, Tag)> = out.pairs.iter().cloned().collect();
            if pairs.len() < 2 {
                return None;
            }
            let (a, b) = pairs[0];
            let (c, d) = pairs[1];
            out.pairs.remove(&(a, b));
            out.pairs.remove(&(c, d));
            out.pairs.insert(normalize_pair((a, d), out.directed));
            out.pairs.insert(normalize_pair((c, b), out.directed));
        }
        1 => {
            let pair = out.pairs.iter().next().cloned()?;
            out.pairs.remove(&pair);
            out.pairs.insert((pair.1, pair.0));
        }
        2 => {
            let c = out.target.corollas.first_mut()?;
            c.genus += 1;
        }
        3 => {
            let j = out.circles.iter().next().cloned()?;
            out.circles.remove(&j);
        }
        4 => {
            if out.target.is_empty() {
                return None;
            }
            let (v, j) = out.closed_components.iter().next().map(|(v, j)| (*v, *j))?;
            out.closed_components.insert(v, (j + 1) % out.target.len());
        }
        _ => unreachable!(),
    }
    if out == *m {
        None
    } else {
        Some(out)
    }
}

/// Detection harness: wraps composition so its output is corrupted, then
/// audits only the categorical laws (validity and the unit laws) on the
/// corrupted composer. Returns (detected, injected).
pub fn mutation_detection_rate(corpus: &[(Morphism, Morphism)]) -> (usize, usize) {
    let mut detected = 0;
    let mut injected = 0;
    for kind in 0..5 {
        for (p, q) in corpus {
            let compose_bad = |x: &Morphism, y: &Morphism| -> Option<(Morphism, bool)> {
                let r = x.then(y).ok()?;
                match corrupt(&r, kind) {
                    Some(bad) => Some((bad, true)),
                    None => Some((r, false)),
                }
            };
            let mut applied = false;
            let mut caught = false;
            // direct composite must be a valid morphism
            if let Some((r, did)) = compose_bad(p, q) {
                applied |= did;
                if did && r.validate().is_err() {
                    caught = true;
                }
            }
            // unit laws: composing with the identities must fix a morphism
            let id_src = Morphism::identity(&p.source, p.directed);
            if let Some((r, did)) = compose_bad(&id_src, p) {
                applied |= did;
                if did && r != *p {
                    caught = true;
                }
            }
            let id_tgt = Morphism::identity(&p.target, p.directed);
            if let Some((r, did)) = compose_bad(p, &id_tgt) {
                applied |= did;
                if did && r != *p {
                    caught = true;
                }
            }
            if applied {
                injected += 1;
                if caught {
                    detected += 1;
                }
            }
        }
    }
    (detected, injected)
}

/// Enumerate composable pairs within the bounds, capped.
pub fn composable_corpus(bounds: &Bounds, cap: usize) -> Vec<(Morphism, Morphism)> {
    let objects: Vec<Multicorolla> = enumerate_objects(bounds)
        .into_iter()
        .filter(|m| !m.is_empty() && m.corollas.iter().map(|c| c.degree()).sum::<usize>() <= 3)
        .collect();
    let mut out = Vec::new();
    'outer: for l in &objects {
        for m in &objects {
            let first = enumerate_morphisms(l, m, bounds.directed);
            if first.is_empty() {
                continue;
            }
            for n in &objects {
                let second = enumerate_morphisms(m, n, bounds.directed);
                for p in first.iter().take(2) {
                    for q in second.iter().take(2) {
                        out.push((p.clone(), q.clone()));
                        if out.len() >= cap {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive associativity/unitality/functoriality audit over composable
/// morphism chains among bounded multicorollas. Returns flags
/// (associativity, unitality, projection functoriality, stability
/// closure, orientation forgetting).
pub fn composition_audit(
    bounds: &Bounds,
    max_total_degree: usize,
) -> (bool, bool, bool, bool, bool) {
    let objects: Vec<Multicorolla> = enumerate_objects(bounds)
        .into_iter()
        .filter(|m| m.corollas.iter().map(|c| c.degree()).sum::<usize>() <= max_total_degree)
        .collect();
    let mut homs: BTreeMap<(usize, usize), Vec<Morphism>> = BTreeMap::new();
    for i in 0..objects.len() {
        for j in 0..objects.len() {
            let ms = enumerate_morphisms(&objects[i], &objects[j], bounds.directed);
            if !ms.is_empty() {
                homs.insert((i, j), ms);
            }
        }
    }
    let mut assoc_ok = true;
    let mut unit_ok = true;
    let mut pi_ok = true;
    let mut stable_ok = true;
    let mut forget_ok = true;
    for ((li, mi), fs) in &homs {
        let id_l = Morphism::identity(&objects[*li], bounds.directed);
        let id_m = Morphism::identity(&objects[*mi], bounds.directed);
        for p in fs {
            unit_ok &= id_l.then(p).is_ok_and(|x| x == *p);
            unit_ok &= p.then(&id_m).is_ok_and(|x| x == *p);
        }
        for ni in 0..objects.len() {
            let Some(gs) = homs.get(&(*mi, ni)) else {
                continue;
            };
            for p in fs {
                for q in gs {
                    let Ok(pq) = p.then(q) else {
                        assoc_ok = false;
                        continue;
                    };
                    let f = p.project_to_fin().unwrap();
                    let g = q.project_to_fin().unwrap();
                    let fg = pq.project_to_fin().unwrap();
                    pi_ok &= fg.iter().enumerate().all(|(v, j)| *j == g[f[v]]);
                    if morphism_stable(p) && morphism_stable(q) {
                        stable_ok &= morphism_stable(&pq);
                    }
                    if bounds.directed {
                        let lhs = pq.forget_orientation();
                        let rhs = p.forget_orientation().then(&q.forget_orientation());
                        forget_ok &= rhs.is_ok_and(|x| x == lhs);
                    }
                    for oi in 0..objects.len() {
                        let Some(hs) = homs.get(&(ni, oi)) else {
                            continue;
                        };
                        for r in hs {
                            let lhs = pq.then(r);
                            let rhs = q.then(r).and_then(|x| p.then(&x));
                            assoc_ok &= match (lhs, rhs) {
                                (Ok(a), Ok(b)) => a == b,
                                _ => false,
                            };
                        }
                    }
                }
            }
        }
    }
    (assoc_ok, unit_ok, pi_ok, stable_ok, forget_ok)
}

/// Named suite behind `ffc --check corolla`.
pub fn corolla_suite() -> SuiteReport {
    let mut rep = SuiteReport {
        name: "corolla".into(),
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
    for directed in [true, false] {
        let bounds = Bounds {
            max_vertices: 2,
            max_degree: 2,
            max_genus: 1,
            directed,
        };
        let axioms = check_operadic_axioms(&bounds);
        check(&mut rep, "operadic axioms", axioms.ok());
        let (assoc, unit, pi, stable, forget) = composition_audit(&bounds, 2);
        check(&mut rep, "composition associativity", assoc);
        check(&mut rep, "composition unitality", unit);
        check(&mut rep, "projection functoriality", pi);
        check(&mut rep, "stability closure", stable);
        check(&mut rep, "orientation forgetting", !directed || forget);
    }
    let corpus = composable_corpus(
        &Bounds {
            max_vertices: 2,
            max_degree: 2,
            max_genus: 1,
            directed: true,
        },
        40,
    );
    let (detected, injected) = mutation_detection_rate(&corpus);
    check(
        &mut rep,
        "mutation detection rate >= 95%",
        injected > 0 && detected * 100 >= injected * 95,
    );
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::End;

    fn two_slot(genus: u32) -> Multicorolla {
        Multicorolla::single(genus, vec![Dir::In, Dir::Out])
    }

    #[test]
    fn identity_composes_trivially() {
        let mc = two_slot(0);
        let id = Morphism::identity(&mc, true);
        assert!(id.validate().is_ok());
        assert_eq!(id.then(&id).unwrap(), id);
    }

    #[test]
    fn grafting_a_path() {
        // two corollas grafted along one edge collapse to a single corolla
        // with summed genus (b1 = 0)
        let src = Multicorolla {
            corollas: vec![
                CorollaShape {
                    genus: 1,
                    dirs: vec![Dir::Out],
                },
                CorollaShape {
                    genus: 2,
                    dirs: vec![Dir::In, Dir::Out],
                },
            ],
        };
        let tgt = Multicorolla::single(3, vec![Dir::Out]);
        let morphs = enumerate_morphisms(&src, &tgt, true);
        assert_eq!(morphs.len(), 1);
        let p = &morphs[0];
        let id = Morphism::identity(&tgt, true);
        assert_eq!(p.then(&id).unwrap(), *p);
    }

    #[test]
    fn self_loop_composition_produces_circle() {
        // outer: a pass-through corolla with a self-loop (collapse is an
        // edgeless genus-one corolla); inner: the bare open edge.
        let mid = two_slot(0);
        let tgt = Multicorolla::single(1, vec![]);
        let outer = Morphism {
            directed: true,
            source: mid.clone(),
            target: tgt,
            pairs: [(
                Tag::Src {
                    vertex: 0,
                    label: 1,
                },
                Tag::Src {
                    vertex: 0,
                    label: 0,
                },
            )]
            .into(),
            closed_components: [(0, 0)].into(),
            circles: BTreeSet::new(),
        };
        assert!(outer.validate().is_ok());
        let inner = Morphism {
            directed: true,
            source: Multicorolla::default(),
            target: mid,
            pairs: [(
                Tag::Tgt {
                    vertex: 0,
                    label: 0,
                },
                Tag::Tgt {
                    vertex: 0,
                    label: 1,
                },
            )]
            .into(),
            closed_components: BTreeMap::new(),
            circles: BTreeSet::new(),
        };
        assert!(inner.validate().is_ok(), "{:?}", inner.validate());
        let composed = inner.then(&outer).unwrap();
        assert!(composed.source.is_empty());
        assert_eq!(composed.circles.len(), 1);
    }

    #[test]
    fn stability_examples() {
        assert!(is_stable_directed(&CorollaShape {
            genus: 0,
            dirs: vec![Dir::In, Dir::Out]
        }));
        assert!(!is_stable_directed(&CorollaShape {
            genus: 0,
            dirs: vec![Dir::Out]
        }));
        assert!(is_stable_undirected(&CorollaShape {
            genus: 2,
            dirs: vec![]
        }));
        // the verbatim predicate admits (g=0, n=1); the geometric one
        // rejects it
        let c = CorollaShape {
            genus: 0,
            dirs: vec![Dir::In],
        };
        assert!(is_stable_undirected(&c));
        assert!(!is_geometrically_stable(&c));
    }

    #[test]
    fn projection_constant_on_connected() {
        let src = Multicorolla {
            corollas: vec![
                CorollaShape {
                    genus: 0,
                    dirs: vec![Dir::Out],
                },
                CorollaShape {
                    genus: 0,
                    dirs: vec![Dir::In, Dir::Out],
                },
            ],
        };
        let tgt = Multicorolla::single(0, vec![Dir::Out]);
        let morphs = enumerate_morphisms(&src, &tgt, true);
        assert!(!morphs.is_empty());
        for p in morphs {
            assert_eq!(p.project_to_fin().unwrap(), vec![0, 0]);
        }
    }

    #[test]
    fn from_graph_round_trips_collapse() {
        let genus: BTreeMap<usize, u32> = [(0, 1), (1, 0)].into();
        let g = crate::graphs::ModularGraph::new(
            crate::graphs::Graph::new(
                [0, 1],
                vec![
                    (0, End::Vertex(0), End::Vertex(1)),
                    (1, End::Star, End::Vertex(0)),
                    (2, End::Vertex(1), End::Star),
                ],
            ),
            genus,
        )
        .unwrap();
        let m = morphism_from_graph(&g, true).unwrap();
        assert_eq!(m.target, collapse(&g).multicorolla);
        assert_eq!(m.source, full_split_in_part(&g).unwrap());
    }

    #[test]
    fn terminal_algebra_order_independent_with_loop() {
        let mid = two_slot(0);
        let tgt = Multicorolla::single(1, vec![]);
        let outer = Morphism {
            directed: true,
            source: mid,
            target: tgt,
            pairs: [(
                Tag::Src {
                    vertex: 0,
                    label: 1,
                },
                Tag::Src {
                    vertex: 0,
                    label: 0,
                },
            )]
            .into(),
            closed_components: [(0, 0)].into(),
            circles: BTreeSet::new(),
        };
        let inputs = vec![BTreeMap::new()];
        assert!(contraction_order_independent(&outer, &TerminalAlgebra, &inputs).unwrap());
    }

    #[test]
    fn comm_algebra_rejects_loops() {
        let mid = two_slot(0);
        let tgt = Multicorolla::single(1, vec![]);
        let outer = Morphism {
            directed: true,
            source: mid,
            target: tgt,
            pairs: [(
                Tag::Src {
                    vertex: 0,
                    label: 1,
                },
                Tag::Src {
                    vertex: 0,
                    label: 0,
                },
            )]
            .into(),
            closed_components: [(0, 0)].into(),
            circles: BTreeSet::new(),
        };
        let alg = CommMonoidAlgebra {
            monoid: MonoidTable::trivial(),
        };
        let inputs = vec![[(
            Tag::Src {
                vertex: 0,
                label: 0,
            },
            0usize,
        )]
        .into()];
        let edges = contractible_edges(&outer);
        assert!(matches!(
            evaluate_contraction(&outer, &alg, &edges, &inputs),
            Err(Error::ColorMismatch(_))
        ));
    }

    #[test]
    fn axioms_pass_in_bounds() {
        for directed in [true, false] {
            let rep = check_operadic_axioms(&Bounds {
                max_vertices: 2,
                max_degree: 2,
                max_genus: 1,
                directed,
            });
            assert!(rep.ok(), "counterexamples: {:?}", rep.counterexamples);
        }
        let rep = check_operadic_axioms(&Bounds {
            max_vertices: 0,
            max_degree: 0,
            max_genus: 0,
            directed: true,
        });
        assert!(rep.ok());
    }

    #[test]
    fn mutations_are_detected() {
        let corpus = composable_corpus(
            &Bounds {
                max_vertices: 2,
                max_degree: 2,
                max_genus: 1,
                directed: true,
            },
            25,
        );
        assert!(!corpus.is_empty());
        let (detected, injected) = mutation_detection_rate(&corpus);
        assert!(injected > 0);
        assert!(detected * 100 >= injected * 95, "{}/{}", detected, injected);
    }

    #[test]
    fn single_edge_contraction_is_the_table_entry() {
        // grafting one corolla into another multiplies the outer slot
        // value onto the inner tuple, and nothing else
        let src = Multicorolla {
            corollas: vec![
                CorollaShape {
                    genus: 0,
                    dirs: vec![Dir::In, Dir::Out],
                },
                CorollaShape {
                    genus: 0,
                    dirs: vec![Dir::In, Dir::Out],
                },
            ],
        };
        let tgt = Multicorolla::single(0, vec![Dir::In, Dir::Out]);
        // vertex 1's output feeds vertex 2's input
        let p = Morphism {
            directed: true,
            source: src,
            target: tgt,
            pairs: [
                (
                    Tag::Src {
                        vertex: 0,
                        label: 1,
                    },
                    Tag::Src {
                        vertex: 1,
                        label: 0,
                    },
                ),
                (
                    Tag::Tgt {
                        vertex: 0,
                        label: 0,
                    },
                    Tag::Src {
                        vertex: 0,
                        label: 0,
                    },
                ),
                (
                    Tag::Src {
                        vertex: 1,
                        label: 1,
                    },
                    Tag::Tgt {
                        vertex: 0,
                        label: 1,
                    },
                ),
            ]
            .into(),
            closed_components: BTreeMap::new(),
            circles: BTreeSet::new(),
        };
        assert!(p.validate().is_ok(), "{:?}", p.validate());
        // Z/2 as a table: {0, 1} under addition
        let alg = CommMonoidAlgebra {
            monoid: MonoidTable {
                names: vec!["0".into(), "1".into()],
                unit: 0,
                table: vec![vec![0, 1], vec![1, 0]],
            },
        };
        let inputs: Vec<AlgElem<usize>> = vec![
            [(
                Tag::Src {
                    vertex: 0,
                    label: 0,
                },
                1usize,
            )]
            .into(),
            [(
                Tag::Src {
                    vertex: 1,
                    label: 0,
                },
                1usize,
            )]
            .into(),
        ];
        let edges = contractible_edges(&p);
        assert_eq!(edges.len(), 1);
        let out = evaluate_contraction(&p, &alg, &edges, &inputs).unwrap();
        // the surviving slot carries 1·1 = 0 in Z/2
        assert_eq!(
            out[0][&Tag::Tgt {
                vertex: 0,
                label: 0
            }],
            0
        );
    }

    #[test]
    fn bush_morphisms_are_forests() {
        let src = Multicorolla {
            corollas: vec![
                CorollaShape {
                    genus: 0,
                    dirs: vec![Dir::Out],
                },
                CorollaShape {
                    genus: 0,
                    dirs: vec![Dir::In, Dir::In, Dir::Out],
                },
            ],
        };
        let tgt = Multicorolla::single(0, vec![Dir::In, Dir::Out]);
        for p in enumerate_morphisms(&src, &tgt, true) {
            assert!(is_bush_forest(&p).unwrap());
        }
    }
}
