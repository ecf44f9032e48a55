//! Graphs with half-edges, modular gradings, splitting and corolla
//! collapse.
//!
//! A graph has a distinguished empty vertex `*`; edges whose source or
//! target is `*` are half-edges, an edge with both ends at `*` is an open
//! edge. The geometric realization removes `*`, so connectivity only flows
//! through interior edges, each open edge is its own component, and a
//! vertexless circle (which composition of corolla morphisms can produce
//! by tracing a loop through an open edge) is tracked by a plain counter.

use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

use crate::{Error, Result};

/// Endpoint of an edge: a real vertex or the empty vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Vertex(usize),
    Star,
}

impl End {
    pub fn vertex(&self) -> Option<usize> {
        match self {
            End::Vertex(v) => Some(*v),
            End::Star => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    pub src: End,
    pub dst: End,
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.src.vertex().is_some() && self.dst.vertex().is_some()
    }

    pub fn is_open(&self) -> bool {
        self.src == End::Star && self.dst == End::Star
    }

    pub fn is_half(&self) -> bool {
        !self.is_interior() && !self.is_open()
    }
}

/// Pointed graph with half-edges, plus a count of vertexless circle
/// components.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    pub vertices: BTreeSet<usize>,
    pub edges: Vec<Edge>,
    pub circles: usize,
}

impl Graph {
    pub fn new(vertices: impl IntoIterator<Item = usize>, edges: Vec<(usize, End, End)>) -> Graph {
        Graph {
            vertices: vertices.into_iter().collect(),
            edges: edges
                .into_iter()
                .map(|(id, src, dst)| Edge { id, src, dst })
                .collect(),
            circles: 0,
        }
    }

    pub fn edge(&self, id: usize) -> Result<&Edge> {
        self.edges
            .iter()
            .find(|e| e.id == id)
            .ok_or(Error::EdgeNotInGraph(id))
    }

    fn check(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if !seen.insert(e.id) {
                return Err(Error::Invalid(format!("duplicate edge id {}", e.id)));
            }
            for end in [e.src, e.dst] {
                if let End::Vertex(v) = end {
                    if !self.vertices.contains(&v) {
                        return Err(Error::Invalid(format!(
                            "edge {} touches missing vertex {}",
                            e.id, v
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Outgoing half-edge slots `E₊` (target `*`).
    pub fn outgoing_halves(&self) -> Vec<Slot> {
        self.edges
            .iter()
            .filter(|e| e.dst == End::Star)
            .map(|e| Slot {
                edge: e.id,
                at_src: false,
            })
            .collect()
    }

    /// Incoming half-edge slots `E₋` (source `*`).
    pub fn incoming_halves(&self) -> Vec<Slot> {
        self.edges
            .iter()
            .filter(|e| e.src == End::Star)
            .map(|e| Slot {
                edge: e.id,
                at_src: true,
            })
            .collect()
    }

    /// The closed graph left after dropping open and half-edges.
    pub fn interior(&self) -> Graph {
        Graph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .filter(|e| e.is_interior())
                .cloned()
                .collect(),
            circles: 0,
        }
    }

    /// Connected components of the geometric realization. Vertex
    /// components come first (ordered by smallest vertex), then open-edge
    /// components (by edge id); circles are reported as a count.
    pub fn components(&self) -> Vec<Component> {
        let mut parent: BTreeMap<usize, usize> = self.vertices.iter().map(|v| (*v, *v)).collect();
        fn find(parent: &mut BTreeMap<usize, usize>, v: usize) -> usize {
            let p = parent[&v];
            if p == v {
                v
            } else {
                let r = find(parent, p);
                parent.insert(v, r);
                r
            }
        }
        for e in &self.edges {
            if let (End::Vertex(a), End::Vertex(b)) = (e.src, e.dst) {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                if ra != rb {
                    parent.insert(ra, rb);
                }
            }
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in &self.vertices {
            by_root.entry(find(&mut parent, *v)).or_default().push(*v);
        }
        let mut groups: Vec<Vec<usize>> = by_root.into_values().collect();
        groups.sort_by_key(|g| g.iter().min().cloned());
        let mut comps: Vec<Component> = Vec::new();
        for g in groups {
            let vset: BTreeSet<usize> = g.into_iter().collect();
            let interior_edges = self
                .edges
                .iter()
                .filter(|e| e.is_interior() && vset.contains(&e.src.vertex().unwrap()))
                .map(|e| e.id)
                .collect();
            let mut slots = Vec::new();
            for e in &self.edges {
                if e.src == End::Star {
                    if let End::Vertex(v) = e.dst {
                        if vset.contains(&v) {
                            slots.push(Slot {
                                edge: e.id,
                                at_src: true,
                            });
                        }
                    }
                }
                if e.dst == End::Star {
                    if let End::Vertex(v) = e.src {
                        if vset.contains(&v) {
                            slots.push(Slot {
                                edge: e.id,
                                at_src: false,
                            });
                        }
                    }
                }
            }
            comps.push(Component::Vertices {
                vertices: vset,
                interior_edges,
                slots,
            });
        }
        for e in &self.edges {
            if e.is_open() {
                comps.push(Component::OpenEdge { edge: e.id });
            }
        }
        comps
    }
}

/// Half-edge slot: an edge end resting on the empty vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Slot {
    pub edge: usize,
    /// True when the slot is the source end (an incoming half-edge).
    pub at_src: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Component {
    Vertices {
        vertices: BTreeSet<usize>,
        interior_edges: Vec<usize>,
        slots: Vec<Slot>,
    },
    OpenEdge {
        edge: usize,
    },
}

/// Nonnegatively graded graph: the weight of a vertex is called its genus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularGraph {
    pub graph: Graph,
    pub genus: BTreeMap<usize, u32>,
}

impl ModularGraph {
    pub fn new(graph: Graph, genus: BTreeMap<usize, u32>) -> Result<ModularGraph> {
        graph.check()?;
        for v in &graph.vertices {
            if !genus.contains_key(v) {
                return Err(Error::Invalid(format!("vertex {} has no genus label", v)));
            }
        }
        Ok(ModularGraph { graph, genus })
    }

    /// First Betti number of a closed graph: `E - V + #components`; the
    /// genus bookkeeping of collapse.
    pub fn cycle_rank(vertex_count: usize, interior_edge_count: usize, components: usize) -> u32 {
        (interior_edge_count + components - vertex_count) as u32
    }

    pub fn to_json(&self) -> Value {
        let end = |e: &End| match e {
            End::Vertex(v) => json!(v),
            End::Star => json!("*"),
        };
        let mut obj = serde_json::Map::new();
        obj.insert(
            "vertices".into(),
            Value::Array(
                self.graph
                    .vertices
                    .iter()
                    .map(|v| json!({"id": v, "genus": self.genus[v]}))
                    .collect(),
            ),
        );
        obj.insert(
            "edges".into(),
            Value::Array(
                self.graph
                    .edges
                    .iter()
                    .map(|e| json!({"id": e.id, "src": end(&e.src), "dst": end(&e.dst)}))
                    .collect(),
            ),
        );
        if self.graph.circles > 0 {
            obj.insert("circles".into(), json!(self.graph.circles));
        }
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<ModularGraph> {
        let parse_end = |x: &Value| -> Result<End> {
            if x.as_str() == Some("*") {
                Ok(End::Star)
            } else {
                x.as_u64()
                    .map(|n| End::Vertex(n as usize))
                    .ok_or_else(|| Error::Invalid("edge end must be a vertex id or \"*\"".into()))
            }
        };
        let mut vertices = BTreeSet::new();
        let mut genus = BTreeMap::new();
        for vv in v["vertices"]
            .as_array()
            .ok_or_else(|| Error::Invalid("missing vertices".into()))?
        {
            let id = vv["id"]
                .as_u64()
                .ok_or_else(|| Error::Invalid("vertex id".into()))? as usize;
            vertices.insert(id);
            genus.insert(id, vv["genus"].as_u64().unwrap_or(0) as u32);
        }
        let mut edges = Vec::new();
        let empty = Vec::new();
        for ee in v["edges"].as_array().unwrap_or(&empty) {
            edges.push(Edge {
                id: ee["id"]
                    .as_u64()
                    .ok_or_else(|| Error::Invalid("edge id".into()))? as usize,
                src: parse_end(&ee["src"])?,
                dst: parse_end(&ee["dst"])?,
            });
        }
        let circles = v.get("circles").and_then(|c| c.as_u64()).unwrap_or(0) as usize;
        ModularGraph::new(
            Graph {
                vertices,
                edges,
                circles,
            },
            genus,
        )
    }
}

/// Splitting `Γ_!S`: an edge of multiplicity `n` becomes a chain of `n+1`
/// new edges through the empty vertex. Pieces of edge `e` get ids
/// `e·(M+1) + k` with `M` the largest multiplicity, so pieces stay
/// adjacent in id order and the empty splitting is the identity.
pub fn split(g: &Graph, multiplicities: &[(usize, usize)]) -> Result<Graph> {
    let mut mult: BTreeMap<usize, usize> = BTreeMap::new();
    for (id, m) in multiplicities {
        g.edge(*id)?;
        *mult.entry(*id).or_insert(0) += m;
    }
    let stride = mult.values().max().cloned().unwrap_or(0) + 1;
    let mut edges = Vec::new();
    for e in &g.edges {
        let n = mult.get(&e.id).cloned().unwrap_or(0);
        for k in 0..=n {
            let src = if k == 0 { e.src } else { End::Star };
            let dst = if k == n { e.dst } else { End::Star };
            edges.push(Edge {
                id: e.id * stride + k,
                src,
                dst,
            });
        }
    }
    Ok(Graph {
        vertices: g.vertices.clone(),
        edges,
        circles: g.circles,
    })
}

/// The full splitting at every edge once; the in-part is one corolla per
/// vertex.
pub fn full_split(g: &Graph) -> Result<Graph> {
    let all: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.id, 1)).collect();
    split(g, &all)
}

/// Direction of a labeled multicorolla edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    In,
    Out,
}

/// One corolla: a single interior vertex with labeled directed half-edges
/// (labels are 1-based positions) and a genus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorollaShape {
    pub genus: u32,
    pub dirs: Vec<Dir>,
}

impl CorollaShape {
    pub fn degree(&self) -> usize {
        self.dirs.len()
    }

    pub fn inputs(&self) -> usize {
        self.dirs.iter().filter(|d| **d == Dir::In).count()
    }

    pub fn outputs(&self) -> usize {
        self.dirs.iter().filter(|d| **d == Dir::Out).count()
    }
}

/// Disjoint union of labeled corollas; vertices are 1-based positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Multicorolla {
    pub corollas: Vec<CorollaShape>,
}

impl Multicorolla {
    pub fn empty() -> Multicorolla {
        Multicorolla::default()
    }

    pub fn single(genus: u32, dirs: Vec<Dir>) -> Multicorolla {
        Multicorolla {
            corollas: vec![CorollaShape { genus, dirs }],
        }
    }

    pub fn len(&self) -> usize {
        self.corollas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corollas.is_empty()
    }

    pub fn disjoint_union(&self, other: &Multicorolla) -> Multicorolla {
        let mut corollas = self.corollas.clone();
        corollas.extend(other.corollas.iter().cloned());
        Multicorolla { corollas }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.corollas
                .iter()
                .map(|c| {
                    json!({
                        "genus": c.genus,
                        "edges": c.dirs.iter().map(|d| match d {
                            Dir::In => json!("in"),
                            Dir::Out => json!("out"),
                        }).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Multicorolla> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Invalid("multicorolla must be an array".into()))?;
        let mut corollas = Vec::new();
        let empty = Vec::new();
        for c in arr {
            let genus = c["genus"].as_u64().unwrap_or(0) as u32;
            let dirs = c["edges"]
                .as_array()
                .unwrap_or(&empty)
                .iter()
                .map(|d| match d.as_str() {
                    Some("in") => Ok(Dir::In),
                    Some("out") => Ok(Dir::Out),
                    _ => Err(Error::Invalid(
                        "edge direction must be \"in\" or \"out\"".into(),
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            corollas.push(CorollaShape { genus, dirs });
        }
        Ok(Multicorolla { corollas })
    }
}

/// Result of collapsing: the multicorolla plus, per collapsed vertex, the
/// slots of the original graph realizing its labeled edges (in label
/// order), and which original vertices went where.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collapse {
    pub multicorolla: Multicorolla,
    pub slot_map: Vec<Vec<Slot>>,
    pub vertex_map: BTreeMap<usize, usize>,
}

/// Corolla collapse `C(Γ)`: one corolla per connected component, edges the
/// half-edges of the component, genus the vertex genera plus the cycle
/// rank of the interior. Components are ordered by smallest contained
/// vertex (open edges after, by edge id; circles last), and slots within a
/// corolla by `(edge id, source end first)`.
pub fn collapse(mg: &ModularGraph) -> Collapse {
    let mut corollas = Vec::new();
    let mut slot_map = Vec::new();
    let mut vertex_map = BTreeMap::new();
    for comp in mg.graph.components() {
        match comp {
            Component::Vertices {
                vertices,
                interior_edges,
                mut slots,
            } => {
                slots.sort();
                let genus_sum: u32 = vertices.iter().map(|v| mg.genus[v]).sum();
                let b1 = ModularGraph::cycle_rank(vertices.len(), interior_edges.len(), 1);
                let dirs = slots
                    .iter()
                    .map(|s| if s.at_src { Dir::In } else { Dir::Out })
                    .collect();
                for v in &vertices {
                    vertex_map.insert(*v, corollas.len());
                }
                corollas.push(CorollaShape {
                    genus: genus_sum + b1,
                    dirs,
                });
                slot_map.push(slots);
            }
            Component::OpenEdge { edge } => {
                // the two halves realize one incoming and one outgoing edge
                let slots = vec![
                    Slot { edge, at_src: true },
                    Slot {
                        edge,
                        at_src: false,
                    },
                ];
                corollas.push(CorollaShape {
                    genus: 0,
                    dirs: vec![Dir::In, Dir::Out],
                });
                slot_map.push(slots);
            }
        }
    }
    for _ in 0..mg.graph.circles {
        corollas.push(CorollaShape {
            genus: 1,
            dirs: vec![],
        });
        slot_map.push(vec![]);
    }
    Collapse {
        multicorolla: Multicorolla { corollas },
        slot_map,
        vertex_map,
    }
}
