//! Finite connected metric graphs and the canonical indexing of edge
//! endpoints.
//!
//! The trace space `K` has one slot per external edge plus two per internal
//! edge, ordered as: external edges (input order), then initial endpoints of
//! internal edges, then terminal endpoints. Boundary-condition matrices,
//! secular matrices and scattering matrices all live on this basis.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// JSON description of a metric graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub internal_edges: Vec<InternalEdgeSpec>,
    #[serde(default)]
    pub external_edges: Vec<ExternalEdgeSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InternalEdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalEdgeSpec {
    pub id: String,
    pub vertex: String,
}

/// An internal edge `[0, length]` running from `tail` (x = 0) to `head`
/// (x = length). `tail == head` makes the edge a tadpole.
#[derive(Debug, Clone)]
pub struct InternalEdge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: f64,
}

/// An external edge `[0, ∞)` anchored at `vertex` (x = 0).
#[derive(Debug, Clone)]
pub struct ExternalEdge {
    pub id: String,
    pub vertex: usize,
}

/// One basis slot of the trace space `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Value/derivative of external edge `e` at its anchor.
    External(usize),
    /// Value/derivative of internal edge `i` at x = 0.
    Minus(usize),
    /// Value/derivative of internal edge `i` at x = a_i.
    Plus(usize),
}

impl Slot {
    /// Vertex carrying this slot.
    pub fn vertex(&self, g: &MetricGraph) -> usize {
        match *self {
            Slot::External(e) => g.external_edges[e].vertex,
            Slot::Minus(i) => g.internal_edges[i].tail,
            Slot::Plus(i) => g.internal_edges[i].head,
        }
    }

    /// Flat edge index (externals first, then internals).
    pub fn edge(&self, g: &MetricGraph) -> usize {
        match *self {
            Slot::External(e) => e,
            Slot::Minus(i) | Slot::Plus(i) => g.external_edges.len() + i,
        }
    }
}

/// Basis bookkeeping for `K`: the slot list and, per vertex, the sorted list
/// of slot indices incident to it (the subspace `L_v`).
#[derive(Debug, Clone)]
pub struct EndpointIndex {
    slots: Vec<Slot>,
    per_vertex: Vec<Vec<usize>>,
}

impl EndpointIndex {
    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, idx: usize) -> Slot {
        self.slots[idx]
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Indices of the slots incident to vertex `v`, ascending.
    pub fn vertex_slots(&self, v: usize) -> &[usize] {
        &self.per_vertex[v]
    }

    /// Position of slot index `k` within its vertex block, if any.
    pub fn local_position(&self, v: usize, k: usize) -> Option<usize> {
        self.per_vertex[v].iter().position(|&s| s == k)
    }
}

/// A validated, immutable metric graph.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertex_ids: Vec<String>,
    pub internal_edges: Vec<InternalEdge>,
    pub external_edges: Vec<ExternalEdge>,
    degrees: Vec<usize>,
    endpoint_index: EndpointIndex,
}

impl MetricGraph {
    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        let mut vertex_lookup = HashMap::new();
        for (idx, id) in spec.vertices.iter().enumerate() {
            if vertex_lookup.insert(id.clone(), idx).is_some() {
                return Err(Error::DuplicateVertex(id.clone()));
            }
        }
        let mut edge_ids = HashSet::new();
        let resolve = |edge: &str, v: &str| -> Result<usize> {
            vertex_lookup.get(v).copied().ok_or_else(|| Error::DanglingEndpoint {
                edge: edge.to_string(),
                vertex: v.to_string(),
            })
        };

        let mut internal_edges = Vec::with_capacity(spec.internal_edges.len());
        for e in &spec.internal_edges {
            if !edge_ids.insert(e.id.clone()) {
                return Err(Error::DuplicateEdge(e.id.clone()));
            }
            if !(e.length > 0.0) {
                return Err(Error::NonpositiveLength { edge: e.id.clone(), length: e.length });
            }
            internal_edges.push(InternalEdge {
                id: e.id.clone(),
                tail: resolve(&e.id, &e.from)?,
                head: resolve(&e.id, &e.to)?,
                length: e.length,
            });
        }
        let mut external_edges = Vec::with_capacity(spec.external_edges.len());
        for e in &spec.external_edges {
            if !edge_ids.insert(e.id.clone()) {
                return Err(Error::DuplicateEdge(e.id.clone()));
            }
            external_edges.push(ExternalEdge { id: e.id.clone(), vertex: resolve(&e.id, &e.vertex)? });
        }

        let nv = spec.vertices.len();
        let mut degrees = vec![0usize; nv];
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for e in &internal_edges {
            degrees[e.tail] += 1;
            degrees[e.head] += 1;
            adjacency[e.tail].push(e.head);
            adjacency[e.head].push(e.tail);
        }
        for e in &external_edges {
            degrees[e.vertex] += 1;
        }
        if let Some(v) = degrees.iter().position(|&d| d == 0) {
            if nv > 1 {
                return Err(Error::Disconnected);
            }
            return Err(Error::IsolatedVertex(spec.vertices[v].clone()));
        }
        if nv > 0 {
            let mut seen = vec![false; nv];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            let mut count = 1;
            while let Some(v) = queue.pop_front() {
                for &w in &adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        queue.push_back(w);
                    }
                }
            }
            if count != nv {
                return Err(Error::Disconnected);
            }
        }

        let mut slots = Vec::new();
        for e in 0..external_edges.len() {
            slots.push(Slot::External(e));
        }
        for i in 0..internal_edges.len() {
            slots.push(Slot::Minus(i));
        }
        for i in 0..internal_edges.len() {
            slots.push(Slot::Plus(i));
        }
        let mut per_vertex: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (idx, slot) in slots.iter().enumerate() {
            let v = match *slot {
                Slot::External(e) => external_edges[e].vertex,
                Slot::Minus(i) => internal_edges[i].tail,
                Slot::Plus(i) => internal_edges[i].head,
            };
            per_vertex[v].push(idx);
        }

        Ok(MetricGraph {
            vertex_ids: spec.vertices.clone(),
            internal_edges,
            external_edges,
            degrees,
            endpoint_index: EndpointIndex { slots, per_vertex },
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertex_ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    /// Dimension of the trace space: |E| + 2|I|.
    pub fn kdim(&self) -> usize {
        self.external_edges.len() + 2 * self.internal_edges.len()
    }

    /// Total number of edges; flat edge indices run over externals first.
    pub fn edge_count(&self) -> usize {
        self.external_edges.len() + self.internal_edges.len()
    }

    pub fn is_external(&self, edge: usize) -> bool {
        edge < self.external_edges.len()
    }

    /// Ordinal of a flat edge index within the internal-edge list.
    pub fn internal_ord(&self, edge: usize) -> Option<usize> {
        edge.checked_sub(self.external_edges.len()).filter(|&i| i < self.internal_edges.len())
    }

    pub fn edge_id(&self, edge: usize) -> &str {
        if self.is_external(edge) {
            &self.external_edges[edge].id
        } else {
            &self.internal_edges[edge - self.external_edges.len()].id
        }
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        if let Some(e) = self.external_edges.iter().position(|e| e.id == id) {
            return Ok(e);
        }
        if let Some(i) = self.internal_edges.iter().position(|e| e.id == id) {
            return Ok(self.external_edges.len() + i);
        }
        Err(Error::UnknownEdge(id.to_string()))
    }

    /// Length of a flat edge; `None` for external edges.
    pub fn edge_length(&self, edge: usize) -> Option<f64> {
        self.internal_ord(edge).map(|i| self.internal_edges[i].length)
    }

    pub fn is_compact(&self) -> bool {
        self.external_edges.is_empty()
    }

    /// Internal edges with ∂⁻ = ∂⁺, by internal ordinal.
    pub fn tadpoles(&self) -> Vec<usize> {
        self.internal_edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tail == e.head)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn min_internal_length(&self) -> Option<f64> {
        self.internal_edges.iter().map(|e| e.length).min_by(|a, b| a.partial_cmp(b).unwrap())
    }

    pub fn max_internal_length(&self) -> Option<f64> {
        self.internal_edges.iter().map(|e| e.length).max_by(|a, b| a.partial_cmp(b).unwrap())
    }

    pub fn endpoint_index(&self) -> &EndpointIndex {
        &self.endpoint_index
    }

    /// Star with `n` external edges at a single vertex.
    pub fn star(n: usize) -> Self {
        let spec = GraphSpec {
            vertices: vec!["v".into()],
            internal_edges: vec![],
            external_edges: (0..n)
                .map(|e| ExternalEdgeSpec { id: format!("e{e}"), vertex: "v".into() })
                .collect(),
        };
        Self::from_spec(&spec).expect("star graph is valid")
    }

    /// Single internal edge of length `a` between two vertices.
    pub fn interval(a: f64) -> Self {
        let spec = GraphSpec {
            vertices: vec!["v0".into(), "v1".into()],
            internal_edges: vec![InternalEdgeSpec {
                id: "i0".into(),
                from: "v0".into(),
                to: "v1".into(),
                length: a,
            }],
            external_edges: vec![],
        };
        Self::from_spec(&spec).expect("interval graph is valid")
    }

    /// Interval of length `a` with one external edge attached at its left end.
    pub fn interval_with_lead(a: f64) -> Self {
        let spec = GraphSpec {
            vertices: vec!["v0".into(), "v1".into()],
            internal_edges: vec![InternalEdgeSpec {
                id: "i0".into(),
                from: "v0".into(),
                to: "v1".into(),
                length: a,
            }],
            external_edges: vec![ExternalEdgeSpec { id: "e0".into(), vertex: "v0".into() }],
        };
        Self::from_spec(&spec).expect("lead graph is valid")
    }

    /// Ring made of two internal edges of lengths `a0`, `a1` between two
    /// vertices.
    pub fn ring(a0: f64, a1: f64) -> Self {
        let spec = GraphSpec {
            vertices: vec!["v0".into(), "v1".into()],
            internal_edges: vec![
                InternalEdgeSpec { id: "i0".into(), from: "v0".into(), to: "v1".into(), length: a0 },
                InternalEdgeSpec { id: "i1".into(), from: "v0".into(), to: "v1".into(), length: a1 },
            ],
            external_edges: vec![],
        };
        Self::from_spec(&spec).expect("ring graph is valid")
    }

    /// Single vertex with one tadpole of length `a`.
    pub fn tadpole(a: f64) -> Self {
        let spec = GraphSpec {
            vertices: vec!["v".into()],
            internal_edges: vec![InternalEdgeSpec {
                id: "i0".into(),
                from: "v".into(),
                to: "v".into(),
                length: a,
            }],
            external_edges: vec![],
        };
        Self::from_spec(&spec).expect("tadpole graph is valid")
    }
}

/// Human-readable validation summary used by the batch front end.
#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub internal_edges: usize,
    pub external_edges: usize,
    pub trace_dimension: usize,
    pub compact: bool,
    pub degrees: Vec<DegreeEntry>,
    pub tadpoles: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeEntry {
    pub vertex: String,
    pub degree: usize,
}

impl GraphSummary {
    pub fn new(g: &MetricGraph) -> Self {
        GraphSummary {
            vertices: g.vertex_count(),
            internal_edges: g.internal_edges.len(),
            external_edges: g.external_edges.len(),
            trace_dimension: g.kdim(),
            compact: g.is_compact(),
            degrees: (0..g.vertex_count())
                .map(|v| DegreeEntry { vertex: g.vertex_id(v).to_string(), degree: g.degree(v) })
                .collect(),
            tadpoles: g.tadpoles().iter().map(|&i| g.internal_edges[i].id.clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_graph_single_external_edge() {
        let g = MetricGraph::star(1);
        assert_eq!(g.degree(0), 1);
        assert!(!g.is_compact());
        assert_eq!(g.kdim(), 1);
        assert!(g.tadpoles().is_empty());
    }

    #[test]
    fn tadpole_detected() {
        let g = MetricGraph::tadpole(1.0);
        assert_eq!(g.tadpoles(), vec![0]);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.kdim(), 2);
        // Both endpoint slots sit at the single vertex.
        assert_eq!(g.endpoint_index().vertex_slots(0), &[0, 1]);
    }

    #[test]
    fn disconnected_rejected() {
        let spec = GraphSpec {
            vertices: vec!["a".into(), "b".into()],
            internal_edges: vec![],
            external_edges: vec![
                ExternalEdgeSpec { id: "e0".into(), vertex: "a".into() },
                ExternalEdgeSpec { id: "e1".into(), vertex: "b".into() },
            ],
        };
        assert!(matches!(MetricGraph::from_spec(&spec), Err(Error::Disconnected)));
    }

    #[test]
    fn nonpositive_length_rejected() {
        let spec = GraphSpec {
            vertices: vec!["a".into(), "b".into()],
            internal_edges: vec![InternalEdgeSpec {
                id: "i".into(),
                from: "a".into(),
                to: "b".into(),
                length: 0.0,
            }],
            external_edges: vec![],
        };
        assert!(matches!(MetricGraph::from_spec(&spec), Err(Error::NonpositiveLength { .. })));
    }

    #[test]
    fn dangling_endpoint_rejected() {
        let spec = GraphSpec {
            vertices: vec!["a".into()],
            internal_edges: vec![],
            external_edges: vec![ExternalEdgeSpec { id: "e".into(), vertex: "zz".into() }],
        };
        assert!(matches!(MetricGraph::from_spec(&spec), Err(Error::DanglingEndpoint { .. })));
    }

    #[test]
    fn star_slots_all_at_single_vertex() {
        let g = MetricGraph::star(3);
        assert_eq!(g.kdim(), 3);
        assert_eq!(g.endpoint_index().vertex_slots(0), &[0, 1, 2]);
    }

    #[test]
    fn interval_slots_split_between_vertices() {
        let g = MetricGraph::interval(1.0);
        assert_eq!(g.kdim(), 2);
        assert_eq!(g.endpoint_index().vertex_slots(0), &[0]); // ψ_i(0)
        assert_eq!(g.endpoint_index().vertex_slots(1), &[1]); // ψ_i(a)
        assert!(matches!(g.endpoint_index().slot(0), Slot::Minus(0)));
        assert!(matches!(g.endpoint_index().slot(1), Slot::Plus(0)));
    }

    #[test]
    fn degree_sum_identity() {
        // Σ_v deg(v) = |E| + 2|I| on an assorted graph.
        let spec = GraphSpec {
            vertices: vec!["a".into(), "b".into(), "c".into()],
            internal_edges: vec![
                InternalEdgeSpec { id: "i0".into(), from: "a".into(), to: "b".into(), length: 1.0 },
                InternalEdgeSpec { id: "i1".into(), from: "b".into(), to: "c".into(), length: 0.5 },
                InternalEdgeSpec { id: "i2".into(), from: "c".into(), to: "c".into(), length: 2.0 },
            ],
            external_edges: vec![
                ExternalEdgeSpec { id: "e0".into(), vertex: "a".into() },
                ExternalEdgeSpec { id: "e1".into(), vertex: "c".into() },
            ],
        };
        let g = MetricGraph::from_spec(&spec).unwrap();
        let total: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
        assert_eq!(total, g.kdim());
        // L_v sets partition the slot indices.
        let mut seen = vec![false; g.kdim()];
        for v in 0..g.vertex_count() {
            assert_eq!(g.endpoint_index().vertex_slots(v).len(), g.degree(v));
            for &s in g.endpoint_index().vertex_slots(v) {
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
        assert!(seen.iter().all(|&x| x));
    }

    #[test]
    fn stable_index_assignment() {
        let spec = GraphSpec {
            vertices: vec!["a".into(), "b".into()],
            internal_edges: vec![InternalEdgeSpec {
                id: "i0".into(),
                from: "a".into(),
                to: "b".into(),
                length: 1.0,
            }],
            external_edges: vec![ExternalEdgeSpec { id: "e0".into(), vertex: "a".into() }],
        };
        let g1 = MetricGraph::from_spec(&spec).unwrap();
        let g2 = MetricGraph::from_spec(&spec).unwrap();
        assert_eq!(g1.endpoint_index().slots(), g2.endpoint_index().slots());
        assert_eq!(g1.edge_index("e0").unwrap(), 0);
        assert_eq!(g1.edge_index("i0").unwrap(), 1);
    }
}
