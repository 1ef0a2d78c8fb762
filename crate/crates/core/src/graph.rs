//! Metric graphs: vertices, edges with lengths, directed bonds, and the
//! midpoint subdivision / degree-2 smoothing transforms.
//!
//! Multigraphs and loops are representable; [`MetricGraph::new_simple`] is the
//! constructor that rejects them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum VertexTag {
    Original,
    /// Inserted at the midpoint of `source_edge` of the graph it was subdivided from.
    Dummy { source_edge: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: usize,
    pub tag: VertexTag,
}

impl Vertex {
    pub fn is_dummy(&self) -> bool {
        matches!(self.tag, VertexTag::Dummy { .. })
    }
}

/// An undirected edge parameterized by `[0, length]` from `u` (x = 0) to `v` (x = length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn endpoint(&self, end: End) -> usize {
        match end {
            End::Start => self.u,
            End::End => self.v,
        }
    }
}

/// Which end of an edge: `Start` is x = 0 (vertex `u`), `End` is x = L (vertex `v`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Start,
    End,
}

impl End {
    pub fn other(self) -> End {
        match self {
            End::Start => End::End,
            End::End => End::Start,
        }
    }
}

/// One incidence slot of a vertex. A loop contributes two distinct slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

impl EdgeEnd {
    pub fn new(edge: usize, end: End) -> Self {
        EdgeEnd { edge, end }
    }

    /// Bond leaving the vertex through this slot.
    pub fn outgoing_bond(self) -> usize {
        match self.end {
            End::Start => 2 * self.edge,
            End::End => 2 * self.edge + 1,
        }
    }

    /// Bond arriving at the vertex through this slot.
    pub fn incoming_bond(self) -> usize {
        self.outgoing_bond() ^ 1
    }
}

/// A directed copy of an edge.
///
/// Bond `2e` runs along edge `e` from `u` to `v`, bond `2e + 1` from `v` to `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub id: usize,
    pub edge: usize,
    pub origin: usize,
    pub terminus: usize,
    pub length: f64,
}

impl Bond {
    pub fn reversal_id(&self) -> usize {
        reversal(self.id)
    }
}

/// Id of the reversed bond.
pub fn reversal(bond: usize) -> usize {
    bond ^ 1
}

/// Which degree-2 vertices [`MetricGraph::smooth_degree2`] may remove.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoothScope {
    /// Only vertices tagged as dummies, which makes smoothing the exact inverse of
    /// [`MetricGraph::subdivide_midpoints`].
    #[default]
    Dummy,
    /// Every degree-2 vertex (all vertices are assumed to carry the standard condition).
    Any,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl MetricGraph {
    /// Builds a multigraph with `vertex_count` original vertices.
    pub fn new(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let vertices = (0..vertex_count)
            .map(|id| Vertex {
                id,
                tag: VertexTag::Original,
            })
            .collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(id, &(u, v, length))| Edge { id, u, v, length })
            .collect();
        Self::from_parts(vertices, edges)
    }

    /// Like [`MetricGraph::new`] but rejects loops and parallel edges.
    pub fn new_simple(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let g = Self::new(vertex_count, edges)?;
        let mut seen = std::collections::HashMap::new();
        for e in &g.edges {
            if e.is_loop() {
                return Err(Error::LoopEdge { edge: e.id });
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if let Some(&first) = seen.get(&key) {
                return Err(Error::ParallelEdge {
                    first,
                    second: e.id,
                });
            }
            seen.insert(key, e.id);
        }
        Ok(g)
    }

    /// Validates vertex and edge records. Ids must be dense and in order.
    pub fn from_parts(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        for (i, v) in vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::InvalidArgument(format!(
                    "vertex at position {i} has id {}",
                    v.id
                )));
            }
        }
        let n = vertices.len();
        for (i, e) in edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::InvalidArgument(format!(
                    "edge at position {i} has id {}",
                    e.id
                )));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::NonPositiveLength {
                    edge: i,
                    length: e.length,
                });
            }
            for vertex in [e.u, e.v] {
                if vertex >= n {
                    return Err(Error::DanglingEndpoint {
                        edge: i,
                        vertex,
                        vertex_count: n,
                    });
                }
            }
        }
        Ok(MetricGraph { vertices, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn bond_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn vertex(&self, id: usize) -> &Vertex {
        &self.vertices[id]
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    /// All bonds in the canonical order `(edge id, direction)`.
    pub fn bonds(&self) -> Vec<Bond> {
        self.edges
            .iter()
            .flat_map(|e| {
                [
                    Bond {
                        id: 2 * e.id,
                        edge: e.id,
                        origin: e.u,
                        terminus: e.v,
                        length: e.length,
                    },
                    Bond {
                        id: 2 * e.id + 1,
                        edge: e.id,
                        origin: e.v,
                        terminus: e.u,
                        length: e.length,
                    },
                ]
            })
            .collect()
    }

    /// Incidence slots of `v`, sorted by `(edge, end)`.
    pub fn incident(&self, v: usize) -> Vec<EdgeEnd> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.u == v {
                out.push(EdgeEnd::new(e.id, End::Start));
            }
            if e.v == v {
                out.push(EdgeEnd::new(e.id, End::End));
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.u == v) + usize::from(e.v == v))
            .sum()
    }

    pub fn original_vertices(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .filter(|v| !v.is_dummy())
            .map(|v| v.id)
            .collect()
    }

    /// Same graph with the parameterization of `edge` flipped (endpoints swapped).
    pub fn with_edge_reversed(&self, edge: usize) -> Result<Self> {
        if edge >= self.edges.len() {
            return Err(Error::InvalidArgument(format!("no edge {edge}")));
        }
        let mut g = self.clone();
        let e = &mut g.edges[edge];
        std::mem::swap(&mut e.u, &mut e.v);
        Ok(g)
    }

    /// Replaces every edge `(u, v, L)` by two half-edges `(u, d, L/2)` and `(v, d, L/2)`
    /// meeting at a new dummy vertex `d`.
    ///
    /// Original vertices keep their ids; the dummy of edge `e` gets id `|V| + e`, and the
    /// half-edges of `e` get ids `2e` (from `u`) and `2e + 1` (from `v`). Both half-edges
    /// are parameterized from their original vertex toward the dummy.
    pub fn subdivide_midpoints(&self) -> MetricGraph {
        let n = self.vertices.len();
        let mut vertices = self.vertices.clone();
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            let d = n + e.id;
            vertices.push(Vertex {
                id: d,
                tag: VertexTag::Dummy { source_edge: e.id },
            });
            let half = 0.5 * e.length;
            edges.push(Edge {
                id: 2 * e.id,
                u: e.u,
                v: d,
                length: half,
            });
            edges.push(Edge {
                id: 2 * e.id + 1,
                u: e.v,
                v: d,
                length: half,
            });
        }
        MetricGraph { vertices, edges }
    }

    /// Removes degree-2 vertices by merging their two edges into one of summed length.
    ///
    /// A vertex whose two slots belong to the same edge (the midpoint of a loop) is kept.
    /// The merged edge runs from the far end of the lower-id edge to the far end of the
    /// other one and takes the lower id before ids are compacted.
    pub fn smooth_degree2(&self, scope: SmoothScope) -> MetricGraph {
        let mut vertices: Vec<Option<Vertex>> = self.vertices.iter().copied().map(Some).collect();
        let mut edges: Vec<Option<Edge>> = self.edges.iter().copied().map(Some).collect();

        for x in 0..vertices.len() {
            let Some(vx) = vertices[x] else { continue };
            if scope == SmoothScope::Dummy && !vx.is_dummy() {
                continue;
            }
            let slots: Vec<EdgeEnd> = edges
                .iter()
                .flatten()
                .flat_map(|e| {
                    let mut s = Vec::new();
                    if e.u == x {
                        s.push(EdgeEnd::new(e.id, End::Start));
                    }
                    if e.v == x {
                        s.push(EdgeEnd::new(e.id, End::End));
                    }
                    s
                })
                .collect();
            if slots.len() != 2 || slots[0].edge == slots[1].edge {
                continue;
            }
            let (a, b) = (slots[0], slots[1]);
            let ea = edges[a.edge].expect("live edge");
            let eb = edges[b.edge].expect("live edge");
            let far_a = ea.endpoint(a.end.other());
            let far_b = eb.endpoint(b.end.other());
            edges[a.edge] = Some(Edge {
                id: a.edge,
                u: far_a,
                v: far_b,
                length: ea.length + eb.length,
            });
            edges[b.edge] = None;
            vertices[x] = None;
        }

        let mut new_vid = vec![usize::MAX; vertices.len()];
        let mut new_vertices = Vec::new();
        for v in vertices.into_iter().flatten() {
            new_vid[v.id] = new_vertices.len();
            new_vertices.push(Vertex {
                id: new_vertices.len(),
                tag: v.tag,
            });
        }
        let new_edges = edges
            .into_iter()
            .flatten()
            .enumerate()
            .map(|(id, e)| Edge {
                id,
                u: new_vid[e.u],
                v: new_vid[e.v],
                length: e.length,
            })
            .collect();
        MetricGraph {
            vertices: new_vertices,
            edges: new_edges,
        }
    }

    /// Sorted list of `(min endpoint, max endpoint, length)`; equal for graphs that agree
    /// up to edge relabeling and orientation.
    pub fn canonical_edge_list(&self) -> Vec<(usize, usize, f64)> {
        let mut v: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.u.min(e.v), e.u.max(e.v), e.length))
            .collect();
        v.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then(a.2.total_cmp(&b.2))
        });
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> MetricGraph {
        MetricGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap()
    }

    #[test]
    fn smallest_graph() {
        let g = MetricGraph::new(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.bonds().len(), 2);
    }

    #[test]
    fn path_with_lengths_one_and_two() {
        let g = MetricGraph::new(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.total_length(), 3.0);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            MetricGraph::new(2, &[(0, 1, 0.0)]),
            Err(Error::NonPositiveLength { edge: 0, .. })
        ));
        assert!(matches!(
            MetricGraph::new(2, &[(0, 1, f64::INFINITY)]),
            Err(Error::NonPositiveLength { .. })
        ));
        assert!(matches!(
            MetricGraph::new(2, &[(0, 2, 1.0)]),
            Err(Error::DanglingEndpoint { vertex: 2, .. })
        ));
    }

    #[test]
    fn simple_constructor_rejects_loops_and_parallels() {
        assert!(matches!(
            MetricGraph::new_simple(1, &[(0, 0, 1.0)]),
            Err(Error::LoopEdge { edge: 0 })
        ));
        assert!(matches!(
            MetricGraph::new_simple(2, &[(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::ParallelEdge { first: 0, second: 1 })
        ));
        // the multigraph constructor accepts both
        assert!(MetricGraph::new(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 2.0)]).is_ok());
    }

    #[test]
    fn loop_has_two_slots() {
        let g = MetricGraph::new(1, &[(0, 0, 1.0)]).unwrap();
        assert_eq!(g.degree(0), 2);
        let slots = g.incident(0);
        assert_eq!(slots.len(), 2);
        assert_ne!(slots[0].outgoing_bond(), slots[1].outgoing_bond());
    }

    #[test]
    fn bond_slots_agree_with_bonds() {
        let g = triangle();
        let bonds = g.bonds();
        for v in 0..g.vertex_count() {
            for slot in g.incident(v) {
                assert_eq!(bonds[slot.outgoing_bond()].origin, v);
                assert_eq!(bonds[slot.incoming_bond()].terminus, v);
            }
        }
    }

    #[test]
    fn subdivide_single_edge() {
        let g = MetricGraph::new(2, &[(0, 1, 2.0)]).unwrap();
        let s = g.subdivide_midpoints();
        assert_eq!(s.edge_count(), 2);
        assert_eq!(s.vertex_count(), 3);
        assert!(s.edges().iter().all(|e| e.length == 1.0));
        assert_eq!(s.vertex(2).tag, VertexTag::Dummy { source_edge: 0 });
    }

    #[test]
    fn subdivide_and_smooth_triangle() {
        let g = triangle();
        let s = g.subdivide_midpoints();
        assert_eq!(s.edge_count(), 6);
        assert!(s.edges().iter().all(|e| e.length == 0.5));
        let back = s.smooth_degree2(SmoothScope::Dummy);
        assert_eq!(back.canonical_edge_list(), g.canonical_edge_list());
        assert_eq!(back.vertex_count(), 3);
    }

    #[test]
    fn smooth_path() {
        let g = MetricGraph::new(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let s = g.smooth_degree2(SmoothScope::Any);
        assert_eq!(s.vertex_count(), 2);
        assert_eq!(s.canonical_edge_list(), vec![(0, 1, 3.0)]);
        // original vertices are untouched in dummy scope
        assert_eq!(g.smooth_degree2(SmoothScope::Dummy), g);
    }

    #[test]
    fn smoothing_without_degree_two_is_identity() {
        let star = MetricGraph::new(4, &[(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0)]).unwrap();
        assert_eq!(star.smooth_degree2(SmoothScope::Any), star);
    }

    #[test]
    fn loop_midpoint_survives() {
        let g = triangle();
        let s = g.smooth_degree2(SmoothScope::Any);
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.edge_count(), 1);
        assert!(s.edge(0).is_loop());
        assert_eq!(s.edge(0).length, 3.0);
    }

    #[test]
    fn reversing_edge_swaps_endpoints() {
        let g = MetricGraph::new(2, &[(0, 1, 1.5)]).unwrap();
        let r = g.with_edge_reversed(0).unwrap();
        assert_eq!((r.edge(0).u, r.edge(0).v), (1, 0));
        assert!(g.with_edge_reversed(3).is_err());
    }
}
