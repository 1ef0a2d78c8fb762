//! Cycles, circulant graphs, Cartesian products, the torus `C_{n1} x C_{n2}` with its
//! translation action, and the CRT isomorphism onto `C_{n1 n2}(n1, n2)`.

use crate::error::{Error, Result};
use crate::graph::{Edge, MetricGraph, Vertex, VertexTag};
use crate::group::{crt_index, gcd};
use crate::symmetry::{validate_action, Generator, GraphAction};

/// A graph together with a validated group action.
#[derive(Debug, Clone)]
pub struct SymmetricGraph {
    pub graph: MetricGraph,
    pub action: GraphAction,
    /// Set when the graph has loops or parallel edges (cycles with fewer than 3 vertices).
    pub multigraph: bool,
}

fn check_length(edge: usize, length: f64) -> Result<()> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::NonPositiveLength { edge, length });
    }
    Ok(())
}

fn rotation(n: usize, step: usize) -> Vec<usize> {
    (0..n).map(|i| (i + step) % n).collect()
}

/// Cycle on `n` vertices with edges `i -> i+1` of length `len`, acted on by rotation.
///
/// `n = 1` gives a single loop and `n = 2` a digon; both are flagged as multigraphs.
pub fn cycle_graph(n: usize, len: f64) -> Result<SymmetricGraph> {
    if n == 0 {
        return Err(Error::InvalidOrder("a cycle needs at least one vertex".into()));
    }
    check_length(0, len)?;
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, len)).collect();
    let graph = MetricGraph::new(n, &edges)?;
    let gen = Generator::from_vertex_permutation(&graph, rotation(n, 1))?;
    let action = GraphAction::cyclic(&graph, n, gen)?;
    validate_action(&graph, &action).into_result()?;
    Ok(SymmetricGraph {
        graph,
        action,
        multigraph: n < 3,
    })
}

/// Circulant graph `C_n(jumps)`: edge `(i, i + j mod n)` for every vertex and jump, with
/// the antipodal jump `n/2` contributing each edge once. Jump class `j` gets `lengths[j]`.
pub fn circulant_graph(n: usize, jumps: &[usize], lengths: &[f64]) -> Result<SymmetricGraph> {
    if n < 2 {
        return Err(Error::InvalidOrder(format!("circulant graph needs n >= 2, got {n}")));
    }
    if jumps.len() != lengths.len() {
        return Err(Error::LengthMismatch {
            what: "jump lengths",
            expected: jumps.len(),
            got: lengths.len(),
        });
    }
    for (i, &j) in jumps.iter().enumerate() {
        if j == 0 || 2 * j > n {
            return Err(Error::JumpOutOfRange { jump: j, max: n / 2 });
        }
        if jumps[..i].contains(&j) {
            return Err(Error::DuplicateJump { jump: j });
        }
    }
    let mut edges = Vec::new();
    for (&j, &len) in jumps.iter().zip(lengths) {
        check_length(edges.len(), len)?;
        let count = if 2 * j == n { n / 2 } else { n };
        for i in 0..count {
            edges.push((i, (i + j) % n, len));
        }
    }
    let graph = MetricGraph::new(n, &edges)?;
    let gen = Generator::from_vertex_permutation(&graph, rotation(n, 1))?;
    let action = GraphAction::cyclic(&graph, n, gen)?;
    validate_action(&graph, &action).into_result()?;
    Ok(SymmetricGraph {
        graph,
        action,
        multigraph: false,
    })
}

/// Cartesian product `g1 x g2`.
///
/// Vertex `(a, b)` gets id `a * |V(g2)| + b`. Edges are listed as `|V(g2)|` copies of each
/// `g1` edge first (edge `e` of `g1` at `b` has id `e * |V(g2)| + b`), then `|V(g1)|`
/// copies of each `g2` edge.
pub fn cartesian_product(g1: &MetricGraph, g2: &MetricGraph) -> MetricGraph {
    let (n1, n2) = (g1.vertex_count(), g2.vertex_count());
    let id = |a: usize, b: usize| a * n2 + b;
    let mut edges = Vec::with_capacity(n2 * g1.edge_count() + n1 * g2.edge_count());
    for e in g1.edges() {
        for b in 0..n2 {
            edges.push((id(e.u, b), id(e.v, b), e.length));
        }
    }
    for a in 0..n1 {
        for f in g2.edges() {
            edges.push((id(a, f.u), id(a, f.v), f.length));
        }
    }
    MetricGraph::new(n1 * n2, &edges).expect("product of valid graphs is valid")
}

/// Extends an action on `graph` to `graph.subdivide_midpoints()`.
///
/// Half-edges always run from an original vertex to a dummy, so every element preserves
/// their orientation.
pub fn subdivide_action(graph: &MetricGraph, action: &GraphAction) -> Result<GraphAction> {
    let sub = graph.subdivide_midpoints();
    let nv = graph.vertex_count();
    let lift = |g: &Generator| -> Generator {
        let mut vertex_perm = g.vertex_perm.clone();
        vertex_perm.extend(g.edge_perm.iter().map(|&f| nv + f));
        let mut edge_perm = vec![0; sub.edge_count()];
        for e in 0..graph.edge_count() {
            let f = g.edge_perm[e];
            let (a, b) = if g.preserves_orientation[e] {
                (2 * f, 2 * f + 1)
            } else {
                (2 * f + 1, 2 * f)
            };
            edge_perm[2 * e] = a;
            edge_perm[2 * e + 1] = b;
        }
        Generator {
            vertex_perm,
            edge_perm,
            preserves_orientation: vec![true; sub.edge_count()],
        }
    };
    let [g1, g2] = action.generators();
    GraphAction::product(&sub, action.orders(), lift(g1), lift(g2))
}

/// The torus `C_{n1} x C_{n2}` acted on by `G_{n1} x G_{n2}` translations.
#[derive(Debug, Clone)]
pub struct Torus {
    pub n1: usize,
    pub n2: usize,
    pub l1_half: f64,
    pub l3_half: f64,
    /// Unsubdivided product with its action.
    pub product: SymmetricGraph,
    /// Midpoint-subdivided product with the lifted action.
    pub subdivided: SymmetricGraph,
}

/// Builds the torus whose quotient edges have lengths `l1_half` and `l3_half`.
///
/// `g1` shifts the first index and `g2` the second. The `C_{n2}` edges (those `g2`
/// translates along) have full length `2 * l1_half`; the `C_{n1}` edges have
/// `2 * l3_half`. With this assignment the dummy vertex glued by `(g1^{n1}, g2)` sits on
/// the `l1_half` edges of the quotient.
pub fn torus_action(n1: usize, n2: usize, l1_half: f64, l3_half: f64) -> Result<Torus> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidOrder("torus orders must be positive".into()));
    }
    check_length(0, l1_half)?;
    check_length(0, l3_half)?;
    let c1 = cycle_graph(n1, 2.0 * l3_half)?;
    let c2 = cycle_graph(n2, 2.0 * l1_half)?;
    let graph = cartesian_product(&c1.graph, &c2.graph);
    let shift1: Vec<usize> = (0..n1 * n2).map(|v| ((v / n2 + 1) % n1) * n2 + v % n2).collect();
    let shift2: Vec<usize> = (0..n1 * n2).map(|v| (v / n2) * n2 + (v % n2 + 1) % n2).collect();
    let g1 = Generator::from_vertex_permutation(&graph, shift1)?;
    let g2 = Generator::from_vertex_permutation(&graph, shift2)?;
    let action = GraphAction::product(&graph, (n1, n2), g1, g2)?;
    validate_action(&graph, &action).into_result()?;
    let sub_action = subdivide_action(&graph, &action)?;
    let sub = graph.subdivide_midpoints();
    validate_action(&sub, &sub_action).into_result()?;
    let multigraph = n1 < 3 || n2 < 3;
    Ok(Torus {
        n1,
        n2,
        l1_half,
        l3_half,
        product: SymmetricGraph {
            graph,
            action,
            multigraph,
        },
        subdivided: SymmetricGraph {
            graph: sub,
            action: sub_action,
            multigraph,
        },
    })
}

/// Vertex bijection between `C_{n1} x C_{n2}` and `C_{n1 n2}(n1, n2)`.
#[derive(Debug, Clone)]
pub struct CrtIsomorphism {
    /// `map[kappa * n2 + iota] = (kappa n2 + iota n1) mod n1 n2`.
    pub map: Vec<usize>,
    pub product: MetricGraph,
    pub circulant: MetricGraph,
}

/// Builds both graphs and checks the CRT map edge by edge.
///
/// `g1_len` is the length of the `C_{n1}` edges (moved along by `g1`) and `g2_len` that
/// of the `C_{n2}` edges. On the circulant side, the jump-`n2` class carries `g1_len` and
/// the jump-`n1` class carries `g2_len`: a step `eps -> eps + n2` changes `kappa` by one.
pub fn product_circulant_isomorphism(
    n1: usize,
    n2: usize,
    g1_len: f64,
    g2_len: f64,
) -> Result<CrtIsomorphism> {
    if gcd(n1, n2) != 1 {
        return Err(Error::NotCoprime { n1, n2 });
    }
    if n1 < 3 || n2 < 3 {
        return Err(Error::InvalidOrder(format!(
            "both orders must be at least 3, got ({n1}, {n2})"
        )));
    }
    let c1 = cycle_graph(n1, g1_len)?;
    let c2 = cycle_graph(n2, g2_len)?;
    let product = cartesian_product(&c1.graph, &c2.graph);
    let circulant = circulant_graph(n1 * n2, &[n1, n2], &[g2_len, g1_len])?.graph;
    let map: Vec<usize> = (0..n1 * n2)
        .map(|v| crt_index(n1, n2, (v / n2) as i64, (v % n2) as i64))
        .collect::<Result<_>>()?;

    let mut mapped: Vec<(usize, usize, f64)> = product
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (map[e.u], map[e.v]);
            (a.min(b), a.max(b), e.length)
        })
        .collect();
    mapped.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
    let target = circulant.canonical_edge_list();
    if let Some((x, y)) = mapped.iter().zip(&target).find(|(x, y)| x != y) {
        return Err(Error::IsomorphismCheckFailed(format!(
            "mapped product edge {x:?} does not match circulant edge {y:?}"
        )));
    }
    if mapped.len() != target.len() {
        return Err(Error::IsomorphismCheckFailed(format!(
            "{} product edges vs {} circulant edges",
            mapped.len(),
            target.len()
        )));
    }
    Ok(CrtIsomorphism {
        map,
        product,
        circulant,
    })
}

/// The one-vertex graph, the unit of the Cartesian product.
pub fn single_vertex() -> MetricGraph {
    MetricGraph::from_parts(
        vec![Vertex {
            id: 0,
            tag: VertexTag::Original,
        }],
        Vec::<Edge>::new(),
    )
    .expect("valid")
}
