//! Actions of `G_{n1} x G_{n2}` (a cyclic group is the case `n2 = 1`) on metric graphs,
//! their validation, edge orbits and single-vertex fundamental domains.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{End, MetricGraph};

/// Combinatorial data of one generator: where vertices and edges go, and whether the
/// edge parameterization is preserved (`x -> x`) or reversed (`x -> L - x`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub preserves_orientation: Vec<bool>,
}

impl Generator {
    pub fn identity(graph: &MetricGraph) -> Self {
        Generator {
            vertex_perm: (0..graph.vertex_count()).collect(),
            edge_perm: (0..graph.edge_count()).collect(),
            preserves_orientation: vec![true; graph.edge_count()],
        }
    }

    /// Derives the edge map induced by a vertex permutation.
    ///
    /// Each edge `(u, v)` is matched to an unused edge joining `(p(u), p(v))`, preferring
    /// equal length and preserved orientation. A length mismatch is tolerated here so that
    /// [`validate_action`] can report it; a missing adjacency is an error.
    pub fn from_vertex_permutation(graph: &MetricGraph, vertex_perm: Vec<usize>) -> Result<Self> {
        if vertex_perm.len() != graph.vertex_count() {
            return Err(Error::LengthMismatch {
                what: "vertex permutation",
                expected: graph.vertex_count(),
                got: vertex_perm.len(),
            });
        }
        if let Some(&bad) = vertex_perm.iter().find(|&&p| p >= graph.vertex_count()) {
            return Err(Error::InvalidAction(format!("vertex image {bad} out of range")));
        }
        let edges = graph.edges();
        let mut used = vec![false; edges.len()];
        let mut edge_perm = vec![0; edges.len()];
        let mut preserves = vec![true; edges.len()];
        for e in edges {
            let (pu, pv) = (vertex_perm[e.u], vertex_perm[e.v]);
            let mut best: Option<(usize, bool, u8)> = None;
            for f in edges.iter().filter(|f| !used[f.id]) {
                for (forward, ok) in [(true, f.u == pu && f.v == pv), (false, f.u == pv && f.v == pu)] {
                    if !ok {
                        continue;
                    }
                    let score = u8::from(f.length != e.length) * 2 + u8::from(!forward);
                    if best.is_none_or(|(_, _, s)| score < s) {
                        best = Some((f.id, forward, score));
                    }
                }
            }
            let Some((f, forward, _)) = best else {
                return Err(Error::InvalidAction(format!(
                    "edge {} ({}-{}) has no image between {} and {}",
                    e.id, e.u, e.v, pu, pv
                )));
            };
            used[f] = true;
            edge_perm[e.id] = f;
            preserves[e.id] = forward;
        }
        Ok(Generator {
            vertex_perm,
            edge_perm,
            preserves_orientation: preserves,
        })
    }
}

/// The full vertex/edge map of one group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementMap {
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
    pub preserved: Vec<bool>,
}

impl ElementMap {
    fn identity(nv: usize, ne: usize) -> Self {
        ElementMap {
            vertex: (0..nv).collect(),
            edge: (0..ne).collect(),
            preserved: vec![true; ne],
        }
    }

    fn from_generator(g: &Generator) -> Self {
        ElementMap {
            vertex: g.vertex_perm.clone(),
            edge: g.edge_perm.clone(),
            preserved: g.preserves_orientation.clone(),
        }
    }

    /// `self` followed by `next`.
    fn then(&self, next: &ElementMap) -> ElementMap {
        ElementMap {
            vertex: self.vertex.iter().map(|&v| next.vertex[v]).collect(),
            edge: self.edge.iter().map(|&e| next.edge[e]).collect(),
            preserved: self
                .edge
                .iter()
                .zip(&self.preserved)
                .map(|(&e, &p)| p == next.preserved[e])
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vertex.iter().enumerate().all(|(i, &v)| i == v)
            && self.edge.iter().enumerate().all(|(i, &e)| i == e)
            && self.preserved.iter().all(|&p| p)
    }
}

/// An action of `G_{n1} x G_{n2}` given by one generator per factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphAction {
    orders: (usize, usize),
    generators: [Generator; 2],
}

impl GraphAction {
    pub fn cyclic(graph: &MetricGraph, order: usize, generator: Generator) -> Result<Self> {
        Self::product(graph, (order, 1), generator, Generator::identity(graph))
    }

    pub fn product(
        graph: &MetricGraph,
        orders: (usize, usize),
        g1: Generator,
        g2: Generator,
    ) -> Result<Self> {
        if orders.0 == 0 || orders.1 == 0 {
            return Err(Error::ZeroOrder);
        }
        for g in [&g1, &g2] {
            if g.vertex_perm.len() != graph.vertex_count()
                || g.edge_perm.len() != graph.edge_count()
                || g.preserves_orientation.len() != graph.edge_count()
            {
                return Err(Error::InvalidAction(
                    "generator size does not match the graph".into(),
                ));
            }
            if g.vertex_perm.iter().any(|&v| v >= graph.vertex_count())
                || g.edge_perm.iter().any(|&e| e >= graph.edge_count())
            {
                return Err(Error::InvalidAction("generator image out of range".into()));
            }
        }
        Ok(GraphAction {
            orders,
            generators: [g1, g2],
        })
    }

    /// Trivial action of the one-element group.
    pub fn trivial(graph: &MetricGraph) -> Self {
        GraphAction {
            orders: (1, 1),
            generators: [Generator::identity(graph), Generator::identity(graph)],
        }
    }

    pub fn orders(&self) -> (usize, usize) {
        self.orders
    }

    pub fn group_order(&self) -> usize {
        self.orders.0 * self.orders.1
    }

    pub fn generators(&self) -> &[Generator; 2] {
        &self.generators
    }

    /// Elements `(kappa, iota)` in index order `kappa * n2 + iota`.
    pub fn elements(&self) -> Vec<(usize, usize)> {
        let (n1, n2) = self.orders;
        (0..n1).flat_map(|k| (0..n2).map(move |i| (k, i))).collect()
    }

    /// Maps of all elements, indexed like [`GraphAction::elements`].
    pub fn element_maps(&self) -> Vec<ElementMap> {
        let (n1, n2) = self.orders;
        let nv = self.generators[0].vertex_perm.len();
        let ne = self.generators[0].edge_perm.len();
        let g1 = ElementMap::from_generator(&self.generators[0]);
        let g2 = ElementMap::from_generator(&self.generators[1]);
        let mut maps = Vec::with_capacity(n1 * n2);
        let mut row = ElementMap::identity(nv, ne);
        for _ in 0..n1 {
            let mut m = row.clone();
            for _ in 0..n2 {
                maps.push(m.clone());
                m = m.then(&g2);
            }
            row = row.then(&g1);
        }
        maps
    }

    pub fn element_map(&self, kappa: usize, iota: usize) -> ElementMap {
        let (n1, n2) = self.orders;
        let nv = self.generators[0].vertex_perm.len();
        let ne = self.generators[0].edge_perm.len();
        let g1 = ElementMap::from_generator(&self.generators[0]);
        let g2 = ElementMap::from_generator(&self.generators[1]);
        let mut m = ElementMap::identity(nv, ne);
        for _ in 0..kappa % n1 {
            m = m.then(&g1);
        }
        for _ in 0..iota % n2 {
            m = m.then(&g2);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    GroupAction,
    Continuity,
    Faithfulness,
    Discreteness,
    CoCompactness,
    StructurePreservation,
    LengthPreservation,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::GroupAction => "group action",
            Axiom::Continuity => "continuity",
            Axiom::Faithfulness => "faithfulness",
            Axiom::Discreteness => "discreteness",
            Axiom::CoCompactness => "co-compactness",
            Axiom::StructurePreservation => "structure preservation",
            Axiom::LengthPreservation => "length preservation",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActionReport {
    pub violations: Vec<Violation>,
    /// Axioms that hold automatically for a finite graph.
    pub vacuous: Vec<Axiom>,
    /// Findings that are not violations of the combinatorial checks, e.g. an edge mapped
    /// onto itself with reversed orientation (its midpoint is fixed).
    pub warnings: Vec<String>,
}

impl ActionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            let msg = self
                .violations
                .iter()
                .map(|v| format!("{}: {}", v.axiom, v.witness))
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::InvalidAction(msg))
        }
    }
}

fn is_permutation(p: &[usize]) -> Option<usize> {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return Some(x);
        }
        seen[x] = true;
    }
    None
}

/// Exhaustive check of the action axioms over the finite group and graph.
///
/// Continuity, discreteness and co-compactness hold for every finite graph and are
/// listed as vacuous. Faithfulness is checked combinatorially: no non-identity element
/// may fix a vertex or map an edge onto itself with its orientation preserved.
pub fn validate_action(graph: &MetricGraph, action: &GraphAction) -> ActionReport {
    let mut report = ActionReport {
        vacuous: vec![Axiom::Continuity, Axiom::Discreteness, Axiom::CoCompactness],
        ..Default::default()
    };
    let mut push = |axiom, witness: String| report.violations.push(Violation { axiom, witness });

    let (n1, n2) = action.orders();
    for (gi, g) in action.generators().iter().enumerate() {
        if let Some(x) = is_permutation(&g.vertex_perm) {
            push(Axiom::GroupAction, format!("generator g{} is not a bijection on vertices (value {x})", gi + 1));
        }
        if let Some(x) = is_permutation(&g.edge_perm) {
            push(Axiom::GroupAction, format!("generator g{} is not a bijection on edges (value {x})", gi + 1));
        }
    }
    if !report.violations.is_empty() {
        return report;
    }
    let mut push = |axiom, witness: String| report.violations.push(Violation { axiom, witness });

    let g1 = action.element_map(1 % n1, 0);
    let g2 = action.element_map(0, 1 % n2);
    if !mul_pow(&g1, n1).is_identity() {
        push(Axiom::GroupAction, format!("g1^{n1} is not the identity"));
    }
    if !mul_pow(&g2, n2).is_identity() {
        push(Axiom::GroupAction, format!("g2^{n2} is not the identity"));
    }
    if g1.then(&g2) != g2.then(&g1) {
        push(Axiom::GroupAction, "g1 and g2 do not commute".into());
    }

    for e in graph.edges() {
        for (gi, g) in action.generators().iter().enumerate() {
            let f = graph.edge(g.edge_perm[e.id]);
            let (pu, pv) = (g.vertex_perm[e.u], g.vertex_perm[e.v]);
            let consistent = if g.preserves_orientation[e.id] {
                f.u == pu && f.v == pv
            } else {
                f.u == pv && f.v == pu
            };
            if !consistent {
                push(
                    Axiom::StructurePreservation,
                    format!(
                        "g{} sends edge {} ({}-{}) to edge {} ({}-{}) but its endpoints to {}-{}",
                        gi + 1, e.id, e.u, e.v, f.id, f.u, f.v, pu, pv
                    ),
                );
            }
            if f.length != e.length {
                push(
                    Axiom::LengthPreservation,
                    format!(
                        "g{} sends edge {} (length {}) to edge {} (length {})",
                        gi + 1, e.id, e.length, f.id, f.length
                    ),
                );
            }
        }
    }

    for (idx, m) in action.element_maps().iter().enumerate().skip(1) {
        let (k, i) = (idx / n2, idx % n2);
        if let Some(v) = (0..graph.vertex_count()).find(|&v| m.vertex[v] == v) {
            push(Axiom::Faithfulness, format!("element ({k},{i}) fixes vertex {v}"));
            continue;
        }
        for e in 0..graph.edge_count() {
            if m.edge[e] == e {
                if m.preserved[e] {
                    push(Axiom::Faithfulness, format!("element ({k},{i}) fixes edge {e} pointwise"));
                } else {
                    report.warnings.push(format!(
                        "element ({k},{i}) reverses edge {e} onto itself and fixes its midpoint"
                    ));
                }
                break;
            }
        }
    }
    report
}

fn mul_pow(g: &ElementMap, n: usize) -> ElementMap {
    let mut m = ElementMap::identity(g.vertex.len(), g.edge.len());
    for _ in 0..n {
        m = m.then(g);
    }
    m
}

/// Distinct images `g . edge` over all group elements, in element order.
pub fn orbit(action: &GraphAction, edge: usize) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in action.element_maps() {
        let f = m.edge[edge];
        if seen.insert(f) {
            out.push(f);
        }
    }
    out
}

/// Boundary gluing of a fundamental domain: the dummy end of `half_edge` coincides with
/// the image of the dummy end of `partner` under `element`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gluing {
    pub dummy: usize,
    pub half_edge: usize,
    pub partner: usize,
    pub element: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalDomain {
    pub seed: usize,
    /// Half-edges incident to the seed, each parameterized from the seed (x = 0).
    pub half_edges: Vec<usize>,
    /// Dummy vertices on the boundary of the domain.
    pub boundary: Vec<usize>,
    pub gluings: Vec<Gluing>,
    /// Shifted copies meet only in boundary dummy vertices, never in original vertices
    /// or along half-edge interiors.
    pub overlap: &'static str,
}

/// The domain made of `seed`, its incident half-edges and their dummy endpoints.
///
/// `graph` must be midpoint-subdivided, with every edge running from an original
/// vertex to a dummy vertex.
pub fn fundamental_domain(
    graph: &MetricGraph,
    action: &GraphAction,
    seed: usize,
) -> Result<FundamentalDomain> {
    if seed >= graph.vertex_count() || graph.vertex(seed).is_dummy() {
        return Err(Error::InvalidArgument(format!("seed {seed} is not an original vertex")));
    }
    for e in graph.edges() {
        if graph.vertex(e.u).is_dummy() || !graph.vertex(e.v).is_dummy() {
            return Err(Error::InvalidArgument(format!(
                "edge {} does not run from an original vertex to a dummy; subdivide first",
                e.id
            )));
        }
    }
    let maps = action.element_maps();
    let elements = action.elements();

    let reached: BTreeSet<usize> = maps.iter().map(|m| m.vertex[seed]).collect();
    let originals: BTreeSet<usize> = graph.original_vertices().into_iter().collect();
    if reached != originals {
        let missing: Vec<_> = originals.difference(&reached).collect();
        return Err(Error::NotTransitive(format!("vertices {missing:?} are not in the orbit of {seed}")));
    }

    let half_edges: Vec<usize> = graph.edges().iter().filter(|e| e.u == seed).map(|e| e.id).collect();

    let mut cover = vec![0usize; graph.edge_count()];
    let mut owner = vec![(0usize, 0usize); graph.edge_count()];
    for (idx, m) in maps.iter().enumerate() {
        for &h in &half_edges {
            let img = m.edge[h];
            cover[img] += 1;
            owner[img] = (h, idx);
        }
    }
    if let Some(e) = cover.iter().position(|&c| c == 0) {
        return Err(Error::CoverageGap(format!("edge {e} is not covered by any shifted domain")));
    }
    if let Some(e) = cover.iter().position(|&c| c > 1) {
        return Err(Error::CoverageGap(format!(
            "edge {e} is covered {} times; shifted domains overlap in an interior",
            cover[e]
        )));
    }

    let mut boundary = Vec::new();
    let mut gluings = Vec::new();
    for &h in &half_edges {
        let d = graph.edge(h).v;
        let at_d: Vec<usize> = graph
            .incident(d)
            .into_iter()
            .filter(|s| s.end == End::End)
            .map(|s| s.edge)
            .collect();
        if at_d.len() != 2 {
            return Err(Error::CoverageGap(format!(
                "dummy vertex {d} joins {} half-edges instead of 2",
                at_d.len()
            )));
        }
        let other = if at_d[0] == h { at_d[1] } else { at_d[0] };
        let (partner, idx) = owner[other];
        if !boundary.contains(&d) {
            boundary.push(d);
        }
        gluings.push(Gluing {
            dummy: d,
            half_edge: h,
            partner,
            element: elements[idx],
        });
    }
    Ok(FundamentalDomain {
        seed,
        half_edges,
        boundary,
        gluings,
        overlap: "boundary points only",
    })
}

/// How many shifted copies of the domain contain each boundary dummy vertex.
pub fn boundary_sharing(graph: &MetricGraph, action: &GraphAction, domain: &FundamentalDomain) -> BTreeMap<usize, usize> {
    let mut count = BTreeMap::new();
    for m in action.element_maps() {
        for &h in &domain.half_edges {
            let d = graph.edge(m.edge[h]).v;
            *count.entry(d).or_insert(0) += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, lengths: &[f64]) -> MetricGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, lengths[i])).collect();
        MetricGraph::new(n, &edges).unwrap()
    }

    fn rotation(g: &MetricGraph, n: usize) -> GraphAction {
        let perm = (0..n).map(|i| (i + 1) % n).collect();
        GraphAction::cyclic(g, n, Generator::from_vertex_permutation(g, perm).unwrap()).unwrap()
    }

    #[test]
    fn rotation_of_equal_cycle_is_valid() {
        let g = cycle(6, &[1.0; 6]);
        let r = validate_action(&g, &rotation(&g, 6));
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(r.vacuous.len(), 3);
    }

    #[test]
    fn unequal_lengths_break_length_preservation() {
        let g = cycle(3, &[1.0, 1.0, 2.0]);
        let r = validate_action(&g, &rotation(&g, 3));
        assert!(r.violates(Axiom::LengthPreservation));
        assert!(r.violations.iter().any(|v| v.witness.contains("length 2")));
    }

    #[test]
    fn wrong_order_is_reported() {
        let g = cycle(6, &[1.0; 6]);
        let perm = (0..6).map(|i| (i + 1) % 6).collect();
        let gen = Generator::from_vertex_permutation(&g, perm).unwrap();
        let a = GraphAction::cyclic(&g, 4, gen).unwrap();
        let r = validate_action(&g, &a);
        assert!(r.violates(Axiom::GroupAction));
    }

    #[test]
    fn fixed_vertex_breaks_faithfulness() {
        // reflection of a path fixes its middle vertex
        let g = MetricGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let gen = Generator::from_vertex_permutation(&g, vec![2, 1, 0]).unwrap();
        let a = GraphAction::cyclic(&g, 2, gen).unwrap();
        let r = validate_action(&g, &a);
        assert!(r.violates(Axiom::Faithfulness));
    }

    #[test]
    fn non_bijection_is_reported() {
        let g = cycle(3, &[1.0; 3]);
        let bad = Generator {
            vertex_perm: vec![0, 0, 1],
            edge_perm: vec![0, 1, 2],
            preserves_orientation: vec![true; 3],
        };
        let a = GraphAction::cyclic(&g, 3, bad).unwrap();
        assert!(validate_action(&g, &a).violates(Axiom::GroupAction));
    }

    #[test]
    fn orbit_of_cycle_edge_and_trivial_group() {
        let g = cycle(6, &[1.0; 6]);
        let mut o = orbit(&rotation(&g, 6), 2);
        o.sort();
        assert_eq!(o, (0..6).collect::<Vec<_>>());
        assert_eq!(orbit(&GraphAction::trivial(&g), 4), vec![4]);
    }

    #[test]
    fn trivial_group_on_single_loop() {
        let g = MetricGraph::new(1, &[(0, 0, 2.0)]).unwrap().subdivide_midpoints();
        let a = GraphAction::trivial(&g);
        let d = fundamental_domain(&g, &a, 0).unwrap();
        assert_eq!(d.half_edges, vec![0, 1]);
        assert_eq!(d.boundary, vec![1]);
        assert!(d.gluings.iter().all(|gl| gl.element == (0, 0)));
    }

    #[test]
    fn domain_requires_subdivision_and_transitivity() {
        let g = cycle(4, &[1.0; 4]);
        let a = rotation(&g, 4);
        assert!(matches!(fundamental_domain(&g, &a, 0), Err(Error::InvalidArgument(_))));
        let s = g.subdivide_midpoints();
        let t = GraphAction::trivial(&s);
        assert!(matches!(fundamental_domain(&s, &t, 0), Err(Error::NotTransitive(_))));
    }
}
