//! Bond scattering matrices and the secular determinant `det(I - S D(k))`.
//!
//! Bonds follow the graph's canonical order: bond `2e` runs along edge `e` from `u` to
//! `v`, bond `2e + 1` back. `S[b, b']` maps the amplitude arriving along `b'` to the
//! amplitude leaving along `b`, so it is nonzero only when `b'` ends where `b` starts.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::condition::{check_unit, CMatrix, ConditionKind, VertexCondition};
use crate::error::{Error, Result};
use crate::graph::{Bond, MetricGraph};
use crate::spectral::SecularFunction;

const UNITARY_TOL: f64 = 1e-12;

/// `sigma[j, j'] = 2/d - delta_{jj'}` for the standard condition at a degree-`d` vertex.
pub fn vertex_scattering_standard(degree: usize) -> Result<CMatrix> {
    if degree == 0 {
        return Err(Error::ZeroDegree);
    }
    let d = degree as f64;
    Ok(CMatrix::from_fn(degree, degree, |i, j| {
        Complex64::new(2.0 / d - if i == j { 1.0 } else { 0.0 }, 0.0)
    }))
}

/// Pure transmission: the wave leaving along the second slot is `phase` times the wave
/// arriving on the first, and the wave leaving along the first is `phase^-1` times the
/// one arriving on the second.
pub fn vertex_scattering_quasiperiodic(phase: Complex64) -> Result<CMatrix> {
    check_unit(phase)?;
    let zero = Complex64::new(0.0, 0.0);
    Ok(CMatrix::from_row_slice(2, 2, &[zero, phase.inv(), phase, zero]))
}

/// `S` and the bond lengths of a graph with k-independent vertex scattering.
#[derive(Debug, Clone)]
pub struct SecularSystem {
    bonds: Vec<Bond>,
    s: CMatrix,
    lengths: Vec<f64>,
}

impl SecularSystem {
    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// Bond ordering table.
    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn scattering_matrix(&self) -> &CMatrix {
        &self.s
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// `diag(e^{i k L_b})`.
    pub fn phase_matrix(&self, k: Complex64) -> CMatrix {
        let d = self.phases(k);
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
    }

    fn phases(&self, k: Complex64) -> Vec<Complex64> {
        self.lengths
            .iter()
            .map(|&l| (Complex64::i() * k * l).exp())
            .collect()
    }

    /// `I - S D(k)`, built column by column since `D` is diagonal.
    fn secular_matrix(&self, k: Complex64) -> CMatrix {
        let d = self.phases(k);
        let n = self.bonds.len();
        let mut m = CMatrix::identity(n, n);
        for (j, dj) in d.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] -= self.s[(i, j)] * dj;
            }
        }
        m
    }

    /// `det(I - S D(k))`.
    pub fn det(&self, k: Complex64) -> Complex64 {
        self.secular_matrix(k).lu().determinant()
    }

    /// `d/dk log det(I - S D(k)) = -tr((I - S D)^{-1} S D i L)`.
    pub fn det_log_derivative(&self, k: Complex64) -> Complex64 {
        let n = self.bonds.len();
        let d = self.phases(k);
        let rhs = CMatrix::from_fn(n, n, |i, j| {
            self.s[(i, j)] * d[j] * Complex64::new(0.0, self.lengths[j])
        });
        let lu = self.secular_matrix(k).lu();
        match lu.solve(&rhs) {
            Some(x) => -x.trace(),
            None => Complex64::new(f64::INFINITY, 0.0),
        }
    }

    /// `max |(S S^* - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.s.nrows();
        let p = &self.s * self.s.adjoint() - CMatrix::identity(n, n);
        p.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl SecularFunction for SecularSystem {
    fn eval(&self, k: Complex64) -> Complex64 {
        self.det(k)
    }
}

/// Assembles `S` from per-vertex scattering blocks.
pub fn build_secular_system(
    graph: &MetricGraph,
    conditions: &[VertexCondition],
) -> Result<SecularSystem> {
    let mut by_vertex: Vec<Option<&VertexCondition>> = vec![None; graph.vertex_count()];
    for c in conditions {
        if c.vertex >= graph.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "condition for vertex {} but the graph has {} vertices",
                c.vertex,
                graph.vertex_count()
            )));
        }
        if by_vertex[c.vertex].is_some() {
            return Err(Error::UnsupportedCondition {
                vertex: c.vertex,
                reason: "more than one condition given".into(),
            });
        }
        by_vertex[c.vertex] = Some(c);
    }

    let n = graph.bond_count();
    let mut s = DMatrix::zeros(n, n);
    for (v, c) in by_vertex.iter().enumerate() {
        let c = c.ok_or(Error::MissingCondition { vertex: v })?;
        c.check_against(graph)?;
        let sigma = match &c.kind {
            ConditionKind::Standard => vertex_scattering_standard(c.degree())?,
            ConditionKind::QuasiPeriodic { phase } => vertex_scattering_quasiperiodic(*phase)?,
            ConditionKind::General { .. } => {
                return Err(Error::UnsupportedCondition {
                    vertex: v,
                    reason: "general (A, B) conditions have energy-dependent scattering".into(),
                })
            }
        };
        for (j, out) in c.slots.iter().enumerate() {
            for (jj, inc) in c.slots.iter().enumerate() {
                s[(out.outgoing_bond(), inc.incoming_bond())] = sigma[(j, jj)];
            }
        }
    }

    let bonds = graph.bonds();
    let lengths = bonds.iter().map(|b| b.length).collect();
    let sys = SecularSystem { bonds, s, lengths };
    debug_assert!(sys.unitarity_defect() < UNITARY_TOL);
    Ok(sys)
}

/// System with the standard condition at every vertex.
pub fn standard_system(graph: &MetricGraph) -> Result<SecularSystem> {
    build_secular_system(graph, &VertexCondition::all_standard(graph)?)
}

/// `det(I - S D(k))` for real or complex `k`.
pub fn secular_det(system: &SecularSystem, k: impl Into<Complex64>) -> Complex64 {
    system.det(k.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{End, EdgeEnd};
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Independent oracle: `-(A + i k B)^{-1} (A - i k B)`.
    fn scattering_from_conditions(a: &CMatrix, b: &CMatrix, k: f64) -> CMatrix {
        let ik = Complex64::new(0.0, k);
        let plus = a + b * ik;
        let minus = a - b * ik;
        -plus.try_inverse().unwrap() * minus
    }

    fn max_diff(x: &CMatrix, y: &CMatrix) -> f64 {
        (x - y).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn standard_blocks() {
        let s4 = vertex_scattering_standard(4).unwrap();
        assert_eq!(s4[(0, 0)], c(-0.5));
        assert_eq!(s4[(0, 3)], c(0.5));
        let s2 = vertex_scattering_standard(2).unwrap();
        assert_eq!(s2, CMatrix::from_row_slice(2, 2, &[c(0.), c(1.), c(1.), c(0.)]));
        let s3 = vertex_scattering_standard(3).unwrap();
        assert!((s3[(1, 1)].re + 1.0 / 3.0).abs() < 1e-15);
        assert!((s3[(1, 2)].re - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(vertex_scattering_standard(0), Err(Error::ZeroDegree));
    }

    #[test]
    fn standard_matches_condition_oracle() {
        for d in 1..=6 {
            let (a, b) = crate::condition::standard_condition(d).unwrap();
            for k in [0.3, 1.0, 7.5] {
                let oracle = scattering_from_conditions(&a, &b, k);
                assert!(max_diff(&oracle, &vertex_scattering_standard(d).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn quasi_periodic_blocks() {
        assert_eq!(
            vertex_scattering_quasiperiodic(c(1.0)).unwrap(),
            vertex_scattering_standard(2).unwrap()
        );
        let q = vertex_scattering_quasiperiodic(Complex64::i()).unwrap();
        assert!((q[(1, 0)] - Complex64::i()).norm() < 1e-15);
        assert!((q[(0, 1)] + Complex64::i()).norm() < 1e-15);
        assert!(matches!(
            vertex_scattering_quasiperiodic(c(2.0)),
            Err(Error::NonUnitPhase { .. })
        ));
        for phase in [Complex64::i(), Complex64::from_polar(1.0, 0.7)] {
            let (a, b) = crate::condition::quasi_periodic_condition(phase).unwrap();
            let oracle = scattering_from_conditions(&a, &b, 2.3);
            assert!(max_diff(&oracle, &vertex_scattering_quasiperiodic(phase).unwrap()) < 1e-12);
        }
    }

    fn two_vertex_cycle() -> SecularSystem {
        let g = MetricGraph::new(2, &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        standard_system(&g).unwrap()
    }

    #[test]
    fn two_vertex_cycle_is_a_circle() {
        let sys = two_vertex_cycle();
        assert_eq!(sys.bond_count(), 4);
        assert!(sys.unitarity_defect() < 1e-12);
        // transparent vertices: only transmission entries, all equal to one
        let s = sys.scattering_matrix();
        assert_eq!(s.iter().filter(|z| z.norm() > 0.5).count(), 4);
        assert!(secular_det(&sys, 2.0 * PI / 3.0).norm() < 1e-12);
        assert!(secular_det(&sys, 1.0).norm() > 1e-3);
    }

    #[test]
    fn neumann_interval() {
        let g = MetricGraph::new(2, &[(0, 1, 1.0)]).unwrap();
        let sys = standard_system(&g).unwrap();
        for m in 1..5 {
            assert!(secular_det(&sys, m as f64 * PI).norm() < 1e-12);
        }
        assert!(secular_det(&sys, 0.5 * PI).norm() > 1.0);
    }

    #[test]
    fn support_follows_bond_adjacency() {
        let g = MetricGraph::new(4, &[(0, 1, 1.0), (1, 2, 1.5), (2, 0, 0.7), (2, 3, 2.0), (3, 3, 0.4)]).unwrap();
        let sys = standard_system(&g).unwrap();
        assert!(sys.unitarity_defect() < 1e-12);
        let bonds = sys.bonds();
        for (i, bi) in bonds.iter().enumerate() {
            for (j, bj) in bonds.iter().enumerate() {
                if sys.scattering_matrix()[(i, j)].norm() > 0.0 {
                    assert_eq!(bj.terminus, bi.origin);
                }
            }
        }
    }

    #[test]
    fn errors() {
        let g = MetricGraph::new(2, &[(0, 1, 1.0)]).unwrap();
        let only_first = vec![VertexCondition::standard(&g, 0).unwrap()];
        assert_eq!(
            build_secular_system(&g, &only_first).unwrap_err(),
            Error::MissingCondition { vertex: 1 }
        );
        let mut conds = VertexCondition::all_standard(&g).unwrap();
        let (a, b) = crate::condition::standard_condition(1).unwrap();
        conds[1].kind = ConditionKind::General { a, b };
        assert!(matches!(
            build_secular_system(&g, &conds),
            Err(Error::UnsupportedCondition { vertex: 1, .. })
        ));
        let wrong_slots = VertexCondition::quasi_periodic(
            1,
            EdgeEnd::new(0, End::End),
            EdgeEnd::new(0, End::Start),
            c(1.0),
        )
        .unwrap();
        let conds = vec![VertexCondition::standard(&g, 0).unwrap(), wrong_slots];
        assert!(matches!(
            build_secular_system(&g, &conds),
            Err(Error::UnsupportedCondition { vertex: 1, .. })
        ));
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let g = MetricGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.3), (2, 0, 0.6), (0, 2, 0.9)]).unwrap();
        let sys = standard_system(&g).unwrap();
        for k in [Complex64::new(1.1, 0.02), Complex64::new(4.7, -0.01)] {
            let h = 1e-6;
            let fd = (sys.det(k + h) - sys.det(k - h)) / (2.0 * h) / sys.det(k);
            assert!((fd - sys.det_log_derivative(k)).norm() < 1e-6 * fd.norm().max(1.0));
        }
    }

    #[test]
    fn reversal_keeps_modulus() {
        let g = MetricGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.3), (2, 0, 0.6), (0, 2, 0.9)]).unwrap();
        let sys = standard_system(&g).unwrap();
        let flipped = standard_system(&g.with_edge_reversed(1).unwrap()).unwrap();
        for k in [0.4, 2.2, 9.1] {
            assert!((sys.det(c(k)).norm() - flipped.det(c(k)).norm()).abs() < 1e-12);
        }
    }
}
