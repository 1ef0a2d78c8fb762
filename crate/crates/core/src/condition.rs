//! Vertex conditions `A F + B F' = 0`, where `F` holds the boundary values of the
//! incident edges at the vertex and `F'` their derivatives taken into the edges.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{EdgeEnd, MetricGraph};

pub type CMatrix = DMatrix<Complex64>;

const UNIT_TOL: f64 = 1e-12;

/// Matrices of the standard (continuity + zero derivative sum) condition at a vertex of
/// the given degree.
///
/// `A` has rows `e_j - e_{j+1}` followed by a zero row; `B` is zero except for a last
/// row of ones.
pub fn standard_condition(degree: usize) -> Result<(CMatrix, CMatrix)> {
    if degree == 0 {
        return Err(Error::ZeroDegree);
    }
    let one = Complex64::new(1.0, 0.0);
    let mut a = CMatrix::zeros(degree, degree);
    let mut b = CMatrix::zeros(degree, degree);
    for r in 0..degree - 1 {
        a[(r, r)] = one;
        a[(r, r + 1)] = -one;
    }
    for c in 0..degree {
        b[(degree - 1, c)] = one;
    }
    Ok((a, b))
}

/// Degree-2 gluing condition `tau f_1 = f_2`, `tau f_1' + f_2' = 0`.
pub fn quasi_periodic_condition(phase: Complex64) -> Result<(CMatrix, CMatrix)> {
    check_unit(phase)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let a = CMatrix::from_row_slice(2, 2, &[phase, -one, zero, zero]);
    let b = CMatrix::from_row_slice(2, 2, &[zero, zero, phase, one]);
    Ok((a, b))
}

pub(crate) fn check_unit(phase: Complex64) -> Result<()> {
    if !phase.re.is_finite() || !phase.im.is_finite() || (phase.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitPhase {
            re: phase.re,
            im: phase.im,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionKind {
    Standard,
    /// Pure transmission from the first slot to the second with phase `phase`.
    QuasiPeriodic { phase: Complex64 },
    /// Arbitrary matrices; representable and serializable but not handled by the
    /// scattering assembly.
    General { a: CMatrix, b: CMatrix },
}

/// A condition at one vertex over an ordered list of its incidence slots.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCondition {
    pub vertex: usize,
    pub slots: Vec<EdgeEnd>,
    pub kind: ConditionKind,
}

impl VertexCondition {
    /// Standard condition over all slots of `vertex` in canonical order.
    pub fn standard(graph: &MetricGraph, vertex: usize) -> Result<Self> {
        let slots = graph.incident(vertex);
        if slots.is_empty() {
            return Err(Error::ZeroDegree);
        }
        Ok(VertexCondition {
            vertex,
            slots,
            kind: ConditionKind::Standard,
        })
    }

    /// Standard conditions at every vertex.
    pub fn all_standard(graph: &MetricGraph) -> Result<Vec<Self>> {
        (0..graph.vertex_count())
            .map(|v| Self::standard(graph, v))
            .collect()
    }

    pub fn quasi_periodic(
        vertex: usize,
        first: EdgeEnd,
        second: EdgeEnd,
        phase: Complex64,
    ) -> Result<Self> {
        check_unit(phase)?;
        Ok(VertexCondition {
            vertex,
            slots: vec![first, second],
            kind: ConditionKind::QuasiPeriodic { phase },
        })
    }

    pub fn degree(&self) -> usize {
        self.slots.len()
    }

    /// The `(A, B)` pair with columns ordered as `slots`.
    pub fn matrices(&self) -> Result<(CMatrix, CMatrix)> {
        match &self.kind {
            ConditionKind::Standard => standard_condition(self.slots.len()),
            ConditionKind::QuasiPeriodic { phase } => quasi_periodic_condition(*phase),
            ConditionKind::General { a, b } => Ok((a.clone(), b.clone())),
        }
    }

    /// The same condition after `edge` had its parameterization flipped.
    pub fn with_edge_reversed(&self, edge: usize) -> Self {
        let mut c = self.clone();
        for s in &mut c.slots {
            if s.edge == edge {
                s.end = s.end.other();
            }
        }
        c
    }

    /// Checks that the slots are exactly the incidences of the vertex in `graph`.
    pub fn check_against(&self, graph: &MetricGraph) -> Result<()> {
        let mut expected = graph.incident(self.vertex);
        let mut got = self.slots.clone();
        expected.sort();
        got.sort();
        if expected != got {
            return Err(Error::UnsupportedCondition {
                vertex: self.vertex,
                reason: format!(
                    "condition covers slots {:?} but the vertex has {:?}",
                    self.slots, expected
                ),
            });
        }
        if let ConditionKind::QuasiPeriodic { .. } = self.kind {
            if self.slots.len() != 2 {
                return Err(Error::UnsupportedCondition {
                    vertex: self.vertex,
                    reason: "quasi-periodic condition needs degree 2".into(),
                });
            }
        }
        let (a, b) = self.matrices()?;
        if a.ncols() != self.slots.len() || b.ncols() != self.slots.len() {
            return Err(Error::LengthMismatch {
                what: "condition matrix columns",
                expected: self.slots.len(),
                got: a.ncols().min(b.ncols()),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn degree_two_pattern() {
        let (a, b) = standard_condition(2).unwrap();
        assert_eq!(a, CMatrix::from_row_slice(2, 2, &[c(1.), c(-1.), c(0.), c(0.)]));
        assert_eq!(b, CMatrix::from_row_slice(2, 2, &[c(0.), c(0.), c(1.), c(1.)]));
    }

    #[test]
    fn degree_four_pattern() {
        let (a, b) = standard_condition(4).unwrap();
        let rows = [
            [1., -1., 0., 0.],
            [0., 1., -1., 0.],
            [0., 0., 1., -1.],
            [0., 0., 0., 0.],
        ];
        for (r, row) in rows.iter().enumerate() {
            for (col, &x) in row.iter().enumerate() {
                assert_eq!(a[(r, col)], c(x));
                let expect_b = if r == 3 { 1.0 } else { 0.0 };
                assert_eq!(b[(r, col)], c(expect_b));
            }
        }
    }

    #[test]
    fn degree_one_is_neumann() {
        let (a, b) = standard_condition(1).unwrap();
        assert_eq!(a, CMatrix::from_element(1, 1, c(0.)));
        assert_eq!(b, CMatrix::from_element(1, 1, c(1.)));
        assert_eq!(standard_condition(0), Err(Error::ZeroDegree));
    }

    #[test]
    fn standard_pattern_is_self_adjoint_and_full_rank() {
        for d in 1..=8 {
            let (a, b) = standard_condition(d).unwrap();
            assert_eq!(&a * b.transpose(), &b * a.transpose());
            let mut stacked = CMatrix::zeros(d, 2 * d);
            stacked.view_mut((0, 0), (d, d)).copy_from(&a);
            stacked.view_mut((0, d), (d, d)).copy_from(&b);
            assert_eq!(stacked.rank(1e-12), d);
        }
    }

    #[test]
    fn quasi_periodic_rejects_non_unit_phase() {
        assert!(matches!(
            quasi_periodic_condition(c(2.0)),
            Err(Error::NonUnitPhase { .. })
        ));
        let (a, b) = quasi_periodic_condition(Complex64::i()).unwrap();
        assert_eq!(a[(0, 0)], Complex64::i());
        assert_eq!(b[(1, 0)], Complex64::i());
        assert_eq!(b[(1, 1)], c(1.0));
    }
}
