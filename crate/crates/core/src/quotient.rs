//! Quotient graphs of the torus `C_{n1} x C_{n2}` by its translation group, one for each
//! product irrep `tau_{s,t}`, and their secular functions.
//!
//! The quotient is a fixed template: the original vertex `v1` (standard, degree 4) and
//! two glued boundary points `v_d`, `v_c` carrying quasi-periodic conditions.
//!
//! | edge | endpoints   | length |
//! |------|-------------|--------|
//! | 0    | `v1 -> v_d` | `L1`   |
//! | 1    | `v1 -> v_c` | `L3`   |
//! | 2    | `v1 -> v_c` | `L3`   |
//! | 3    | `v1 -> v_d` | `L1`   |
//!
//! `v_d` glues the ends of edges 0 and 3 with phase `tau_a`, `v_c` those of edges 1 and 2
//! with phase `tau_b`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::torus_action;
use crate::condition::VertexCondition;
use crate::error::{Error, Result};
use crate::graph::{EdgeEnd, End, MetricGraph};
use crate::group::ProductIrrep;
use crate::scattering::{build_secular_system, standard_system, SecularSystem};
use crate::spectral::{find_roots_real, merge_spectra, ScanOptions, SecularFunction, Spectrum};

/// Which group element's phase is attached to the `L1` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhasePairing {
    /// `tau_a = tau_{s,t}(g1^{n1}, g2) = omega_2^t` on the `L1` edges and
    /// `tau_b = tau_{s,t}(g1, g2^{n2}) = omega_1^s` on the `L3` edges.
    #[default]
    AsPrinted,
    /// The two phases exchanged.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientSpec {
    pub n1: usize,
    pub n2: usize,
    /// Quotient edge lengths; the full torus edges are `2 L1` and `2 L3`.
    pub l1: f64,
    pub l3: f64,
    pub s: usize,
    pub t: usize,
    pub pairing: PhasePairing,
}

impl QuotientSpec {
    pub fn new(n1: usize, n2: usize, l1: f64, l3: f64, s: usize, t: usize) -> Result<Self> {
        ProductIrrep::new(n1, n2, s, t)?;
        for (edge, length) in [(0, l1), (1, l3)] {
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::NonPositiveLength { edge, length });
            }
        }
        Ok(QuotientSpec {
            n1,
            n2,
            l1,
            l3,
            s,
            t,
            pairing: PhasePairing::AsPrinted,
        })
    }

    pub fn with_pairing(mut self, pairing: PhasePairing) -> Self {
        self.pairing = pairing;
        self
    }

    fn irrep(&self) -> ProductIrrep {
        ProductIrrep {
            n1: self.n1,
            n2: self.n2,
            s: self.s,
            t: self.t,
        }
    }

    /// Phase on the `L1` gluing vertex.
    pub fn tau_a(&self) -> Complex64 {
        match self.pairing {
            PhasePairing::AsPrinted => self.irrep().value(self.n1 as i64, 1),
            PhasePairing::Swapped => self.irrep().value(1, self.n2 as i64),
        }
    }

    /// Phase on the `L3` gluing vertex.
    pub fn tau_b(&self) -> Complex64 {
        match self.pairing {
            PhasePairing::AsPrinted => self.irrep().value(1, self.n2 as i64),
            PhasePairing::Swapped => self.irrep().value(self.n1 as i64, 1),
        }
    }

    /// `(alpha, beta) = (Re tau_a, Re tau_b)`.
    pub fn cosines(&self) -> (f64, f64) {
        (self.tau_a().re, self.tau_b().re)
    }

    pub fn label(&self) -> String {
        format!("({},{})", self.s, self.t)
    }

    /// Exponents and coefficients of `Sigma_{s,t}(k) = sum_j c_j e^{i k a_j}`.
    fn terms(&self) -> [(f64, f64); 6] {
        let (alpha, beta) = self.cosines();
        let (l1, l3) = (self.l1, self.l3);
        [
            (0.0, 1.0),
            (2.0 * l1, -alpha),
            (2.0 * l3, -beta),
            (2.0 * l1 + 4.0 * l3, alpha),
            (4.0 * l1 + 2.0 * l3, beta),
            (4.0 * (l1 + l3), -1.0),
        ]
    }
}

/// Quotient graph with its three vertex conditions (standard, `tau_a`, `tau_b`).
#[derive(Debug, Clone)]
pub struct Quotient {
    pub spec: QuotientSpec,
    pub graph: MetricGraph,
    pub conditions: Vec<VertexCondition>,
}

impl Quotient {
    pub fn system(&self) -> Result<SecularSystem> {
        build_secular_system(&self.graph, &self.conditions)
    }

    /// The same quotient with `edge` parameterized the other way.
    pub fn with_edge_reversed(&self, edge: usize) -> Result<Self> {
        Ok(Quotient {
            spec: self.spec,
            graph: self.graph.with_edge_reversed(edge)?,
            conditions: self
                .conditions
                .iter()
                .map(|c| c.with_edge_reversed(edge))
                .collect(),
        })
    }
}

pub fn quotient_graph(spec: &QuotientSpec) -> Result<Quotient> {
    let graph = MetricGraph::new(
        3,
        &[
            (0, 1, spec.l1),
            (0, 2, spec.l3),
            (0, 2, spec.l3),
            (0, 1, spec.l1),
        ],
    )?;
    let end = |e| EdgeEnd::new(e, End::End);
    let conditions = vec![
        VertexCondition::standard(&graph, 0)?,
        VertexCondition::quasi_periodic(1, end(0), end(3), spec.tau_a())?,
        VertexCondition::quasi_periodic(2, end(1), end(2), spec.tau_b())?,
    ];
    Ok(Quotient {
        spec: *spec,
        graph,
        conditions,
    })
}

/// Closed-form `Sigma_{s,t}(k)`.
pub fn quotient_secular_closed(spec: &QuotientSpec, k: impl Into<Complex64>) -> Complex64 {
    let k = k.into();
    spec.terms()
        .iter()
        .map(|&(a, c)| c * (Complex64::i() * k * a).exp())
        .sum()
}

/// `F(k) = sin(2k(L1+L3)) - alpha sin(2k L3) - beta sin(2k L1)`, with
/// `Sigma_{s,t}(k) = -2i e^{2ik(L1+L3)} F(k)`.
pub fn quotient_dispersion_real(spec: &QuotientSpec, k: f64) -> f64 {
    let (alpha, beta) = spec.cosines();
    (2.0 * k * (spec.l1 + spec.l3)).sin() - alpha * (2.0 * k * spec.l3).sin() - beta * (2.0 * k * spec.l1).sin()
}

impl SecularFunction for QuotientSpec {
    fn eval(&self, k: Complex64) -> Complex64 {
        quotient_secular_closed(self, k)
    }
}

/// `prod_{s,t} Sigma_{s,t}(k)` over all `n1 n2` labels.
pub fn secular_product(n1: usize, n2: usize, l1: f64, l3: f64, k: impl Into<Complex64>) -> Result<Complex64> {
    let k = k.into();
    let mut acc = Complex64::new(1.0, 0.0);
    for irrep in ProductIrrep::all(n1, n2)? {
        let spec = QuotientSpec::new(n1, n2, l1, l3, irrep.s, irrep.t)?;
        acc *= quotient_secular_closed(&spec, k);
    }
    Ok(acc)
}

/// Secular system of the midpoint-subdivided torus with standard conditions everywhere.
pub fn torus_secular_system(n1: usize, n2: usize, l1: f64, l3: f64) -> Result<SecularSystem> {
    let torus = torus_action(n1, n2, l1, l3)?;
    standard_system(&torus.subdivided.graph)
}

/// Roots of one factor: sign changes of the real dispersion form, with orders from the
/// winding of the closed-form `Sigma_{s,t}`. Roots carry the label `(s,t)`.
pub fn factor_spectrum(spec: &QuotientSpec, opts: &ScanOptions) -> Result<Spectrum> {
    let f = |k: f64| quotient_dispersion_real(spec, k);
    Ok(find_roots_real(&f, Some(spec), opts)?.with_source(&spec.label()))
}

/// Spectra of all `n1 n2` factors, in `s`-major label order.
pub fn factor_spectra(
    n1: usize,
    n2: usize,
    l1: f64,
    l3: f64,
    pairing: PhasePairing,
    opts: &ScanOptions,
) -> Result<Vec<Spectrum>> {
    ProductIrrep::all(n1, n2)?
        .par_iter()
        .map(|irrep| {
            let spec = QuotientSpec::new(n1, n2, l1, l3, irrep.s, irrep.t)?.with_pairing(pairing);
            factor_spectrum(&spec, opts)
        })
        .collect()
}

/// Union of all factor spectra, coalescing roots within `coalesce_tol`.
pub fn merged_factor_spectrum(
    n1: usize,
    n2: usize,
    l1: f64,
    l3: f64,
    pairing: PhasePairing,
    opts: &ScanOptions,
    coalesce_tol: f64,
) -> Result<Spectrum> {
    Ok(merge_spectra(
        &factor_spectra(n1, n2, l1, l3, pairing, opts)?,
        coalesce_tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::quasi_periodic_condition;
    use crate::spectral::compare_spectra;
    use std::f64::consts::PI;

    fn spec(n1: usize, n2: usize, l1: f64, l3: f64, s: usize, t: usize) -> QuotientSpec {
        QuotientSpec::new(n1, n2, l1, l3, s, t).unwrap()
    }

    #[test]
    fn trivial_label_is_transparent() {
        let q = quotient_graph(&spec(3, 4, 0.5, 1.0, 0, 0)).unwrap();
        assert_eq!(q.spec.tau_a(), Complex64::new(1.0, 0.0));
        assert_eq!(q.spec.tau_b(), Complex64::new(1.0, 0.0));
        let degrees: Vec<_> = (0..3).map(|v| q.graph.degree(v)).collect();
        assert_eq!(degrees, vec![4, 2, 2]);
    }

    #[test]
    fn phases_for_label_0_1() {
        let sp = spec(3, 4, 1.0, 1.0, 0, 1);
        assert!((sp.tau_a() - Complex64::i()).norm() < 1e-15);
        assert!((sp.tau_b() - 1.0).norm() < 1e-15);
        let (a, _) = quasi_periodic_condition(sp.tau_a()).unwrap();
        assert!((a[(0, 0)] - Complex64::i()).norm() < 1e-15);
        assert_eq!(a[(0, 1)], Complex64::new(-1.0, 0.0));
        let swapped = sp.with_pairing(PhasePairing::Swapped);
        assert!((swapped.tau_b() - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        let z = quotient_secular_closed(&spec(3, 4, 1.0, 1.0, 0, 0), PI / 2.0);
        assert!(z.norm() < 1e-14);
        for (s, t) in [(0, 0), (1, 2), (2, 3)] {
            assert!(quotient_secular_closed(&spec(3, 4, 0.5, 1.0, s, t), 0.0).norm() < 1e-15);
        }
        let z = quotient_secular_closed(&spec(3, 4, 1.0, 1.0, 1, 0), PI / 4.0);
        assert!((z + Complex64::i()).norm() < 1e-14);
    }

    #[test]
    fn dispersion_examples() {
        assert!(quotient_dispersion_real(&spec(3, 4, 1.0, 1.0, 0, 0), PI / 2.0).abs() < 1e-14);
        assert!((quotient_dispersion_real(&spec(3, 4, 1.0, 1.0, 1, 0), PI / 4.0) + 0.5).abs() < 1e-14);
        assert_eq!(quotient_dispersion_real(&spec(3, 4, 0.3, 0.8, 2, 1), 0.0), 0.0);
    }

    /// Brute-force oracle for the trivial label: `(1 - u)(1 - v)(1 - uv)` with
    /// `u = e^{2ikL1}`, `v = e^{2ikL3}`.
    #[test]
    fn trivial_label_factorization() {
        let sp = spec(3, 4, 0.7, 1.3, 0, 0);
        for j in 1..200 {
            let k = Complex64::new(j as f64 * 0.0731, 0.01 * (j % 5) as f64);
            let u = (Complex64::i() * 2.0 * k * sp.l1).exp();
            let v = (Complex64::i() * 2.0 * k * sp.l3).exp();
            let oracle = (1.0 - u) * (1.0 - v) * (1.0 - u * v);
            assert!((quotient_secular_closed(&sp, k) - oracle).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_equals_dispersion_identity() {
        for (s, t) in [(0, 0), (1, 0), (2, 3), (1, 1)] {
            let sp = spec(3, 4, 0.5, 1.0, s, t);
            for j in 1..=1000 {
                let k = j as f64 * 0.02;
                let lhs = quotient_secular_closed(&sp, k);
                let rhs = -2.0 * Complex64::i() * (Complex64::i() * 2.0 * k * (sp.l1 + sp.l3)).exp()
                    * quotient_dispersion_real(&sp, k);
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_matches_closed_form() {
        for n1 in 1..=6 {
            for n2 in 1..=6 {
                for s in 0..n1 {
                    for t in 0..n2 {
                        let sp = spec(n1, n2, 0.5, 1.0, s, t);
                        let sys = quotient_graph(&sp).unwrap().system().unwrap();
                        assert_eq!(sys.bond_count(), 8);
                        assert!(sys.unitarity_defect() < 1e-12);
                        for j in 1..=1000 {
                            let k = j as f64 * 0.02;
                            let d = sys.det(Complex64::new(k, 0.0)) - quotient_secular_closed(&sp, k);
                            assert!(d.norm() < 1e-10, "({n1},{n2}) ({s},{t}) k={k}: {d}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn conjugate_labels_agree() {
        let (n1, n2) = (3, 4);
        for s in 0..n1 {
            for t in 0..n2 {
                let a = spec(n1, n2, 0.5, 1.0, s, t);
                let b = spec(n1, n2, 0.5, 1.0, (n1 - s) % n1, (n2 - t) % n2);
                for j in 1..=200 {
                    let k = j as f64 * 0.05;
                    assert!((quotient_secular_closed(&a, k) - quotient_secular_closed(&b, k)).norm() < 1e-12);
                }
            }
        }
    }

    // Swapping the pairing is the same as exchanging the roles of the two cycles, i.e.
    // the torus with its edge lengths exchanged. The merged spectrum therefore changes
    // unless n1 = n2 or l1 = l3.
    #[test]
    fn swapped_pairing_is_the_transposed_torus() {
        let (n1, n2) = (3, 4);
        for s in 0..n1 {
            for t in 0..n2 {
                let a = spec(n1, n2, 0.5, 1.0, s, t).with_pairing(PhasePairing::Swapped);
                let b = spec(n2, n1, 0.5, 1.0, t, s);
                for j in 1..=200 {
                    let k = j as f64 * 0.05;
                    assert!((quotient_secular_closed(&a, k) - quotient_secular_closed(&b, k)).norm() < 1e-12);
                }
            }
        }
        let opts = ScanOptions::new(15.0, 0.01);
        let printed = merged_factor_spectrum(n1, n2, 0.5, 1.0, PhasePairing::AsPrinted, &opts, 1e-7).unwrap();
        let swapped = merged_factor_spectrum(n1, n2, 0.5, 1.0, PhasePairing::Swapped, &opts, 1e-7).unwrap();
        let transposed = merged_factor_spectrum(n2, n1, 0.5, 1.0, PhasePairing::AsPrinted, &opts, 1e-7).unwrap();
        assert!(compare_spectra(&swapped, &transposed, 1e-9).isospectral);
        assert!(!compare_spectra(&swapped, &printed, 1e-9).isospectral);
        let equal_lengths = |p| merged_factor_spectrum(n1, n2, 0.7, 0.7, p, &opts, 1e-7).unwrap();
        assert!(compare_spectra(&equal_lengths(PhasePairing::AsPrinted), &equal_lengths(PhasePairing::Swapped), 1e-9)
            .isospectral);
    }

    #[test]
    fn trivial_factor_zero_set() {
        let (l1, l3) = (0.5, 1.0);
        let sp = spec(3, 4, l1, l3, 0, 0);
        let s = factor_spectrum(&sp, &ScanOptions::new(15.0, 0.01)).unwrap();
        let mut expect = Vec::new();
        for l in [l1, l3, l1 + l3] {
            let mut m = 1;
            while m as f64 * PI / l <= 15.0 {
                expect.push(m as f64 * PI / l);
                m += 1;
            }
        }
        expect.sort_by(f64::total_cmp);
        assert_eq!(s.expanded().len(), expect.len());
        for (a, b) in s.expanded().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn dispersion_roots_small_example() {
        let sp = spec(3, 4, 1.0, 1.0, 0, 0);
        let s = factor_spectrum(&sp, &ScanOptions::new(7.0, 0.02)).unwrap();
        let ks = s.ks();
        let expect = [PI / 2.0, PI, 1.5 * PI, 2.0 * PI];
        assert_eq!(ks.len(), 4);
        for (a, b) in ks.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(s.roots.iter().map(|r| r.order).collect::<Vec<_>>(), vec![1, 3, 1, 3]);
    }

    #[test]
    fn product_examples() {
        assert!(secular_product(3, 4, 0.5, 1.0, 0.0).unwrap().norm() < 1e-15);
        let k = 1.37;
        let single = quotient_secular_closed(&spec(1, 1, 0.5, 1.0, 0, 0), k);
        assert_eq!(secular_product(1, 1, 0.5, 1.0, k).unwrap(), single);
    }

    #[test]
    fn product_matches_full_torus_at_pi() {
        let full = torus_secular_system(3, 4, 0.5, 1.0).unwrap();
        assert_eq!(full.bond_count(), 96);
        let p = secular_product(3, 4, 0.5, 1.0, PI).unwrap();
        let d = full.det(Complex64::new(PI, 0.0));
        assert!((p - d).norm() < 1e-9 * d.norm().max(1.0));
        // away from a root the two agree exactly, not just up to a constant
        let k = 0.731;
        let p = secular_product(3, 4, 0.5, 1.0, k).unwrap();
        let d = full.det(Complex64::new(k, 0.0));
        assert!((p - d).norm() < 1e-8 * d.norm().max(1.0), "{p} vs {d}");
    }

    #[test]
    fn reversing_edges_keeps_determinant() {
        let q = quotient_graph(&spec(3, 4, 0.5, 1.0, 1, 3)).unwrap();
        let base = q.system().unwrap();
        let flipped = q.with_edge_reversed(0).unwrap().with_edge_reversed(2).unwrap().system().unwrap();
        for j in 1..=100 {
            let k = Complex64::new(j as f64 * 0.137, 0.0);
            assert!((base.det(k) - flipped.det(k)).norm() < 1e-12);
        }
    }
}
