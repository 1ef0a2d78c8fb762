//! Functions on a metric graph sampled at edge midpoints, and their decomposition into
//! irrep components under a group action.
//!
//! Edge `e` of length `L` carries `M` samples at `x_m = (m + 1/2) L / M`, so reversing the
//! parameterization of an edge just reverses its sample array.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::group::ProductIrrep;
use crate::symmetry::GraphAction;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    lengths: Vec<f64>,
    samples: Vec<Vec<Complex64>>,
}

impl SampledFunction {
    /// Samples `f(edge, x)` at the midpoints of `m` equal cells on each edge.
    pub fn from_fn(graph: &MetricGraph, m: usize, f: impl Fn(usize, f64) -> Complex64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("at least one sample per edge is required".into()));
        }
        let lengths = graph.lengths();
        let samples = lengths
            .iter()
            .enumerate()
            .map(|(e, &l)| (0..m).map(|j| f(e, (j as f64 + 0.5) * l / m as f64)).collect())
            .collect();
        Ok(SampledFunction { lengths, samples })
    }

    pub fn constant(graph: &MetricGraph, m: usize, value: Complex64) -> Result<Self> {
        Self::from_fn(graph, m, |_, _| value)
    }

    /// Independent standard normal real and imaginary parts, reproducible from `seed`.
    pub fn random(graph: &MetricGraph, m: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = Self::constant(graph, m, Complex64::new(0.0, 0.0))?;
        for edge in &mut f.samples {
            for z in edge.iter_mut() {
                *z = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
            }
        }
        Ok(f)
    }

    /// Builds a function from explicit per-edge sample arrays.
    pub fn from_samples(graph: &MetricGraph, samples: Vec<Vec<Complex64>>) -> Result<Self> {
        if samples.len() != graph.edge_count() {
            return Err(Error::LengthMismatch {
                what: "per-edge sample arrays",
                expected: graph.edge_count(),
                got: samples.len(),
            });
        }
        let m = samples.first().map_or(1, Vec::len);
        if m == 0 || samples.iter().any(|s| s.len() != m) {
            return Err(Error::OrientationMismatch(
                "every edge needs the same positive number of samples".into(),
            ));
        }
        Ok(SampledFunction {
            lengths: graph.lengths(),
            samples,
        })
    }

    pub fn samples_per_edge(&self) -> usize {
        self.samples[0].len()
    }

    pub fn edge_count(&self) -> usize {
        self.samples.len()
    }

    pub fn edge_samples(&self, edge: usize) -> &[Complex64] {
        &self.samples[edge]
    }

    /// Sample positions on `edge`.
    pub fn positions(&self, edge: usize) -> Vec<f64> {
        let m = self.samples_per_edge();
        let l = self.lengths[edge];
        (0..m).map(|j| (j as f64 + 0.5) * l / m as f64).collect()
    }

    fn zip_map(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        SampledFunction {
            lengths: self.lengths.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        }
    }

    fn check_layout(&self, other: &Self) -> Result<()> {
        if self.lengths != other.lengths || self.samples_per_edge() != other.samples_per_edge() {
            return Err(Error::OrientationMismatch(
                "functions are sampled on different layouts".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_layout(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_layout(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.zip_map(self, |a, _| c * a)
    }

    /// Largest sample modulus.
    pub fn max_abs(&self) -> f64 {
        self.samples
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; 1 - u keeps the logarithm finite
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    (-2.0 * (1.0 - u).ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Midpoint-rule `sum_e (L_e / M) sum_m |f_m|^2`.
pub fn l2_norm_sq(f: &SampledFunction) -> f64 {
    let m = f.samples_per_edge() as f64;
    f.samples
        .iter()
        .zip(&f.lengths)
        .map(|(s, l)| l / m * s.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum()
}

/// Midpoint-rule `<f, g> = sum_e (L_e / M) sum_m conj(f_m) g_m`.
pub fn inner_product(f: &SampledFunction, g: &SampledFunction) -> Result<Complex64> {
    f.check_layout(g)?;
    let m = f.samples_per_edge() as f64;
    Ok(f.samples
        .iter()
        .zip(&g.samples)
        .zip(&f.lengths)
        .map(|((a, b), l)| l / m * a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>())
        .sum())
}

fn check_action(f: &SampledFunction, action: &GraphAction) -> Result<()> {
    let edges = action.generators()[0].edge_perm.len();
    if edges != f.edge_count() {
        return Err(Error::OrientationMismatch(format!(
            "action moves {edges} edges but the function has {}",
            f.edge_count()
        )));
    }
    Ok(())
}

/// `(result)|_e = f|_{g e}` for `g = (g1^kappa, g2^iota)`, reversing samples where `g`
/// reverses the edge.
pub fn pull_back(f: &SampledFunction, action: &GraphAction, element: (usize, usize)) -> Result<SampledFunction> {
    check_action(f, action)?;
    let map = action.element_map(element.0, element.1);
    let samples = (0..f.edge_count())
        .map(|e| {
            let src = &f.samples[map.edge[e]];
            if map.preserved[e] {
                src.clone()
            } else {
                src.iter().rev().copied().collect()
            }
        })
        .collect();
    Ok(SampledFunction {
        lengths: f.lengths.clone(),
        samples,
    })
}

/// `f_{s,t} = (1 / n1 n2) sum_g tau_{s,t}(g) f|_{g .}`.
pub fn project(f: &SampledFunction, action: &GraphAction, irrep: &ProductIrrep) -> Result<SampledFunction> {
    check_irrep(action, irrep)?;
    let mut acc = f.scale(Complex64::new(0.0, 0.0));
    for (k, i) in action.elements() {
        let w = irrep.value(k as i64, i as i64);
        let moved = pull_back(f, action, (k, i))?;
        acc = acc.zip_map(&moved, |a, b| a + w * b);
    }
    Ok(acc.scale(Complex64::new(1.0 / action.group_order() as f64, 0.0)))
}

fn check_irrep(action: &GraphAction, irrep: &ProductIrrep) -> Result<()> {
    if (irrep.n1, irrep.n2) != action.orders() {
        return Err(Error::InvalidArgument(format!(
            "irrep of G_{} x G_{} does not match an action of orders {:?}",
            irrep.n1,
            irrep.n2,
            action.orders()
        )));
    }
    Ok(())
}

/// All components, in `s`-major label order.
pub fn decompose(f: &SampledFunction, action: &GraphAction) -> Result<Vec<(ProductIrrep, SampledFunction)>> {
    let (n1, n2) = action.orders();
    ProductIrrep::all(n1, n2)?
        .into_par_iter()
        .map(|irrep| Ok((irrep, project(f, action, &irrep)?)))
        .collect()
}

/// `max_{g, e} || f|_{g e} - tau(g)^{-1} f|_e ||_inf`.
pub fn quasi_periodicity_residual(f: &SampledFunction, action: &GraphAction, irrep: &ProductIrrep) -> Result<f64> {
    check_irrep(action, irrep)?;
    let mut worst: f64 = 0.0;
    for (k, i) in action.elements() {
        let inv = irrep.value(k as i64, i as i64).inv();
        let moved = pull_back(f, action, (k, i))?;
        let diff = moved.zip_map(f, |a, b| a - inv * b);
        worst = worst.max(diff.max_abs());
    }
    Ok(worst)
}
