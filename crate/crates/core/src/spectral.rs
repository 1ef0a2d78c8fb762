//! Root extraction from secular functions, spectrum merging and comparison, and a Weyl
//! counting sanity check.
//!
//! Real functions are scanned for sign changes and refined by bisection; touching roots
//! show up as small local minima of `|f|`. Complex secular functions are scanned for local
//! minima of `|Sigma|`, and every candidate is confirmed by the argument principle on a
//! small circle in the complex `k` plane, which also gives its order and, through the
//! first contour moment, an accurate location even for high-order roots.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_COALESCE_TOL: f64 = 1e-7;
pub const DEFAULT_TOL_TOUCH: f64 = 1e-8;

/// Roots closer than this (or a radius-dependent floor, see `spread_tol`) inside one
/// contour are reported as a single root.
const SPREAD_TOL: f64 = 5e-8;
const MAX_SPLIT_DEPTH: usize = 4;
const MAX_CONTOUR_NODES: usize = 4096;

/// A function of complex `k` whose zeros are of interest.
pub trait SecularFunction: Sync {
    fn eval(&self, k: Complex64) -> Complex64;
}

impl<F> SecularFunction for F
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, k: Complex64) -> Complex64 {
        self(k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub k: f64,
    pub order: usize,
    pub sources: Vec<String>,
}

/// Roots in `(0, k_max]`, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub roots: Vec<Root>,
    pub k_max: f64,
    pub tol: f64,
}

impl Spectrum {
    pub fn new(mut roots: Vec<Root>, k_max: f64, tol: f64) -> Self {
        roots.sort_by(|a, b| a.k.total_cmp(&b.k));
        Spectrum { roots, k_max, tol }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn ks(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.k).collect()
    }

    /// Roots repeated according to their order.
    pub fn expanded(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.k, r.order))
            .collect()
    }

    /// Number of roots in `(0, k]`, counted with order.
    pub fn count_up_to(&self, k: f64) -> usize {
        self.roots.iter().filter(|r| r.k <= k).map(|r| r.order).sum()
    }

    pub fn total_order(&self) -> usize {
        self.roots.iter().map(|r| r.order).sum()
    }

    /// Replaces every root's sources with `label`.
    pub fn with_source(mut self, label: &str) -> Self {
        for r in &mut self.roots {
            r.sources = vec![label.to_string()];
        }
        self
    }
}

/// Scan parameters shared by both root finders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub k_max: f64,
    pub grid_step: f64,
    /// Final bracket width (real scan) or golden-section width (modulus scan).
    pub tol: f64,
    /// Threshold on `|f|` for accepting a touching root in the real scan.
    pub tol_touch: f64,
}

impl ScanOptions {
    pub fn new(k_max: f64, grid_step: f64) -> Self {
        ScanOptions {
            k_max,
            grid_step,
            tol: DEFAULT_TOL,
            tol_touch: DEFAULT_TOL_TOUCH,
        }
    }

    /// Rejects non-positive or non-finite parameters and a step larger than `k_max`.
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.k_max) || !positive(self.grid_step) || !positive(self.tol) || !positive(self.tol_touch) {
            return Err(Error::InvalidArgument(format!(
                "k_max, grid step and tolerances must be positive: {self:?}"
            )));
        }
        if self.grid_step > self.k_max {
            return Err(Error::InvalidArgument("grid step exceeds k_max".into()));
        }
        Ok(())
    }
}

/// Grid step that resolves the root spacing of a graph whose shortest edge is
/// `min_length`: adjacent roots of the factor functions are at least of order
/// `min_length`-reciprocal apart, and fifty samples per such length keep at most one
/// sign change per cell in practice.
pub fn default_grid_step(min_length: f64) -> f64 {
    min_length / 50.0
}

/// Argument-principle summary of the zeros inside a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourMoments {
    /// Number of zeros inside, counted with multiplicity.
    pub order: usize,
    /// Mean position of the enclosed zeros (real part).
    pub mean: f64,
    /// Imaginary part of the mean position.
    pub mean_im: f64,
    /// Standard deviation of the enclosed zero positions.
    pub spread: f64,
}

/// Winding number and moments `s_1, s_2` from `n` samples on the circle, or `None` when
/// the phase moves too fast between samples to be unwrapped reliably.
///
/// With `m` zeros inside, `g(w) = f(c + w) / w^m` has a continuous logarithm on the circle
/// and `s_p = sum_j (z_j - c)^p = -(p / 2 pi i) oint w^{p-1} log g(w) dw`. The integrand
/// is periodic, so the trapezoidal rule converges geometrically, and no derivative of `f`
/// is needed.
fn log_moments(f: &dyn SecularFunction, center: f64, radius: f64, n: usize) -> Result<Option<(usize, [Complex64; 2])>> {
    let tau = 2.0 * std::f64::consts::PI;
    let ws: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, tau * j as f64 / n as f64))
        .collect();
    let vals: Vec<Complex64> = ws.iter().map(|&w| f.eval(Complex64::new(center, 0.0) + w)).collect();
    if vals.iter().any(|v| !(v.norm() > 0.0 && v.norm().is_finite())) {
        return Err(Error::GridTooCoarse {
            k: center,
            reason: "secular function vanishes or overflows on the confirmation contour".into(),
        });
    }
    let mut phase = Vec::with_capacity(n);
    let mut acc = vals[0].arg();
    phase.push(acc);
    for j in 1..=n {
        let step = (vals[j % n] / vals[j - 1]).arg();
        if step.abs() > std::f64::consts::FRAC_PI_2 {
            return Ok(None);
        }
        acc += step;
        if j < n {
            phase.push(acc);
        }
    }
    let winding = (acc - phase[0]) / tau;
    let m = winding.round();
    if m < 0.0 || (winding - m).abs() > 1e-6 {
        return Ok(None);
    }
    let mut s = [Complex64::new(0.0, 0.0); 2];
    for j in 0..n {
        let theta = tau * j as f64 / n as f64;
        let log_g = Complex64::new(vals[j].norm().ln() - m * radius.ln(), phase[j] - m * theta);
        let w = ws[j];
        s[0] += w * log_g;
        s[1] += w * w * log_g;
    }
    s[0] *= -1.0 / n as f64;
    s[1] *= -2.0 / n as f64;
    Ok(Some((m as usize, s)))
}

/// Zeros of `f` inside the circle `|k - center| = radius`, with the node count doubled
/// until the winding number and the first two moments settle.
///
/// Near a high-order zero `f` is evaluated with cancellation, which limits the moments to
/// roughly `1e-9` relative accuracy; once the winding number is stable the estimate at
/// the largest node count is returned even if the moments keep jittering at that level.
pub fn contour_moments(f: &dyn SecularFunction, center: f64, radius: f64) -> Result<ContourMoments> {
    let finish = |m: usize, s: [Complex64; 2]| {
        if m == 0 {
            return ContourMoments {
                order: 0,
                mean: center,
                mean_im: 0.0,
                spread: 0.0,
            };
        }
        let mf = m as f64;
        let mean = s[0] / mf;
        let var = s[1] / mf - mean * mean;
        ContourMoments {
            order: m,
            mean: center + mean.re,
            mean_im: mean.im,
            spread: var.norm().sqrt(),
        }
    };
    let mut prev: Option<(usize, [Complex64; 2])> = None;
    let mut n = 64;
    while n <= MAX_CONTOUR_NODES {
        let cur = log_moments(f, center, radius, n)?;
        if let (Some((m0, p)), Some((m, s))) = (prev, cur) {
            let scale = (m as f64).max(1.0);
            let settled = m0 == m
                && (s[0] - p[0]).norm() < 1e-9 * radius * scale
                && (s[1] - p[1]).norm() < 1e-9 * radius * radius * scale;
            if settled || (m0 == m && 2 * n > MAX_CONTOUR_NODES) {
                return Ok(finish(m, s));
            }
        }
        prev = cur;
        n *= 2;
    }
    Err(Error::GridTooCoarse {
        k: center,
        reason: "contour integral did not converge; a zero lies close to the contour".into(),
    })
}

/// Zeros closer together than this are indistinguishable from one multiple zero on a
/// contour of the given radius.
fn spread_tol(radius: f64) -> f64 {
    SPREAD_TOL.max(1e-4 * radius)
}

/// Winding number of `f` around the circle of radius `radius` centred at `center`.
pub fn winding_number(f: &dyn SecularFunction, center: f64, radius: f64) -> Result<usize> {
    Ok(contour_moments(f, center, radius)?.order)
}

fn golden_min(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn bisect(f: &(dyn Fn(f64) -> f64 + Sync), mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if sign(fm) == sign(fa) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn non_finite(k: f64) -> Error {
    Error::InvalidArgument(format!("function is not finite at k = {k}"))
}

/// Roots of a real function on `(0, k_max]`.
///
/// The grid is sampled at half steps. Each cell of width `grid_step` has its midpoint
/// checked: a sign change in both halves means two roots the grid alone would hide, and
/// raises `GridTooCoarse`. Sign changes are bisected to `tol`. A local minimum of `|f|`
/// without sign change whose golden-section refinement falls below `tol_touch` is a
/// touching root.
///
/// With a `companion` (a complex function sharing the zeros, such as the secular
/// determinant behind a real dispersion form) every root's order comes from the
/// companion's winding number on a circle of radius `grid_step / 2`; touching roots are
/// accepted only when that winding is positive. Roots are relocated to the contour mean,
/// which stays accurate for high-order roots where bisection is limited by roundoff.
/// Without a companion, sign changes get order 1 and touching roots order 2.
pub fn find_roots_real(
    f: &(dyn Fn(f64) -> f64 + Sync),
    companion: Option<&dyn SecularFunction>,
    opts: &ScanOptions,
) -> Result<Spectrum> {
    opts.validate()?;
    let h = opts.grid_step;
    let half = 0.5 * h;
    let cells = (opts.k_max / h).ceil() as usize;
    // y_j = (j + 1) h/2; cell c spans indices 2c..=2c+2
    let ys: Vec<f64> = (1..=2 * cells + 3).map(|j| j as f64 * half).collect();
    let vs: Vec<f64> = ys.par_iter().map(|&y| f(y)).collect();
    if let Some(j) = vs.iter().position(|v| !v.is_finite()) {
        return Err(non_finite(ys[j]));
    }

    // (k, order guess, touching)
    let mut found: Vec<(f64, usize, bool)> = Vec::new();
    for j in 0..vs.len() {
        if vs[j] == 0.0 {
            let odd = j > 0 && j + 1 < vs.len() && sign(vs[j - 1]) * sign(vs[j + 1]) < 0;
            found.push((ys[j], if odd { 1 } else { 2 }, !odd));
        }
    }
    let mut brackets = Vec::new();
    for c in 0..=cells {
        let (a, m, b) = (2 * c, 2 * c + 1, 2 * c + 2);
        let left = sign(vs[a]) * sign(vs[m]) < 0;
        let right = sign(vs[m]) * sign(vs[b]) < 0;
        if left && right {
            return Err(Error::GridTooCoarse {
                k: ys[a],
                reason: format!("two sign changes within one cell of width {h}"),
            });
        }
        if left {
            brackets.push(a);
        }
        if right {
            brackets.push(m);
        }
    }
    let bisected: Vec<f64> = brackets
        .par_iter()
        .map(|&j| bisect(f, ys[j], ys[j + 1], vs[j], opts.tol))
        .collect();
    found.extend(bisected.into_iter().map(|k| (k, 1, false)));

    let abs = |k: f64| f(k).abs();
    let mut touching = Vec::new();
    for j in 1..vs.len() - 1 {
        let (p, q, r) = (vs[j - 1], vs[j], vs[j + 1]);
        let same = sign(p) == sign(q) && sign(q) == sign(r) && sign(q) != 0;
        if same && q.abs() <= p.abs() && q.abs() < r.abs() {
            touching.push(j);
        }
    }
    let refined: Vec<(f64, f64)> = touching
        .par_iter()
        .map(|&j| golden_min(&abs, ys[j - 1], ys[j + 1], opts.tol))
        .collect();
    for (k, fk) in refined {
        let near_known = found.iter().any(|&(x, _, _)| (x - k).abs() < h);
        if fk < opts.tol_touch && !near_known {
            found.push((k, 2, true));
        }
    }

    let mut roots = Vec::new();
    for (k, guess, is_touching) in found {
        let (k, order) = match companion {
            Some(g) => {
                let mom = contour_moments(g, k, half)?;
                if mom.order == 0 {
                    if is_touching {
                        continue;
                    }
                    (k, 1)
                } else if mom.spread > spread_tol(half) {
                    // distinct zeros share the disc; keep the bracketed location
                    (k, guess)
                } else {
                    // the contour mean stays accurate where |f| drowns in roundoff
                    (mom.mean, mom.order)
                }
            }
            None => (k, guess),
        };
        if k > 0.0 && k <= opts.k_max {
            roots.push(Root {
                k,
                order,
                sources: Vec::new(),
            });
        }
    }
    Ok(Spectrum::new(roots, opts.k_max, opts.tol))
}

fn local_minima(a: &[f64]) -> Vec<usize> {
    (1..a.len().saturating_sub(1))
        .filter(|&j| a[j] <= a[j - 1] && a[j] < a[j + 1])
        .collect()
}

/// Resolves the zeros in the disc around `center`, splitting clusters of distinct roots
/// by rescanning the disc on a finer grid.
fn resolve_disc(
    f: &dyn SecularFunction,
    center: f64,
    radius: f64,
    tol: f64,
    depth: usize,
) -> Result<Vec<(f64, usize)>> {
    let mom = contour_moments(f, center, radius)?;
    if mom.order == 0 {
        return Ok(Vec::new());
    }
    if mom.spread <= spread_tol(radius) {
        return Ok(vec![(mom.mean, mom.order)]);
    }
    if depth >= MAX_SPLIT_DEPTH {
        return Err(Error::GridTooCoarse {
            k: center,
            reason: format!(
                "{} zeros spread over {:.3e} could not be separated",
                mom.order, mom.spread
            ),
        });
    }
    // distinct zeros are about twice the spread apart; sample finely enough to give
    // each its own local minimum of |f|
    let step = (radius / 8.0).min(mom.spread / 2.0);
    let half_count = (radius / step).ceil() as i64 + 1;
    if half_count > 4096 {
        return Err(Error::GridTooCoarse {
            k: center,
            reason: format!("zeros spread over {:.3e} are too close to separate", mom.spread),
        });
    }
    let ys: Vec<f64> = (-half_count..=half_count).map(|j| center + j as f64 * step).collect();
    let a: Vec<f64> = ys.iter().map(|&y| f.eval(Complex64::new(y, 0.0)).norm()).collect();
    let mut out: Vec<(f64, usize)> = Vec::new();
    for j in local_minima(&a) {
        let g = |k: f64| f.eval(Complex64::new(k, 0.0)).norm();
        let (k, _) = golden_min(&g, ys[j - 1], ys[j + 1], tol);
        for (x, m) in resolve_disc(f, k, step / 2.0, tol, depth + 1)? {
            if (x - center).abs() < radius && !out.iter().any(|&(y, _)| (y - x).abs() < SPREAD_TOL) {
                out.push((x, m));
            }
        }
    }
    let total: usize = out.iter().map(|r| r.1).sum();
    if total != mom.order {
        return Err(Error::GridTooCoarse {
            k: center,
            reason: format!("contour holds {} zeros but the rescan found {total}", mom.order),
        });
    }
    Ok(out)
}

/// Roots of a complex secular function on `(0, k_max]`.
///
/// Local minima of `|Sigma|` on a half-step grid are refined by golden section; each is
/// kept if the winding number of `Sigma` around the circle of radius `grid_step / 2` is
/// positive. That winding number is the reported order and the first contour moment the
/// reported location. Acceptance does not use an absolute threshold on `|Sigma|`, whose
/// scale grows exponentially with the number of bonds.
pub fn find_roots_modulus(f: &dyn SecularFunction, opts: &ScanOptions) -> Result<Spectrum> {
    opts.validate()?;
    let h = opts.grid_step;
    let half = 0.5 * h;
    let n = (opts.k_max / half).ceil() as usize + 2;
    let ys: Vec<f64> = (1..=n).map(|j| j as f64 * half).collect();
    let a: Vec<f64> = ys
        .par_iter()
        .map(|&y| f.eval(Complex64::new(y, 0.0)).norm())
        .collect();
    if let Some(j) = a.iter().position(|v| !v.is_finite()) {
        return Err(non_finite(ys[j]));
    }
    let candidates = local_minima(&a);
    let per_candidate: Vec<Vec<(f64, usize)>> = candidates
        .par_iter()
        .map(|&j| {
            let g = |k: f64| f.eval(Complex64::new(k, 0.0)).norm();
            let (k, _) = golden_min(&g, ys[j - 1], ys[j + 1], opts.tol);
            resolve_disc(f, k, half, opts.tol, 0)
        })
        .collect::<Result<_>>()?;

    let mut all: Vec<(f64, usize)> = per_candidate.into_iter().flatten().collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut roots: Vec<Root> = Vec::new();
    for (k, order) in all {
        if !(k > 0.0 && k <= opts.k_max) {
            continue;
        }
        if let Some(last) = roots.last_mut() {
            // the same zero seen from two overlapping discs
            if (k - last.k).abs() < SPREAD_TOL {
                last.order = last.order.max(order);
                continue;
            }
        }
        roots.push(Root {
            k,
            order,
            sources: Vec::new(),
        });
    }
    Ok(Spectrum::new(roots, opts.k_max, opts.tol))
}

/// Multiset union: roots closer than `tol` (chained) are coalesced into one root at the
/// order-weighted mean, with orders summed and sources concatenated without repeats.
pub fn merge_spectra(spectra: &[Spectrum], tol: f64) -> Spectrum {
    let mut all: Vec<&Root> = spectra.iter().flat_map(|s| &s.roots).collect();
    all.sort_by(|a, b| a.k.total_cmp(&b.k));
    let mut out: Vec<Root> = Vec::new();
    let mut last_k = f64::NEG_INFINITY;
    let mut weighted = 0.0;
    for r in all {
        match out.last_mut() {
            Some(cur) if r.k - last_k < tol => {
                weighted += r.k * r.order as f64;
                cur.order += r.order;
                cur.k = weighted / cur.order as f64;
                for s in &r.sources {
                    if !cur.sources.contains(s) {
                        cur.sources.push(s.clone());
                    }
                }
            }
            _ => {
                weighted = r.k * r.order as f64;
                out.push(r.clone());
            }
        }
        last_k = r.k;
    }
    let k_max = spectra.iter().map(|s| s.k_max).fold(0.0, f64::max);
    let base_tol = spectra.iter().map(|s| s.tol).fold(0.0, f64::max);
    Spectrum::new(out, k_max, base_tol.max(tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub isospectral: bool,
    pub count_a: usize,
    pub count_b: usize,
    pub max_distance: f64,
    pub unmatched_a: Vec<f64>,
    pub unmatched_b: Vec<f64>,
}

/// Pairs the order-expanded root lists in sorted order; two roots pair when they are
/// within `tol`, otherwise the smaller one is left unmatched.
pub fn compare_spectra(a: &Spectrum, b: &Spectrum, tol: f64) -> Comparison {
    let (xa, xb) = (a.expanded(), b.expanded());
    let (mut i, mut j) = (0, 0);
    let mut max_distance: f64 = 0.0;
    let (mut unmatched_a, mut unmatched_b) = (Vec::new(), Vec::new());
    while i < xa.len() && j < xb.len() {
        let d = (xa[i] - xb[j]).abs();
        if d < tol {
            max_distance = max_distance.max(d);
            i += 1;
            j += 1;
        } else if xa[i] < xb[j] {
            unmatched_a.push(xa[i]);
            i += 1;
        } else {
            unmatched_b.push(xb[j]);
            j += 1;
        }
    }
    unmatched_a.extend_from_slice(&xa[i..]);
    unmatched_b.extend_from_slice(&xb[j..]);
    Comparison {
        isospectral: xa.len() == xb.len() && unmatched_a.is_empty() && unmatched_b.is_empty(),
        count_a: xa.len(),
        count_b: xb.len(),
        max_distance,
        unmatched_a,
        unmatched_b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylReport {
    pub k: f64,
    pub count: usize,
    pub expected: f64,
    pub deviation: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Compares the root count `N(k)` (with order) against `total_length * k / pi`.
pub fn weyl_count_check(spectrum: &Spectrum, k: f64, total_length: f64, bound: f64) -> WeylReport {
    let count = spectrum.count_up_to(k);
    let expected = total_length * k / std::f64::consts::PI;
    let deviation = (count as f64 - expected).abs();
    WeylReport {
        k,
        count,
        expected,
        deviation,
        bound,
        ok: deviation <= bound,
    }
}

/// [`weyl_count_check`] with the structural bound `|E| + |V|` of `graph`.
pub fn weyl_check_graph(spectrum: &Spectrum, k: f64, graph: &MetricGraph) -> WeylReport {
    let bound = (graph.edge_count() + graph.vertex_count()) as f64;
    weyl_count_check(spectrum, k, graph.total_length(), bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::standard_system;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn root(k: f64, order: usize, src: &str) -> Root {
        Root {
            k,
            order,
            sources: vec![src.into()],
        }
    }

    #[test]
    fn sine_roots() {
        let s = find_roots_real(&|k: f64| k.sin(), None, &ScanOptions::new(10.0, 0.01)).unwrap();
        assert_eq!(s.len(), 3);
        for (m, r) in s.roots.iter().enumerate() {
            assert!((r.k - (m + 1) as f64 * PI).abs() < 1e-9);
            assert_eq!(r.order, 1);
        }
    }

    #[test]
    fn touching_root() {
        let s = find_roots_real(&|k: f64| (k - 2.0).powi(2), None, &ScanOptions::new(5.0, 0.013)).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.roots[0].k - 2.0).abs() < 1e-7);
        assert_eq!(s.roots[0].order, 2);
    }

    #[test]
    fn touching_root_order_from_companion() {
        let comp = |k: Complex64| (k - 2.0) * (k - 2.0);
        let s = find_roots_real(&|k: f64| (k - 2.0).powi(2), Some(&comp), &ScanOptions::new(5.0, 0.013)).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.roots[0].k - 2.0).abs() < 1e-10);
        assert_eq!(s.roots[0].order, 2);
    }

    #[test]
    fn hidden_pair_is_reported() {
        // cells of width 0.01 start at 0.005; both roots sit in the cell (0.995, 1.005)
        let f = |k: f64| (k - 0.9971) * (k - 1.0029);
        let err = find_roots_real(&f, None, &ScanOptions::new(2.0, 0.01)).unwrap_err();
        assert!(matches!(err, Error::GridTooCoarse { .. }));
    }

    #[test]
    fn modulus_circle_and_interval() {
        let circle = MetricGraph::new(2, &[(0, 1, 1.0), (1, 0, 2.0)]).unwrap();
        let sys = standard_system(&circle).unwrap();
        let s = find_roots_modulus(&sys, &ScanOptions::new(10.0, 0.02)).unwrap();
        let expect: Vec<f64> = (1..=4).map(|m| 2.0 * PI * m as f64 / 3.0).collect();
        assert_eq!(s.len(), expect.len());
        for (r, e) in s.roots.iter().zip(&expect) {
            assert!((r.k - e).abs() < 1e-9, "{} vs {}", r.k, e);
            assert_eq!(r.order, 2);
        }

        let interval = MetricGraph::new(2, &[(0, 1, 1.0)]).unwrap();
        let sys = standard_system(&interval).unwrap();
        let s = find_roots_modulus(&sys, &ScanOptions::new(10.0, 0.02)).unwrap();
        assert_eq!(s.ks().len(), 3);
        for (m, r) in s.roots.iter().enumerate() {
            assert!((r.k - (m + 1) as f64 * PI).abs() < 1e-9);
            assert_eq!(r.order, 1);
        }
    }

    #[test]
    fn modulus_separates_close_roots() {
        let f = |k: Complex64| (k - 1.0) * (k - 1.002) * (k - 3.0).powi(3);
        let s = find_roots_modulus(&f, &ScanOptions::new(4.0, 0.05)).unwrap();
        let got: Vec<(f64, usize)> = s.roots.iter().map(|r| (r.k, r.order)).collect();
        assert_eq!(got.len(), 3, "{got:?}");
        assert!((got[0].0 - 1.0).abs() < 1e-9 && got[0].1 == 1);
        assert!((got[1].0 - 1.002).abs() < 1e-9 && got[1].1 == 1);
        assert!((got[2].0 - 3.0).abs() < 1e-9 && got[2].1 == 3);
    }

    #[test]
    fn winding_counts_enclosed_zeros() {
        let f = |k: Complex64| (k - 1.0).powi(3) * (k - 5.0);
        assert_eq!(winding_number(&f, 1.001, 0.01).unwrap(), 3);
        assert_eq!(winding_number(&f, 2.0, 0.5).unwrap(), 0);
    }

    #[test]
    fn merge_examples() {
        let a = Spectrum::new(vec![root(PI, 1, "a")], 4.0, 1e-10);
        let b = Spectrum::new(vec![root(PI + 1e-9, 1, "b")], 4.0, 1e-10);
        let m = merge_spectra(&[a.clone(), b], 1e-8);
        assert_eq!(m.len(), 1);
        assert_eq!(m.roots[0].order, 2);
        assert_eq!(m.roots[0].sources, vec!["a".to_string(), "b".to_string()]);
        let c = Spectrum::new(vec![root(1.0, 1, "c"), root(3.5, 2, "c")], 4.0, 1e-10);
        let m = merge_spectra(&[a, c], 1e-8);
        assert_eq!(m.ks(), vec![1.0, PI, 3.5]);
    }

    #[test]
    fn compare_examples() {
        let circle: Vec<Root> = (1..=9).map(|m| root(2.0 * PI * m as f64 / 3.0, 2, "c")).collect();
        let circle = Spectrum::new(circle, 20.0, 1e-10);
        let same = compare_spectra(&circle, &circle, 1e-8);
        assert!(same.isospectral);
        assert_eq!(same.max_distance, 0.0);
        let interval: Vec<Root> = (1..=19).map(|m| root(PI * m as f64 / 3.0, 1, "i")).collect();
        let interval = Spectrum::new(interval, 20.0, 1e-10);
        assert!(!compare_spectra(&circle, &interval, 1e-8).isospectral);
    }

    #[test]
    fn weyl_examples() {
        let circle: Vec<Root> = (1..=9).map(|m| root(2.0 * PI * m as f64 / 3.0, 2, "c")).collect();
        let circle = Spectrum::new(circle, 20.0, 1e-10);
        let r = weyl_count_check(&circle, 20.0, 3.0, 4.0);
        assert_eq!(r.count, 18);
        assert!(r.ok);
        let interval = Spectrum::new((1..=3).map(|m| root(PI * m as f64, 1, "i")).collect(), 10.0, 1e-10);
        let r = weyl_count_check(&interval, 10.0, 1.0, 3.0);
        assert_eq!(r.count, 3);
        assert!(r.ok);
        let empty = Spectrum::new(Vec::new(), 100.0, 1e-10);
        assert!(!weyl_count_check(&empty, 100.0, 3.0, 4.0).ok);
    }

    fn separated_spectrum(seeds: &[u32], offset: f64) -> Spectrum {
        let roots = seeds
            .iter()
            .enumerate()
            .map(|(i, &m)| root(offset + i as f64 + (m % 100) as f64 * 1e-3, 1 + (m % 3) as usize, "p"))
            .collect();
        Spectrum::new(roots, 100.0, 1e-10)
    }

    fn same_multiset(x: &Spectrum, y: &Spectrum) -> bool {
        x.len() == y.len()
            && x.roots.iter().zip(&y.roots).all(|(a, b)| (a.k - b.k).abs() < 1e-12 && a.order == b.order)
    }

    proptest! {
        #[test]
        fn merge_commutes_and_associates(
            a in proptest::collection::vec(any::<u32>(), 0..10),
            b in proptest::collection::vec(any::<u32>(), 0..10),
            c in proptest::collection::vec(any::<u32>(), 0..10),
        ) {
            // roots from each list sit near integers (plus 0.0, 0.3, 0.6), so coalescing never chains
            let (sa, sb, sc) = (separated_spectrum(&a, 0.0), separated_spectrum(&b, 0.3), separated_spectrum(&c, 0.6));
            let tol = 1e-7;
            let ab = merge_spectra(&[sa.clone(), sb.clone()], tol);
            let ba = merge_spectra(&[sb.clone(), sa.clone()], tol);
            prop_assert!(same_multiset(&ab, &ba));
            let left = merge_spectra(&[ab, sc.clone()], tol);
            let right = merge_spectra(&[sa, merge_spectra(&[sb, sc], tol)], tol);
            prop_assert!(same_multiset(&left, &right));
        }

        #[test]
        fn merge_of_equal_roots_sums_orders(k in 0.1f64..50.0, o1 in 1usize..4, o2 in 1usize..4) {
            let a = Spectrum::new(vec![root(k, o1, "a")], 60.0, 1e-10);
            let b = Spectrum::new(vec![root(k, o2, "b")], 60.0, 1e-10);
            let m = merge_spectra(&[a, b], 1e-8);
            prop_assert_eq!(m.len(), 1);
            prop_assert_eq!(m.roots[0].order, o1 + o2);
        }
    }
}
