//! C ABI for `qgraph`.
//!
//! Objects are opaque handles created by `qg_*_new`-style constructors and released with
//! the matching `qg_*_free`. Every fallible call returns a [`QgStatus`]; on failure the
//! message is kept per thread and can be fetched with [`qg_last_error_message`].
//! Panics never cross the boundary: they surface as [`QgStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use num_complex::Complex64;
use qgraph::builders::{circulant_graph, cycle_graph, torus_action};
use qgraph::condition::VertexCondition;
use qgraph::graph::MetricGraph;
use qgraph::io::GraphDocument;
use qgraph::quotient::{merged_factor_spectrum, quotient_graph, quotient_secular_closed, PhasePairing, QuotientSpec};
use qgraph::scattering::{build_secular_system, SecularSystem};
use qgraph::spectral::{compare_spectra, find_roots_modulus, ScanOptions, Spectrum};
use qgraph::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QgStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad numeric argument, tolerance or scan option.
    InvalidArgument = 2,
    /// Malformed graph: lengths, endpoints, degrees, orders, jumps.
    InvalidGraph = 3,
    /// Vertex conditions missing, unsupported or inconsistent.
    InvalidCondition = 4,
    /// Group-theoretic input rejected (labels, coprimality, actions).
    InvalidSymmetry = 5,
    /// The scan grid could not separate nearby roots.
    GridTooCoarse = 6,
    /// Unparsable JSON document or unsupported format version.
    Document = 7,
    /// Index past the end of a spectrum.
    OutOfRange = 8,
    /// Internal failure; the message holds the panic payload.
    Panic = 9,
}

/// A metric graph together with optional vertex conditions (standard when absent).
pub struct QgGraph {
    graph: MetricGraph,
    conditions: Option<Vec<VertexCondition>>,
}

/// An assembled secular system `det(I - S D(k))`.
pub struct QgSystem(SecularSystem);

/// A sorted list of roots with multiplicities.
pub struct QgSpectrum(Spectrum);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> QgStatus {
    use Error::*;
    match e {
        NonPositiveLength { .. } | DanglingEndpoint { .. } | LoopEdge { .. } | ParallelEdge { .. } | ZeroDegree
        | InvalidOrder(_) | JumpOutOfRange { .. } | DuplicateJump { .. } | LengthMismatch { .. } => {
            QgStatus::InvalidGraph
        }
        NonUnitPhase { .. } | MissingCondition { .. } | UnsupportedCondition { .. } => QgStatus::InvalidCondition,
        LabelOutOfRange { .. } | NotCoprime { .. } | ZeroOrder | InvalidAction(_) | NotTransitive(_)
        | CoverageGap(_) | IsomorphismCheckFailed(_) | OrientationMismatch(_) => QgStatus::InvalidSymmetry,
        GridTooCoarse { .. } => QgStatus::GridTooCoarse,
        InvalidArgument(_) => QgStatus::InvalidArgument,
        Document(_) | Io(_) => QgStatus::Document,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (QgStatus, String)>) -> QgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            QgStatus::Panic
        }
    }
}

fn lift<T>(r: qgraph::Result<T>) -> Result<T, (QgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (QgStatus, String) {
    (QgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (QgStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QgStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn array<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (QgStatus, String)> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(slice::from_raw_parts(p, len))
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn pairing(swap: bool) -> PhasePairing {
    if swap {
        PhasePairing::Swapped
    } else {
        PhasePairing::AsPrinted
    }
}

fn scan(k_max: f64, grid_step: f64, tol: f64) -> Result<ScanOptions, (QgStatus, String)> {
    let mut opts = ScanOptions::new(k_max, grid_step);
    opts.tol = tol;
    lift(opts.validate())?;
    Ok(opts)
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Graph on `vertex_count` vertices with edges `(u[i], v[i], lengths[i])`.
///
/// # Safety
/// `u`, `v` and `lengths` must each point to `edge_count` elements; `out_graph` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_new(
    vertex_count: usize,
    u: *const usize,
    v: *const usize,
    lengths: *const f64,
    edge_count: usize,
    out_graph: *mut *mut QgGraph,
) -> QgStatus {
    guard(|| {
        let out_graph = out(out_graph, "out_graph")?;
        let (u, v, l) = (
            array(u, edge_count, "u")?,
            array(v, edge_count, "v")?,
            array(lengths, edge_count, "lengths")?,
        );
        let edges: Vec<_> = (0..edge_count).map(|i| (u[i], v[i], l[i])).collect();
        let graph = lift(MetricGraph::new(vertex_count, &edges))?;
        *out_graph = boxed(QgGraph { graph, conditions: None });
        Ok(())
    })
}

/// Cycle `C_n` with every edge of length `length`.
///
/// # Safety
/// `out_graph` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_cycle(n: usize, length: f64, out_graph: *mut *mut QgGraph) -> QgStatus {
    guard(|| {
        let out_graph = out(out_graph, "out_graph")?;
        let graph = lift(cycle_graph(n, length))?.graph;
        *out_graph = boxed(QgGraph { graph, conditions: None });
        Ok(())
    })
}

/// Circulant `C_n(jumps)`, with `lengths[i]` on the jump-`jumps[i]` edges.
///
/// # Safety
/// `jumps` and `lengths` must point to `count` elements; `out_graph` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_circulant(
    n: usize,
    jumps: *const usize,
    lengths: *const f64,
    count: usize,
    out_graph: *mut *mut QgGraph,
) -> QgStatus {
    guard(|| {
        let out_graph = out(out_graph, "out_graph")?;
        let graph = lift(circulant_graph(n, array(jumps, count, "jumps")?, array(lengths, count, "lengths")?))?.graph;
        *out_graph = boxed(QgGraph { graph, conditions: None });
        Ok(())
    })
}

/// Torus `C_n1 x C_n2` with edge lengths `2 l3` (first factor) and `2 l1` (second),
/// optionally with a dummy vertex at every edge midpoint.
///
/// # Safety
/// `out_graph` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_torus(
    n1: usize,
    n2: usize,
    l1: f64,
    l3: f64,
    subdivided: bool,
    out_graph: *mut *mut QgGraph,
) -> QgStatus {
    guard(|| {
        let out_graph = out(out_graph, "out_graph")?;
        let t = lift(torus_action(n1, n2, l1, l3))?;
        let graph = if subdivided { t.subdivided.graph } else { t.product.graph };
        *out_graph = boxed(QgGraph { graph, conditions: None });
        Ok(())
    })
}

/// Quotient graph for the label `(s, t)`, carrying its quasi-periodic conditions.
///
/// # Safety
/// `out_graph` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_quotient(
    n1: usize,
    n2: usize,
    l1: f64,
    l3: f64,
    s: usize,
    t: usize,
    swap_pairing: bool,
    out_graph: *mut *mut QgGraph,
) -> QgStatus {
    guard(|| {
        let out_graph = out(out_graph, "out_graph")?;
        let spec = lift(QuotientSpec::new(n1, n2, l1, l3, s, t))?.with_pairing(pairing(swap_pairing));
        let q = lift(quotient_graph(&spec))?;
        *out_graph = boxed(QgGraph { graph: q.graph, conditions: Some(q.conditions) });
        Ok(())
    })
}

/// Parses a graph document (UTF-8 JSON).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_graph` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_from_json(json: *const c_char, out_graph: *mut *mut QgGraph) -> QgStatus {
    guard(|| {
        let out_graph = out(out_graph, "out_graph")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (QgStatus::Document, format!("document is not UTF-8: {e}")))?;
        let parts = lift(GraphDocument::from_json(text).and_then(|d| d.parts()))?;
        *out_graph = boxed(QgGraph { graph: parts.graph, conditions: parts.conditions });
        Ok(())
    })
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_vertex_count(graph: *const QgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.vertex_count())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_edge_count(graph: *const QgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// Sum of all edge lengths, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_total_length(graph: *const QgGraph) -> f64 {
    graph.as_ref().map_or(0.0, |g| g.graph.total_length())
}

/// # Safety
/// `graph` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qg_graph_free(graph: *mut QgGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Assembles `I - S D(k)` for the graph's own conditions, or standard ones if it has none.
///
/// # Safety
/// `graph` must be a live handle; `out_system` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_system_new(graph: *const QgGraph, out_system: *mut *mut QgSystem) -> QgStatus {
    guard(|| {
        let out_system = out(out_system, "out_system")?;
        let g = input(graph, "graph")?;
        let conditions = match &g.conditions {
            Some(c) => c.clone(),
            None => lift(VertexCondition::all_standard(&g.graph))?,
        };
        *out_system = boxed(QgSystem(lift(build_secular_system(&g.graph, &conditions))?));
        Ok(())
    })
}

/// Number of bonds (twice the edge count), or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qg_system_bond_count(system: *const QgSystem) -> usize {
    system.as_ref().map_or(0, |s| s.0.bond_count())
}

/// `det(I - S D(k))` at complex `k`.
///
/// # Safety
/// `system` must be a live handle; `out_re` and `out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_system_det(
    system: *const QgSystem,
    k_re: f64,
    k_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> QgStatus {
    guard(|| {
        let (re, im) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let d = input(system, "system")?.0.det(Complex64::new(k_re, k_im));
        (*re, *im) = (d.re, d.im);
        Ok(())
    })
}

/// # Safety
/// `system` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qg_system_free(system: *mut QgSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Closed-form quotient determinant `Sigma_{s,t}(k)`.
///
/// # Safety
/// `out_re` and `out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_quotient_secular(
    n1: usize,
    n2: usize,
    l1: f64,
    l3: f64,
    s: usize,
    t: usize,
    swap_pairing: bool,
    k_re: f64,
    k_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> QgStatus {
    guard(|| {
        let (re, im) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let spec = lift(QuotientSpec::new(n1, n2, l1, l3, s, t))?.with_pairing(pairing(swap_pairing));
        let d = quotient_secular_closed(&spec, Complex64::new(k_re, k_im));
        (*re, *im) = (d.re, d.im);
        Ok(())
    })
}

/// Roots of a system's determinant on `(0, k_max]`, scanned with step `grid_step`.
///
/// # Safety
/// `system` must be a live handle; `out_spectrum` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_full(
    system: *const QgSystem,
    k_max: f64,
    grid_step: f64,
    tol: f64,
    out_spectrum: *mut *mut QgSpectrum,
) -> QgStatus {
    guard(|| {
        let out_spectrum = out(out_spectrum, "out_spectrum")?;
        let sys = input(system, "system")?;
        let opts = scan(k_max, grid_step, tol)?;
        *out_spectrum = boxed(QgSpectrum(lift(find_roots_modulus(&sys.0, &opts))?));
        Ok(())
    })
}

/// Union of the roots of all `n1 n2` quotient factors, coalesced within `coalesce_tol`.
///
/// # Safety
/// `out_spectrum` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_factors(
    n1: usize,
    n2: usize,
    l1: f64,
    l3: f64,
    swap_pairing: bool,
    k_max: f64,
    grid_step: f64,
    tol: f64,
    coalesce_tol: f64,
    out_spectrum: *mut *mut QgSpectrum,
) -> QgStatus {
    guard(|| {
        let out_spectrum = out(out_spectrum, "out_spectrum")?;
        let opts = scan(k_max, grid_step, tol)?;
        if !(coalesce_tol.is_finite() && coalesce_tol >= 0.0) {
            return Err((QgStatus::InvalidArgument, format!("bad coalescing tolerance {coalesce_tol}")));
        }
        let s = lift(merged_factor_spectrum(n1, n2, l1, l3, pairing(swap_pairing), &opts, coalesce_tol))?;
        *out_spectrum = boxed(QgSpectrum(s));
        Ok(())
    })
}

/// Number of distinct roots, or 0 for a null handle.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_len(spectrum: *const QgSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.0.len())
}

/// Sum of root multiplicities, or 0 for a null handle.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_total_order(spectrum: *const QgSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.0.total_order())
}

/// The `index`-th root (increasing `k`) and its multiplicity.
///
/// # Safety
/// `spectrum` must be a live handle; `out_k` and `out_order` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_get(
    spectrum: *const QgSpectrum,
    index: usize,
    out_k: *mut f64,
    out_order: *mut usize,
) -> QgStatus {
    guard(|| {
        let (k, order) = (out(out_k, "out_k")?, out(out_order, "out_order")?);
        let s = input(spectrum, "spectrum")?;
        let r = s.0.roots.get(index).ok_or_else(|| {
            (QgStatus::OutOfRange, format!("index {index} out of range for {} roots", s.0.len()))
        })?;
        (*k, *order) = (r.k, r.order);
        Ok(())
    })
}

/// Matches the multiplicity-expanded root lists within `tol`.
///
/// # Safety
/// `a` and `b` must be live handles; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_spectra_compare(
    a: *const QgSpectrum,
    b: *const QgSpectrum,
    tol: f64,
    out_isospectral: *mut bool,
    out_max_distance: *mut f64,
) -> QgStatus {
    guard(|| {
        let (iso, dist) = (out(out_isospectral, "out_isospectral")?, out(out_max_distance, "out_max_distance")?);
        let c = compare_spectra(&input(a, "a")?.0, &input(b, "b")?.0, tol);
        (*iso, *dist) = (c.isospectral, c.max_distance);
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qg_spectrum_free(spectrum: *mut QgSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}
