/* C interface to the qgraph quantum-graph library. */

#ifndef QGRAPH_H
#define QGRAPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum QgStatus {
  QG_STATUS_OK = 0,
  QG_STATUS_NULL_POINTER = 1,
  // Bad numeric argument, tolerance or scan option.
  QG_STATUS_INVALID_ARGUMENT = 2,
  // Malformed graph: lengths, endpoints, degrees, orders, jumps.
  QG_STATUS_INVALID_GRAPH = 3,
  // Vertex conditions missing, unsupported or inconsistent.
  QG_STATUS_INVALID_CONDITION = 4,
  // Group-theoretic input rejected (labels, coprimality, actions).
  QG_STATUS_INVALID_SYMMETRY = 5,
  // The scan grid could not separate nearby roots.
  QG_STATUS_GRID_TOO_COARSE = 6,
  // Unparsable JSON document or unsupported format version.
  QG_STATUS_DOCUMENT = 7,
  // Index past the end of a spectrum.
  QG_STATUS_OUT_OF_RANGE = 8,
  // Internal failure; the message holds the panic payload.
  QG_STATUS_PANIC = 9,
} QgStatus;

// A metric graph together with optional vertex conditions (standard when absent).
typedef struct QgGraph QgGraph;

// A sorted list of roots with multiplicities.
typedef struct QgSpectrum QgSpectrum;

// An assembled secular system `det(I - S D(k))`.
typedef struct QgSystem QgSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len - 1` bytes) and returns the full message length in bytes.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t qg_last_error_message(char *buf, size_t len);

// Graph on `vertex_count` vertices with edges `(u[i], v[i], lengths[i])`.
//
// # Safety
// `u`, `v` and `lengths` must each point to `edge_count` elements; `out_graph` must be valid.
enum QgStatus qg_graph_new(size_t vertex_count,
                           const size_t *u,
                           const size_t *v,
                           const double *lengths,
                           size_t edge_count,
                           struct QgGraph **out_graph);

// Cycle `C_n` with every edge of length `length`.
//
// # Safety
// `out_graph` must be valid.
enum QgStatus qg_graph_cycle(size_t n, double length, struct QgGraph **out_graph);

// Circulant `C_n(jumps)`, with `lengths[i]` on the jump-`jumps[i]` edges.
//
// # Safety
// `jumps` and `lengths` must point to `count` elements; `out_graph` must be valid.
enum QgStatus qg_graph_circulant(size_t n,
                                 const size_t *jumps,
                                 const double *lengths,
                                 size_t count,
                                 struct QgGraph **out_graph);

// Torus `C_n1 x C_n2` with edge lengths `2 l3` (first factor) and `2 l1` (second),
// optionally with a dummy vertex at every edge midpoint.
//
// # Safety
// `out_graph` must be valid.
enum QgStatus qg_graph_torus(size_t n1,
                             size_t n2,
                             double l1,
                             double l3,
                             bool subdivided,
                             struct QgGraph **out_graph);

// Quotient graph for the label `(s, t)`, carrying its quasi-periodic conditions.
//
// # Safety
// `out_graph` must be valid.
enum QgStatus qg_graph_quotient(size_t n1,
                                size_t n2,
                                double l1,
                                double l3,
                                size_t s,
                                size_t t,
                                bool swap_pairing,
                                struct QgGraph **out_graph);

// Parses a graph document (UTF-8 JSON).
//
// # Safety
// `json` must be a NUL-terminated string; `out_graph` must be valid.
enum QgStatus qg_graph_from_json(const char *json, struct QgGraph **out_graph);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t qg_graph_vertex_count(const struct QgGraph *graph);

// Number of edges, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
size_t qg_graph_edge_count(const struct QgGraph *graph);

// Sum of all edge lengths, or 0 for a null handle.
//
// # Safety
// `graph` must be null or a live handle.
double qg_graph_total_length(const struct QgGraph *graph);

// # Safety
// `graph` must be null or a handle not yet freed.
void qg_graph_free(struct QgGraph *graph);

// Assembles `I - S D(k)` for the graph's own conditions, or standard ones if it has none.
//
// # Safety
// `graph` must be a live handle; `out_system` must be valid.
enum QgStatus qg_system_new(const struct QgGraph *graph, struct QgSystem **out_system);

// Number of bonds (twice the edge count), or 0 for a null handle.
//
// # Safety
// `system` must be null or a live handle.
size_t qg_system_bond_count(const struct QgSystem *system);

// `det(I - S D(k))` at complex `k`.
//
// # Safety
// `system` must be a live handle; `out_re` and `out_im` must be valid.
enum QgStatus qg_system_det(const struct QgSystem *system,
                            double k_re,
                            double k_im,
                            double *out_re,
                            double *out_im);

// # Safety
// `system` must be null or a handle not yet freed.
void qg_system_free(struct QgSystem *system);

// Closed-form quotient determinant `Sigma_{s,t}(k)`.
//
// # Safety
// `out_re` and `out_im` must be valid.
enum QgStatus qg_quotient_secular(size_t n1,
                                  size_t n2,
                                  double l1,
                                  double l3,
                                  size_t s,
                                  size_t t,
                                  bool swap_pairing,
                                  double k_re,
                                  double k_im,
                                  double *out_re,
                                  double *out_im);

// Roots of a system's determinant on `(0, k_max]`, scanned with step `grid_step`.
//
// # Safety
// `system` must be a live handle; `out_spectrum` must be valid.
enum QgStatus qg_spectrum_full(const struct QgSystem *system,
                               double k_max,
                               double grid_step,
                               double tol,
                               struct QgSpectrum **out_spectrum);

// Union of the roots of all `n1 n2` quotient factors, coalesced within `coalesce_tol`.
//
// # Safety
// `out_spectrum` must be valid.
enum QgStatus qg_spectrum_factors(size_t n1,
                                  size_t n2,
                                  double l1,
                                  double l3,
                                  bool swap_pairing,
                                  double k_max,
                                  double grid_step,
                                  double tol,
                                  double coalesce_tol,
                                  struct QgSpectrum **out_spectrum);

// Number of distinct roots, or 0 for a null handle.
//
// # Safety
// `spectrum` must be null or a live handle.
size_t qg_spectrum_len(const struct QgSpectrum *spectrum);

// Sum of root multiplicities, or 0 for a null handle.
//
// # Safety
// `spectrum` must be null or a live handle.
size_t qg_spectrum_total_order(const struct QgSpectrum *spectrum);

// The `index`-th root (increasing `k`) and its multiplicity.
//
// # Safety
// `spectrum` must be a live handle; `out_k` and `out_order` must be valid.
enum QgStatus qg_spectrum_get(const struct QgSpectrum *spectrum,
                              size_t index,
                              double *out_k,
                              size_t *out_order);

// Matches the multiplicity-expanded root lists within `tol`.
//
// # Safety
// `a` and `b` must be live handles; the out pointers must be valid.
enum QgStatus qg_spectra_compare(const struct QgSpectrum *a,
                                 const struct QgSpectrum *b,
                                 double tol,
                                 bool *out_isospectral,
                                 double *out_max_distance);

// # Safety
// `spectrum` must be null or a handle not yet freed.
void qg_spectrum_free(struct QgSpectrum *spectrum);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QGRAPH_H */
