//! Persistence: graph documents as versioned JSON, spectra and plot data as CSV.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::condition::{CMatrix, ConditionKind, VertexCondition};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeEnd, MetricGraph, Vertex, VertexTag};
use crate::spectral::{Root, Spectrum};
use crate::symmetry::{validate_action, Generator, GraphAction};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: usize,
    #[serde(flatten)]
    pub tag: VertexTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// Vertex condition; complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionDoc {
    Standard {
        vertex: usize,
        slots: Vec<EdgeEnd>,
    },
    QuasiPeriodic {
        vertex: usize,
        slots: Vec<EdgeEnd>,
        phase: [f64; 2],
    },
    General {
        vertex: usize,
        slots: Vec<EdgeEnd>,
        a: Vec<Vec<[f64; 2]>>,
        b: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub preserves_orientation: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub orders: [usize; 2],
    pub generators: [GeneratorDoc; 2],
}

/// JSON form of a graph with optional vertex conditions and group action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format_version: u32,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<ConditionDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionDoc>,
}

/// Parsed contents of a [`GraphDocument`].
#[derive(Debug, Clone)]
pub struct GraphParts {
    pub graph: MetricGraph,
    pub conditions: Option<Vec<VertexCondition>>,
    pub action: Option<GraphAction>,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn matrix_doc(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect())
        .collect()
}

fn matrix_from_doc(rows: &[Vec<[f64; 2]>], cols: usize) -> Result<CMatrix> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Document(format!("condition matrix rows must have {cols} entries")));
    }
    Ok(CMatrix::from_fn(rows.len(), cols, |r, c| complex(rows[r][c])))
}

fn generator_doc(g: &Generator) -> GeneratorDoc {
    GeneratorDoc {
        vertex_perm: g.vertex_perm.clone(),
        edge_perm: g.edge_perm.clone(),
        preserves_orientation: g.preserves_orientation.clone(),
    }
}

impl GraphDocument {
    pub fn new(
        graph: &MetricGraph,
        conditions: Option<&[VertexCondition]>,
        action: Option<&GraphAction>,
    ) -> Self {
        let vertices = graph
            .vertices()
            .iter()
            .map(|v| VertexDoc { id: v.id, tag: v.tag })
            .collect();
        let edges = graph
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.id,
                u: e.u,
                v: e.v,
                length: e.length,
            })
            .collect();
        let conditions = conditions.map(|cs| {
            cs.iter()
                .map(|c| {
                    let (vertex, slots) = (c.vertex, c.slots.clone());
                    match &c.kind {
                        ConditionKind::Standard => ConditionDoc::Standard { vertex, slots },
                        ConditionKind::QuasiPeriodic { phase } => ConditionDoc::QuasiPeriodic {
                            vertex,
                            slots,
                            phase: pair(*phase),
                        },
                        ConditionKind::General { a, b } => ConditionDoc::General {
                            vertex,
                            slots,
                            a: matrix_doc(a),
                            b: matrix_doc(b),
                        },
                    }
                })
                .collect()
        });
        let action = action.map(|a| {
            let (n1, n2) = a.orders();
            let [g1, g2] = a.generators();
            ActionDoc {
                orders: [n1, n2],
                generators: [generator_doc(g1), generator_doc(g2)],
            }
        });
        GraphDocument {
            format_version: FORMAT_VERSION,
            vertices,
            edges,
            conditions,
            action,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    /// Validates the document and builds the graph, conditions and action.
    pub fn parts(&self) -> Result<GraphParts> {
        let vertices = self.vertices.iter().map(|v| Vertex { id: v.id, tag: v.tag }).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id,
                u: e.u,
                v: e.v,
                length: e.length,
            })
            .collect();
        let graph = MetricGraph::from_parts(vertices, edges)?;

        let conditions = match &self.conditions {
            None => None,
            Some(cs) => Some(
                cs.iter()
                    .map(|c| {
                        let cond = match c {
                            ConditionDoc::Standard { vertex, slots } => VertexCondition {
                                vertex: *vertex,
                                slots: slots.clone(),
                                kind: ConditionKind::Standard,
                            },
                            ConditionDoc::QuasiPeriodic { vertex, slots, phase } => {
                                if slots.len() != 2 {
                                    return Err(Error::Document(format!(
                                        "quasi-periodic condition at vertex {vertex} needs two slots"
                                    )));
                                }
                                VertexCondition::quasi_periodic(*vertex, slots[0], slots[1], complex(*phase))?
                            }
                            ConditionDoc::General { vertex, slots, a, b } => VertexCondition {
                                vertex: *vertex,
                                slots: slots.clone(),
                                kind: ConditionKind::General {
                                    a: matrix_from_doc(a, slots.len())?,
                                    b: matrix_from_doc(b, slots.len())?,
                                },
                            },
                        };
                        if cond.vertex >= graph.vertex_count() {
                            return Err(Error::Document(format!(
                                "condition refers to vertex {} of {}",
                                cond.vertex,
                                graph.vertex_count()
                            )));
                        }
                        cond.check_against(&graph)?;
                        Ok(cond)
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };

        let action = match &self.action {
            None => None,
            Some(a) => {
                let gen = |g: &GeneratorDoc| Generator {
                    vertex_perm: g.vertex_perm.clone(),
                    edge_perm: g.edge_perm.clone(),
                    preserves_orientation: g.preserves_orientation.clone(),
                };
                let action = GraphAction::product(
                    &graph,
                    (a.orders[0], a.orders[1]),
                    gen(&a.generators[0]),
                    gen(&a.generators[1]),
                )?;
                validate_action(&graph, &action).into_result()?;
                Some(action)
            }
        };
        Ok(GraphParts {
            graph,
            conditions,
            action,
        })
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a spectrum as CSV: `#`-prefixed `key=value` metadata lines, the header
/// `k,lambda,order,source_label`, then one row per root in non-decreasing `k`. Multiple
/// sources are joined with `;`.
pub fn write_spectrum_csv(
    spectrum: &Spectrum,
    meta: &[(&str, String)],
    out: impl Write,
) -> Result<()> {
    let mut out = out;
    writeln!(out, "# k_max={}", fmt_float(spectrum.k_max))?;
    writeln!(out, "# tol={}", fmt_float(spectrum.tol))?;
    for (key, value) in meta {
        writeln!(out, "# {key}={value}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["k", "lambda", "order", "source_label"]).map_err(io)?;
    for r in &spectrum.roots {
        w.write_record([
            fmt_float(r.k),
            fmt_float(r.k * r.k),
            r.order.to_string(),
            r.sources.join(";"),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses [`write_spectrum_csv`] output. `k_max` and `tol` are taken from the metadata
/// lines when present.
pub fn read_spectrum_csv(input: impl Read) -> Result<Spectrum> {
    let mut text = String::new();
    let mut input = input;
    input.read_to_string(&mut text)?;
    let mut k_max = None;
    let mut tol = 0.0;
    for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
        if let Some((key, value)) = line.trim().split_once('=') {
            let parsed = value.trim().parse::<f64>();
            match (key.trim(), parsed) {
                ("k_max", Ok(v)) => k_max = Some(v),
                ("tol", Ok(v)) => tol = v,
                _ => {}
            }
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let doc = |e: csv::Error| Error::Document(e.to_string());
    let headers = reader.headers().map_err(doc)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Document(format!("missing column {name}")))
    };
    let (ck, co, cs) = (col("k")?, col("order")?, col("source_label")?);
    let mut roots = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for rec in reader.records() {
        let rec = rec.map_err(doc)?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
        let k: f64 = field(ck).parse().map_err(|_| Error::Document(format!("bad k value {:?}", field(ck))))?;
        let order: usize = field(co)
            .parse()
            .map_err(|_| Error::Document(format!("bad order {:?}", field(co))))?;
        if k < last {
            return Err(Error::Document("rows must be sorted by non-decreasing k".into()));
        }
        last = k;
        let sources = field(cs)
            .split(';')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        roots.push(Root { k, order, sources });
    }
    let k_max = k_max.unwrap_or_else(|| roots.last().map_or(0.0, |r| r.k));
    Ok(Spectrum::new(roots, k_max, tol))
}

/// Writes two-column plot data with the given header.
pub fn write_columns_csv(header: [&str; 2], rows: &[(f64, f64)], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for (a, b) in rows {
        w.write_record([fmt_float(*a), fmt_float(*b)]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
