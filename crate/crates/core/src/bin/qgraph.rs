//! `qgraph`: build symmetric quantum graphs, compute their secular spectra, and compare
//! them with the spectra of the quotient factors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use qgraph::builders::{circulant_graph, cycle_graph, torus_action};
use qgraph::condition::VertexCondition;
use qgraph::decompose::{decompose, l2_norm_sq, SampledFunction};
use qgraph::io::{fmt_float, read_spectrum_csv, write_columns_csv, write_spectrum_csv, GraphDocument};
use qgraph::quotient::{factor_spectra, quotient_graph, PhasePairing, QuotientSpec};
use qgraph::scattering::build_secular_system;
use qgraph::spectral::{compare_spectra, default_grid_step, find_roots_modulus, ScanOptions, Spectrum, DEFAULT_COALESCE_TOL, DEFAULT_TOL};
use qgraph::{Error, Result};

#[derive(Parser)]
#[command(name = "qgraph", version, about = "Spectra of quantum graphs with cyclic symmetry")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Upper end of the k interval (0, kmax]
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = 10.0)]
    kmax: f64,
    /// Scan grid step in k; defaults to the shortest edge length / 50
    #[arg(long, global = true, allow_negative_numbers = true)]
    grid: Option<f64>,
    /// Root refinement tolerance in k
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output format for results (graph documents are always JSON)
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph document
    #[command(subcommand)]
    Build(Build),
    /// Roots of det(I - S D(k)) for a graph document
    Spectrum {
        /// Graph document (JSON); standard conditions are used where none are given
        graph: PathBuf,
    },
    /// Roots of every quotient factor Sigma_{s,t} of the torus C_n1 x C_n2, labelled (s,t)
    Factors {
        #[command(flatten)]
        torus: TorusArgs,
        /// Attach omega_1^s to the L1 edges and omega_2^t to the L3 edges instead
        #[arg(long)]
        swap_pairing: bool,
        /// Emit the merged union instead of one row per factor root
        #[arg(long)]
        merged: bool,
    },
    /// Compare two spectrum CSV files
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Largest distance at which two roots are paired
        #[arg(long = "match-tol", default_value_t = 1e-8)]
        match_tol: f64,
    },
    /// Decompose a random function on the subdivided torus into irrep components
    Project {
        #[command(flatten)]
        torus: TorusArgs,
        /// Samples per edge
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only emit this label's component (requires --t)
        #[arg(long, requires = "t")]
        s: Option<usize>,
        #[arg(long, requires = "s")]
        t: Option<usize>,
    },
    /// Plot data (k, |det(I - S D(k))|) on the scan grid
    Scan {
        graph: PathBuf,
    },
}

#[derive(Args, Clone, Copy)]
struct TorusArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    /// Half-length of the edges moved by g2 (quotient edge length L1)
    #[arg(long, allow_negative_numbers = true)]
    l1: f64,
    /// Half-length of the edges moved by g1 (quotient edge length L3)
    #[arg(long, allow_negative_numbers = true)]
    l3: f64,
}

#[derive(Subcommand)]
enum Build {
    /// Cycle C_n with rotation action
    Cycle {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        len: f64,
    },
    /// Circulant graph C_n(jumps) with rotation action
    Circulant {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        jumps: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        lens: Vec<f64>,
    },
    /// Torus C_n1 x C_n2 (edges of length 2 L1 and 2 L3) with translation action
    Product {
        #[command(flatten)]
        torus: TorusArgs,
        /// Insert a dummy vertex at every edge midpoint
        #[arg(long)]
        subdivide: bool,
    },
    /// Quotient graph for the irrep (s, t), with its quasi-periodic conditions
    Quotient {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        swap_pairing: bool,
    },
}

fn pairing(swap: bool) -> PhasePairing {
    if swap {
        PhasePairing::Swapped
    } else {
        PhasePairing::AsPrinted
    }
}

fn emit(global: &Global, bytes: &[u8]) -> Result<()> {
    match &global.output {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn scan_options(global: &Global, min_length: f64) -> ScanOptions {
    let mut opts = ScanOptions::new(global.kmax, global.grid.unwrap_or_else(|| default_grid_step(min_length)));
    opts.tol = global.tol;
    opts
}

fn spectrum_output(global: &Global, spectrum: &Spectrum, meta: &[(&str, String)]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match global.format {
        Format::Csv => write_spectrum_csv(spectrum, meta, &mut buf)?,
        Format::Json => {
            let meta: serde_json::Map<_, _> = meta.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            let value = json!({ "metadata": meta, "spectrum": spectrum });
            buf = serde_json::to_vec_pretty(&value).map_err(|e| Error::Io(e.to_string()))?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

fn load_system(path: &Path) -> Result<(qgraph::scattering::SecularSystem, f64)> {
    let parts = GraphDocument::from_json(&read(path)?)?.parts()?;
    let conditions = match parts.conditions {
        Some(c) => c,
        None => VertexCondition::all_standard(&parts.graph)?,
    };
    let min_length = parts.graph.lengths().into_iter().fold(f64::INFINITY, f64::min);
    Ok((build_secular_system(&parts.graph, &conditions)?, min_length))
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.command {
        Command::Build(b) => {
            let doc = match b {
                Build::Cycle { n, len } => {
                    let c = cycle_graph(n, len)?;
                    if c.multigraph {
                        eprintln!("warning: C_{n} has loops or parallel edges");
                    }
                    GraphDocument::new(&c.graph, None, Some(&c.action))
                }
                Build::Circulant { n, jumps, lens } => {
                    let c = circulant_graph(n, &jumps, &lens)?;
                    GraphDocument::new(&c.graph, None, Some(&c.action))
                }
                Build::Product { torus, subdivide } => {
                    let t = torus_action(torus.n1, torus.n2, torus.l1, torus.l3)?;
                    let sg = if subdivide { &t.subdivided } else { &t.product };
                    GraphDocument::new(&sg.graph, None, Some(&sg.action))
                }
                Build::Quotient { torus, s, t, swap_pairing } => {
                    let spec = QuotientSpec::new(torus.n1, torus.n2, torus.l1, torus.l3, s, t)?
                        .with_pairing(pairing(swap_pairing));
                    let q = quotient_graph(&spec)?;
                    GraphDocument::new(&q.graph, Some(&q.conditions), None)
                }
            };
            emit(g, doc.to_json().as_bytes())
        }
        Command::Spectrum { graph } => {
            let (sys, min_length) = load_system(&graph)?;
            let opts = scan_options(g, min_length);
            let s = find_roots_modulus(&sys, &opts)?.with_source("full");
            let meta = [("grid", fmt_float(opts.grid_step)), ("source", graph.display().to_string())];
            emit(g, &spectrum_output(g, &s, &meta)?)
        }
        Command::Factors { torus, swap_pairing, merged } => {
            let opts = scan_options(g, torus.l1.min(torus.l3));
            let spectra = factor_spectra(torus.n1, torus.n2, torus.l1, torus.l3, pairing(swap_pairing), &opts)?;
            let s = if merged {
                qgraph::spectral::merge_spectra(&spectra, DEFAULT_COALESCE_TOL)
            } else {
                let roots = spectra.iter().flat_map(|s| s.roots.iter().cloned()).collect();
                Spectrum::new(roots, opts.k_max, opts.tol)
            };
            let meta = [
                ("grid", fmt_float(opts.grid_step)),
                ("n1", torus.n1.to_string()),
                ("n2", torus.n2.to_string()),
                ("l1", fmt_float(torus.l1)),
                ("l3", fmt_float(torus.l3)),
                ("pairing", format!("{:?}", pairing(swap_pairing))),
            ];
            emit(g, &spectrum_output(g, &s, &meta)?)
        }
        Command::Compare { a, b, match_tol } => {
            let sa = read_spectrum_csv(read(&a)?.as_bytes())?;
            let sb = read_spectrum_csv(read(&b)?.as_bytes())?;
            let report = compare_spectra(&sa, &sb, match_tol);
            let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            text.push('\n');
            emit(g, text.as_bytes())
        }
        Command::Project { torus, samples, seed, s, t } => {
            let tor = torus_action(torus.n1, torus.n2, torus.l1, torus.l3)?;
            let (graph, action) = (&tor.subdivided.graph, &tor.subdivided.action);
            let f = SampledFunction::random(graph, samples, seed)?;
            let parts = decompose(&f, action)?;
            let total: f64 = parts.iter().map(|(_, p)| l2_norm_sq(p)).sum();
            eprintln!(
                "norm^2 of f: {}, sum over components: {}",
                fmt_float(l2_norm_sq(&f)),
                fmt_float(total)
            );
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(["s", "t", "edge", "x", "re", "im"]).map_err(io)?;
            for (irrep, part) in &parts {
                if let (Some(s), Some(t)) = (s, t) {
                    if (irrep.s, irrep.t) != (s, t) {
                        continue;
                    }
                }
                for e in 0..part.edge_count() {
                    for (x, z) in part.positions(e).iter().zip(part.edge_samples(e)) {
                        let z: &Complex64 = z;
                        w.write_record([
                            irrep.s.to_string(),
                            irrep.t.to_string(),
                            e.to_string(),
                            fmt_float(*x),
                            fmt_float(z.re),
                            fmt_float(z.im),
                        ])
                        .map_err(io)?;
                    }
                }
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            emit(g, &bytes)
        }
        Command::Scan { graph } => {
            let (sys, min_length) = load_system(&graph)?;
            let opts = scan_options(g, min_length);
            opts.validate()?;
            let n = (opts.k_max / opts.grid_step).ceil() as usize;
            let rows: Vec<(f64, f64)> = (1..=n)
                .map(|i| {
                    let k = (i as f64 * opts.grid_step).min(opts.k_max);
                    (k, sys.det(Complex64::new(k, 0.0)).norm())
                })
                .collect();
            let mut buf = Vec::new();
            write_columns_csv(["k", "abs_sigma"], &rows, &mut buf)?;
            emit(g, &buf)
        }
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail("InvalidArgument", e.to_string().trim());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
