//! Command-line front end. `run` takes explicit streams so it can be driven
//! from tests.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifier::{classify, scan, verdict, ClassifyOptions, ScanRow, VerdictCertificate};
use crate::density::{density_matrix, is_ppt_with_tolerance, matrix_partial_transpose, DensityMatrix, Tier};
use crate::entangler::{entangle, SearchBudget};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labeling::{TensorShape, VertexLabeling};
use crate::pt_graph::{degree_report, partial_transpose_graph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCOMPLETE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lapsep", version, about = "Separability of normalized graph Laplacians under vertex labelings")]
struct Cli {
    #[command(flatten)]
    config: CliConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    /// Tensor shape, e.g. 2x3 or 2x2x2.
    #[arg(long, global = true, env = "LAPSEP_SHAPE")]
    shape: Option<String>,

    /// Band around zero in which the floating eigenvalue test defers to the exact test.
    #[arg(long = "tol", global = true, env = "LAPSEP_TOL", default_value_t = 1e-9)]
    tolerance: f64,

    /// Enumerate one labeling per symmetry orbit (default).
    #[arg(long, global = true, overrides_with = "full")]
    reduced: bool,

    /// Enumerate every labeling.
    #[arg(long, global = true, env = "LAPSEP_FULL")]
    full: bool,

    /// Labeling budget for fallback search and classification.
    #[arg(long, global = true, env = "LAPSEP_BUDGET", default_value_t = 1_000_000)]
    budget: u64,

    /// Worker threads for scans (default: available cores).
    #[arg(long, global = true, env = "LAPSEP_JOBS")]
    jobs: Option<usize>,

    /// Seed for randomized fallback search.
    #[arg(long, global = true, env = "LAPSEP_SEED", default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, env = "LAPSEP_FORMAT", value_enum, default_value_t = Format::Tsv)]
    format: Format,

    /// Report per-graph wall time in scan output.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verdict for one labeling.
    Check {
        graph6: String,
        /// Permutation line: flat tuple index of each vertex, e.g. "0 3 1 2".
        labeling: String,
    },
    /// Partial-transpose graph and degree table for each probed cut.
    PtGraph {
        graph6: String,
        labeling: String,
        /// Also print the density matrix and its partial transposes as rationals.
        #[arg(long)]
        matrix: bool,
    },
    /// Build an entangling labeling.
    Entangle { graph6: String },
    /// Class of a single graph.
    Classify { graph6: String },
    /// Classify graph6 lines from a file or stdin.
    Scan {
        /// Input file; stdin when omitted or "-".
        input: Option<String>,
    },
}

impl CliConfig {
    fn shape(&self) -> Result<TensorShape> {
        let s = self
            .shape
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("--shape is required (e.g. --shape 2x3)".into()))?;
        s.parse()
    }

    fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument(format!("--tol must be positive, got {}", self.tolerance)));
        }
        if self.budget == 0 {
            return Err(Error::InvalidArgument("--budget must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
        }
        Ok(())
    }

    fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions { reduced: !self.full, budget: Some(self.budget), ..ClassifyOptions::default() }
    }
}

/// Parse arguments, run one subcommand, and return the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match dispatch(&cli, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::SearchExhausted { exhaustive: false, .. } => EXIT_INCOMPLETE,
                _ => EXIT_INPUT,
            }
        }
    }
}

fn dispatch(cli: &Cli, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = &cli.config;
    cfg.validate()?;
    let shape = cfg.shape()?;
    match &cli.command {
        Command::Check { graph6, labeling } => {
            let g = Graph::from_graph6(graph6)?;
            let lab = VertexLabeling::parse_line(labeling, shape.clone())?;
            cmd_check(&g, &lab, &shape, cfg.tolerance, out)?;
            Ok(EXIT_OK)
        }
        Command::PtGraph { graph6, labeling, matrix } => {
            let g = Graph::from_graph6(graph6)?;
            let lab = VertexLabeling::parse_line(labeling, shape.clone())?;
            cmd_pt_graph(&g, &lab, &shape, *matrix, out)?;
            Ok(EXIT_OK)
        }
        Command::Entangle { graph6 } => {
            let g = Graph::from_graph6(graph6)?;
            let budget = SearchBudget { labelings: cfg.budget, seed: cfg.seed };
            cmd_entangle(&g, &shape, budget, cfg.tolerance, out)?;
            Ok(EXIT_OK)
        }
        Command::Classify { graph6 } => {
            let g = Graph::from_graph6(graph6)?;
            let start = std::time::Instant::now();
            let report = classify(&g, &shape, cfg.classify_options())?;
            let row = ScanRow {
                line_number: 1,
                input: graph6.trim().to_string(),
                result: Ok(report),
                elapsed_ms: start.elapsed().as_millis(),
            };
            write_row(&row, &shape, cfg, out)?;
            Ok(if row.is_incomplete() { EXIT_INCOMPLETE } else { EXIT_OK })
        }
        Command::Scan { input } => {
            let lines: Vec<String> = match input.as_deref() {
                None | Some("-") => stdin.lines().collect::<std::io::Result<_>>()?,
                Some(path) => BufReader::new(File::open(path)?)
                    .lines()
                    .collect::<std::io::Result<_>>()
                    ?,
            };
            cmd_scan(&lines, &shape, cfg, out, err)
        }
    }
}

fn cmd_check(
    g: &Graph,
    lab: &VertexLabeling,
    shape: &TensorShape,
    tolerance: f64,
    out: &mut dyn Write,
) -> Result<()> {
    let v = verdict(g, lab, shape)?;
    let rho = density_matrix(g, lab)?;
    writeln!(out, "graph\t{}", g.to_graph6()?)?;
    writeln!(out, "shape\t{shape}")?;
    writeln!(out, "labeling\t{}", lab.to_line())?;
    for cut in &v.cuts {
        let ppt = is_ppt_with_tolerance(&rho, &cut.split, tolerance)?;
        let tier = match ppt.decided_by {
            Tier::Float => "float",
            Tier::Exact => "exact",
        };
        writeln!(
            out,
            "cut\t{}\tdegree_condition={}\tppt={}\ttier={}\tlambda_min={:.6e}",
            cut.split.describe(),
            if cut.ppt { "PASS" } else { "FAIL" },
            if ppt.ppt { "yes" } else { "no" },
            tier,
            ppt.lambda_min
        )
        ?;
    }
    writeln!(out, "verdict\t{}", v.verdict.as_str())?;
    let cert = match &v.certificate {
        VerdictCertificate::DegreeViolation { cut, vertex, degree, pt_degree } => format!(
            "degree violation at vertex {vertex} under cut {}: degree {degree}, pT degree {pt_degree}",
            v.cuts[*cut].split.describe()
        ),
        VerdictCertificate::Separable(reason) => format!("separable: {reason:?}"),
        VerdictCertificate::None => "none (all cuts PPT, no sufficiency rule applies)".into(),
    };
    writeln!(out, "certificate\t{cert}")?;
    Ok(())
}

fn cmd_pt_graph(
    g: &Graph,
    lab: &VertexLabeling,
    shape: &TensorShape,
    matrix: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let rho: Option<DensityMatrix> = if matrix { Some(density_matrix(g, lab)?) } else { None };
    if let Some(rho) = &rho {
        writeln!(out, "density (denominator {})", rho.denominator())?;
        write!(out, "{}", rho.to_rational_text())?;
    }
    for split in crate::classifier::probe_cuts(shape) {
        let pt = partial_transpose_graph(g, lab, &split)?;
        let report = degree_report(g, lab, &split)?;
        writeln!(out, "cut\t{}", split.describe())?;
        writeln!(out, "pt_graph6\t{}", pt.to_graph6()?)?;
        writeln!(out, "vertex\tdegree\tpt_degree")?;
        for v in 0..g.order() {
            writeln!(out, "{v}\t{}\t{}", report.degrees[v], report.pt_degrees[v])?;
        }
        writeln!(out, "{}", if report.holds() { "PASS" } else { "FAIL" })?;
        if let Some(rho) = &rho {
            let m = matrix_partial_transpose(rho.numerator(), &split)?;
            writeln!(out, "partial transpose (denominator {})", rho.denominator())?;
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|j| {
                        let r = num_rational::Ratio::new(m[(i, j)], rho.denominator());
                        format!("{}/{}", r.numer(), r.denom())
                    })
                    .collect();
                writeln!(out, "{}", row.join(" "))?;
            }
        }
    }
    Ok(())
}

fn cmd_entangle(
    g: &Graph,
    shape: &TensorShape,
    budget: SearchBudget,
    tolerance: f64,
    out: &mut dyn Write,
) -> Result<()> {
    let cert = entangle(g, shape, budget)?;
    let rho = density_matrix(g, &cert.labeling)?;
    let ppt = is_ppt_with_tolerance(&rho, &cert.split, tolerance)?;
    let list = |s: &[usize]| {
        if s.is_empty() {
            "-".to_string()
        } else {
            s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        }
    };
    writeln!(out, "case\t{}", cert.case.as_str())?;
    writeln!(out, "split\t{}", cert.split.describe())?;
    writeln!(out, "pivot\t{}", cert.pivot)?;
    writeln!(out, "U\t{}", list(&cert.u_set))?;
    writeln!(out, "W\t{}", list(&cert.w_set))?;
    writeln!(out, "labeling\t{}", cert.labeling.to_line())?;
    writeln!(out, "min_degree\t{}", cert.min_degree)?;
    writeln!(out, "pivot_degree\t{}", cert.pivot_degree)?;
    writeln!(out, "pivot_pt_degree\t{}", cert.pivot_pt_degree)?;
    if let Some(a) = cert.arithmetic {
        writeln!(out, "arithmetic\tk={} t={} r={} s={}", a.k, a.t, a.r, a.s)?;
    } else {
        writeln!(out, "seed\t{}", budget.seed)?;
    }
    writeln!(out, "npt_lambda_min\t{:.6e}", ppt.lambda_min)?;
    writeln!(out, "ppt\t{}", if ppt.ppt { "yes" } else { "no" })?;
    Ok(())
}

fn cmd_scan(
    lines: &[String],
    shape: &TensorShape,
    cfg: &CliConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let opts = cfg.classify_options();
    let rows = match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| scan(lines, shape, opts)),
        None => scan(lines, shape, opts),
    };
    for row in &rows {
        write_row(row, shape, cfg, out)?;
        if let Err(e) = &row.result {
            writeln!(err, "line {}: {e}", row.line_number)?;
        }
    }
    Ok(if rows.iter().any(ScanRow::is_error) {
        EXIT_INPUT
    } else if rows.iter().any(ScanRow::is_incomplete) {
        EXIT_INCOMPLETE
    } else {
        EXIT_OK
    })
}

fn write_row(row: &ScanRow, shape: &TensorShape, cfg: &CliConfig, out: &mut dyn Write) -> std::io::Result<()> {
    let text = match cfg.format {
        Format::Tsv => row.to_tsv(shape, cfg.timing),
        Format::Json => row.to_json(shape, cfg.timing),
    };
    writeln!(out, "{text}")
}
