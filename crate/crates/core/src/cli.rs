//! Command-line front end: argument definitions, report schema and the
//! four subcommands.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 validation or oracle
//! mismatch, 3 brute-force work limit exceeded.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::{
    heuristic_decomposition, make_nice, parse_td, sc_path_decomposition, serialize_td, validate,
    KindCounts, TreeDecomposition,
};
use crate::dp::run_dp;
use crate::oracle::{brute_force_enumerate, brute_force_spectrum, OracleError, DEFAULT_WORK_LIMIT};
use crate::tanner::{generate_sc_ldpc, ScLdpcParams, TannerGraph};
use crate::witness::extract_witness;

pub const SCHEMA: &str = "trapgraph/1";
/// Environment variable capping worker threads (0 or unset = automatic).
pub const THREADS_ENV: &str = "TRAPGRAPH_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    WorkLimit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Mismatch(_) => 2,
            CliError::WorkLimit(_) => 3,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::WorkLimit { .. } => CliError::WorkLimit(e.to_string()),
            OracleError::SizeTooLarge { .. } => CliError::Input(e.to_string()),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "trapgraph",
    version,
    about = "Smallest trapping sets of LDPC codes via tree decompositions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size and number of the smallest (a,b)-trapping sets of a code.
    Analyze(AnalyzeArgs),
    /// Generate a random spatially coupled LDPC code.
    Generate(GenerateArgs),
    /// Enumerate small trapping sets exhaustively.
    Brute(BruteArgs),
    /// Validate, convert or build tree decompositions.
    Decomp(DecompArgs),
}

/// Block shape `rows,cols,L,w` of an SC-LDPC code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScShape {
    pub base_rows: usize,
    pub base_cols: usize,
    pub coupling_len: usize,
    pub coupling_width: usize,
}

impl ScShape {
    fn params(self, var_degree: usize, seed: u64) -> ScLdpcParams {
        ScLdpcParams {
            base_rows: self.base_rows,
            base_cols: self.base_cols,
            coupling_len: self.coupling_len,
            coupling_width: self.coupling_width,
            var_degree,
            seed,
        }
    }
}

fn parse_shape(s: &str) -> Result<ScShape, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("not an integer: {p:?}"))
        })
        .collect::<Result<_, _>>()?;
    let [base_rows, base_cols, coupling_len, coupling_width] = parts[..] else {
        return Err("expected rows,cols,L,w".into());
    };
    Ok(ScShape {
        base_rows,
        base_cols,
        coupling_len,
        coupling_width,
    })
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("decomposition").args(["td", "sc_params", "heuristic"])))]
#[command(group(ArgGroup::new("format").args(["json", "text"])))]
pub struct AnalyzeArgs {
    /// Parity-check matrix in alist format.
    #[arg(long)]
    pub alist: PathBuf,
    /// Tree decomposition in PACE .td format (combined node namespace).
    #[arg(long)]
    pub td: Option<PathBuf>,
    /// Build the SC-LDPC path decomposition for shape rows,cols,L,w.
    #[arg(long, value_parser = parse_shape)]
    pub sc_params: Option<ScShape>,
    /// Use the min-fill heuristic decomposition (the default).
    #[arg(long)]
    pub heuristic: bool,
    /// Comma-separated odd-check counts to analyse.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub b: Vec<u32>,
    /// Extract one smallest trapping set per b.
    #[arg(long)]
    pub witness: bool,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub text: bool,
    /// Cross-check against brute force when the code has at most N variables.
    #[arg(long, value_name = "N")]
    pub validate_oracle: Option<usize>,
    /// Brute-force work limit for --validate-oracle.
    #[arg(long, default_value_t = DEFAULT_WORK_LIMIT)]
    pub limit: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report null wall times, making output byte-reproducible.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Block shape rows,cols,L,w.
    #[arg(long, value_parser = parse_shape)]
    pub sc: ScShape,
    /// Column weight.
    #[arg(long, default_value_t = 3)]
    pub deg: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output alist path.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the path decomposition in .td format.
    #[arg(long)]
    pub emit_td: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BruteArgs {
    #[arg(long)]
    pub alist: PathBuf,
    /// Largest set size to enumerate.
    #[arg(long)]
    pub a_max: usize,
    /// Required number of odd checks.
    #[arg(long)]
    pub b: usize,
    /// Maximum number of subsets to evaluate.
    #[arg(long, default_value_t = DEFAULT_WORK_LIMIT)]
    pub limit: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DecompArgs {
    #[command(subcommand)]
    pub action: DecompAction,
}

#[derive(Debug, Clone, Subcommand)]
pub enum DecompAction {
    /// Check a .td file against the graph.
    Validate {
        #[arg(long)]
        alist: PathBuf,
        #[arg(long)]
        td: PathBuf,
    },
    /// Convert a .td file to nice form (written as a plain .td).
    Nice {
        #[arg(long)]
        alist: PathBuf,
        #[arg(long)]
        td: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a min-fill decomposition.
    Heuristic {
        #[arg(long)]
        alist: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub code: CodeInfo,
    pub decomposition: DecompInfo,
    pub results: Vec<BResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeInfo {
    pub n: usize,
    pub m: usize,
    pub source: String,
    pub sc_params: Option<[usize; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompInfo {
    pub source: String,
    pub width: i64,
    pub nice_nodes: usize,
    pub kinds: KindCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BResult {
    pub b: u32,
    pub a_min: Option<u32>,
    /// Decimal string; null exactly when `a_min` is null.
    pub count: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_checked: Option<bool>,
    pub wall_time_ms: Option<f64>,
}

fn read_graph(path: &Path) -> Result<TannerGraph, CliError> {
    let bytes = std::fs::read(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    TannerGraph::parse_alist(&bytes).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn read_td(path: &Path, g: &TannerGraph) -> Result<TreeDecomposition, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let (td, n_nodes) =
        parse_td(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    if n_nodes != g.n_nodes() {
        return Err(input_err(format!(
            "{}: declares {n_nodes} graph nodes, the code has {}",
            path.display(),
            g.n_nodes()
        )));
    }
    Ok(td)
}

fn write_output(path: Option<&Path>, data: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, data).map_err(|e| input_err(format!("{}: {e}", p.display()))),
        None => stdout.write_all(data).map_err(input_err),
    }
}

/// Runs the analysis and returns the report without printing it.
pub fn analyze(args: &AnalyzeArgs) -> Result<AnalysisReport, CliError> {
    let g = read_graph(&args.alist)?;
    let (td, source) = if let Some(path) = &args.td {
        (read_td(path, &g)?, format!("td:{}", path.display()))
    } else if let Some(shape) = args.sc_params {
        let p = shape.params(0, 0);
        (
            sc_path_decomposition(&g, &p).map_err(input_err)?,
            "sc-path".to_string(),
        )
    } else {
        (heuristic_decomposition(&g), "heuristic".to_string())
    };
    let ntd = make_nice(&g, &td).map_err(input_err)?;
    let oracle = args.validate_oracle.is_some_and(|n| g.n_var() <= n);

    let mut results = Vec::with_capacity(args.b.len());
    let mut mismatches = Vec::new();
    for &b in &args.b {
        let start = Instant::now();
        let out = run_dp(&g, &ntd, b, args.witness).map_err(input_err)?;
        let witness = match (&out.result, &out.tables) {
            (Some(_), Some(tables)) => Some(
                extract_witness(&g, &ntd, b, tables)
                    .map_err(input_err)?
                    .members,
            ),
            _ => None,
        };
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let oracle_checked = if oracle {
            let truth = brute_force_spectrum(&g, b as usize, g.n_var(), args.limit)?;
            if truth != out.result {
                let show = |s: &Option<crate::dp::Spectrum>| match s {
                    Some(s) => format!("a_min {} count {}", s.a_min, s.count),
                    None => "none".to_string(),
                };
                mismatches.push(format!(
                    "b={b}: dynamic program gives {}, brute force gives {}",
                    show(&out.result),
                    show(&truth)
                ));
            }
            Some(true)
        } else {
            None
        };
        results.push(BResult {
            b,
            a_min: out.result.as_ref().map(|s| s.a_min),
            count: out.result.as_ref().map(|s| s.count.to_string()),
            witness,
            oracle_checked,
            wall_time_ms: (!args.no_timings).then_some(elapsed),
        });
    }
    if !mismatches.is_empty() {
        return Err(CliError::Mismatch(mismatches.join("\n")));
    }
    Ok(AnalysisReport {
        schema: SCHEMA.to_string(),
        code: CodeInfo {
            n: g.n_var(),
            m: g.n_chk(),
            source: args.alist.display().to_string(),
            sc_params: args
                .sc_params
                .map(|s| [s.base_rows, s.base_cols, s.coupling_len, s.coupling_width]),
        },
        decomposition: DecompInfo {
            source,
            width: ntd.width(),
            nice_nodes: ntd.len(),
            kinds: ntd.kind_counts(),
        },
        results,
    })
}

/// Human-readable rendering of a report.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "code: {} ({} variables, {} checks)",
        r.code.source, r.code.n, r.code.m
    );
    let _ = writeln!(
        s,
        "decomposition: {} (width {}, {} nice nodes, {} joins)",
        r.decomposition.source,
        r.decomposition.width,
        r.decomposition.nice_nodes,
        r.decomposition.kinds.join
    );
    for res in &r.results {
        match (res.a_min, &res.count) {
            (Some(a), Some(c)) => {
                let _ = write!(s, "b={}: a_min={a} count={c}", res.b);
            }
            _ => {
                let _ = write!(s, "b={}: no trapping set", res.b);
            }
        }
        if let Some(w) = &res.witness {
            let _ = write!(s, " witness={w:?}");
        }
        if res.oracle_checked == Some(true) {
            s.push_str(" [oracle ok]");
        }
        if let Some(ms) = res.wall_time_ms {
            let _ = write!(s, " ({ms:.3} ms)");
        }
        s.push('\n');
    }
    s
}

fn cmd_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = analyze(args)?;
    let body = if args.text {
        render_text(&report)
    } else {
        let mut j = serde_json::to_string_pretty(&report).map_err(input_err)?;
        j.push('\n');
        j
    };
    write_output(args.out.as_deref(), body.as_bytes(), stdout)
}

fn cmd_generate(args: &GenerateArgs, stderr: &mut dyn Write) -> Result<(), CliError> {
    let p = args.sc.params(args.deg, args.seed);
    if p.coupling_width > p.coupling_len {
        let _ = writeln!(
            stderr,
            "warning: coupling width {} exceeds coupling length {}",
            p.coupling_width, p.coupling_len
        );
    }
    let g = generate_sc_ldpc(&p).map_err(input_err)?;
    std::fs::write(&args.out, g.serialize_alist())
        .map_err(|e| input_err(format!("{}: {e}", args.out.display())))?;
    if let Some(path) = &args.emit_td {
        let td = sc_path_decomposition(&g, &p).map_err(input_err)?;
        std::fs::write(path, serialize_td(&td, g.n_nodes()))
            .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_brute(args: &BruteArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = read_graph(&args.alist)?;
    let records = brute_force_enumerate(&g, args.a_max, args.b, args.limit)?;
    let mut body = serde_json::to_string(&records).map_err(input_err)?;
    body.push('\n');
    write_output(args.out.as_deref(), body.as_bytes(), stdout)
}

fn cmd_decomp(args: &DecompArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &args.action {
        DecompAction::Validate { alist, td } => {
            let g = read_graph(alist)?;
            let td = read_td(td, &g)?;
            let report = validate(&g, &td);
            if report.is_valid() {
                writeln!(stdout, "valid, width {}", td.width()).map_err(input_err)?;
                Ok(())
            } else {
                for v in &report.violations {
                    writeln!(stdout, "violation: {v}").map_err(input_err)?;
                }
                Err(CliError::Mismatch(format!(
                    "{} violation(s)",
                    report.violations.len()
                )))
            }
        }
        DecompAction::Nice { alist, td, out } => {
            let g = read_graph(alist)?;
            let td = read_td(td, &g)?;
            let ntd = make_nice(&g, &td).map_err(input_err)?;
            let plain = ntd.to_tree_decomposition(&g);
            let text = format!(
                "c nice tree decomposition, width {}, root bag {}\n{}",
                ntd.width(),
                ntd.root() + 1,
                serialize_td(&plain, g.n_nodes())
            );
            write_output(out.as_deref(), text.as_bytes(), stdout)
        }
        DecompAction::Heuristic { alist, out } => {
            let g = read_graph(alist)?;
            let td = heuristic_decomposition(&g);
            write_output(
                out.as_deref(),
                serialize_td(&td, g.n_nodes()).as_bytes(),
                stdout,
            )
        }
    }
}

/// Executes one parsed command.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, stdout),
        Command::Generate(a) => cmd_generate(a, stderr),
        Command::Brute(a) => cmd_brute(a, stdout),
        Command::Decomp(a) => cmd_decomp(a, stdout),
    }
}

/// Worker thread count from `TRAPGRAPH_THREADS`; 0 means automatic.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}
