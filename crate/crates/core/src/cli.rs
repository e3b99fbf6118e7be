//! Command-line frontend. The binary is a thin wrapper around [`run`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::campaign::{self, CampaignConfig, CampaignReport, Family, SteepConstruction};
use crate::error::{Error, Result};
use crate::fixed_point::{self, FixedPointResult};
use crate::gamma;
use crate::grid::Grid;
use crate::json::{fmt_g17, to_stable_json};
use crate::maps::{MapFile, MapSpec};
use crate::rotativity::{self, LipschitzReport, RotativityReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ROTKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "rotkit", version, about = "Rotative maps on the line: analysis, fixed points, bounds")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rotativity and Lipschitz reports for a map file.
    Analyze {
        #[arg(long)]
        n: usize,
        file: PathBuf,
    },
    /// Locate a fixed point.
    Solve {
        #[arg(long, default_value_t = fixed_point::DEFAULT_TOL)]
        tol: f64,
        file: PathBuf,
    },
    /// Table of known bounds on the minimal displacement constant.
    Bounds {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 1.5])]
        a: Vec<f64>,
    },
    /// Seeded fixed-point existence campaign.
    Campaign(CampaignArgs),
    /// The steep 2-rotative three-segment map with Lipschitz constant M.
    Construct {
        #[arg(long = "M", allow_negative_numbers = true)]
        m: f64,
        /// Where to write the map file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "affine,three_segment,polyline")]
    pub families: Vec<String>,
    #[arg(long, default_value_t = fixed_point::DEFAULT_TOL)]
    pub tol: f64,
    /// Where to write the full JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Map-level errors to process exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        e if e.is_validation() => EXIT_VALIDATION,
        Error::NotFound | Error::NoConvergence { .. } | Error::NoSignChange { .. } => EXIT_NOT_FOUND,
        _ => EXIT_INTERNAL,
    }
}

/// Reads and validates a map file. Malformed input is a parse error, a
/// well-formed map that breaks a family invariant is a validation error.
pub fn parse_map_file(path: &Path) -> Result<MapSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_map_str(&text)
}

pub fn parse_map_str(text: &str) -> Result<MapSpec> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    MapSpec::try_from(file)
}

/// Applies [`THREADS_ENV`] to the global rayon pool.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Parse(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a second initialization in the same process is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Output of `analyze`; `construct` emits the same shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub map: MapSpec,
    pub lipschitz: Option<LipschitzReport>,
    pub rotativity: RotativityReport,
}

pub fn analyze(m: MapSpec, n: usize) -> Result<AnalyzeReport> {
    let rotativity = rotativity::estimate_rotativity_constant(&m, n, &Grid::Default)?;
    let lipschitz = if m.is_continuous() {
        Some(rotativity::lipschitz_estimate(&m, &Grid::Default)?)
    } else {
        None
    };
    Ok(AnalyzeReport {
        map: m,
        lipschitz,
        rotativity,
    })
}

/// Everything a command produced: stdout text and an exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK }
    }
}

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Analyze { n, file } => {
            let report = analyze(parse_map_file(file)?, *n)?;
            Ok(Outcome::ok(if json { to_json(&report) } else { analyze_text(&report) }))
        }
        Command::Solve { tol, file } => {
            let m = parse_map_file(file)?;
            let r = fixed_point::solve(&m, *tol)?;
            Ok(Outcome::ok(if json { to_json(&r) } else { solve_text(&r) }))
        }
        Command::Bounds { n, a } => {
            let rows = gamma::bounds_table(n, a);
            Ok(Outcome::ok(if json { to_json(&rows) } else { gamma::render_table(&rows) }))
        }
        Command::Campaign(args) => {
            let cfg = campaign_config(args)?;
            let report = campaign::run_existence_campaign(&cfg)?;
            if let Some(out) = &args.out {
                write_file(out, &to_json(&report))?;
            }
            let stdout = if json { to_json(&report) } else { campaign_text(&report) };
            let code = if report.failures.is_empty() { EXIT_OK } else { EXIT_NOT_FOUND };
            Ok(Outcome { stdout, code })
        }
        Command::Construct { m, out } => {
            let SteepConstruction {
                map,
                lipschitz,
                rotativity,
            } = campaign::construct_steep_2rotative(*m)?;
            if let Some(out) = out {
                write_file(out, &to_json(&map))?;
            }
            let report = AnalyzeReport {
                map,
                lipschitz: Some(lipschitz),
                rotativity,
            };
            Ok(Outcome::ok(if json { to_json(&report) } else { analyze_text(&report) }))
        }
    }
}

/// Parses `args`, runs the command, and reports to stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("rotkit: {e}");
        return exit_code(&e);
    }
    match dispatch(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("rotkit: {e}");
            exit_code(&e)
        }
    }
}

fn campaign_config(args: &CampaignArgs) -> Result<CampaignConfig> {
    let mut weights = [0.0; 3];
    for name in &args.families {
        let f = Family::parse(name)?;
        let i = Family::ALL.iter().position(|g| *g == f).expect("listed family");
        weights[i] = 1.0;
    }
    Ok(CampaignConfig {
        seed: args.seed,
        trials: args.trials,
        weights,
        n: args.n,
        tol: args.tol,
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = to_stable_json(v, true);
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::NotApplicable(format!("cannot write {}: {e}", path.display())))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), fmt_g17)
}

fn analyze_text(r: &AnalyzeReport) -> String {
    let rot = &r.rotativity;
    let mut s = String::new();
    let _ = writeln!(s, "family          {}", r.map.family());
    let _ = writeln!(s, "n               {}", rot.n);
    let _ = writeln!(s, "decision        {:?} ({:?})", rot.decision, rot.decision_source);
    let _ = writeln!(s, "numeric         {:?}", rot.numeric_decision);
    let _ = writeln!(s, "estimated sup   {}", fmt_g17(rot.estimated_sup));
    let _ = writeln!(s, "grid points     {}", rot.grid_points);
    if let Some(a) = &rot.analytic {
        let _ = writeln!(s, "exact sup       {}{}", fmt_g17(a.exact_sup), if a.attained { " (attained)" } else { "" });
        let _ = writeln!(s, "constant        {}", opt(a.constant));
        if let Some(b) = a.b1_bound {
            let _ = writeln!(s, "b1 bound        {}", fmt_g17(b));
        }
    }
    if let Some(l) = &r.lipschitz {
        let _ = writeln!(s, "lipschitz       {}", fmt_g17(l.estimated_k));
        let _ = writeln!(s, "lipschitz exact {}", opt(l.analytic_k));
    }
    s
}

fn solve_text(r: &FixedPointResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "x*          {}", fmt_g17(r.x_star));
    let _ = writeln!(s, "residual    {}", fmt_g17(r.residual));
    let _ = writeln!(s, "iterations  {}", r.iterations);
    let _ = writeln!(s, "method      {:?}", r.method);
    if let Some(c) = &r.certificate {
        let _ = writeln!(s, "tail bound  {} (rate {})", fmt_g17(c.tail_bound), fmt_g17(c.a));
    }
    s
}

fn campaign_text(r: &CampaignReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}/{} solved, max residual {}, seed {}, n {}{}",
        r.successes,
        r.trials,
        fmt_g17(r.max_residual),
        r.config.seed,
        r.config.n,
        if r.exploratory { " (exploratory)" } else { "" }
    );
    for f in &r.failures {
        let _ = writeln!(s, "trial {} ({:?}): {}", f.trial, f.family, f.error);
    }
    s
}
