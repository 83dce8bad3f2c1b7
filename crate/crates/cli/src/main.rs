//! gclab: command line front end. Every subcommand wraps one library
//! operation and prints its artifact (plain text, JSON, or CSV) to stdout.
//!
//! Exit codes: 0 success, 1 input error, 2 resource/capacity budget,
//! 3 internal assertion.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gclab_core::counting::{
    count_boosted, count_once, grid_csv, CountingError, CountingSpec,
};
use gclab_core::graph::{
    alpha_star_witness, io as graph_io, marks_from_str, AlphaStarError, Graph,
    GraphCollisionInstance, DEFAULT_NODE_BUDGET,
};
use gclab_core::pipeline::{run_pipeline, DecisionPoint, PipelineConfig, PipelineReport};
use gclab_core::rng::derive_seed;
use gclab_core::span::{build_gc_span_program, GcSpanProgram, DEFAULT_MEMBERSHIP_TOL};
use gclab_core::study::{
    alpha_star_tail_bound, alpha_star_tail_study, records_csv, quantiles, tail_threshold_floor,
    StudyError,
};

/// Sweeping all markings materializes 2^n reports; keep it interactive.
const EXHAUSTIVE_SWEEP_MAX_N: usize = 12;

#[derive(Parser)]
#[command(name = "gclab", version, about = "Graph collision lab")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Noisy,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximum degree sum over independent sets (exact)
    AlphaStar {
        /// Graph file, edge list or JSON
        graph: PathBuf,
        /// Also print one maximizing set
        #[arg(long)]
        witness: bool,
        /// Search node budget
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Span program membership and witness reports
    Spanprog {
        graph: PathBuf,
        /// Promise parameter k
        #[arg(long)]
        k: u64,
        /// Marking, e.g. 0110 (vertex 1 first)
        #[arg(long, conflicts_with = "exhaustive")]
        x: Option<String>,
        /// Report every marking (n <= 12)
        #[arg(long)]
        exhaustive: bool,
        /// Relative squared-residual membership tolerance
        #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_TOL)]
        tol: f64,
    },
    /// Simulate approximate counting
    Count {
        /// Domain size N
        #[arg(long)]
        domain: u64,
        /// Precision P (queries per elementary run)
        #[arg(long)]
        precision: u64,
        /// True count t
        #[arg(long, required_unless_present = "grid")]
        count: Option<u64>,
        /// Boost to error probability eps by median-of-repetitions
        #[arg(long, value_name = "EPS", conflicts_with = "grid")]
        boosted: Option<f64>,
        /// Emit the (bound, within-bound mass) grid over t = 0..=N/2 as CSV
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Full decision pipeline on one instance
    Pipeline {
        graph: PathBuf,
        /// Marking, e.g. 111111
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Main-stage model: exact span verdict, or verdict noised at eps
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Random-graph tail study for the marked-degree optimum
    Study {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        /// Tail threshold; defaults to the bound's floor 40 n ln n
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluate the bound below its stated applicability floor
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

enum Failure {
    Input(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Budget(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Budget(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

impl From<AlphaStarError> for Failure {
    fn from(e: AlphaStarError) -> Self {
        Failure::Budget(e.to_string())
    }
}

impl From<StudyError> for Failure {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Alpha(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<CountingError> for Failure {
    fn from(e: CountingError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn load_graph(path: &PathBuf) -> Result<Graph, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    graph_io::read_graph_auto(&text).map_err(input_err)
}

fn parse_marks(g: &Graph, bits: &str) -> Result<Vec<bool>, Failure> {
    let x = marks_from_str(bits).map_err(input_err)?;
    if x.len() != g.n() {
        return Err(Failure::Input(format!(
            "marking has {} bits, graph has {} vertices",
            x.len(),
            g.n()
        )));
    }
    Ok(x)
}

fn witness_json(prog: &GcSpanProgram, x: &[bool], tol: f64) -> Result<serde_json::Value, Failure> {
    let feasible = prog.evaluate_with_tol(x, tol).map_err(input_err)?;
    let report = if feasible {
        prog.min_positive_witness(x)
    } else {
        prog.min_negative_witness(x)
    }
    .map_err(input_err)?;
    let mut v = report.to_json();
    let bits: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
    v["x"] = serde_json::Value::String(bits);
    Ok(v)
}

fn pipeline_csv(rows: &[(u64, u64, PipelineReport)]) -> String {
    let mut out = String::from(
        "trial,seed,decided_at,answer,t_estimate,charged_queries_counting,\
         charged_main_units,total_charge\n",
    );
    for (trial, seed, r) in rows {
        let stage = match r.decided_at {
            DecisionPoint::Preprocessing => "preprocessing",
            DecisionPoint::Main => "main",
        };
        writeln!(
            out,
            "{trial},{seed},{stage},{},{},{},{},{}",
            r.answer, r.t_estimate, r.charged_queries_counting, r.charged_main_units,
            r.total_charge
        )
        .unwrap();
    }
    out
}

fn run(cmd: Cmd) -> Result<String, Failure> {
    match cmd {
        Cmd::AlphaStar { graph, witness, budget } => {
            let g = load_graph(&graph)?;
            let res = alpha_star_witness(&g, budget)?;
            let mut out = format!("{}\n", res.value);
            if witness {
                let set: Vec<String> = res.witness.iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", set.join(" ")).unwrap();
            }
            Ok(out)
        }
        Cmd::Spanprog { graph, k, x, exhaustive, tol } => {
            let g = load_graph(&graph)?;
            let prog = build_gc_span_program(&g, k);
            if exhaustive {
                if g.n() > EXHAUSTIVE_SWEEP_MAX_N {
                    return Err(Failure::Budget(format!(
                        "exhaustive sweep is 2^n reports; refusing n = {} > {}",
                        g.n(),
                        EXHAUSTIVE_SWEEP_MAX_N
                    )));
                }
                let mut reports = Vec::with_capacity(1 << g.n());
                for bits in 0u64..(1 << g.n()) {
                    let x: Vec<bool> = (0..g.n()).map(|j| (bits >> j) & 1 == 1).collect();
                    reports.push(witness_json(&prog, &x, tol)?);
                }
                Ok(format!("{:#}\n", serde_json::Value::Array(reports)))
            } else {
                let bits = x.ok_or_else(|| {
                    Failure::Input("pass a marking with --x or sweep with --exhaustive".into())
                })?;
                let x = parse_marks(&g, &bits)?;
                Ok(format!("{:#}\n", witness_json(&prog, &x, tol)?))
            }
        }
        Cmd::Count { domain, precision, count, boosted, grid, seed } => {
            if grid {
                let cells: Result<Vec<CountingSpec>, CountingError> = (0..=domain / 2)
                    .map(|t| CountingSpec::new(domain, precision, t))
                    .collect();
                return Ok(grid_csv(&cells?));
            }
            let count = count.expect("clap requires --count without --grid");
            let transcript = match boosted {
                Some(eps) => count_boosted(domain, precision, count, eps, seed)?,
                None => {
                    let spec = CountingSpec::new(domain, precision, count)?;
                    count_once(&spec, seed)?
                }
            };
            Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&transcript).expect("transcript serializes")
            ))
        }
        Cmd::Pipeline { graph, x, trials, seed, mode, format, budget } => {
            let g = load_graph(&graph)?;
            let x = parse_marks(&g, &x)?;
            let inst = GraphCollisionInstance::new(&g, x).map_err(input_err)?;
            let mut cfg = match mode {
                Mode::Exact => PipelineConfig::default(),
                Mode::Noisy => PipelineConfig::noisy(),
            };
            cfg.alpha_budget = budget;
            let mut rows = Vec::with_capacity(trials as usize);
            for trial in 0..trials.max(1) {
                let run_seed = if trials <= 1 { seed } else { derive_seed(seed, trial) };
                let report = match run_pipeline(&inst, &cfg, run_seed) {
                    Ok(r) => r,
                    Err(gclab_core::pipeline::PipelineError::Alpha(e)) => {
                        return Err(e.into());
                    }
                    Err(e) => return Err(input_err(e)),
                };
                rows.push((trial, run_seed, report));
            }
            match format {
                Format::Csv => Ok(pipeline_csv(&rows)),
                Format::Json if rows.len() == 1 => Ok(format!(
                    "{}\n",
                    serde_json::to_string_pretty(&rows[0].2).expect("report serializes")
                )),
                Format::Json => {
                    let reports: Vec<&PipelineReport> = rows.iter().map(|(_, _, r)| r).collect();
                    Ok(format!(
                        "{}\n",
                        serde_json::to_string_pretty(&reports).expect("reports serialize")
                    ))
                }
            }
        }
        Cmd::Study { n, p, t, samples, seed, force, format, budget } => {
            let t = t.unwrap_or_else(|| tail_threshold_floor(n));
            let bound = alpha_star_tail_bound(n, p, t, force)?;
            let report = alpha_star_tail_study(n, p, t, samples, seed, budget)?;
            if format == Format::Csv {
                return Ok(records_csv(&report.records));
            }
            let norm = n as f64 * (n as f64).ln();
            let mut ratios: Vec<f64> = report
                .records
                .iter()
                .map(|r| r.alpha_star_value as f64 / norm)
                .collect();
            ratios.sort_by(f64::total_cmp);
            let summary = serde_json::json!({
                "n": n,
                "p": p,
                "t": t,
                "samples_requested": samples,
                "samples_completed": report.records.len(),
                "aborted_at": report.aborted_at,
                "exceed_fraction": report.exceed_fraction(),
                "alpha_star_over_n_ln_n_quantiles": if ratios.is_empty() {
                    serde_json::Value::Null
                } else {
                    serde_json::json!(quantiles(&ratios))
                },
                "bound_log10": bound.log10,
                "bound_value": bound.value,
                "within_stated_range": bound.within_stated_range,
                "regime_note": report.regime_note,
            });
            Ok(format!(
                "{}\n",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            ))
        }
    }
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("GCLAB_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            // ignore failure: the pool may already exist under test harnesses
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = std::panic::catch_unwind(|| run(cli.cmd));
    match outcome {
        Ok(Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(fail)) => {
            eprintln!("error: {}", fail.message());
            ExitCode::from(fail.code())
        }
        Err(_) => {
            eprintln!("error: internal assertion failed");
            ExitCode::from(3)
        }
    }
}
