use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fid_core::oracle::{self, Tolerances};
use fid_core::report::OracleBlock;
use fid_core::sensitivity::{self, difference_dominance};
use fid_core::{
    decide, estimate, infer, parse_file, plot, EngineError, Expression, InfluenceDiagram, Query, SolveOptions,
    SolverReport,
};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Fuzzy influence diagram solver.
#[derive(Debug, Parser)]
#[command(name = "fid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Evidence {
    /// Observed outcome or fixed decision, as NODE=OUTCOME. Repeatable.
    #[arg(long = "given", value_name = "NODE=OUTCOME", value_parser = parse_assignment)]
    given: Vec<(String, String)>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a diagram file.
    Validate { file: PathBuf },
    /// Posterior fuzzy distribution of one chance node.
    Infer {
        file: PathBuf,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        evidence: Evidence,
    },
    /// Fuzzy expected value of every alternative and the mean-optimal choice.
    Decide {
        file: PathBuf,
        #[command(flatten)]
        evidence: Evidence,
    },
    /// Alpha-intersection sensitivity of the decision.
    Sensitivity {
        file: PathBuf,
        #[command(flatten)]
        evidence: Evidence,
        /// Also sample the cost difference between the two best alternatives
        /// on an oracle grid of this size.
        #[arg(long, value_name = "GRID_N")]
        difference: Option<usize>,
    },
    /// Sample the membership function of an expression to CSV or SVG.
    Plot {
        file: PathBuf,
        /// `P(NODE=o | ...)` or `E(DECISION=a | ...)`.
        #[arg(long)]
        expr: String,
        /// Output path; `.svg` writes a plot, anything else CSV.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = plot::DEFAULT_POINTS)]
        points: usize,
        /// Overlay the brute-force curve computed on this grid.
        #[arg(long, value_name = "GRID_N")]
        oracle: Option<usize>,
        #[arg(long, default_value_t = oracle::DEFAULT_BINS)]
        bins: usize,
    },
    /// Compare the engine against the brute-force oracle.
    Check {
        file: PathBuf,
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = oracle::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_BINS)]
        bins: usize,
        #[arg(long = "tol-support", default_value_t = 0.02)]
        tol_support: f64,
        #[arg(long = "tol-membership", default_value_t = 0.15)]
        tol_membership: f64,
        /// Width of the band next to 0 and 1 skipped for probabilities.
        #[arg(long, default_value_t = 0.02)]
        band: f64,
    },
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (n, o) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NODE=OUTCOME, got `{s}`"))?;
    let (n, o) = (n.trim(), o.trim());
    if n.is_empty() || o.is_empty() {
        return Err(format!("expected NODE=OUTCOME, got `{s}`"));
    }
    Ok((n.to_string(), o.to_string()))
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn solver(e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_SOLVER,
            message: e.to_string(),
        }
    }
}

fn load(path: &Path) -> Result<InfluenceDiagram, Failure> {
    parse_file(path).map_err(|e| Failure {
        code: EXIT_INVALID,
        message: format!("{}: {e}", path.display()),
    })
}

fn parse_expr(s: &str) -> Result<Expression, Failure> {
    s.parse::<Expression>().map_err(|e: EngineError| Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: EXIT_SOLVER,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Validate { file } => {
            let d = load(&file)?;
            let doc = json!({
                "file": file.display().to_string(),
                "valid": true,
                "nodes": d.nodes().len(),
                "arcs": d.arc_count(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
            Ok(0)
        }
        Command::Infer { file, target, evidence } => {
            let d = load(&file)?;
            let q = Query {
                target,
                evidence: evidence.given,
            };
            let post = infer(&d, &q).map_err(Failure::solver)?;
            print!("{}", SolverReport::posterior(&post).to_json());
            Ok(0)
        }
        Command::Decide { file, evidence } => {
            let d = load(&file)?;
            let policy = decide(&d, &evidence.given).map_err(Failure::solver)?;
            print!("{}", SolverReport::policy("decide", &policy).to_json());
            Ok(0)
        }
        Command::Sensitivity {
            file,
            evidence,
            difference,
        } => {
            let d = load(&file)?;
            let policy = decide(&d, &evidence.given).map_err(Failure::solver)?;
            let mut report = SolverReport::policy("sensitivity", &policy);
            report.sensitivity = Some(sensitivity::analyze_policy(&policy).map_err(Failure::solver)?);
            if let Some(grid) = difference {
                let mut order: Vec<usize> = (0..policy.alternatives.len()).collect();
                order.sort_by(|&a, &b| {
                    let (x, y) = (policy.alternatives[a].value.mean(), policy.alternatives[b].value.mean());
                    match policy.objective {
                        fid_core::Objective::Minimize => x.total_cmp(&y),
                        fid_core::Objective::Maximize => y.total_cmp(&x),
                    }
                });
                let diff = difference_dominance(
                    &d,
                    &evidence.given,
                    &policy.alternatives[order[0]].choice,
                    &policy.alternatives[order[1]].choice,
                    grid,
                    oracle::DEFAULT_BINS,
                )
                .map_err(Failure::solver)?;
                report.difference = Some(diff);
            }
            print!("{}", report.to_json());
            Ok(0)
        }
        Command::Plot {
            file,
            expr,
            out,
            points,
            oracle: grid,
            bins,
        } => {
            let d = load(&file)?;
            let e = parse_expr(&expr)?;
            let est = estimate(&d, &e, &SolveOptions::default()).map_err(Failure::solver)?;
            let curve = match grid {
                Some(g) => Some(oracle::ep_curve(&d, &e, g, bins).map_err(Failure::solver)?),
                None => None,
            };
            let samples = plot::sample(&est, curve.as_ref(), points);
            let is_svg = out.extension().is_some_and(|x| x.eq_ignore_ascii_case("svg"));
            let text = if is_svg {
                plot::to_svg(&samples, &e.to_string())
            } else {
                plot::to_csv(&samples)
            };
            write(&out, &text)?;
            Ok(0)
        }
        Command::Check {
            file,
            expr,
            grid,
            bins,
            tol_support,
            tol_membership,
            band,
        } => {
            let d = load(&file)?;
            let e = parse_expr(&expr)?;
            let est = estimate(&d, &e, &SolveOptions::default()).map_err(Failure::solver)?;
            let curve = oracle::ep_curve(&d, &e, grid, bins).map_err(Failure::solver)?;
            let tolerances = Tolerances {
                support: tol_support,
                membership: tol_membership,
                band,
            };
            let agreement = oracle::compare(&est, &curve, &tolerances);
            let passed = agreement.passed();
            let mut report = SolverReport::new("check", None, e.evidence());
            report.oracle = Some(OracleBlock {
                expression: e.to_string(),
                grid,
                bins,
                configs: curve.configs,
                tolerances,
                agreement,
                passed,
            });
            print!("{}", report.to_json());
            Ok(if passed { 0 } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
