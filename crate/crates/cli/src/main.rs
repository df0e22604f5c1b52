use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use limitset::semiflow_cells::{attraction_trace_check, omega_limit_cells, parse_angle, CellGrid, DiscreteSemiflow, OmegaResult};
use limitset::subset_nets::{FiniteGround, SubsetNet};
use limitset::theoremlab;

#[derive(Parser)]
#[command(name = "limitset-lab", version, about = "Limit sets of nets of subsets: analysis, omega limits and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Separation properties of a finite space.
    Space {
        #[command(subcommand)]
        action: SpaceAction,
    },
    /// Limit sets and compactness verdicts of a net of subsets.
    Net {
        #[command(subcommand)]
        action: NetAction,
    },
    /// Cell-level omega limit set of a discrete semiflow, with its attraction trace as CSV.
    Omega(OmegaArgs),
    /// Run verification suites against brute-force oracles.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum SpaceAction {
    Check {
        /// Comma-separated subset of hausdorff, regular, pseudometrizable.
        #[arg(long, value_delimiter = ',', default_value = "hausdorff,regular,pseudometrizable")]
        props: Vec<String>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Subcommand)]
enum NetAction {
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Horizon for the brute-force cross-check.
        #[arg(long, default_value_t = 64)]
        horizon: u64,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Args)]
struct OmegaArgs {
    /// logistic, tent, rotation or henon.
    #[arg(long)]
    map: String,
    /// Map parameters in order (logistic r; tent mu; rotation theta; henon a, b).
    #[arg(long = "param", allow_hyphen_values = true)]
    params: Vec<String>,
    /// Cells per axis, a power of two.
    #[arg(long, default_value_t = 64)]
    cells: usize,
    /// Grid dimension; defaults to the map's own.
    #[arg(long)]
    dim: Option<usize>,
    /// all, cell:i or cells:i,j,...
    #[arg(long, default_value = "all")]
    init: String,
    /// Trace CSV destination.
    #[arg(long, default_value = "-")]
    out: String,
    /// Optional JSON summary of the omega set.
    #[arg(long)]
    omega_out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// A suite id or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = theoremlab::DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "-")]
    out: String,
}

/// Success, or a detected violation.
enum Outcome {
    Clean,
    Violations,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(1),
        Err(e) => {
            let msg = format!("{e:#}");
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("LIMITSET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("LIMITSET_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Space {
            action: SpaceAction::Check { props, input, out },
        } => space_check(&props, &input, &out),
        Command::Net {
            action: NetAction::Analyze { input, horizon, out },
        } => net_analyze(&input, horizon, &out),
        Command::Omega(args) => omega(&args),
        Command::Verify(args) => verify(&args),
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: &str, text: &str) -> Result<()> {
    if out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
    } else {
        fs::write(out, text).with_context(|| format!("cannot write {out}"))?;
    }
    Ok(())
}

fn emit_json(out: &str, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit(out, &text)
}

/// Progress lines go to stdout unless stdout carries the main output.
fn note(out: &str, line: &str) {
    if out == "-" {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn space_check(props: &[String], input: &Path, out: &str) -> Result<Outcome> {
    let value: Value = serde_json::from_str(&read_input(input)?).context("malformed space JSON")?;
    let ground = FiniteGround::from_json_value(value)?;
    let space = ground.space();
    let mut report = serde_json::Map::new();
    report.insert("n".into(), json!(space.len()));
    for p in props {
        let verdict = match p.trim() {
            "hausdorff" => space.is_hausdorff(),
            "regular" => space.is_regular(),
            "pseudometrizable" => space.is_pseudometrizable(),
            other => bail!("unknown property {other:?}; expected hausdorff, regular or pseudometrizable"),
        };
        report.insert(p.trim().to_string(), json!(verdict));
    }
    emit_json(out, &Value::Object(report))?;
    Ok(Outcome::Clean)
}

fn net_analyze(input: &Path, horizon: u64, out: &str) -> Result<Outcome> {
    if horizon < 16 {
        bail!("--horizon must be at least 16, got {horizon}");
    }
    let net = SubsetNet::from_json(&read_input(input)?)?;
    let analysis = net.analyze();
    let oracle = net.limit_set_horizon_oracle(horizon / 8, horizon)?;
    let agrees = oracle == analysis.limit_set;
    let report = json!({
        "net": net.to_json(),
        "analysis": analysis,
        "sequential_limit_set": net.sequential_limit_set(),
        "oracle": {
            "horizon": horizon,
            "limit_set": oracle,
            "agrees": agrees,
        },
    });
    emit_json(out, &report)?;
    if agrees {
        Ok(Outcome::Clean)
    } else {
        eprintln!("horizon-{horizon} oracle disagrees with the symbolic limit set");
        Ok(Outcome::Violations)
    }
}

fn parse_f64(name: &str, text: &str) -> Result<f64> {
    let v: f64 = text.trim().parse().with_context(|| format!("{name} must be a number, got {text:?}"))?;
    if !v.is_finite() {
        bail!("{name} must be finite, got {text:?}");
    }
    Ok(v)
}

fn build_flow(map: &str, params: &[String]) -> Result<DiscreteSemiflow> {
    let expect = |n: usize| -> Result<()> {
        if params.len() != n {
            bail!("{map} takes {n} --param value(s), got {}", params.len());
        }
        Ok(())
    };
    Ok(match map {
        "logistic" => {
            expect(1)?;
            DiscreteSemiflow::logistic(parse_f64("r", &params[0])?)?
        }
        "tent" => {
            expect(1)?;
            DiscreteSemiflow::tent(parse_f64("mu", &params[0])?)?
        }
        "rotation" => {
            expect(1)?;
            DiscreteSemiflow::rotation(parse_angle(&params[0])?)
        }
        "henon" => {
            let (a, b) = match params.len() {
                0 => (1.4, 0.3),
                2 => (parse_f64("a", &params[0])?, parse_f64("b", &params[1])?),
                n => bail!("henon takes 0 or 2 --param values, got {n}"),
            };
            DiscreteSemiflow::henon(a, b)?
        }
        other => bail!("unknown map {other:?}; expected logistic, tent, rotation or henon"),
    })
}

fn parse_init(grid: &CellGrid, init: &str) -> Result<limitset::BitSet> {
    let parse_cell = |s: &str| -> Result<usize> { s.trim().parse().with_context(|| format!("bad cell index {s:?}")) };
    let cells: Vec<usize> = if init == "all" {
        (0..grid.cell_count()).collect()
    } else if let Some(c) = init.strip_prefix("cell:") {
        vec![parse_cell(c)?]
    } else if let Some(cs) = init.strip_prefix("cells:") {
        cs.split(',').map(parse_cell).collect::<Result<_>>()?
    } else {
        bail!("--init must be all, cell:i or cells:i,j,..., got {init:?}");
    };
    Ok(grid.cells(cells)?)
}

fn trace_csv(result: &OmegaResult) -> String {
    let mut csv = String::from("n,cardinality,distance\n");
    for e in &result.trace {
        let d = match result.distance_value(e) {
            Some(v) if v.is_infinite() => "inf".to_string(),
            Some(v) => v.to_string(),
            None => String::new(),
        };
        csv.push_str(&format!("{},{},{}\n", e.n, e.cardinality, d));
    }
    csv
}

fn omega(args: &OmegaArgs) -> Result<Outcome> {
    let flow = build_flow(&args.map, &args.params)?;
    let dim = args.dim.or(flow.natural_dim()).unwrap_or(1);
    let grid = CellGrid::new(dim, args.cells)?;
    let init = parse_init(&grid, &args.init)?;
    let result = omega_limit_cells(&grid, &flow, &init)?;
    let attracted = attraction_trace_check(&result);
    emit(&args.out, &trace_csv(&result))?;
    if let Some(path) = &args.omega_out {
        let summary = json!({
            "map": flow.to_string(),
            "dim": grid.dim(),
            "cells_per_axis": grid.cells_per_axis(),
            "init": init.iter().collect::<Vec<_>>(),
            "omega": result.omega.iter().collect::<Vec<_>>(),
            "preperiod": result.preperiod,
            "period": result.period,
            "trace": result.trace,
            "attraction_trace_ok": attracted,
        });
        emit_json(path, &summary)?;
    }
    note(
        &args.out,
        &format!(
            "{flow}: omega has {} of {} cells, preperiod {}, period {}",
            result.omega.len(),
            grid.cell_count(),
            result.preperiod,
            result.period
        ),
    );
    if attracted {
        Ok(Outcome::Clean)
    } else {
        eprintln!("attraction trace does not vanish past the preperiod");
        Ok(Outcome::Violations)
    }
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let reports = theoremlab::run_suites(&args.suite, args.budget, args.seed)?;
    for r in &reports {
        note(
            &args.out,
            &format!(
                "{:<30} {:>9} instances {:>4} violations {:>3} unknowns {:>7} exhibits  {:.2}s",
                r.suite,
                r.instances,
                r.violation_count,
                r.unknowns,
                r.exhibit_count,
                r.elapsed.as_secs_f64()
            ),
        );
    }
    let passed = reports.iter().all(|r| r.passed());
    let doc = json!({
        "seed": args.seed,
        "budget": args.budget,
        "passed": passed,
        "suites": reports,
    });
    emit_json(&args.out, &doc)?;
    Ok(if passed { Outcome::Clean } else { Outcome::Violations })
}
