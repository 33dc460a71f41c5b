mod render;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frogcrit::critical::{self, solve_qc};
use frogcrit::distributions::{HazardSpec, TreeParams};
use frogcrit::exec::{configure_threads, Execution};
use frogcrit::renewal::{convergence_rate, growth_classifier, renewal_probabilities, Growth};
use frogcrit::simulator::{
    simulate_firework, simulate_frog, FrogSimConfig, DEFAULT_ACTIVATION_CAP,
};
use frogcrit::Error;

use render::{Cell, OutputFormat, Report};

const THREADS_VAR: &str = "FROGCRIT_THREADS";
const GROWTH_HORIZON: usize = 400;

/// Critical parameters, bounds and simulations for frog models on trees.
#[derive(Parser)]
#[command(name = "frogcrit", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "plain")]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the critical parameter q_c(d, c) and report its bounds.
    Qc {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Bound tables for one of the related models.
    Table {
        #[arg(long, value_enum)]
        model: TableModel,
        /// Comma-separated degrees and inclusive ranges, e.g. `2..10,15,20`.
        #[arg(long, value_parser = parse_degrees, allow_hyphen_values = true)]
        d: DegreeList,
    },
    /// Renewal convergence rate gamma for hazard parameters (c, q).
    Gamma {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Monte Carlo simulation.
    Simulate {
        #[command(subcommand)]
        engine: Engine,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableModel {
    Cone,
    Original,
    #[value(name = "selfavoiding")]
    SelfAvoiding,
    Removal,
}

#[derive(Clone, Debug)]
struct DegreeList(Vec<u32>);

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 100_000)]
    replicates: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Engine {
    /// Frog model on the directed tree.
    Frog {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 12)]
        max_depth: u32,
        #[arg(long, default_value_t = DEFAULT_ACTIVATION_CAP)]
        activation_cap: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Firework process on the half-line.
    Firework {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 20)]
        n: u64,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn parse_degrees(s: &str) -> Result<DegreeList, String> {
    let mut ds = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parse = |x: &str| {
            x.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad degree {x:?}: {e}"))
        };
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("empty range {part}"));
                }
                ds.extend(a..=b);
            }
            None => ds.push(parse(part)?),
        }
    }
    Ok(DegreeList(ds))
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::Range(_) | Error::Divergence(_) => 2,
        Error::Bracket(_) => 3,
        Error::ActivationCap { .. } => 1,
    }
}

fn cmd_qc(d: u32, c: f64, tol: f64) -> frogcrit::Result<Report> {
    let r = solve_qc(d, c, tol)?;
    let mut report = Report::new(
        "qc",
        &[
            "d",
            "c",
            "q_c",
            "residual",
            "bracket_lo",
            "bracket_hi",
            "lower_c2",
            "upper_c2",
            "lower_c3",
            "upper_c3",
        ],
    );
    report.push(vec![
        r.d.into(),
        r.c.into(),
        r.q_c.into(),
        r.residual.into(),
        r.bracket.0.into(),
        r.bracket.1.into(),
        r.lower_c2.into(),
        r.upper_c2.into(),
        r.lower_c3.into(),
        r.upper_c3.into(),
    ]);
    Ok(report)
}

fn cmd_table(model: TableModel, ds: &[u32]) -> frogcrit::Result<Report> {
    if ds.is_empty() {
        return Err(Error::Domain("the degree list is empty".into()));
    }
    let exec = Execution::Parallel;
    let report = match model {
        TableModel::Cone => {
            let mut report = Report::new(
                "table_cone",
                &[
                    "d",
                    "c2_lower",
                    "prop_lower",
                    "known_lower",
                    "c2_upper",
                    "prop_upper",
                    "known_upper",
                ],
            );
            for row in critical::table_cone(ds, exec)? {
                let mut cells = vec![Cell::from(row.d)];
                cells.extend(row.cells().map(Cell::from));
                report.push(cells);
            }
            report
        }
        TableModel::Original | TableModel::SelfAvoiding => {
            let original = matches!(model, TableModel::Original);
            let schema = if original {
                "table_original"
            } else {
                "table_selfavoiding"
            };
            let mut report = Report::new(schema, &["d", "c2_upper", "prop_upper", "known_upper"]);
            for row in critical::table_frogs(ds, exec)? {
                let (a, b, c) = if original {
                    (row.original_c2, row.original_prop, row.original_known)
                } else {
                    (
                        row.self_avoiding_c2,
                        row.self_avoiding_prop,
                        row.self_avoiding_known,
                    )
                };
                report.push(vec![row.d.into(), a.into(), b.into(), c.into()]);
            }
            report
        }
        TableModel::Removal => {
            let mut report = Report::new(
                "table_removal",
                &["d", "c2_lower", "prop_lower", "c2_upper", "prop_upper"],
            );
            for row in critical::table_removal(ds, exec)? {
                report.push(vec![
                    row.d.into(),
                    row.c2_lower.into(),
                    row.prop_lower.into(),
                    row.c2_upper.into(),
                    row.prop_upper.into(),
                ]);
            }
            report
        }
    };
    Ok(report)
}

fn cmd_gamma(c: f64, q: f64, tol: f64) -> frogcrit::Result<Report> {
    let r = convergence_rate(HazardSpec::new(c, q)?, tol)?;
    let mut report = Report::new(
        "gamma",
        &[
            "c",
            "q",
            "gamma",
            "residual",
            "bracket_lo",
            "bracket_hi",
            "terms",
        ],
    );
    report.push(vec![
        c.into(),
        q.into(),
        r.gamma.into(),
        r.residual.into(),
        r.bracket.0.into(),
        r.bracket.1.into(),
        r.truncation_k.into(),
    ]);
    Ok(report)
}

fn growth_name(g: Growth) -> &'static str {
    match g {
        Growth::Supercritical => "supercritical",
        Growth::Subcritical => "subcritical",
        Growth::Indeterminate => "indeterminate",
    }
}

fn cmd_simulate(engine: Engine) -> frogcrit::Result<Report> {
    let exec = Execution::Parallel;
    match engine {
        Engine::Frog {
            d,
            c,
            q,
            max_depth,
            activation_cap,
            run,
        } => {
            let params = TreeParams::new(d, c, q)?;
            let config = FrogSimConfig::new(params, max_depth, run.replicates, run.seed)?
                .with_activation_cap(activation_cap);
            let growth = growth_name(growth_classifier(d, params.branch_spec(), GROWTH_HORIZON));
            let out = simulate_frog(&config, exec)?;
            let mut report = Report::new(
                "simulate_frog",
                &[
                    "depth",
                    "reached",
                    "hits",
                    "hit_fraction",
                    "std_error",
                    "mean_activations",
                    "renewal_growth",
                ],
            );
            for k in 0..=out.horizon() {
                report.push(vec![
                    k.into(),
                    out.reached_depth[k].into(),
                    out.branch_hits[k].into(),
                    out.hit_fraction(k).into(),
                    out.hit_std_error(k).into(),
                    (out.activations[k] as f64 / out.replicates as f64).into(),
                    growth.into(),
                ]);
            }
            Ok(report)
        }
        Engine::Firework { c, q, n, run } => {
            let spec = HazardSpec::new(c, q)?;
            let out = simulate_firework(spec, n, run.replicates, run.seed, exec)?;
            let u = renewal_probabilities(spec, n as usize);
            let mut report = Report::new(
                "simulate_firework",
                &["site", "hits", "hit_fraction", "std_error", "renewal_u"],
            );
            for k in 0..=out.horizon() {
                report.push(vec![
                    k.into(),
                    out.branch_hits[k].into(),
                    out.hit_fraction(k).into(),
                    out.hit_std_error(k).into(),
                    u.values()[k].into(),
                ]);
            }
            Ok(report)
        }
    }
}

fn apply_thread_limit() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            configure_threads(n);
            Ok(())
        }
        _ => Err(format!(
            "{THREADS_VAR} must be a positive integer, got {raw:?}"
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = apply_thread_limit() {
        eprintln!("frogcrit: {msg}");
        return ExitCode::from(2);
    }
    let report = match cli.command {
        Command::Qc { d, c, tol } => cmd_qc(d, c, tol),
        Command::Table { model, d } => cmd_table(model, &d.0),
        Command::Gamma { c, q, tol } => cmd_gamma(c, q, tol),
        Command::Simulate { engine } => cmd_simulate(engine),
    };
    match report {
        Ok(report) => {
            let mut out = io::stdout().lock();
            if let Err(e) = report
                .write(cli.format, &mut out)
                .and_then(|()| out.flush())
            {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("frogcrit: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("frogcrit: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
