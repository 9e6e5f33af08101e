use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dioph_core::criteria::Window;
use dioph_core::relations::SearchMethod;
use dioph_core::scenario::config::{ConvergentSettings, ProbeSettings, SearchSettings, SubspaceSettings};
use dioph_core::scenario::report::Timing;
use dioph_core::scenario::{
    builtin, list_scenarios, parse_window, positive_rational, run_scenario, OutputFormat, ScenarioConfig, EXIT_CONFIG, EXIT_REFUSED,
};
use dioph_core::Error;

#[derive(Parser)]
#[command(name = "dioph", version, about = "Certified checks for Liouville-type series: hypotheses, convergents, subspace instances, relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hypothesis list of a scenario.
    Check(Common),
    /// Convergent table with measured exponents.
    Converge(Common),
    /// Subspace-theorem instances over the window.
    Subspace(Common),
    /// Integer relation search, and the independence probe with --probe.
    Relations {
        #[command(flatten)]
        common: Common,
        /// Run the independence probe for the divisor-function pair.
        #[arg(long)]
        probe: bool,
        #[arg(long, value_enum, default_value_t = Method::Exhaustive)]
        method: Method,
    },
    /// Run a built-in scenario by name or a TOML config by path.
    Scenario {
        /// Built-in name or path to a TOML file.
        target: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List built-in scenarios.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exhaustive,
    Lattice,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timing (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct Common {
    /// Built-in scenario supplying the series (default: corollary).
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    /// TOML scenario config supplying the series.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Index window a..b.
    #[arg(long)]
    window: Option<String>,
    /// Override delta, as p/q.
    #[arg(long)]
    delta: Option<String>,
    /// Override epsilon, as p/q.
    #[arg(long)]
    epsilon: Option<String>,
    /// Coefficient bound B for relation searches.
    #[arg(long)]
    bound: Option<u64>,
    /// Precision in bits.
    #[arg(long)]
    precision: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

fn config_error(field: &str, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::Config { path: field.into(), message: other.to_string() },
    }
}

fn load(target: &str) -> Result<ScenarioConfig, Error> {
    if list_scenarios().contains(&target) {
        return builtin(target);
    }
    let text = fs::read_to_string(target)
        .map_err(|e| Error::Config { path: target.into(), message: format!("not a built-in scenario and not readable: {e}") })?;
    ScenarioConfig::from_toml(&text)
}

fn base_config(c: &Common) -> Result<ScenarioConfig, Error> {
    let mut cfg = match (&c.config, &c.scenario) {
        (Some(p), _) => load(&p.to_string_lossy())?,
        (None, Some(name)) => builtin(name)?,
        (None, None) => builtin("corollary")?,
    };
    if let Some(w) = &c.window {
        cfg.window = parse_window(w).map_err(|e| config_error("--window", e))?;
    }
    if let Some(d) = &c.delta {
        let d = positive_rational(d).map_err(|e| config_error("--delta", e))?;
        cfg.hypotheses = cfg.hypotheses.iter().map(|h| h.with_delta(&d)).collect();
        cfg.series = cfg.series.clone().with_delta(d);
    }
    if let Some(e) = &c.epsilon {
        let e = positive_rational(e).map_err(|err| config_error("--epsilon", err))?;
        cfg.hypotheses = cfg.hypotheses.iter().map(|h| h.with_epsilon(&e)).collect();
        cfg.series = cfg.series.clone().with_epsilon(Some(e));
    }
    Ok(cfg)
}

fn only_stage(mut cfg: ScenarioConfig) -> ScenarioConfig {
    cfg.hypotheses.clear();
    cfg.prefix_bounds.clear();
    cfg.convergents = ConvergentSettings { orders: Window::empty(), exponents: false };
    cfg.subspace = None;
    cfg.search = None;
    cfg.probe = None;
    cfg
}

fn build(command: &Command) -> Result<(ScenarioConfig, &OutputArgs), Error> {
    Ok(match command {
        Command::Check(c) => {
            let full = base_config(c)?;
            if !full.hypotheses.is_empty() && !full.window.supports_asymptotics() {
                return Err(Error::Config { path: "--window".into(), message: format!("window {} is shorter than 4", full.window) });
            }
            let mut cfg = only_stage(full.clone());
            cfg.hypotheses = full.hypotheses;
            cfg.prefix_bounds = full.prefix_bounds;
            (cfg, &c.output)
        }
        Command::Converge(c) => {
            let full = base_config(c)?;
            let orders = if c.window.is_some() { full.window } else { full.convergents.orders };
            let mut cfg = only_stage(full);
            cfg.convergents = ConvergentSettings { orders, exponents: true };
            (cfg, &c.output)
        }
        Command::Subspace(c) => {
            let full = base_config(c)?;
            let mut s = full.subspace.clone().unwrap_or(SubspaceSettings { orders: full.window, precision_bits: 64, deltas: Vec::new() });
            if c.window.is_some() {
                s.orders = full.window;
            }
            if let Some(p) = c.precision {
                s.precision_bits = p;
            }
            if let Some(d) = &c.delta {
                s.deltas = vec![positive_rational(d).map_err(|e| config_error("--delta", e))?];
            }
            let mut cfg = only_stage(full);
            cfg.subspace = Some(s);
            (cfg, &c.output)
        }
        Command::Relations { common: c, probe, method } => {
            let full = base_config(c)?;
            let mut search = full.search.clone().unwrap_or(SearchSettings {
                config: dioph_core::relations::SearchConfig::new(1, 64, SearchMethod::Exhaustive),
                verify_window: full.window,
            });
            if let Some(b) = c.bound {
                if b == 0 {
                    return Err(Error::Config { path: "--bound".into(), message: "B must be at least 1".into() });
                }
                search.config.bound = b;
            }
            if let Some(p) = c.precision {
                search.config.precision_bits = p;
            }
            if c.window.is_some() {
                search.verify_window = full.window;
            }
            search.config.method = match method {
                Method::Exhaustive => SearchMethod::Exhaustive,
                Method::Lattice => SearchMethod::Lattice,
            };
            let probe_cfg = probe.then(|| ProbeSettings {
                bound: c.bound.or(full.probe.as_ref().map(|p| p.bound)).unwrap_or(10),
                window: if c.window.is_some() { full.window } else { full.probe.as_ref().map(|p| p.window).unwrap_or(full.window) },
            });
            let mut cfg = only_stage(full);
            cfg.search = Some(search);
            cfg.probe = probe_cfg;
            (cfg, &c.output)
        }
        Command::Scenario { target, output } => (load(target)?, output),
        Command::List => unreachable!("handled before"),
    })
}

fn run(cli: Cli) -> Result<i32, Error> {
    if let Command::List = cli.command {
        for name in list_scenarios() {
            println!("{name}");
        }
        return Ok(0);
    }
    let (cfg, out) = build(&cli.command)?;
    let started = Instant::now();
    let mut report = run_scenario(&cfg)?;
    if out.timing {
        report.timing = Some(Timing { elapsed_ms: started.elapsed().as_millis() as u64 });
    }
    let format = match out.format {
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Table) => OutputFormat::Table,
        None => cfg.format,
    };
    let text = match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Table => report.to_table(),
    };
    let path = out.out.clone().or(cfg.output_path.as_ref().map(PathBuf::from));
    match path {
        Some(p) => fs::write(&p, text).map_err(|e| Error::Config { path: p.display().to_string(), message: format!("cannot write report: {e}") })?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = if matches!(e, Error::Config { .. }) { EXIT_CONFIG } else { EXIT_REFUSED };
            ExitCode::from(code as u8)
        }
    }
}
