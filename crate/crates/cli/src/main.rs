use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fdcache::analytics::{analytic_report, TransformVariant};
use fdcache::caching::p_hit_for_config;
use fdcache::config::{validate, warnings};
use fdcache::engine::{EngineRegistry, HitRegistry};
use fdcache::montecarlo::{write_samples_csv, McOptions, Simulator};
use fdcache::sweep::{
    parse_sweep, run_sweep, write_hit_csv, write_report_csv, write_simulate_csv, write_sweep_csv,
    HitRow,
};
use fdcache::{CorrelationMode, Error, QuadraturePolicy, ScenarioConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fdcache",
    version,
    about = "Cache-aided full-duplex small-cell network analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and list every violated constraint.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Closed-form cache-hit probability, success bound, outage, ASE and TG.
    Analytic {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum, default_value_t = Variant::Consistent)]
        variant: Variant,
    },
    /// Monte Carlo success probability.
    Simulate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Also write per-snapshot SIRs to this CSV.
        #[arg(long)]
        dump_samples: Option<PathBuf>,
    },
    /// Evaluate engines over a list of values of one parameter.
    Sweep {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        mc: McArgs,
        /// KEY=v1,v2,... or KEY=log:a:b:n, KEY one of lambda_sbs, eta_files, theta_db, kappa.
        #[arg(long)]
        sweep: String,
        /// Comma-separated engine names.
        #[arg(long, default_value = "analytic")]
        engines: String,
    },
    /// Cache-hit probability, closed form next to a geographic estimate.
    Hit {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, default_value = "independent-regions")]
        estimator: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct IoArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Worker threads for snapshot evaluation.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Correlated,
    Uncorrelated,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Consistent,
    Shared,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            Error::Quadrature { .. } | Error::NonFinite(_) | Error::NoSamples(_) => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let c = ScenarioConfig::parse(&text)?;
    for w in warnings(&c) {
        eprintln!("warning: {w}");
    }
    Ok(c)
}

fn load_valid(path: &Path) -> Result<ScenarioConfig, Failure> {
    let c = load(path)?;
    c.ensure_valid()?;
    Ok(c)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            let f = File::create(p).map_err(|e| io_failure(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn apply_mc(c: &mut ScenarioConfig, mc: &McArgs) -> McOptions {
    if let Some(s) = mc.seed {
        c.seed = s;
    }
    if let Some(n) = mc.snapshots {
        c.n_snapshots = n;
    }
    if let Some(m) = mc.mode {
        c.correlation_mode = match m {
            Mode::Correlated => CorrelationMode::Correlated,
            Mode::Uncorrelated => CorrelationMode::Uncorrelated,
        };
    }
    McOptions {
        workers: mc.workers,
        ..McOptions::default()
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { scenario } => {
            let c = load(&scenario)?;
            let violations = validate(&c);
            if violations.is_empty() {
                println!("ok");
                return Ok(());
            }
            for v in &violations {
                eprintln!("{}: {}", v.field, v.message);
            }
            Err(Failure {
                code: EXIT_USAGE,
                message: format!("{} violation(s)", violations.len()),
            })
        }
        Command::Analytic { io, variant } => {
            let c = load_valid(&io.scenario)?;
            let variant = match variant {
                Variant::Consistent => TransformVariant::ReceiverConsistent,
                Variant::Shared => TransformVariant::SharedUplinkExponent,
            };
            let report = analytic_report(&c, variant, &QuadraturePolicy::default())?;
            write_report_csv(&c, &report, output(io.out.as_deref())?)?;
            Ok(())
        }
        Command::Simulate {
            io,
            mc,
            dump_samples,
        } => {
            let mut c = load_valid(&io.scenario)?;
            let options = apply_mc(&mut c, &mc);
            c.ensure_valid()?;
            let registry = EngineRegistry::with_defaults(options);
            let out = registry.get("montecarlo")?.evaluate(&c)?;
            write_simulate_csv(
                &c.correlation_mode.to_string(),
                &out,
                output(io.out.as_deref())?,
            )?;
            if let Some(path) = dump_samples {
                let sim = Simulator::new(&c, out.p_hit, options)?;
                let records = sim.sample_records(c.n_snapshots, c.seed)?;
                write_samples_csv(&records, output(Some(&path))?)?;
            }
            Ok(())
        }
        Command::Sweep {
            io,
            mc,
            sweep,
            engines,
        } => {
            let mut c = load_valid(&io.scenario)?;
            let options = apply_mc(&mut c, &mc);
            c.ensure_valid()?;
            let engines: Vec<String> = engines
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect();
            let spec = parse_sweep(&sweep, &engines)?;
            let registry = EngineRegistry::with_defaults(options);
            let rows = run_sweep(&c, &spec, &registry)?;
            write_sweep_csv(&rows, output(io.out.as_deref())?)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            if failed > 0 {
                eprintln!("warning: {failed} sweep point(s) failed; see the status column");
            }
            Ok(())
        }
        Command::Hit {
            io,
            estimator,
            samples,
            seed,
        } => {
            let c = load_valid(&io.scenario)?;
            let registry = HitRegistry::with_defaults();
            let est = registry
                .get(&estimator)?
                .estimate(&c, samples, seed.unwrap_or(c.seed))?;
            let row = HitRow {
                eta: c.eta_files,
                storage: c.storage_size,
                catalog: c.catalog_size,
                radius_request: c.radius_request,
                radius_cache: c.radius_cache,
                gamma: c.zipf_gamma,
                p_hit_analytic: p_hit_for_config(&c)?,
                p_hit_mc: est.ci_halfwidth.map(|_| est.p_hit),
                ci_halfwidth: est.ci_halfwidth,
            };
            write_hit_csv(&[row], output(io.out.as_deref())?)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
