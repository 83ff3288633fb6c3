use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use potent_cli::config::validate;
use potent_cli::presets::template;
use potent_cli::{
    emit_results, parse_config, run_scenario, run_sweep, verify_rows, CliError, ConfigError, Destination, Format,
    ResultRow, ScenarioConfig, ScenarioKind,
};

#[derive(Parser)]
#[command(name = "potent", version, about = "Weak, modular and potent value scenarios with oracle cross-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario document (TOML). Without it a kind subcommand runs its preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replaces every residual tolerance (testing only).
    #[arg(long, global = true, allow_negative_numbers = true)]
    tolerance_override: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Weak value per coupling, with the pointer post-selection probability.
    WeakValue,
    /// Modular value per coupling and the weak value estimated from it.
    ModularValue,
    /// Potent values in the meter's computational basis.
    PotentValues,
    /// Entries of the potent operator.
    PotentOperator,
    /// Residual of the potent-operator completeness identity.
    Completeness,
    /// Gaussian pointer shifts against their weak-value predictions.
    PointerShift,
    /// Seeded system- and apparatus-controlled unitaries and their reductions.
    Conditional,
    /// Superposition of time translations of one Hamiltonian.
    TimeMachine,
    /// Runs the full invariant suite.
    Verify,
    /// Expands the config's [sweep] table into a Cartesian grid of runs.
    Sweep,
    /// Prints the preset config for a scenario kind.
    Template {
        #[arg(value_enum)]
        kind: ScenarioKind,
    },
}

impl Command {
    fn kind(&self) -> Option<ScenarioKind> {
        use ScenarioKind as K;
        Some(match self {
            Command::WeakValue => K::WeakValue,
            Command::ModularValue => K::ModularValue,
            Command::PotentValues => K::PotentValues,
            Command::PotentOperator => K::PotentOperator,
            Command::Completeness => K::Completeness,
            Command::PointerShift => K::PointerShift,
            Command::Conditional => K::Conditional,
            Command::TimeMachine => K::TimeMachine,
            _ => return None,
        })
    }
}

fn load(path: &PathBuf) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn scenario(cli: &Cli, kind: Option<ScenarioKind>) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match (&cli.config, kind) {
        (Some(path), _) => load(path)?,
        (None, Some(k)) => validate(&template(k))?,
        (None, None) => {
            return Err(ConfigError::Invalid {
                key: "--config".into(),
                message: "required for sweep".into(),
            }
            .into())
        }
    };
    if let Some(k) = kind {
        if cfg.kind != k {
            return Err(ConfigError::invalid("kind", format!("config is {} but subcommand is {k}", cfg.kind)).into());
        }
        if cfg.sweep.is_some() {
            return Err(ConfigError::invalid("sweep", "run configs with a [sweep] table through `potent sweep`").into());
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        if let Some(s) = cfg.sweep.as_mut() {
            s.seeds = vec![seed];
        }
    }
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn summarize(label: &str, rows: &[ResultRow]) -> usize {
    let failed = rows.iter().filter(|r| !r.agrees()).count();
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let status = if failed == 0 { "ok" } else { "FAILED" };
    eprintln!("{label}: {} rows, max residual {worst:e}, {failed} above tolerance: {status}", rows.len());
    failed
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (label, rows, output) = match &cli.command {
        Command::Template { kind } => {
            let text = template(*kind).to_toml()?;
            return match &cli.out {
                Some(path) => std::fs::write(path, text).map_err(|source| {
                    potent_cli::OutputError::Write {
                        path: path.clone(),
                        source,
                    }
                    .into()
                }),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
        }
        Command::Verify => {
            let seed = cli.seed.unwrap_or(1);
            (format!("verify (seed {seed})"), verify_rows(seed)?, Default::default())
        }
        Command::Sweep => {
            let cfg = scenario(cli, None)?;
            (format!("{} sweep", cfg.name), run_sweep(&cfg)?, cfg.output)
        }
        cmd => {
            let cfg = scenario(cli, cmd.kind())?;
            (cfg.name.clone(), run_scenario(&cfg)?, cfg.output)
        }
    };

    let mut rows = rows;
    if let Some(t) = cli.tolerance_override {
        for r in &mut rows {
            r.tolerance = t;
        }
    }
    let format = cli.format.or(output.format).unwrap_or_default();
    let dest = match cli.out.clone().or(output.path) {
        Some(p) => Destination::File(p),
        None => Destination::Stdout,
    };
    emit_results(&rows, format, &dest)?;
    let failed = summarize(&label, &rows);
    if failed > 0 {
        return Err(CliError::Residual {
            failed,
            total: rows.len(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
