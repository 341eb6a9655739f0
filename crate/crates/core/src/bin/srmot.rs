use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use srmot::config::{parse_scenario, Laser, ModelChoice, Scenario, ScenarioFile};
use srmot::mot::GreenConfig;
use srmot::scenarios;
use srmot::table::{sibling_path, write_table, Format, Metadata, ResultTable};
use srmot::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "srmot", version, about = "Steady states, sweeps and maps of a two-color Sr MOT model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (JSON). Defaults apply to everything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output if omitted. Secondary tables go next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    /// Overrides `model` in the scenario.
    #[arg(long, global = true)]
    model: Option<ModelChoice>,
    /// Overrides `green_config` in the scenario.
    #[arg(long = "green-config", global = true)]
    green_config: Option<GreenConfig>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Transition {
    Blue,
    Green,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resolved atomic data.
    Constants,
    /// Steady state, optionally along one laser-parameter sweep.
    Steady,
    /// Time evolution from a ground-state load.
    Evolve,
    /// Hybrid and full steady states along an s56 or Δ56 sweep.
    Balance,
    /// Fluorescence map over green detuning and gradient.
    Map,
    /// Trap potentials, depth against gradient, and optimal settings.
    Potential,
    /// Detector efficiency from a measured fluorescence rate.
    Calibrate {
        #[arg(long)]
        atom_number: f64,
        #[arg(long)]
        excited_fraction: f64,
        #[arg(long, value_enum)]
        transition: Transition,
        /// Detector counts per second.
        #[arg(long)]
        measured: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Steady => "steady",
            Command::Evolve => "evolve",
            Command::Balance => "balance",
            Command::Map => "map",
            Command::Potential => "potential",
            Command::Calibrate { .. } => "calibrate",
        }
    }
}

fn load(cli: &Cli) -> Result<Scenario> {
    let (mut file, base) = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            (parse_scenario(&text)?, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (ScenarioFile::default(), PathBuf::from(".")),
    };
    if let Some(m) = cli.model {
        file.model = Some(m);
    }
    if let Some(g) = cli.green_config {
        file.green_config = Some(g);
    }
    Scenario::resolve(file, &base)
}

fn run(cli: &Cli) -> Result<Vec<ResultTable>> {
    let sc = load(cli)?;
    Ok(match &cli.command {
        Command::Constants => vec![scenarios::run_constants(&sc)?],
        Command::Steady => vec![scenarios::run_steady(&sc)?],
        Command::Evolve => vec![scenarios::run_time_evolution(&sc)?],
        Command::Balance => vec![scenarios::run_balance_sweep(&sc)?],
        Command::Map => vec![scenarios::run_fluorescence_map(&sc)?],
        Command::Potential => scenarios::run_potential_report(&sc)?,
        Command::Calibrate { atom_number, excited_fraction, transition, measured } => {
            let laser = match transition {
                Transition::Blue => Laser::Blue,
                Transition::Green => Laser::Green,
            };
            vec![scenarios::run_calibrate(*atom_number, *excited_fraction, laser, *measured, &sc)?]
        }
    })
}

fn emit(cli: &Cli, tables: &[ResultTable]) -> Result<()> {
    let sc = load(cli)?;
    let options = match &cli.command {
        Command::Calibrate { atom_number, excited_fraction, transition, measured } => json!({
            "atom_number": atom_number,
            "excited_fraction": excited_fraction,
            "transition": format!("{transition:?}").to_lowercase(),
            "measured": measured,
        }),
        _ => json!({}),
    };
    let meta = Metadata::new(cli.command.name(), sc.resolved_json(), options);
    match &cli.out {
        Some(out) => {
            for (i, t) in tables.iter().enumerate() {
                let path = if i == 0 { out.clone() } else { sibling_path(out, &t.name, cli.format) };
                write_table(&path, t, cli.format, &meta)?;
            }
        }
        None => {
            let mut text = String::new();
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    text.push('\n');
                }
                text.push_str(&t.render(cli.format)?);
            }
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                // a closed reader (`| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(Error::Io(e.to_string())),
                _ => {}
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let tables = match run(&cli).and_then(|t| emit(&cli, &t).map(|_| t)) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let failed: usize = tables.iter().map(|t| t.failures.len()).sum();
    if failed == 0 {
        return ExitCode::SUCCESS;
    }
    for t in &tables {
        for f in &t.failures {
            eprintln!("warning: {} point {} failed: {}", t.name, f.index, f.message);
        }
    }
    if tables.iter().all(|t| t.rows.is_empty()) {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}
