use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kaon_epr::cli::{cmd_correlate, cmd_probabilities, cmd_validate, CliError, SweepConfig};
use kaon_epr::observables::StatisticsMode;
use kaon_epr::params::{PhysicalParams, Preset};

#[derive(Parser)]
#[command(
    name = "kaon-epr",
    about = "EPR correlations of unstable neutral meson pairs under Kraus evolution",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a correlation function over a (t_a, t_b) grid and emit CSV.
    Correlate(SweepArgs),
    /// Sweep the four flavor joint probabilities over a grid and emit CSV.
    Probabilities(SweepArgs),
    /// Run the invariant suites for a parameter set and report pass/fail.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ParamsSource {
    /// Named parameter preset (kaon-like, b-meson-like).
    #[arg(long, conflicts_with = "params")]
    preset: Option<String>,
    /// JSON parameter file with keys gamma_s, gamma_l, m_s, m_l,
    /// epsilon_re, epsilon_im, lambda.
    #[arg(long)]
    params: Option<PathBuf>,
}

impl ParamsSource {
    /// Returns the parameter set and the kinematic rest mass ((m_s+m_l)/2
    /// when loading from a file, the tabulated rest mass for presets).
    fn resolve(&self) -> Result<(PhysicalParams, f64), CliError> {
        match (&self.preset, &self.params) {
            (Some(name), None) => {
                let preset = Preset::by_name(name).ok_or_else(|| {
                    CliError::Config(format!(
                        "unknown preset `{name}` (available: kaon-like, b-meson-like)"
                    ))
                })?;
                Ok((preset.params, preset.rest_mass))
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                let params = PhysicalParams::from_json(&text)?;
                let rest_mass = 0.5 * (params.m_s() + params.m_l());
                if rest_mass <= 0.0 {
                    return Err(CliError::Config(
                        "parameter file implies a nonpositive kinematic rest mass".into(),
                    ));
                }
                Ok((params, rest_mass))
            }
            _ => Err(CliError::Config(
                "pass exactly one of --preset or --params".into(),
            )),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: ParamsSource,
    /// Observable pair, e.g. "S@p S@q", "D+@p D+@q" or "D+@p D-@q".
    #[arg(long, default_value = "S@p S@q")]
    observables: String,
    /// Particle statistics: distinguishable or identical.
    #[arg(long, default_value = "distinguishable")]
    mode: String,
    /// Alice's laboratory-time grid as lo:hi:n.
    #[arg(long = "ta-range", default_value = "0:10:11")]
    ta_range: String,
    /// Bob's laboratory-time grid as lo:hi:n.
    #[arg(long = "tb-range", default_value = "0:10:11")]
    tb_range: String,
    /// Momentum magnitude |p| of Alice's particle.
    #[arg(long = "p-mom", default_value_t = 0.0)]
    p_mom: f64,
    /// Momentum magnitude |q| of Bob's particle.
    #[arg(long = "q-mom", default_value_t = 0.0)]
    q_mom: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig, CliError> {
        let (params, rest_mass) = self.source.resolve()?;
        let mode: StatisticsMode = self
            .mode
            .parse()
            .map_err(|e: kaon_epr::Error| CliError::Config(e.to_string()))?;
        Ok(SweepConfig {
            params,
            rest_mass,
            observables: self.observables.parse()?,
            mode,
            ta_range: self.ta_range.parse()?,
            tb_range: self.tb_range.parse()?,
            p_mom: self.p_mom,
            q_mom: self.q_mom,
        })
    }
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: ParamsSource,
    /// Momentum magnitude |p| used by the validation layouts.
    #[arg(long = "p-mom", default_value_t = 0.0)]
    p_mom: f64,
    /// Momentum magnitude |q| used by the validation layouts.
    #[arg(long = "q-mom", default_value_t = 0.0)]
    q_mom: f64,
}

fn run_sweep(
    args: &SweepArgs,
    runner: fn(&SweepConfig, &mut dyn std::io::Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let config = args.config()?;
    let file = File::create(&args.out)?;
    let mut writer = BufWriter::new(file);
    runner(&config, &mut writer)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<ExitCode, CliError> = match &cli.command {
        Command::Correlate(args) => run_sweep(args, cmd_correlate).map(|()| ExitCode::SUCCESS),
        Command::Probabilities(args) => {
            run_sweep(args, cmd_probabilities).map(|()| ExitCode::SUCCESS)
        }
        Command::Validate(args) => args.source.resolve().and_then(|(params, rest_mass)| {
            let report = cmd_validate(&params, rest_mass, args.p_mom, args.q_mom)?;
            print!("{report}");
            if report.all_passed() {
                println!("all checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("validation failed");
                Ok(ExitCode::from(1))
            }
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
