use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lostchance::verify::{VerifyConfig, DEFAULT_INSTANCES, DEFAULT_SEED};
use lostchance::{Connection, Indemnity, Information, PolicyCombo, Presumption};
use lostchance_cli::casefile::{schema, CaseFile};
use lostchance_cli::commands::{self, Axis, InfoSpec, Output, Selection};
use lostchance_cli::CliError;

/// Compensation for lost chances: evaluate cases, reproduce the published
/// tables, run sweeps and the oracle suite.
#[derive(Parser)]
#[command(name = "lostchance", version)]
struct Cli {
    /// Exit with status 1 when a computation raises a flag.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compensation schedule of a case file under one or all policies.
    Evaluate(EvaluateArgs),
    /// Computed vs printed values for table 2, 4, 5 or 6.
    Table(TableArgs),
    /// Parameter sweep written as CSV.
    Sweep {
        #[command(subcommand)]
        which: SweepKind,
    },
    /// Random-instance checks of the closed forms against brute-force oracles.
    Verify(VerifyArgs),
    /// JSON Schema of the case-file format.
    Schema,
}

fn parse_info(s: &str) -> Result<Information, String> {
    s.parse().map_err(|e: lostchance::Error| e.to_string())
}

fn parse_connection(s: &str) -> Result<Connection, String> {
    s.parse().map_err(|e: lostchance::Error| e.to_string())
}

fn parse_indemnity(s: &str) -> Result<Indemnity, String> {
    s.parse().map_err(|e: lostchance::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum PresumptionArg {
    /// Yields to evidence on the counterfactual choice.
    ItCp,
    /// Overrides any evidence.
    IiCp,
}

#[derive(Args)]
struct PolicyArgs {
    /// Information restriction: l-fi, m-fi or h-fi.
    #[arg(long, value_parser = parse_info, conflicts_with = "partition")]
    info: Option<Information>,
    /// Custom information partition as outcome-label blocks, e.g. "a1,a2;a3".
    #[arg(long)]
    partition: Option<String>,
    /// Connection restriction: e-c, ld-c, i-c or paper-table.
    #[arg(long, value_parser = parse_connection)]
    connection: Option<Connection>,
    /// Indemnity restriction: cc-i or fm-i.
    #[arg(long, value_parser = parse_indemnity)]
    indemnity: Option<Indemnity>,
}

#[derive(Args)]
struct EvaluateArgs {
    case: PathBuf,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Every applicable combination of the built-in restrictions.
    #[arg(long, conflicts_with_all = ["info", "partition", "connection", "indemnity"])]
    all_policies: bool,
    /// Presumption applied when a choice case leaves the counterfactual
    /// choice open.
    #[arg(long, value_enum, default_value = "it-cp")]
    presumption: PresumptionArg,
    /// Comma-separated output at full precision.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct TableArgs {
    id: u8,
    #[arg(long, requires_all = ["p1", "delta_v"])]
    p0: Option<f64>,
    #[arg(long, requires_all = ["p0", "delta_v"])]
    p1: Option<f64>,
    #[arg(long, requires_all = ["p0", "p1"])]
    delta_v: Option<f64>,
}

#[derive(Subcommand)]
enum SweepKind {
    /// Game-show award over a (theta, p) grid.
    Matos {
        #[arg(long, default_value_t = 0.0)]
        theta_min: f64,
        #[arg(long, default_value_t = 1.0)]
        theta_max: f64,
        #[arg(long, default_value_t = 101)]
        theta_steps: usize,
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 101)]
        p_steps: usize,
        /// Output file; defaults to matos.csv in $LOSTCHANCE_OUT_DIR or here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Misdiagnosis awards over p1 at fixed p0.
    Medical {
        #[arg(long, default_value_t = 0.95)]
        p0: f64,
        #[arg(long, default_value_t = 0.0)]
        p1_min: f64,
        /// Defaults to p0.
        #[arg(long)]
        p1_max: Option<f64>,
        #[arg(long, default_value_t = 101)]
        p1_steps: usize,
        #[arg(long, default_value_t = 100_000.0)]
        delta_v: f64,
        #[arg(long, value_parser = parse_info, default_value = "h-fi")]
        info: Information,
        #[arg(long, value_parser = parse_connection, default_value = "e-c")]
        connection: Connection,
        #[arg(long, value_parser = parse_indemnity, default_value = "cc-i")]
        indemnity: Indemnity,
        /// Output file; defaults to medical.csv in $LOSTCHANCE_OUT_DIR or here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_INSTANCES)]
    instances: usize,
    /// Shift the fixed-mean schedule's lambda by this much (fault injection).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda_offset: f64,
}

fn selection(a: &EvaluateArgs) -> Result<Selection, CliError> {
    if a.all_policies {
        return Ok(Selection::All);
    }
    let p = &a.policy;
    let info = match (&p.info, &p.partition) {
        (Some(i), None) => InfoSpec::Named(i.clone()),
        (None, Some(s)) => InfoSpec::Blocks(s.clone()),
        _ => {
            return Err(CliError::Input(
                "give --info or --partition, or use --all-policies".into(),
            ))
        }
    };
    match (p.connection, p.indemnity) {
        (Some(connection), Some(indemnity)) => Ok(Selection::One {
            info,
            connection,
            indemnity,
        }),
        _ => Err(CliError::Input(
            "give --connection and --indemnity, or use --all-policies".into(),
        )),
    }
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Evaluate(a) => {
            let sel = selection(&a)?;
            let loaded = CaseFile::read(&a.case)?.load()?;
            let presumption = match a.presumption {
                PresumptionArg::ItCp => Presumption::IurisTantum,
                PresumptionArg::IiCp => Presumption::IurisEtDeIure,
            };
            commands::evaluate(&loaded, &sel, presumption, a.csv)
        }
        Command::Table(a) => {
            let params = match (a.p0, a.p1, a.delta_v) {
                (Some(p0), Some(p1), Some(dv)) => Some((p0, p1, dv)),
                _ => None,
            };
            commands::table(a.id, params)
        }
        Command::Sweep { which } => match which {
            SweepKind::Matos {
                theta_min,
                theta_max,
                theta_steps,
                p_min,
                p_max,
                p_steps,
                out,
            } => commands::sweep_matos(
                Axis {
                    min: theta_min,
                    max: theta_max,
                    steps: theta_steps,
                },
                Axis {
                    min: p_min,
                    max: p_max,
                    steps: p_steps,
                },
                &commands::output_path(out, "matos.csv"),
            ),
            SweepKind::Medical {
                p0,
                p1_min,
                p1_max,
                p1_steps,
                delta_v,
                info,
                connection,
                indemnity,
                out,
            } => commands::sweep_medical(
                p0,
                Axis {
                    min: p1_min,
                    max: p1_max.unwrap_or(p0),
                    steps: p1_steps,
                },
                delta_v,
                &PolicyCombo::new(info, connection, indemnity),
                &commands::output_path(out, "medical.csv"),
            ),
        },
        Command::Verify(a) => Ok(commands::verify(&VerifyConfig {
            seed: a.seed,
            instances: a.instances,
            lambda_offset: a.lambda_offset,
        })),
        Command::Schema => Ok(Output {
            text: schema() + "\n",
            ..Output::default()
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.strict;
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.failed {
                eprintln!("check failed");
                ExitCode::from(1)
            } else if strict && !out.flags.is_empty() {
                for f in &out.flags {
                    eprintln!("flagged: {f}");
                }
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
