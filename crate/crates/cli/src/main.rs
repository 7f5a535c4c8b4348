use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ldic_core::counterexamples::{class_label, class_topology, labelled_classes};
use ldic_core::network::{enumerate_topology_classes, Topology};
use ldic_core::oracle::{brute_force_sum_capacity, check_oracle_guard, ORACLE_QUALIFIER};
use ldic_core::report::{
    cmd_classify, cmd_counterexamples, cmd_simulate, cmd_sweep, write_csv, CsvRow,
    DEFAULT_SWEEP_SAMPLES,
};
use ldic_core::scenario::Scenario;
use ldic_core::universal::{no_universal_strategy_search, SearchOutcome, DEFAULT_NODE_BUDGET};
use ldic_core::views::{node_view, NodeId};
use ldic_core::Error;

const EXIT_PARSE: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_FAILURE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ldic",
    version,
    about = "Local-view strategies on linear deterministic interference channels"
)]
struct Cli {
    /// Give every node the global connectivity.
    #[arg(long, global = true)]
    genie: bool,
    /// Gains range over 0..=g in sweeps and searches.
    #[arg(long, global = true, value_name = "g")]
    gain_bound: Option<usize>,
    /// Also write the report as CSV.
    #[arg(long, global = true, value_name = "path")]
    csv: Option<PathBuf>,
    /// Seed for sampled checks on four-user networks.
    #[arg(long, global = true, value_name = "int", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Components, their shapes and whether a universal strategy exists.
    Classify { scenario: PathBuf },
    /// Run the distributed strategy and compare with the oracle.
    Simulate { scenario: PathBuf },
    /// What one node knows after message passing.
    View {
        scenario: PathBuf,
        /// Node such as T1 or R3.
        #[arg(long)]
        node: String,
    },
    /// Centralized linear single-shot sum capacity.
    Oracle { scenario: PathBuf },
    /// Compare strategy and oracle over every gain assignment.
    Sweep {
        scenario: PathBuf,
        /// Assignments drawn for four-user networks.
        #[arg(long, default_value_t = DEFAULT_SWEEP_SAMPLES)]
        samples: usize,
    },
    /// Replay the built-in three-user counterexamples.
    Counterexamples,
    /// Orbits of cross-link sets under relabeling.
    EnumerateTopologies {
        #[arg(long, default_value_t = 3)]
        users: usize,
    },
    /// Search for a universally optimal table on three-user classes.
    SearchUniversal {
        /// Class label a..p; all sixteen when omitted.
        #[arg(long, conflicts_with = "scenario")]
        class: Option<char>,
        /// Scenario whose topology is searched.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Extract a minimal set of gain assignments behind an infeasible verdict.
        #[arg(long)]
        core: bool,
        /// Print the table found for feasible classes.
        #[arg(long)]
        table: bool,
    },
}

/// Failure carrying the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Topology(_) => EXIT_PARSE,
            Error::SizeGuard { .. } => EXIT_GUARD,
            Error::Invariant(_) | Error::NotReducible(_) => EXIT_FAILURE,
            Error::InvalidGain { .. } | Error::Dimension { .. } | Error::Contract(_) => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn failure(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let s = Scenario::from_path(path).map_err(|e| match e {
        Error::Parse { .. } => Failure {
            code: EXIT_PARSE,
            message: format!("{}: {e}", path.display()),
        },
        other => other.into(),
    })?;
    for w in &s.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(s)
}

fn emit_csv(path: &Option<PathBuf>, rows: &[CsvRow]) -> Result<(), Failure> {
    if let Some(path) = path {
        let file = File::create(path)
            .map_err(|e| failure(1, format!("cannot create {}: {e}", path.display())))?;
        write_csv(file, rows)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { scenario } => {
            let s = load(&scenario)?;
            let t = s.gains.topology();
            let report = cmd_classify(&s.label, t);
            println!("{report}");
            if let Some(l) = class_label(t) {
                println!("three-user class ({l})");
            }
        }
        Command::Simulate { scenario } => {
            let s = load(&scenario)?;
            let report = cmd_simulate(&s.label, &s.gains, cli.genie || s.genie)?;
            println!("{report}");
            emit_csv(&cli.csv, &report.csv_rows())?;
            if !report.decodable {
                return Err(failure(
                    EXIT_FAILURE,
                    "distributed strategy failed to decode",
                ));
            }
        }
        Command::View { scenario, node } => {
            let s = load(&scenario)?;
            let node: NodeId = node.parse()?;
            let view = node_view(&s.gains, node, cli.genie || s.genie)?;
            println!(
                "{} knows {} of {} links:",
                node,
                view.known.len(),
                s.gains.topology().link_count()
            );
            for (&(t, r), g) in &view.known {
                println!("  n{}{} = {g}", t + 1, r + 1);
            }
            if let Some(t) = &view.genie_topology {
                println!("genie connectivity: {t}");
            }
        }
        Command::Oracle { scenario } => {
            let s = load(&scenario)?;
            let result = brute_force_sum_capacity(&s.gains).map_err(|e| match e {
                Error::SizeGuard { .. } => failure(
                    EXIT_GUARD,
                    format!("oracle refused: {e} (bounds: q<=6 for up to 3 users per component, q<=4 for 4)"),
                ),
                other => other.into(),
            })?;
            println!("scenario {}", s.label);
            println!("sum {} ({ORACLE_QUALIFIER})", result.sum);
            println!("rates {}", result.rates);
            for (k, enc) in result.encoders.iter().enumerate() {
                println!("  T{} codebook {enc}", k + 1);
            }
            let rows = vec![CsvRow {
                scenario_label: s.label.clone(),
                component_id: "total".into(),
                classification: if s.gains.topology().qualifies() {
                    "qualifying"
                } else {
                    "non-qualifying"
                }
                .into(),
                distributed_sum: 0,
                oracle_sum: Some(result.sum),
                gap: None,
                verdict: ORACLE_QUALIFIER.into(),
            }];
            emit_csv(&cli.csv, &rows)?;
        }
        Command::Sweep { scenario, samples } => {
            let s = load(&scenario)?;
            let bound = cli.gain_bound.or(s.gain_bound).unwrap_or(2);
            let t = s.gains.topology();
            for c in ldic_core::network::components(t) {
                check_oracle_guard(c.members.len(), bound)?;
            }
            let report = cmd_sweep(&s.label, t, bound, cli.genie || s.genie, cli.seed, samples)?;
            println!("{report}");
            emit_csv(&cli.csv, &report.csv_rows())?;
        }
        Command::Counterexamples => {
            let report = cmd_counterexamples()?;
            println!("{report}");
            emit_csv(&cli.csv, &report.csv_rows())?;
            if !report.passed() {
                let failed: Vec<String> = report
                    .replays
                    .iter()
                    .filter(|r| !r.passed())
                    .map(|r| format!("({})", r.label))
                    .collect();
                return Err(failure(
                    EXIT_FAILURE,
                    format!("replay failed for {}", failed.join(", ")),
                ));
            }
        }
        Command::EnumerateTopologies { users } => {
            let mut classes = enumerate_topology_classes(users)?;
            classes.sort_by_key(|c| class_label(&c.representative));
            let total: usize = classes.iter().map(|c| c.orbit_size).sum();
            for c in &classes {
                let label = class_label(&c.representative)
                    .map(|l| format!("({l})"))
                    .unwrap_or_else(|| "   ".into());
                let verdict = if c.representative.qualifies() {
                    "qualifying"
                } else {
                    "non-qualifying"
                };
                println!(
                    "{label} size {:>3}  {:<14}  {}",
                    c.orbit_size, verdict, c.representative
                );
            }
            println!("{} classes, {total} topologies", classes.len());
        }
        Command::SearchUniversal {
            class,
            scenario,
            budget,
            core,
            table,
        } => {
            let bound = cli.gain_bound.unwrap_or(1);
            let targets: Vec<(String, Topology)> = match (class, scenario) {
                (Some(l), _) => {
                    let t = class_topology(l)
                        .ok_or_else(|| failure(EXIT_PARSE, format!("unknown class `{l}`")))?;
                    vec![(format!("({l})"), t)]
                }
                (None, Some(path)) => {
                    let s = load(&path)?;
                    vec![(s.label.clone(), s.gains.topology().clone())]
                }
                (None, None) => labelled_classes()
                    .into_iter()
                    .map(|(l, t)| (format!("({l})"), t))
                    .collect(),
            };
            println!(
                "genie connectivity: on (tables are keyed by visible gains on a known topology)"
            );
            let mut rows = Vec::new();
            let mut mismatched = Vec::new();
            for (name, t) in targets {
                let r = no_universal_strategy_search(&t, bound, budget, core)?;
                let expected = if t.qualifies() {
                    Some("feasible")
                } else if bound >= 1 && matches!(class_label(&t), Some('e' | 'f')) {
                    Some("infeasible")
                } else {
                    None
                };
                let mark = match expected {
                    Some(e) if e == r.verdict() => "expected",
                    Some(_) => "UNEXPECTED",
                    None => "reported",
                };
                if mark == "UNEXPECTED" {
                    mismatched.push(name.clone());
                }
                println!("{name:<6} {r} [{mark}]");
                match &r.outcome {
                    SearchOutcome::Infeasible { core: Some(core) } => {
                        println!("       core of {} assignments:", core.len());
                        for gm in core {
                            println!("         {gm}");
                        }
                    }
                    SearchOutcome::Feasible(tab) if table => print!("{tab}"),
                    _ => {}
                }
                rows.push(CsvRow {
                    scenario_label: name,
                    component_id: "total".into(),
                    classification: if t.qualifies() {
                        "qualifying"
                    } else {
                        "non-qualifying"
                    }
                    .into(),
                    distributed_sum: 0,
                    oracle_sum: None,
                    gap: None,
                    verdict: r.verdict().into(),
                });
            }
            emit_csv(&cli.csv, &rows)?;
            if !mismatched.is_empty() {
                return Err(failure(
                    EXIT_FAILURE,
                    format!("unexpected verdict for {}", mismatched.join(", ")),
                ));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
