//! Reports behind the command-line front end, and their CSV rows.

use std::fmt;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counterexamples::{builtin_counterexamples, replay, ReplayReport};
use crate::error::{Error, Result};
use crate::network::{components, gain_assignments, Configuration, GainMatrix, Topology};
use crate::oracle::{brute_force_sum_capacity, CapacityResult, ORACLE_QUALIFIER};
use crate::strategy::{simulate, RateVector, StrategyCase};

/// Column order of every CSV the tool writes.
pub const CSV_COLUMNS: [&str; 7] = [
    "scenario_label",
    "component_id",
    "classification",
    "distributed_sum",
    "oracle_sum",
    "gap",
    "verdict",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CsvRow {
    pub scenario_label: String,
    pub component_id: String,
    pub classification: String,
    pub distributed_sum: usize,
    pub oracle_sum: Option<usize>,
    pub gap: Option<i64>,
    pub verdict: String,
}

/// Writes rows with the fixed header, even when there are none.
pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let io = |e: csv::Error| Error::Invariant(format!("csv output failed: {e}"));
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Invariant(format!("csv output failed: {e}")))
}

fn members_label(members: &[usize]) -> String {
    let ids: Vec<String> = members.iter().map(|u| (u + 1).to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyReport {
    pub label: String,
    pub components: Vec<(Vec<usize>, Configuration)>,
    pub universal_strategy_exists: bool,
}

pub fn cmd_classify(label: &str, t: &Topology) -> ClassifyReport {
    ClassifyReport {
        label: label.to_string(),
        components: components(t)
            .into_iter()
            .map(|c| (c.members, c.configuration))
            .collect(),
        universal_strategy_exists: t.qualifies(),
    }
}

impl fmt::Display for ClassifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.label)?;
        for (i, (members, conf)) in self.components.iter().enumerate() {
            writeln!(
                f,
                "  component {}: users {} {conf}",
                i + 1,
                members_label(members)
            )?;
        }
        let verdict = if self.universal_strategy_exists {
            "EXISTS"
        } else {
            "DOES NOT EXIST"
        };
        write!(f, "universally optimal strategy {verdict}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSummary {
    pub members: Vec<usize>,
    pub configuration: Configuration,
    pub distributed_sum: usize,
    pub oracle_sum: Option<usize>,
}

impl ComponentSummary {
    pub fn gap(&self) -> Option<i64> {
        self.oracle_sum
            .map(|o| o as i64 - self.distributed_sum as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub label: String,
    pub rates: RateVector,
    pub cases: Vec<StrategyCase>,
    pub components: Vec<ComponentSummary>,
    pub decodable: bool,
    pub oracle: Option<CapacityResult>,
    /// Why the oracle was skipped, when it was.
    pub oracle_notice: Option<String>,
    pub elapsed: Duration,
}

impl RunReport {
    pub fn distributed_sum(&self) -> usize {
        self.rates.sum()
    }

    pub fn gap(&self) -> Option<i64> {
        self.oracle
            .as_ref()
            .map(|o| o.sum as i64 - self.distributed_sum() as i64)
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let verdict = |gap: Option<i64>| match gap {
            Some(0) => "optimal".to_string(),
            Some(_) => "suboptimal".to_string(),
            None => "oracle-skipped".to_string(),
        };
        let mut rows: Vec<CsvRow> = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| CsvRow {
                scenario_label: self.label.clone(),
                component_id: (i + 1).to_string(),
                classification: c.configuration.to_string(),
                distributed_sum: c.distributed_sum,
                oracle_sum: c.oracle_sum,
                gap: c.gap(),
                verdict: verdict(c.gap()),
            })
            .collect();
        let all_qualify = self.components.iter().all(|c| c.configuration.qualifies());
        rows.push(CsvRow {
            scenario_label: self.label.clone(),
            component_id: "total".into(),
            classification: if all_qualify {
                "qualifying"
            } else {
                "non-qualifying"
            }
            .into(),
            distributed_sum: self.distributed_sum(),
            oracle_sum: self.oracle.as_ref().map(|o| o.sum),
            gap: self.gap(),
            verdict: verdict(self.gap()),
        });
        rows
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.label)?;
        for (k, (r, case)) in self.rates.as_slice().iter().zip(&self.cases).enumerate() {
            writeln!(f, "  T{}: rate {r} ({case})", k + 1)?;
        }
        for (i, c) in self.components.iter().enumerate() {
            write!(
                f,
                "  component {} users {} {}: distributed {}",
                i + 1,
                members_label(&c.members),
                c.configuration,
                c.distributed_sum
            )?;
            match c.oracle_sum {
                Some(o) => writeln!(f, ", oracle {o} ({ORACLE_QUALIFIER})")?,
                None => writeln!(f)?,
            }
        }
        writeln!(
            f,
            "distributed sum {} {}, decodable {}",
            self.distributed_sum(),
            self.rates,
            self.decodable
        )?;
        match (&self.oracle, &self.oracle_notice) {
            (Some(o), _) => writeln!(f, "oracle sum {o}, gap {}", self.gap().unwrap_or(0))?,
            (None, Some(n)) => writeln!(f, "oracle skipped: {n}")?,
            (None, None) => {}
        }
        write!(f, "elapsed {:.3} ms", self.elapsed.as_secs_f64() * 1e3)
    }
}

/// Distributed strategy plus the oracle comparison. The oracle is skipped
/// with a notice when its guard refuses the instance.
pub fn cmd_simulate(label: &str, gm: &GainMatrix, genie: bool) -> Result<RunReport> {
    let start = Instant::now();
    let sim = simulate(gm, genie)?;
    let rates = sim.rates();
    let (oracle, oracle_notice) = match brute_force_sum_capacity(gm) {
        Ok(o) => (Some(o), None),
        Err(e @ Error::SizeGuard { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let components = components(gm.topology())
        .into_iter()
        .map(|c| {
            let distributed_sum = c.members.iter().map(|&u| rates[u]).sum();
            let oracle_sum = oracle
                .as_ref()
                .map(|o| c.members.iter().map(|&u| o.rates[u]).sum());
            ComponentSummary {
                members: c.members,
                configuration: c.configuration,
                distributed_sum,
                oracle_sum,
            }
        })
        .collect();
    Ok(RunReport {
        label: label.to_string(),
        rates,
        cases: sim.cases,
        components,
        decodable: sim.decodability.all(),
        oracle,
        oracle_notice,
        elapsed: start.elapsed(),
    })
}

/// Largest gain bound accepted by [`cmd_sweep`].
pub const SWEEP_MAX_GAIN: usize = 3;
/// Largest user count swept exhaustively; larger networks are sampled.
pub const SWEEP_EXHAUSTIVE_USERS: usize = 3;
/// Largest user count accepted by [`cmd_sweep`].
pub const SWEEP_MAX_USERS: usize = 4;
pub const DEFAULT_SWEEP_SAMPLES: usize = 500;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepPoint {
    pub gains: GainMatrix,
    pub distributed_sum: usize,
    pub oracle_sum: usize,
    pub decodable: bool,
}

impl SweepPoint {
    pub fn gap(&self) -> i64 {
        self.oracle_sum as i64 - self.distributed_sum as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub label: String,
    pub topology: Topology,
    pub gain_bound: usize,
    /// `Some(seed)` when assignments were sampled instead of enumerated.
    pub sampled_with_seed: Option<u64>,
    pub points: Vec<SweepPoint>,
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn max_gap(&self) -> i64 {
        self.points.iter().map(SweepPoint::gap).max().unwrap_or(0)
    }

    pub fn positive_gaps(&self) -> usize {
        self.points.iter().filter(|p| p.gap() > 0).count()
    }

    pub fn decode_failures(&self) -> usize {
        self.points.iter().filter(|p| !p.decodable).count()
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let classification = if self.topology.qualifies() {
            "qualifying"
        } else {
            "non-qualifying"
        };
        self.points
            .iter()
            .map(|p| CsvRow {
                scenario_label: format!("{}@{}", self.label, p.gains),
                component_id: "total".into(),
                classification: classification.into(),
                distributed_sum: p.distributed_sum,
                oracle_sum: Some(p.oracle_sum),
                gap: Some(p.gap()),
                verdict: if !p.decodable {
                    "decode-failure".into()
                } else if p.gap() == 0 {
                    "optimal".into()
                } else {
                    "suboptimal".into()
                },
            })
            .collect()
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.sampled_with_seed {
            Some(seed) => format!("sampled, seed {seed}"),
            None => "exhaustive".into(),
        };
        writeln!(
            f,
            "sweep {} [{}] gains 0..={} ({mode}): {} assignments",
            self.label,
            self.topology,
            self.gain_bound,
            self.points.len()
        )?;
        writeln!(
            f,
            "  max gap {}, positive-gap assignments {}, decode failures {} (oracle: {ORACLE_QUALIFIER})",
            self.max_gap(),
            self.positive_gaps(),
            self.decode_failures()
        )?;
        if let Some(worst) = self
            .points
            .iter()
            .max_by_key(|p| p.gap())
            .filter(|p| p.gap() > 0)
        {
            writeln!(
                f,
                "  largest gap at {}: distributed {} vs oracle {}",
                worst.gains, worst.distributed_sum, worst.oracle_sum
            )?;
        }
        write!(f, "  elapsed {:.3} s", self.elapsed.as_secs_f64())
    }
}

fn random_gains(t: &Topology, bound: usize, rng: &mut ChaCha8Rng) -> GainMatrix {
    GainMatrix::from_fn(t.clone(), |_, _| rng.random_range(0..=bound))
}

/// Runs the distributed strategy against the oracle over every gain
/// assignment (up to three users) or `samples` seeded ones (four users).
/// A positive gap on a qualifying topology, or any decoding failure, is an
/// invariant violation.
pub fn cmd_sweep(
    label: &str,
    t: &Topology,
    gain_bound: usize,
    genie: bool,
    seed: u64,
    samples: usize,
) -> Result<SweepReport> {
    if gain_bound > SWEEP_MAX_GAIN {
        return Err(Error::SizeGuard {
            what: "sweep gain bound",
            value: gain_bound,
            limit: SWEEP_MAX_GAIN,
        });
    }
    if t.users() > SWEEP_MAX_USERS {
        return Err(Error::SizeGuard {
            what: "sweep users",
            value: t.users(),
            limit: SWEEP_MAX_USERS,
        });
    }
    let start = Instant::now();
    let (assignments, sampled_with_seed): (Vec<GainMatrix>, Option<u64>) =
        if t.users() <= SWEEP_EXHAUSTIVE_USERS {
            (gain_assignments(t, gain_bound).collect(), None)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                (0..samples)
                    .map(|_| random_gains(t, gain_bound, &mut rng))
                    .collect(),
                Some(seed),
            )
        };
    let mut points = Vec::with_capacity(assignments.len());
    for gains in assignments {
        let sim = simulate(&gains, genie)?;
        let oracle_sum = brute_force_sum_capacity(&gains)?.sum;
        points.push(SweepPoint {
            distributed_sum: sim.rates().sum(),
            oracle_sum,
            decodable: sim.decodability.all(),
            gains,
        });
    }
    let report = SweepReport {
        label: label.to_string(),
        topology: t.clone(),
        gain_bound,
        sampled_with_seed,
        points,
        elapsed: start.elapsed(),
    };
    if report.decode_failures() > 0 {
        return Err(Error::Invariant(format!(
            "{} assignments of {} failed to decode",
            report.decode_failures(),
            label
        )));
    }
    if t.qualifies() && report.max_gap() > 0 {
        return Err(Error::Invariant(format!(
            "qualifying topology {label} has a positive gap {}",
            report.max_gap()
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub replays: Vec<ReplayReport>,
    pub elapsed: Duration,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.replays.iter().all(ReplayReport::passed)
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.replays
            .iter()
            .map(|r| CsvRow {
                scenario_label: format!("({})", r.label),
                component_id: "1".into(),
                classification: Configuration::Other.to_string(),
                distributed_sum: r.forced_sum,
                oracle_sum: Some(r.oracle_sum),
                gap: Some(r.gap()),
                verdict: if r.passed() {
                    "replay-ok".into()
                } else {
                    let failed: Vec<String> =
                        r.failed_steps().map(|s| s.step.to_string()).collect();
                    format!("replay-failed:{}", failed.join("+"))
                },
            })
            .collect()
    }
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<5} {:<40} {:>6} {:>11} {:>6} {:>4}  replay",
            "label", "gains", "forced", "centralized", "oracle", "gap"
        )?;
        let all = builtin_counterexamples();
        for r in &self.replays {
            let gains = all
                .iter()
                .find(|c| c.label == r.label)
                .map(|c| c.gains.to_string())
                .unwrap_or_default();
            let status = if r.passed() {
                "ok".to_string()
            } else {
                let failed: Vec<String> = r
                    .failed_steps()
                    .map(|s| format!("{} ({})", s.step, s.detail))
                    .collect();
                format!("FAILED: {}", failed.join("; "))
            };
            writeln!(
                f,
                "({})   {:<40} {:>6} {:>11} {:>6} {:>4}  {status}",
                r.label,
                gains,
                r.forced_sum,
                r.centralized_sum,
                r.oracle_sum,
                r.gap()
            )?;
        }
        write!(
            f,
            "oracle: {ORACLE_QUALIFIER}; elapsed {:.3} s",
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn cmd_counterexamples() -> Result<CounterexampleReport> {
    let start = Instant::now();
    let replays = builtin_counterexamples()
        .iter()
        .map(replay)
        .collect::<Result<Vec<_>>>()?;
    Ok(CounterexampleReport {
        replays,
        elapsed: start.elapsed(),
    })
}
