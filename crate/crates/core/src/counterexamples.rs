//! Built-in three-user instances where local knowledge is provably not
//! enough, plus the class labels of all sixteen three-user orbits.

use std::fmt;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gf2::Subspace;
use crate::network::{canonical_form, GainMatrix, Topology};
use crate::oracle::{brute_force_sum_capacity, rate_vector_feasible};
use crate::strategy::RateVector;
use crate::views::{node_view, NodeId};

const DATA: &str = include_str!("../data/counterexamples.toml");

#[derive(Deserialize)]
struct DataFile {
    class: Vec<ClassRecord>,
    entry: Vec<EntryRecord>,
}

#[derive(Deserialize)]
struct ClassRecord {
    label: String,
    cross: Vec<[usize; 2]>,
}

#[derive(Deserialize)]
struct EntryRecord {
    label: String,
    links: Vec<[usize; 3]>,
    forced: Vec<usize>,
    witness: Vec<usize>,
    distributed_sum: usize,
    centralized_sum: usize,
    #[serde(default)]
    unknown: Vec<(String, usize, usize)>,
    #[serde(default)]
    knows_all: Vec<String>,
}

/// A statement about what one node can see.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViewClaim {
    DoesNotKnow { node: NodeId, link: (usize, usize) },
    KnowsAll { node: NodeId },
}

impl fmt::Display for ViewClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViewClaim::DoesNotKnow { node, link } => {
                write!(f, "{node} does not know n{}{}", link.0 + 1, link.1 + 1)
            }
            ViewClaim::KnowsAll { node } => write!(f, "{node} knows every link"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub label: char,
    pub gains: GainMatrix,
    /// Rate vector the local argument forces.
    pub forced_rates: RateVector,
    pub stated_distributed_sum: usize,
    pub stated_centralized_sum: usize,
    pub stated_witness_rates: RateVector,
    pub view_claims: Vec<ViewClaim>,
}

impl Counterexample {
    pub fn topology(&self) -> &Topology {
        self.gains.topology()
    }
}

struct Builtin {
    classes: Vec<(char, Topology)>,
    entries: Vec<Counterexample>,
}

fn single_label(s: &str) -> Result<char> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Ok(c),
        _ => Err(Error::Parse {
            line: None,
            field: Some("label".into()),
            message: format!("expected one lowercase letter, got `{s}`"),
        }),
    }
}

fn load() -> Result<Builtin> {
    let data: DataFile = toml::from_str(DATA).map_err(|e| Error::Parse {
        line: None,
        field: None,
        message: e.to_string(),
    })?;
    let one_based = |v: usize| {
        v.checked_sub(1).ok_or_else(|| Error::Parse {
            line: None,
            field: None,
            message: "user indices are 1-based".into(),
        })
    };
    let mut classes = Vec::new();
    for c in data.class {
        let cross = c
            .cross
            .iter()
            .map(|&[t, r]| Ok((one_based(t)?, one_based(r)?)))
            .collect::<Result<Vec<_>>>()?;
        classes.push((
            single_label(&c.label)?,
            Topology::with_cross_links(3, cross)?,
        ));
    }
    let mut entries = Vec::new();
    for e in data.entry {
        let links = e
            .links
            .iter()
            .map(|&[t, r, g]| Ok((one_based(t)?, one_based(r)?, g)))
            .collect::<Result<Vec<_>>>()?;
        let gains = GainMatrix::from_links(3, &links)?;
        let mut view_claims = Vec::new();
        for (node, t, r) in &e.unknown {
            view_claims.push(ViewClaim::DoesNotKnow {
                node: node.parse()?,
                link: (one_based(*t)?, one_based(*r)?),
            });
        }
        for node in &e.knows_all {
            view_claims.push(ViewClaim::KnowsAll {
                node: node.parse()?,
            });
        }
        let label = single_label(&e.label)?;
        classes.push((label, gains.topology().clone()));
        entries.push(Counterexample {
            label,
            gains,
            forced_rates: RateVector::new(e.forced),
            stated_distributed_sum: e.distributed_sum,
            stated_centralized_sum: e.centralized_sum,
            stated_witness_rates: RateVector::new(e.witness),
            view_claims,
        });
    }
    classes.sort_by_key(|(l, _)| *l);
    Ok(Builtin { classes, entries })
}

fn builtin() -> &'static Builtin {
    static DATA: OnceLock<Builtin> = OnceLock::new();
    DATA.get_or_init(|| load().expect("embedded counterexample data is valid"))
}

/// The eleven built-in instances, labelled `e` through `o`.
pub fn builtin_counterexamples() -> Vec<Counterexample> {
    builtin().entries.clone()
}

pub fn counterexample(label: char) -> Option<Counterexample> {
    builtin().entries.iter().find(|c| c.label == label).cloned()
}

/// Labelled representatives of the sixteen three-user classes.
pub fn labelled_classes() -> Vec<(char, Topology)> {
    builtin().classes.clone()
}

/// Label `a`..`p` of a three-user topology's class.
pub fn class_label(t: &Topology) -> Option<char> {
    if t.users() != 3 {
        return None;
    }
    let canon = canonical_form(t);
    builtin()
        .classes
        .iter()
        .find(|(_, rep)| canonical_form(rep) == canon)
        .map(|(l, _)| *l)
}

/// Representative topology of a labelled class.
pub fn class_topology(label: char) -> Option<Topology> {
    builtin()
        .classes
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, t)| t.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReplayStep {
    WitnessDecodes,
    OracleMatches,
    ForcedDecodes,
    PositiveGap,
}

impl fmt::Display for ReplayStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReplayStep::WitnessDecodes => "witness-decodes",
            ReplayStep::OracleMatches => "oracle-matches",
            ReplayStep::ForcedDecodes => "forced-decodes",
            ReplayStep::PositiveGap => "positive-gap",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub step: ReplayStep,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub label: char,
    pub oracle_sum: usize,
    pub oracle_rates: RateVector,
    pub forced_sum: usize,
    pub centralized_sum: usize,
    pub witness_encoders: Option<Vec<Subspace>>,
    pub forced_encoders: Option<Vec<Subspace>>,
    pub steps: Vec<StepOutcome>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }

    pub fn gap(&self) -> i64 {
        self.centralized_sum as i64 - self.forced_sum as i64
    }

    pub fn failed_steps(&self) -> impl Iterator<Item = &StepOutcome> {
        self.steps.iter().filter(|s| !s.passed)
    }
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) forced {} vs centralized {} (oracle {}), gap {}:",
            self.label,
            self.forced_sum,
            self.centralized_sum,
            self.oracle_sum,
            self.gap()
        )?;
        for s in &self.steps {
            let mark = if s.passed { "ok" } else { "FAIL" };
            write!(f, " {}={mark}", s.step)?;
        }
        Ok(())
    }
}

/// Replays the four checks of one instance.
pub fn replay(c: &Counterexample) -> Result<ReplayReport> {
    let gm = &c.gains;
    let mut steps = Vec::with_capacity(4);

    let witness = rate_vector_feasible(gm, c.stated_witness_rates.as_slice())?;
    let witness_sum = c.stated_witness_rates.sum();
    steps.push(StepOutcome {
        step: ReplayStep::WitnessDecodes,
        passed: witness.is_some() && witness_sum == c.stated_centralized_sum,
        detail: match &witness {
            Some(_) => format!(
                "witness {} decodes, sum {witness_sum}",
                c.stated_witness_rates
            ),
            None => format!("no codebooks achieve {}", c.stated_witness_rates),
        },
    });

    let oracle = brute_force_sum_capacity(gm)?;
    steps.push(StepOutcome {
        step: ReplayStep::OracleMatches,
        passed: oracle.sum == c.stated_centralized_sum,
        detail: format!(
            "oracle {} at {}, stated {}",
            oracle.sum, oracle.rates, c.stated_centralized_sum
        ),
    });

    let forced = rate_vector_feasible(gm, c.forced_rates.as_slice())?;
    let forced_sum = c.forced_rates.sum();
    steps.push(StepOutcome {
        step: ReplayStep::ForcedDecodes,
        passed: forced.is_some() && forced_sum == c.stated_distributed_sum,
        detail: match &forced {
            Some(_) => format!("forced {} decodes, sum {forced_sum}", c.forced_rates),
            None => format!("no codebooks achieve {}", c.forced_rates),
        },
    });

    let gap = c.stated_centralized_sum as i64 - forced_sum as i64;
    steps.push(StepOutcome {
        step: ReplayStep::PositiveGap,
        passed: gap > 0,
        detail: format!("gap {gap}"),
    });

    Ok(ReplayReport {
        label: c.label,
        oracle_sum: oracle.sum,
        oracle_rates: oracle.rates,
        forced_sum,
        centralized_sum: c.stated_centralized_sum,
        witness_encoders: witness,
        forced_encoders: forced,
        steps,
    })
}

/// Evaluates each view claim under the hop rule.
pub fn check_view_claims(c: &Counterexample) -> Result<Vec<(ViewClaim, bool)>> {
    let gm = &c.gains;
    c.view_claims
        .iter()
        .map(|claim| {
            let holds = match claim {
                ViewClaim::DoesNotKnow { node, link } => {
                    !node_view(gm, *node, false)?.knows(link.0, link.1)
                }
                ViewClaim::KnowsAll { node } => {
                    node_view(gm, *node, false)?.known.len() == gm.topology().link_count()
                }
            };
            Ok((claim.clone(), holds))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::enumerate_three_user_classes;
    use std::collections::BTreeSet;

    #[test]
    fn eleven_entries() {
        let all = builtin_counterexamples();
        assert_eq!(all.len(), 11);
        let labels: String = all.iter().map(|c| c.label).collect();
        assert_eq!(labels, "efghijklmno");
        assert_eq!(counterexample('e').unwrap().stated_centralized_sum, 2);
        assert_eq!(
            counterexample('n').unwrap().stated_witness_rates.as_slice(),
            &[3, 3, 3]
        );
    }

    #[test]
    fn labels_cover_every_class_once() {
        let labels: BTreeSet<char> = enumerate_three_user_classes()
            .iter()
            .map(|c| class_label(&c.representative).expect("every class is labelled"))
            .collect();
        assert_eq!(labels.len(), 16);
        assert_eq!(labels.into_iter().collect::<String>(), "abcdefghijklmnop");
    }

    #[test]
    fn view_claims_hold() {
        for c in builtin_counterexamples() {
            for (claim, holds) in check_view_claims(&c).unwrap() {
                assert!(holds, "({}) {claim}", c.label);
            }
        }
    }

    #[test]
    fn replay_e_and_m() {
        let e = replay(&counterexample('e').unwrap()).unwrap();
        assert!(e.passed(), "{e}");
        assert_eq!(e.gap(), 1);
        let m = replay(&counterexample('m').unwrap()).unwrap();
        assert!(m.passed(), "{m}");
        assert_eq!(m.gap(), 3);
    }
}
