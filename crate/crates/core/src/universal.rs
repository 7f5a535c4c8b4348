//! Bounded search for a universally optimal local strategy on one
//! three-user topology.
//!
//! Each transmitter picks a codebook as a function of the gains in its view.
//! Every transmitter knows the connectivity (the genie), so a table is keyed
//! by the gains alone. A table is universal when, for every gain assignment
//! in `0..=bound`, the joint choice decodes and reaches the oracle sum. The
//! search is a constraint problem: one variable per (transmitter, view),
//! one constraint per gain assignment, solved with arc consistency and
//! backtracking.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{low_mask, rank_of, shift_bits, subspace_table, Subspace};
use crate::network::{gain_assignments, GainMatrix, Topology};
use crate::oracle::brute_force_sum_capacity;
use crate::strategy::decodable_encoders;
use crate::views::tx_view;

/// Largest gain bound the search accepts.
pub const UNIVERSAL_MAX_GAIN: usize = 2;
/// Default limit on search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;
/// Unsatisfiable cores are only extracted up to this many constraints.
pub const CORE_MAX_CONSTRAINTS: usize = 1024;

/// A transmitter's view key: `(tx, rx, gain)` for every link it sees.
pub type ViewKey = Vec<(usize, usize, usize)>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrategyTable {
    pub entries: BTreeMap<(usize, ViewKey), Subspace>,
}

impl StrategyTable {
    pub fn lookup(&self, tx: usize, key: &ViewKey) -> Option<&Subspace> {
        self.entries.get(&(tx, key.clone()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for StrategyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((tx, key), s) in &self.entries {
            let gains: Vec<String> = key
                .iter()
                .map(|(t, r, g)| format!("n{}{}={g}", t + 1, r + 1))
                .collect();
            writeln!(f, "T{} [{}] -> {s}", tx + 1, gains.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Feasible(StrategyTable),
    /// No table exists; `core` lists a minimal set of gain assignments that
    /// already rules every table out, when one was extracted.
    Infeasible {
        core: Option<Vec<GainMatrix>>,
    },
    /// The node budget ran out.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalSearch {
    pub topology: Topology,
    pub gain_bound: usize,
    pub variables: usize,
    pub constraints: usize,
    pub nodes: u64,
    pub outcome: SearchOutcome,
}

impl UniversalSearch {
    pub fn verdict(&self) -> &'static str {
        match self.outcome {
            SearchOutcome::Feasible(_) => "feasible",
            SearchOutcome::Infeasible { .. } => "infeasible",
            SearchOutcome::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for UniversalSearch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (gains 0..={}, {} views, {} assignments, {} nodes)",
            self.topology,
            self.verdict(),
            self.gain_bound,
            self.variables,
            self.constraints,
            self.nodes
        )
    }
}

struct Constraint {
    vars: [usize; 3],
    /// Allowed value triples (indices into the variables' candidate lists).
    allowed: Vec<[u8; 3]>,
    gains: GainMatrix,
}

struct Csp {
    levels: usize,
    /// Per variable: owner transmitter and view key.
    var_keys: Vec<(usize, ViewKey)>,
    /// Per variable: candidate subspace indices into the table of `levels`.
    candidates: Vec<Vec<usize>>,
    constraints: Vec<Constraint>,
}

/// Codebooks inside the levels some receiver can see that arrive intact at
/// the owner's receiver.
fn candidates_for(levels: usize, direct: usize, reach: usize) -> Result<Vec<usize>> {
    let table = subspace_table(levels)?;
    Ok(table
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            s.basis().iter().all(|&v| v & !low_mask(reach) == 0)
                && rank_of(s.basis().iter().map(|&v| shift_bits(levels, direct, v))) == s.dim()
        })
        .map(|(i, _)| i)
        .collect())
}

impl Csp {
    fn build(t: &Topology, bound: usize) -> Result<Self> {
        let levels = bound.max(1);
        let table = subspace_table(levels)?;
        let probe = GainMatrix::uniform(t.clone(), 1);
        let view_links: Vec<Vec<(usize, usize)>> = (0..3)
            .map(|k| Ok(tx_view(&probe, k, true)?.links().collect()))
            .collect::<Result<_>>()?;

        let mut var_index: HashMap<(usize, ViewKey), usize> = HashMap::new();
        let mut var_keys = Vec::new();
        let mut candidates = Vec::new();
        let mut constraints = Vec::new();
        for gm in gain_assignments(t, bound) {
            let mut vars = [0usize; 3];
            for (k, links) in view_links.iter().enumerate() {
                let key: ViewKey = links.iter().map(|&(a, b)| (a, b, gm.gain(a, b))).collect();
                vars[k] = match var_index.get(&(k, key.clone())) {
                    Some(&v) => v,
                    None => {
                        let v = var_keys.len();
                        let reach = (0..3).map(|r| gm.gain(k, r)).max().unwrap_or(0);
                        candidates.push(candidates_for(levels, gm.gain(k, k), reach)?);
                        var_index.insert((k, key.clone()), v);
                        var_keys.push((k, key));
                        v
                    }
                };
            }
            let target = brute_force_sum_capacity(&gm)?.sum;
            let mut allowed = Vec::new();
            let [c0, c1, c2] = vars.map(|v| &candidates[v]);
            for (i0, &s0) in c0.iter().enumerate() {
                for (i1, &s1) in c1.iter().enumerate() {
                    for (i2, &s2) in c2.iter().enumerate() {
                        let picks = [&table[s0], &table[s1], &table[s2]];
                        if picks.iter().map(|s| s.dim()).sum::<usize>() != target {
                            continue;
                        }
                        let codebooks: Vec<Subspace> = picks.into_iter().cloned().collect();
                        if decodable_encoders(&gm, &codebooks)?.all() {
                            allowed.push([i0 as u8, i1 as u8, i2 as u8]);
                        }
                    }
                }
            }
            constraints.push(Constraint {
                vars,
                allowed,
                gains: gm,
            });
        }
        Ok(Self {
            levels,
            var_keys,
            candidates,
            constraints,
        })
    }

    /// Solves using only the constraints flagged in `active`.
    fn solve(&self, active: &[bool], budget: u64) -> (Solve, u64) {
        Solver::new(self, active).run(budget)
    }

    fn table(&self, domains: &[u64]) -> Result<StrategyTable> {
        let table = subspace_table(self.levels)?;
        let entries = self
            .var_keys
            .iter()
            .zip(domains)
            .enumerate()
            .map(|(v, (key, &d))| {
                let pick = d.trailing_zeros() as usize;
                (key.clone(), table[self.candidates[v][pick]].clone())
            })
            .collect();
        Ok(StrategyTable { entries })
    }
}

enum Solve {
    Sat(Vec<u64>),
    Unsat,
    OutOfBudget,
}

struct Frame {
    var: usize,
    remaining: u64,
    trail_mark: usize,
}

struct Solver<'a> {
    csp: &'a Csp,
    active: &'a [bool],
    domains: Vec<u64>,
    trail: Vec<(usize, u64)>,
    watchers: Vec<Vec<usize>>,
    queued: Vec<bool>,
}

impl<'a> Solver<'a> {
    fn new(csp: &'a Csp, active: &'a [bool]) -> Self {
        let mut watchers = vec![Vec::new(); csp.var_keys.len()];
        for (c, con) in csp.constraints.iter().enumerate() {
            if active[c] {
                for &v in &con.vars {
                    if !watchers[v].contains(&c) {
                        watchers[v].push(c);
                    }
                }
            }
        }
        let domains = csp
            .candidates
            .iter()
            .map(|c| {
                if c.len() == 64 {
                    u64::MAX
                } else {
                    (1u64 << c.len()) - 1
                }
            })
            .collect();
        Self {
            csp,
            active,
            domains,
            trail: Vec::new(),
            watchers,
            queued: vec![false; csp.constraints.len()],
        }
    }

    fn set_domain(&mut self, v: usize, d: u64) {
        self.trail.push((v, self.domains[v]));
        self.domains[v] = d;
    }

    fn restore(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, d) = self.trail.pop().expect("trail entry");
            self.domains[v] = d;
        }
    }

    /// Arc consistency starting from `seeds`; false on a wipe-out.
    fn propagate(&mut self, seeds: impl IntoIterator<Item = usize>) -> bool {
        let mut queue: VecDeque<usize> = VecDeque::new();
        for c in seeds {
            if self.active[c] && !self.queued[c] {
                self.queued[c] = true;
                queue.push_back(c);
            }
        }
        while let Some(c) = queue.pop_front() {
            self.queued[c] = false;
            let con = &self.csp.constraints[c];
            let [v0, v1, v2] = con.vars;
            let (d0, d1, d2) = (self.domains[v0], self.domains[v1], self.domains[v2]);
            let mut support = [0u64; 3];
            for t in &con.allowed {
                let bits = t.map(|i| 1u64 << i);
                if d0 & bits[0] != 0 && d1 & bits[1] != 0 && d2 & bits[2] != 0 {
                    for p in 0..3 {
                        support[p] |= bits[p];
                    }
                }
            }
            if support[0] == 0 {
                for q in queue.drain(..) {
                    self.queued[q] = false;
                }
                return false;
            }
            // a variable may appear in several positions of one constraint
            let mut narrowed: BTreeMap<usize, u64> = BTreeMap::new();
            for (p, &v) in con.vars.iter().enumerate() {
                *narrowed.entry(v).or_insert(self.domains[v]) &= support[p];
            }
            for (v, d) in narrowed {
                if d != self.domains[v] {
                    self.set_domain(v, d);
                    for &w in &self.watchers[v] {
                        if w != c && !self.queued[w] {
                            self.queued[w] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        true
    }

    fn select(&self) -> Option<usize> {
        (0..self.domains.len())
            .filter(|&v| !self.watchers[v].is_empty() && self.domains[v].count_ones() > 1)
            .min_by_key(|&v| {
                (
                    self.domains[v].count_ones(),
                    usize::MAX - self.watchers[v].len(),
                )
            })
    }

    fn run(mut self, budget: u64) -> (Solve, u64) {
        let mut nodes = 0u64;
        let all: Vec<usize> = (0..self.csp.constraints.len()).collect();
        if !self.propagate(all) {
            return (Solve::Unsat, nodes);
        }
        let mut frames: Vec<Frame> = Vec::new();
        let mut descend = true;
        loop {
            if descend {
                match self.select() {
                    None => return (Solve::Sat(self.domains), nodes),
                    Some(var) => frames.push(Frame {
                        var,
                        remaining: self.domains[var],
                        trail_mark: self.trail.len(),
                    }),
                }
            }
            let Some(frame) = frames.last_mut() else {
                return (Solve::Unsat, nodes);
            };
            let (var, mark) = (frame.var, frame.trail_mark);
            if frame.remaining == 0 {
                frames.pop();
                descend = false;
                continue;
            }
            let value = frame.remaining & frame.remaining.wrapping_neg();
            frame.remaining &= !value;
            self.restore(mark);
            nodes += 1;
            if nodes > budget {
                return (Solve::OutOfBudget, nodes);
            }
            self.set_domain(var, value);
            let seeds = self.watchers[var].clone();
            descend = self.propagate(seeds);
            if !descend {
                self.restore(mark);
            }
        }
    }
}

/// Searches for a universal table on a three-user topology with gains in
/// `0..=gain_bound`. With `extract_core`, an infeasible verdict also carries
/// a minimal unsatisfiable set of gain assignments.
pub fn no_universal_strategy_search(
    t: &Topology,
    gain_bound: usize,
    budget: u64,
    extract_core: bool,
) -> Result<UniversalSearch> {
    if t.users() != 3 {
        return Err(Error::Contract(format!(
            "universal search needs three users, got {}",
            t.users()
        )));
    }
    if gain_bound > UNIVERSAL_MAX_GAIN {
        return Err(Error::SizeGuard {
            what: "universal search gain bound",
            value: gain_bound,
            limit: UNIVERSAL_MAX_GAIN,
        });
    }
    let csp = Csp::build(t, gain_bound)?;
    let mut active = vec![true; csp.constraints.len()];
    let (solve, mut nodes) = csp.solve(&active, budget);
    let outcome = match solve {
        Solve::Sat(domains) => SearchOutcome::Feasible(csp.table(&domains)?),
        Solve::OutOfBudget => SearchOutcome::Undetermined,
        Solve::Unsat if extract_core && csp.constraints.len() <= CORE_MAX_CONSTRAINTS => {
            for c in 0..active.len() {
                active[c] = false;
                let (trial, used) = csp.solve(&active, budget);
                nodes += used;
                if !matches!(trial, Solve::Unsat) {
                    active[c] = true;
                }
            }
            let core = csp
                .constraints
                .iter()
                .zip(&active)
                .filter(|(_, &on)| on)
                .map(|(c, _)| c.gains.clone())
                .collect();
            SearchOutcome::Infeasible { core: Some(core) }
        }
        Solve::Unsat => SearchOutcome::Infeasible { core: None },
    };
    Ok(UniversalSearch {
        topology: t.clone(),
        gain_bound,
        variables: csp.var_keys.len(),
        constraints: csp.constraints.len(),
        nodes,
        outcome,
    })
}

/// Checks a table against every gain assignment; returns the first
/// assignment where it fails to decode or to reach the oracle sum.
pub fn verify_table(
    t: &Topology,
    gain_bound: usize,
    table: &StrategyTable,
) -> Result<Option<GainMatrix>> {
    let levels = gain_bound.max(1);
    for gm in gain_assignments(t, gain_bound) {
        let mut codebooks = Vec::with_capacity(3);
        for k in 0..3 {
            let key: ViewKey = tx_view(&gm, k, true)?
                .known
                .iter()
                .map(|(&(a, b), &g)| (a, b, g))
                .collect();
            let s = table
                .lookup(k, &key)
                .ok_or_else(|| Error::Contract(format!("table has no entry for T{}", k + 1)))?;
            codebooks.push(s.embed(levels)?);
        }
        let sum: usize = codebooks.iter().map(Subspace::dim).sum();
        if sum != brute_force_sum_capacity(&gm)?.sum || !decodable_encoders(&gm, &codebooks)?.all()
        {
            return Ok(Some(gm));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(cross: &[(usize, usize)]) -> Topology {
        Topology::with_cross_links(3, cross.iter().map(|&(t, r)| (t - 1, r - 1))).unwrap()
    }

    #[test]
    fn diagonal_is_feasible() {
        let t = Topology::diagonal(3).unwrap();
        let r = no_universal_strategy_search(&t, 1, DEFAULT_NODE_BUDGET, false).unwrap();
        let SearchOutcome::Feasible(table) = &r.outcome else {
            panic!("{r}");
        };
        assert_eq!(verify_table(&t, 1, table).unwrap(), None);
    }

    #[test]
    fn many_to_one_is_infeasible_with_core() {
        let t = topo(&[(1, 2), (3, 2)]);
        let r = no_universal_strategy_search(&t, 1, DEFAULT_NODE_BUDGET, true).unwrap();
        let SearchOutcome::Infeasible { core: Some(core) } = &r.outcome else {
            panic!("{r}");
        };
        assert!(!core.is_empty() && core.len() < r.constraints);
    }

    #[test]
    fn guards() {
        assert!(
            no_universal_strategy_search(&Topology::diagonal(2).unwrap(), 1, 10, false).is_err()
        );
        assert!(matches!(
            no_universal_strategy_search(&Topology::diagonal(3).unwrap(), 3, 10, false),
            Err(Error::SizeGuard { .. })
        ));
    }
}
