//! Centralized reference: the linear single-shot sum capacity.
//!
//! Every transmitter picks one subspace of GF(2)^q as its codebook and every
//! receiver must recover its own subspace with zero error while treating the
//! rest as interference. The search is exact over that family. It is labelled
//! "linear single-shot" wherever it is reported, because multi-letter or
//! non-linear codes are outside it.
//!
//! Components are solved independently. Inside a component the search walks
//! rate vectors by decreasing sum (ties: lexicographically largest, so lower
//! user indices get the larger rates) and, for each one, looks for encoder
//! tuples in canonical subspace order with forward checking. Infeasible rate
//! vectors are remembered and anything dominating one is skipped, which is
//! sound because decodability is preserved when any codebook shrinks.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{extend_set, low_mask, rref, shift_bits, span_set, subspace_table, Subspace};
use crate::network::{
    classify_component, components, gain_assignments, Configuration, GainMatrix, Topology,
};
use crate::strategy::{collision_free_levels, RateVector};

/// Qualifier attached to every reported oracle value.
pub const ORACLE_QUALIFIER: &str = "linear single-shot";

/// Largest level count the oracle accepts.
pub const ORACLE_MAX_LEVELS: usize = 6;
/// Largest component searched at up to [`ORACLE_WIDE_LEVELS`] levels.
pub const ORACLE_MAX_COMPONENT: usize = 4;
/// Components with more levels than this are limited to three users.
pub const ORACLE_WIDE_LEVELS: usize = 4;
/// Component size limit above [`ORACLE_WIDE_LEVELS`] levels.
pub const ORACLE_MAX_WIDE_COMPONENT: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityResult {
    pub sum: usize,
    pub rates: RateVector,
    /// One codebook per transmitter, in the full network's level count.
    pub encoders: Vec<Subspace>,
}

impl fmt::Display for CapacityResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({ORACLE_QUALIFIER}) rates {}", self.sum, self.rates)
    }
}

/// Refuses components outside the search guards.
pub fn check_oracle_guard(users: usize, levels: usize) -> Result<()> {
    if levels > ORACLE_MAX_LEVELS {
        return Err(Error::SizeGuard {
            what: "oracle signal levels",
            value: levels,
            limit: ORACLE_MAX_LEVELS,
        });
    }
    let limit = if levels > ORACLE_WIDE_LEVELS {
        ORACLE_MAX_WIDE_COMPONENT
    } else {
        ORACLE_MAX_COMPONENT
    };
    if users > limit {
        return Err(Error::SizeGuard {
            what: "oracle component size",
            value: users,
            limit,
        });
    }
    Ok(())
}

/// Exhaustive linear single-shot sum capacity, summed over components.
pub fn brute_force_sum_capacity(gm: &GainMatrix) -> Result<CapacityResult> {
    let q = gm.levels();
    let k = gm.users();
    let comps = components(gm.topology());
    for c in &comps {
        let sub = gm.induced(&c.members)?;
        check_oracle_guard(c.members.len(), sub.levels())?;
    }
    let mut rates = vec![0; k];
    let mut encoders = vec![Subspace::zero(q)?; k];
    for c in comps {
        let sub = gm.induced(&c.members)?;
        let (sub_rates, sub_encoders) = component_optimum(&sub)?;
        for (i, &u) in c.members.iter().enumerate() {
            rates[u] = sub_rates[i];
            encoders[u] = sub_encoders[i].embed(q)?;
        }
    }
    let rates = RateVector::new(rates);
    Ok(CapacityResult {
        sum: rates.sum(),
        rates,
        encoders,
    })
}

/// Optimal codebooks for one connected component (users renumbered from 0),
/// in the component's own level count.
pub(crate) fn component_optimum(gm: &GainMatrix) -> Result<(Vec<usize>, Vec<Subspace>)> {
    let search = ComponentSearch::new(gm)?;
    let (rates, picks) = search.optimum();
    Ok((rates, search.subspaces(&picks)))
}

/// Codebooks achieving exactly `rates` on `gm`, if any exist.
pub fn rate_vector_feasible(gm: &GainMatrix, rates: &[usize]) -> Result<Option<Vec<Subspace>>> {
    if rates.len() != gm.users() {
        return Err(Error::Dimension {
            expected: gm.users(),
            found: rates.len(),
        });
    }
    let q = gm.levels();
    let mut encoders = vec![Subspace::zero(q)?; gm.users()];
    for c in components(gm.topology()) {
        let sub = gm.induced(&c.members)?;
        check_oracle_guard(c.members.len(), sub.levels())?;
        let search = ComponentSearch::new(&sub)?;
        let target: Vec<usize> = c.members.iter().map(|&u| rates[u]).collect();
        let Some(picks) = search.feasible(&target) else {
            return Ok(None);
        };
        for (sub_enc, &u) in search.subspaces(&picks).into_iter().zip(&c.members) {
            encoders[u] = sub_enc.embed(q)?;
        }
    }
    Ok(Some(encoders))
}

#[derive(Clone)]
struct Candidate {
    /// Index into the subspace table.
    index: usize,
    /// Element set of the image at the owner's receiver.
    own: u64,
    /// Element set of the image at each receiver.
    image: Vec<u64>,
    /// Reduced basis of the image at each receiver.
    image_basis: Vec<Vec<u64>>,
}

struct ComponentSearch {
    levels: usize,
    users: usize,
    /// `buckets[user][dim]`: candidates of that dimension, canonical order.
    buckets: Vec<Vec<Vec<Candidate>>>,
}

const MAX_COMPONENT: usize = ORACLE_MAX_COMPONENT;

impl ComponentSearch {
    fn new(gm: &GainMatrix) -> Result<Self> {
        let users = gm.users();
        let levels = gm.levels();
        check_oracle_guard(users, levels)?;
        let table = subspace_table(levels)?;
        let mut buckets = Vec::with_capacity(users);
        for k in 0..users {
            let reach = (0..users).map(|r| gm.gain(k, r)).max().unwrap_or(0);
            let direct = gm.gain(k, k);
            let mut by_dim: Vec<Vec<Candidate>> = vec![Vec::new(); levels + 1];
            for (index, s) in table.iter().enumerate() {
                // levels nobody can see are dropped without loss
                if s.basis().iter().any(|&v| v & !low_mask(reach) != 0) {
                    continue;
                }
                let image_basis: Vec<Vec<u64>> = (0..users)
                    .map(|r| {
                        let g = gm.gain(k, r);
                        rref(s.basis().iter().map(|&v| shift_bits(levels, g, v)))
                    })
                    .collect();
                if image_basis[k].len() != s.dim() || s.dim() > direct {
                    continue;
                }
                let image: Vec<u64> = image_basis
                    .iter()
                    .map(|b| span_set(b.iter().copied()))
                    .collect();
                by_dim[s.dim()].push(Candidate {
                    index,
                    own: image[k],
                    image,
                    image_basis,
                });
            }
            while by_dim.len() > 1 && by_dim.last().is_some_and(Vec::is_empty) {
                by_dim.pop();
            }
            buckets.push(by_dim);
        }
        Ok(Self {
            levels,
            users,
            buckets,
        })
    }

    fn max_rate(&self, user: usize) -> usize {
        self.buckets[user].len() - 1
    }

    fn subspaces(&self, picks: &[usize]) -> Vec<Subspace> {
        let table = subspace_table(self.levels).expect("levels checked at construction");
        picks.iter().map(|&i| table[i].clone()).collect()
    }

    /// Best rate vector and the first codebook tuple achieving it.
    fn optimum(&self) -> (Vec<usize>, Vec<usize>) {
        let mut vectors: Vec<Vec<usize>> = vec![Vec::new()];
        for u in 0..self.users {
            vectors = vectors
                .into_iter()
                .flat_map(|prefix| {
                    (0..=self.max_rate(u)).map(move |r| {
                        let mut v = prefix.clone();
                        v.push(r);
                        v
                    })
                })
                .collect();
        }
        vectors.sort_by(|a, b| {
            let (sa, sb): (usize, usize) = (a.iter().sum(), b.iter().sum());
            sb.cmp(&sa).then_with(|| b.cmp(a))
        });

        let mut infeasible: Vec<Vec<usize>> = Vec::new();
        let mut pair_memo: HashMap<Vec<usize>, bool> = HashMap::new();
        for rates in vectors {
            if infeasible.iter().any(|x| dominates(&rates, x)) {
                continue;
            }
            if self.users > 2 {
                let mut pair_blocked = false;
                'pairs: for a in 0..self.users {
                    for b in a + 1..self.users {
                        if rates[a] == 0 || rates[b] == 0 {
                            continue;
                        }
                        let mut p = vec![0; self.users];
                        p[a] = rates[a];
                        p[b] = rates[b];
                        let ok = *pair_memo
                            .entry(p.clone())
                            .or_insert_with(|| self.feasible(&p).is_some());
                        if !ok {
                            infeasible.push(p);
                            pair_blocked = true;
                            break 'pairs;
                        }
                    }
                }
                if pair_blocked {
                    continue;
                }
            }
            match self.feasible(&rates) {
                Some(picks) => return (rates, picks),
                None => infeasible.push(rates),
            }
        }
        unreachable!("the all-zero rate vector is always feasible")
    }

    /// First codebook tuple (canonical order) with exactly these rates.
    fn feasible(&self, rates: &[usize]) -> Option<Vec<usize>> {
        if rates
            .iter()
            .enumerate()
            .any(|(u, &r)| r > self.max_rate(u) || self.buckets[u][r].is_empty())
        {
            return None;
        }
        let pools: Vec<Vec<&Candidate>> = rates
            .iter()
            .enumerate()
            .map(|(u, &r)| self.buckets[u][r].iter().collect())
            .collect();
        let mut chosen = Vec::with_capacity(self.users);
        let interference = [1u64; MAX_COMPONENT];
        let own = [1u64; MAX_COMPONENT];
        self.descend(0, &interference, &own, &pools, &mut chosen)
            .then_some(chosen)
    }

    fn descend(
        &self,
        depth: usize,
        interference: &[u64; MAX_COMPONENT],
        own: &[u64; MAX_COMPONENT],
        pools: &[Vec<&Candidate>],
        chosen: &mut Vec<usize>,
    ) -> bool {
        let users = self.users;
        'candidates: for cand in &pools[0] {
            let mut next = *interference;
            for (r, set) in next.iter_mut().enumerate().take(users) {
                if r != depth {
                    *set = cand.image_basis[r]
                        .iter()
                        .fold(*set, |s, &v| extend_set(s, v));
                }
            }
            if cand.own & next[depth] != 1 {
                continue;
            }
            for a in 0..depth {
                if own[a] & next[a] != 1 {
                    continue 'candidates;
                }
            }
            let mut next_own = *own;
            next_own[depth] = cand.own;
            chosen.push(cand.index);
            if depth + 1 == users {
                return true;
            }
            // forward check every later user against the partial tuple
            let mut next_pools: Vec<Vec<&Candidate>> = Vec::with_capacity(pools.len() - 1);
            for (offset, pool) in pools[1..].iter().enumerate() {
                let u = depth + 1 + offset;
                let kept: Vec<&Candidate> = pool
                    .iter()
                    .copied()
                    .filter(|c| consistent(c, u, depth, &next, &next_own))
                    .collect();
                if kept.is_empty() {
                    chosen.pop();
                    continue 'candidates;
                }
                next_pools.push(kept);
            }
            if self.descend(depth + 1, &next, &next_own, &next_pools, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

#[inline]
fn consistent(
    cand: &Candidate,
    user: usize,
    depth: usize,
    interference: &[u64; MAX_COMPONENT],
    own: &[u64; MAX_COMPONENT],
) -> bool {
    if cand.own & interference[user] != 1 {
        return false;
    }
    (0..=depth).all(|a| {
        cand.image[a] == 1 || {
            let set = cand.image_basis[a]
                .iter()
                .fold(interference[a], |s, &v| extend_set(s, v));
            own[a] & set == 1
        }
    })
}

fn dominates(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Closed-form sum rate of a one-to-many component: every non-hub user at
/// its direct gain plus the hub levels that hit no occupied receiver level.
pub fn one_to_many_sum_capacity(gm: &GainMatrix, members: &[usize], hub: usize) -> Result<usize> {
    match classify_component(gm.topology(), members)? {
        Configuration::OneToMany { hub: h } if h == hub || members.len() == 1 => {}
        other => {
            return Err(Error::Contract(format!(
                "component is {other}, not one-to-many with hub {}",
                hub + 1
            )))
        }
    }
    let victims: Vec<(usize, usize)> = members
        .iter()
        .filter(|&&u| u != hub)
        .map(|&u| (gm.gain(hub, u), gm.gain(u, u)))
        .collect();
    let free = collision_free_levels(gm.gain(hub, hub), &victims);
    Ok(victims.iter().map(|&(_, d)| d).sum::<usize>() + free.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub gains: GainMatrix,
    pub closed_form: usize,
    pub oracle: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossValidation {
    pub assignments: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Largest gain bound accepted by [`cross_validate`].
pub const CROSS_VALIDATE_MAX_GAIN: usize = 3;

/// Compares the one-to-many closed form with the oracle over every gain
/// assignment in `0..=gain_bound`.
pub fn cross_validate(t: &Topology, gain_bound: usize) -> Result<CrossValidation> {
    if gain_bound > CROSS_VALIDATE_MAX_GAIN {
        return Err(Error::SizeGuard {
            what: "cross-validation gain bound",
            value: gain_bound,
            limit: CROSS_VALIDATE_MAX_GAIN,
        });
    }
    let comps = components(t);
    let mut hubs = Vec::new();
    for c in &comps {
        match c.configuration {
            Configuration::OneToMany { hub } => hubs.push(hub),
            other => {
                return Err(Error::Contract(format!(
                    "component {:?} is {other}, not one-to-many",
                    c.members
                )))
            }
        }
        if c.members.len() > ORACLE_MAX_WIDE_COMPONENT {
            return Err(Error::SizeGuard {
                what: "one-to-many component size",
                value: c.members.len(),
                limit: ORACLE_MAX_WIDE_COMPONENT,
            });
        }
    }
    let mut report = CrossValidation {
        assignments: 0,
        mismatches: Vec::new(),
    };
    for gm in gain_assignments(t, gain_bound) {
        report.assignments += 1;
        let closed_form = comps
            .iter()
            .zip(&hubs)
            .map(|(c, &h)| one_to_many_sum_capacity(&gm, &c.members, h))
            .sum::<Result<usize>>()?;
        let oracle = brute_force_sum_capacity(&gm)?.sum;
        if closed_form != oracle {
            report.mismatches.push(Mismatch {
                gains: gm,
                closed_form,
                oracle,
            });
        }
    }
    Ok(report)
}
