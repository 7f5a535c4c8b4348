//! The distributed level-selection strategy and the decodability check.
//!
//! Each transmitter builds a local picture from its view: itself, every
//! endpoint of a link it knows, the known links, and the direct link of every
//! user in the picture. It classifies its own component of that picture and
//! picks one of four behaviours (plain, hub, fully connected, silent).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::gf2::{rank_of, shift_bits, BitMatrix, Subspace};
use crate::network::{components, Configuration, GainMatrix, Topology};
use crate::oracle::component_optimum;
use crate::views::{tx_views, LocalView, Role};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RateVector(Vec<usize>);

impl RateVector {
    pub fn new(rates: Vec<usize>) -> Self {
        Self(rates)
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl Index<usize> for RateVector {
    type Output = usize;

    fn index(&self, k: usize) -> &usize {
        &self.0[k]
    }
}

impl From<Vec<usize>> for RateVector {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for RateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Which branch of the strategy a transmitter took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyCase {
    /// Degree-one member of a one-to-many picture (or an isolated user).
    Plain,
    Hub,
    FullyConnected,
    Silent,
}

impl fmt::Display for StrategyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyCase::Plain => "plain",
            StrategyCase::Hub => "hub",
            StrategyCase::FullyConnected => "fully-connected",
            StrategyCase::Silent => "silent",
        })
    }
}

/// One codebook per transmitter, all over the same level count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelStrategy {
    levels: usize,
    codebooks: Vec<Subspace>,
}

impl LevelStrategy {
    pub fn new(levels: usize, codebooks: Vec<Subspace>) -> Result<Self> {
        if let Some(bad) = codebooks.iter().find(|c| c.levels() != levels) {
            return Err(Error::Dimension {
                expected: levels,
                found: bad.levels(),
            });
        }
        Ok(Self { levels, codebooks })
    }

    pub fn silent(levels: usize, users: usize) -> Result<Self> {
        Ok(Self {
            levels,
            codebooks: vec![Subspace::zero(levels)?; users],
        })
    }

    /// Builds a strategy from generator matrices (`levels` rows each).
    pub fn from_generators(levels: usize, generators: &[BitMatrix]) -> Result<Self> {
        let codebooks = generators
            .iter()
            .map(|g| {
                if g.rows() != levels {
                    return Err(Error::Dimension {
                        expected: levels,
                        found: g.rows(),
                    });
                }
                let s = Subspace::span(levels, g.columns())?;
                if s.dim() != g.cols() {
                    return Err(Error::Contract(
                        "generator columns are linearly dependent".into(),
                    ));
                }
                Ok(s)
            })
            .collect::<Result<_>>()?;
        Ok(Self { levels, codebooks })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn users(&self) -> usize {
        self.codebooks.len()
    }

    pub fn codebook(&self, k: usize) -> &Subspace {
        &self.codebooks[k]
    }

    pub fn codebooks(&self) -> &[Subspace] {
        &self.codebooks
    }

    pub fn generator(&self, k: usize) -> BitMatrix {
        self.codebooks[k].generator()
    }

    pub fn rates(&self) -> RateVector {
        RateVector(self.codebooks.iter().map(Subspace::dim).collect())
    }
}

/// Per-receiver outcome of the zero-error check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decodability {
    pub receivers: Vec<bool>,
}

impl Decodability {
    pub fn all(&self) -> bool {
        self.receivers.iter().all(|&ok| ok)
    }

    pub fn failing(&self) -> impl Iterator<Item = usize> + '_ {
        self.receivers
            .iter()
            .enumerate()
            .filter(|(_, ok)| !**ok)
            .map(|(j, _)| j)
    }
}

/// Receiver `j` decodes iff its own codebook arrives injectively and meets
/// the sum of the interfering images only in zero.
pub fn decodable(gm: &GainMatrix, s: &LevelStrategy) -> Result<Decodability> {
    if s.users() != gm.users() {
        return Err(Error::Dimension {
            expected: gm.users(),
            found: s.users(),
        });
    }
    decodable_encoders(gm, s.codebooks())
}

pub(crate) fn decodable_encoders(gm: &GainMatrix, codebooks: &[Subspace]) -> Result<Decodability> {
    let q = codebooks.first().map_or(gm.levels(), Subspace::levels);
    if q < gm.max_gain() {
        return Err(Error::InvalidGain {
            levels: q,
            gain: gm.max_gain(),
        });
    }
    let k = gm.users();
    let image = |t: usize, r: usize| -> Vec<u64> {
        let g = gm.gain(t, r);
        codebooks[t]
            .basis()
            .iter()
            .map(|&v| shift_bits(q, g, v))
            .collect()
    };
    let receivers = (0..k)
        .map(|j| {
            let own = image(j, j);
            let interference: Vec<u64> = (0..k)
                .filter(|&t| t != j)
                .flat_map(|t| image(t, j))
                .collect();
            let own_rank = rank_of(own.iter().copied());
            own_rank == codebooks[j].dim()
                && rank_of(own.iter().chain(&interference).copied())
                    == own_rank + rank_of(interference.iter().copied())
        })
        .collect();
    Ok(Decodability { receivers })
}

/// Hub levels (1-based) that land on no occupied level of any victim, for
/// victims given as `(gain from hub, direct gain)`.
pub fn collision_free_levels(hub_direct: usize, victims: &[(usize, usize)]) -> Vec<usize> {
    (1..=hub_direct)
        .filter(|&k| {
            victims
                .iter()
                .all(|&(cross, direct)| !(cross.saturating_sub(direct) < k && k <= cross))
        })
        .collect()
}

/// Transmitter-side picture: users it can name and the links among them.
struct Picture {
    /// Global user ids, sorted.
    users: Vec<usize>,
    topology: Topology,
}

impl Picture {
    fn from_view(view: &LocalView) -> Result<Self> {
        let mut users: BTreeSet<usize> = BTreeSet::from([view.owner.user]);
        for (t, r) in view.links() {
            users.insert(t);
            users.insert(r);
        }
        let users: Vec<usize> = users.into_iter().collect();
        let local = |u: usize| users.binary_search(&u).expect("picture user");
        let links: BTreeSet<(usize, usize)> = view
            .links()
            .map(|(t, r)| (local(t), local(r)))
            .chain((0..users.len()).map(|u| (u, u)))
            .collect();
        let topology = Topology::new(users.len(), links)?;
        Ok(Self { users, topology })
    }

    /// Members (global ids) and shape of `owner`'s component.
    fn owner_component(&self, owner: usize) -> (Vec<usize>, Configuration) {
        let local_owner = self.users.binary_search(&owner).expect("owner in picture");
        components(&self.topology)
            .into_iter()
            .find(|c| c.members.contains(&local_owner))
            .map(|c| {
                let members = c.members.iter().map(|&u| self.users[u]).collect();
                let conf = match c.configuration {
                    Configuration::OneToMany { hub } => Configuration::OneToMany {
                        hub: self.users[hub],
                    },
                    other => other,
                };
                (members, conf)
            })
            .expect("owner belongs to a component")
    }
}

/// Component the owner dispatches on: the genie's global truth when
/// present, otherwise the local picture.
fn dispatch_component(view: &LocalView) -> Result<(Vec<usize>, Configuration)> {
    let owner = view.owner.user;
    if let Some(t) = &view.genie_topology {
        let c = components(t)
            .into_iter()
            .find(|c| c.members.contains(&owner))
            .ok_or_else(|| Error::Topology("owner outside genie topology".into()))?;
        return Ok((c.members, c.configuration));
    }
    Ok(Picture::from_view(view)?.owner_component(owner))
}

fn known_gain(view: &LocalView, tx: usize, rx: usize) -> Result<usize> {
    view.gain(tx, rx).ok_or_else(|| {
        Error::Contract(format!(
            "{} does not know gain n{}{}",
            view.owner,
            tx + 1,
            rx + 1
        ))
    })
}

fn require_transmitter(view: &LocalView) -> Result<()> {
    if view.owner.role != Role::Transmitter {
        return Err(Error::Contract(format!(
            "{} is not a transmitter",
            view.owner
        )));
    }
    Ok(())
}

/// Free levels of the hub owning `view`.
pub fn hub_free_levels(view: &LocalView) -> Result<Vec<usize>> {
    require_transmitter(view)?;
    let hub = view.owner.user;
    let (members, conf) = dispatch_component(view)?;
    if conf != (Configuration::OneToMany { hub }) {
        return Err(Error::Contract(format!(
            "{} is not the hub of a one-to-many component",
            view.owner
        )));
    }
    let victims = members
        .iter()
        .filter(|&&u| u != hub)
        .map(|&u| Ok((known_gain(view, hub, u)?, known_gain(view, u, u)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(collision_free_levels(known_gain(view, hub, hub)?, &victims))
}

/// Shared optimum for a fully-connected component the owner belongs to:
/// `(member, codebook)` pairs over the component's own level count.
pub fn fully_connected_assignment(view: &LocalView) -> Result<Vec<(usize, Subspace)>> {
    require_transmitter(view)?;
    let (members, conf) = dispatch_component(view)?;
    if conf != Configuration::FullyConnected && members.len() != 1 {
        return Err(Error::Contract(format!(
            "{} is not in a fully-connected component",
            view.owner
        )));
    }
    assignment_for(view, &members)
}

fn assignment_for(view: &LocalView, members: &[usize]) -> Result<Vec<(usize, Subspace)>> {
    let mut links = Vec::new();
    for (a, &t) in members.iter().enumerate() {
        for (b, &r) in members.iter().enumerate() {
            links.push((a, b, known_gain(view, t, r)?));
        }
    }
    let sub = GainMatrix::from_links(members.len(), &links)?;
    let (_, codebooks) = component_optimum(&sub)?;
    Ok(members.iter().copied().zip(codebooks).collect())
}

/// What one transmitter sends, computed from its view alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub case: StrategyCase,
    pub codebook: Subspace,
}

type AssignmentCache = HashMap<Vec<(usize, usize, usize)>, Vec<Subspace>>;

/// Decision of the view's owner over `levels` signal levels.
pub fn transmitter_decision(view: &LocalView, levels: usize) -> Result<Decision> {
    decide(view, levels, &mut AssignmentCache::new())
}

fn decide(view: &LocalView, levels: usize, cache: &mut AssignmentCache) -> Result<Decision> {
    require_transmitter(view)?;
    let owner = view.owner.user;
    let direct = known_gain(view, owner, owner)?;
    if direct > levels {
        return Err(Error::InvalidGain {
            levels,
            gain: direct,
        });
    }
    let (members, conf) = dispatch_component(view)?;
    let (case, codebook) = match conf {
        Configuration::OneToMany { hub } if hub == owner => (
            StrategyCase::Hub,
            Subspace::from_levels(levels, hub_free_levels(view)?)?,
        ),
        Configuration::OneToMany { .. } => (
            StrategyCase::Plain,
            Subspace::from_levels(levels, 1..=direct)?,
        ),
        Configuration::FullyConnected => {
            let key = members
                .iter()
                .flat_map(|&t| members.iter().map(move |&r| (t, r)))
                .map(|(t, r)| Ok((t, r, known_gain(view, t, r)?)))
                .collect::<Result<Vec<_>>>()?;
            let at = members.binary_search(&owner).expect("owner is a member");
            let codebook = match cache.get(&key) {
                Some(c) => c[at].clone(),
                None => {
                    let all: Vec<Subspace> = assignment_for(view, &members)?
                        .into_iter()
                        .map(|(_, s)| s)
                        .collect();
                    let mine = all[at].clone();
                    cache.insert(key, all);
                    mine
                }
            };
            (StrategyCase::FullyConnected, codebook.embed(levels)?)
        }
        Configuration::Other => (StrategyCase::Silent, Subspace::zero(levels)?),
    };
    Ok(Decision { case, codebook })
}

/// Runs every transmitter's decision on its own view.
pub fn distributed_strategy(
    views: &[LocalView],
    levels: usize,
) -> Result<(LevelStrategy, Vec<StrategyCase>)> {
    let mut cache = AssignmentCache::new();
    let decisions = views
        .iter()
        .map(|v| decide(v, levels, &mut cache))
        .collect::<Result<Vec<_>>>()?;
    let cases = decisions.iter().map(|d| d.case).collect();
    let strategy = LevelStrategy::new(levels, decisions.into_iter().map(|d| d.codebook).collect())?;
    Ok((strategy, cases))
}

/// Full run of the distributed strategy on one gain matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    pub strategy: LevelStrategy,
    pub cases: Vec<StrategyCase>,
    pub decodability: Decodability,
}

impl Simulation {
    pub fn rates(&self) -> RateVector {
        self.strategy.rates()
    }
}

pub fn simulate(gm: &GainMatrix, genie: bool) -> Result<Simulation> {
    let views = tx_views(gm, genie)?;
    let (strategy, cases) = distributed_strategy(&views, gm.levels())?;
    let decodability = decodable(gm, &strategy)?;
    Ok(Simulation {
        strategy,
        cases,
        decodability,
    })
}

/// Rates of the distributed strategy; a decoding failure is an invariant
/// violation.
pub fn achieved_sum_rate(gm: &GainMatrix, genie: bool) -> Result<RateVector> {
    let sim = simulate(gm, genie)?;
    if !sim.decodability.all() {
        let failing: Vec<String> = sim
            .decodability
            .failing()
            .map(|j| format!("R{}", j + 1))
            .collect();
        return Err(Error::Invariant(format!(
            "distributed strategy not decodable at {} for {gm}",
            failing.join(",")
        )));
    }
    Ok(sim.rates())
}
