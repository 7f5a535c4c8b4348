//! Topologies, gain matrices, the received-signal map and component
//! classification.
//!
//! Users are numbered from 0 in the API and printed 1-based. A link `(t, r)`
//! always means transmitter `t` to receiver `r`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{shift_bits, BitVector};

/// Upper bound on the user count; adjacency is packed in `u32` masks.
pub const MAX_USERS: usize = 32;

/// Which transmitters reach which receivers. Every direct link `(i, i)` is
/// present.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    users: usize,
    out: Vec<u32>,
}

impl Topology {
    /// Builds a topology from an explicit link list that must contain every
    /// direct link.
    pub fn new(users: usize, links: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut t = Self::empty(users)?;
        for (tx, rx) in links {
            t.check_index(tx)?;
            t.check_index(rx)?;
            t.out[tx] |= 1 << rx;
        }
        if let Some(i) = (0..users).find(|&i| t.out[i] >> i & 1 == 0) {
            return Err(Error::Topology(format!(
                "direct link ({0},{0}) is missing",
                i + 1
            )));
        }
        Ok(t)
    }

    /// Direct links plus the given cross links.
    pub fn with_cross_links(
        users: usize,
        cross: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut t = Self::empty(users)?;
        for i in 0..users {
            t.out[i] |= 1 << i;
        }
        for (tx, rx) in cross {
            t.check_index(tx)?;
            t.check_index(rx)?;
            t.out[tx] |= 1 << rx;
        }
        Ok(t)
    }

    pub fn diagonal(users: usize) -> Result<Self> {
        Self::with_cross_links(users, [])
    }

    pub fn fully_connected(users: usize) -> Result<Self> {
        Self::with_cross_links(
            users,
            (0..users).flat_map(|t| (0..users).map(move |r| (t, r))),
        )
    }

    fn empty(users: usize) -> Result<Self> {
        if users == 0 || users > MAX_USERS {
            return Err(Error::SizeGuard {
                what: "user count",
                value: users,
                limit: MAX_USERS,
            });
        }
        Ok(Self {
            users,
            out: vec![0; users],
        })
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.users {
            return Err(Error::Topology(format!(
                "user index {} outside 1..={}",
                i + 1,
                self.users
            )));
        }
        Ok(())
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn has_link(&self, tx: usize, rx: usize) -> bool {
        tx < self.users && rx < self.users && self.out[tx] >> rx & 1 == 1
    }

    /// Receivers reached by `tx`, as a bit mask.
    pub fn out_mask(&self, tx: usize) -> u32 {
        self.out[tx]
    }

    /// Transmitters reaching `rx`, as a bit mask.
    pub fn in_mask(&self, rx: usize) -> u32 {
        (0..self.users)
            .filter(|&t| self.out[t] >> rx & 1 == 1)
            .fold(0, |m, t| m | 1 << t)
    }

    pub fn tx_degree(&self, tx: usize) -> usize {
        self.out[tx].count_ones() as usize
    }

    /// All links in `(tx, rx)` order.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.users).flat_map(move |t| {
            (0..self.users)
                .filter(move |&r| self.out[t] >> r & 1 == 1)
                .map(move |r| (t, r))
        })
    }

    pub fn cross_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links().filter(|(t, r)| t != r)
    }

    pub fn link_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Cross links packed into a `users * users` bit mask (bit `t * users + r`).
    pub fn cross_mask(&self) -> u64 {
        assert!(self.users <= 8, "cross mask needs at most 8 users");
        self.cross_links()
            .fold(0u64, |m, (t, r)| m | 1 << (t * self.users + r))
    }

    pub fn from_cross_mask(users: usize, mask: u64) -> Result<Self> {
        Self::with_cross_links(
            users,
            (0..users * users)
                .filter(|&b| mask >> b & 1 == 1)
                .map(|b| (b / users, b % users)),
        )
    }

    /// Moves user `u` to `perm[u]`, transmitter and receiver together.
    pub fn relabel(&self, perm: &[usize]) -> Result<Topology> {
        check_permutation(perm, self.users)?;
        Topology::new(self.users, self.links().map(|(t, r)| (perm[t], perm[r])))
    }

    /// The sub-topology on `members` (sorted ascending), renumbered from 0.
    pub fn induced(&self, members: &[usize]) -> Result<Topology> {
        let index = member_index(members, self.users)?;
        let links: Vec<(usize, usize)> = self
            .links()
            .filter_map(|(t, r)| Some((*index.get(&t)?, *index.get(&r)?)))
            .collect();
        Topology::new(members.len(), links)
    }

    /// True iff every component is one-to-many or fully connected.
    pub fn qualifies(&self) -> bool {
        components(self)
            .iter()
            .all(|c| c.configuration != Configuration::Other)
    }
}

impl fmt::Debug for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Topology(K={}, cross=[", self.users)?;
        for (i, (t, r)) in self.cross_links().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", t + 1, r + 1)?;
        }
        write!(f, "])")
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cross: Vec<String> = self
            .cross_links()
            .map(|(t, r)| format!("{}->{}", t + 1, r + 1))
            .collect();
        if cross.is_empty() {
            write!(f, "K={} diag", self.users)
        } else {
            write!(f, "K={} diag+{}", self.users, cross.join(","))
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], users: usize) -> Result<()> {
    let mut seen = vec![false; users];
    if perm.len() != users {
        return Err(Error::Dimension {
            expected: users,
            found: perm.len(),
        });
    }
    for &p in perm {
        if p >= users || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Contract(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

fn member_index(members: &[usize], users: usize) -> Result<BTreeMap<usize, usize>> {
    if members.is_empty() || members.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract(
            "member list must be non-empty, sorted and free of duplicates".into(),
        ));
    }
    if let Some(&m) = members.iter().find(|&&m| m >= users) {
        return Err(Error::Topology(format!(
            "user index {} outside 1..={users}",
            m + 1
        )));
    }
    Ok(members.iter().enumerate().map(|(i, &m)| (m, i)).collect())
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| current[i] < current[i + 1])
        else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// Channel gains on a topology: `n[t][r]` is the number of levels of
/// transmitter `t` visible at receiver `r`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GainMatrix {
    topology: Topology,
    gains: Vec<usize>,
}

impl GainMatrix {
    /// `gain(t, r)` is consulted for every existing link.
    pub fn from_fn(topology: Topology, mut gain: impl FnMut(usize, usize) -> usize) -> Self {
        let k = topology.users();
        let mut gains = vec![0; k * k];
        for (t, r) in topology.links() {
            gains[t * k + r] = gain(t, r);
        }
        Self { topology, gains }
    }

    /// From `(tx, rx, gain)` triples (0-based); direct links are mandatory
    /// and duplicates are rejected.
    pub fn from_links(users: usize, links: &[(usize, usize, usize)]) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for &(t, r, g) in links {
            if seen.insert((t, r), g).is_some() {
                return Err(Error::Topology(format!(
                    "duplicate link ({},{})",
                    t + 1,
                    r + 1
                )));
            }
        }
        let topology = Topology::new(users, seen.keys().copied())?;
        Ok(Self::from_fn(topology, |t, r| seen[&(t, r)]))
    }

    pub fn uniform(topology: Topology, gain: usize) -> Self {
        Self::from_fn(topology, |_, _| gain)
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn users(&self) -> usize {
        self.topology.users()
    }

    /// Gain of `(tx, rx)`; 0 when the link does not exist.
    pub fn gain(&self, tx: usize, rx: usize) -> usize {
        self.gains[tx * self.users() + rx]
    }

    /// `Some(gain)` for existing links, `None` for absent ones.
    pub fn link_gain(&self, tx: usize, rx: usize) -> Option<usize> {
        self.topology.has_link(tx, rx).then(|| self.gain(tx, rx))
    }

    pub fn set_gain(&mut self, tx: usize, rx: usize, gain: usize) -> Result<()> {
        if !self.topology.has_link(tx, rx) {
            return Err(Error::Topology(format!(
                "link ({},{}) does not exist",
                tx + 1,
                rx + 1
            )));
        }
        let k = self.users();
        self.gains[tx * k + rx] = gain;
        Ok(())
    }

    pub fn links(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.topology.links().map(|(t, r)| (t, r, self.gain(t, r)))
    }

    pub fn max_gain(&self) -> usize {
        self.links().map(|(_, _, g)| g).max().unwrap_or(0)
    }

    /// Number of signal levels `q`: the largest gain, and at least 1.
    pub fn levels(&self) -> usize {
        self.max_gain().max(1)
    }

    pub fn induced(&self, members: &[usize]) -> Result<GainMatrix> {
        let topology = self.topology.induced(members)?;
        Ok(Self::from_fn(topology, |t, r| {
            self.gain(members[t], members[r])
        }))
    }

    pub fn relabel(&self, perm: &[usize]) -> Result<GainMatrix> {
        let topology = self.topology.relabel(perm)?;
        let mut inverse = vec![0; perm.len()];
        for (u, &p) in perm.iter().enumerate() {
            inverse[p] = u;
        }
        Ok(Self::from_fn(topology, |t, r| {
            self.gain(inverse[t], inverse[r])
        }))
    }

    /// `Y_r = XOR_t S^(q - n[t][r]) X_t` for every receiver.
    pub fn received_signal(&self, inputs: &[BitVector]) -> Result<Vec<BitVector>> {
        let k = self.users();
        let q = self.levels();
        if inputs.len() != k {
            return Err(Error::Dimension {
                expected: k,
                found: inputs.len(),
            });
        }
        if let Some(bad) = inputs.iter().find(|x| x.levels() != q) {
            return Err(Error::Dimension {
                expected: q,
                found: bad.levels(),
            });
        }
        (0..k)
            .map(|r| {
                let bits = self
                    .links()
                    .filter(|&(_, rx, _)| rx == r)
                    .fold(0u64, |acc, (t, _, g)| {
                        acc ^ shift_bits(q, g, inputs[t].bits())
                    });
                BitVector::from_bits(q, bits)
            })
            .collect()
    }
}

impl fmt::Debug for GainMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GainMatrix(K={}, ", self.users())?;
        let parts: Vec<String> = self
            .links()
            .map(|(t, r, g)| format!("n{}{}={g}", t + 1, r + 1))
            .collect();
        write!(f, "{})", parts.join(" "))
    }
}

impl fmt::Display for GainMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .links()
            .map(|(t, r, g)| format!("n{}{}={g}", t + 1, r + 1))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Every assignment of gains `0..=bound` to the links of a topology, in
/// odometer order over [`Topology::links`] (last link fastest).
pub fn gain_assignments(topology: &Topology, bound: usize) -> GainAssignments {
    let links: Vec<(usize, usize)> = topology.links().collect();
    GainAssignments {
        topology: topology.clone(),
        digits: vec![0; links.len()],
        links,
        bound,
        done: false,
    }
}

pub struct GainAssignments {
    topology: Topology,
    links: Vec<(usize, usize)>,
    digits: Vec<usize>,
    bound: usize,
    done: bool,
}

impl GainAssignments {
    /// Total number of assignments, `(bound + 1)^links`.
    pub fn total(&self) -> usize {
        (self.bound + 1).pow(self.links.len() as u32)
    }
}

impl Iterator for GainAssignments {
    type Item = GainMatrix;

    fn next(&mut self) -> Option<GainMatrix> {
        if self.done {
            return None;
        }
        let k = self.topology.users();
        let mut gains = vec![0; k * k];
        for (&(t, r), &g) in self.links.iter().zip(&self.digits) {
            gains[t * k + r] = g;
        }
        let out = GainMatrix {
            topology: self.topology.clone(),
            gains,
        };
        self.done = true;
        for d in self.digits.iter_mut().rev() {
            if *d < self.bound {
                *d += 1;
                self.done = false;
                break;
            }
            *d = 0;
        }
        Some(out)
    }
}

/// Shape of a connected component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Configuration {
    /// One transmitter (the hub) reaches every receiver; all others reach
    /// only their own. Single users land here.
    OneToMany {
        hub: usize,
    },
    FullyConnected,
    Other,
}

impl Configuration {
    pub fn qualifies(&self) -> bool {
        !matches!(self, Configuration::Other)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Configuration::OneToMany { hub } => write!(f, "one-to-many(hub={})", hub + 1),
            Configuration::FullyConnected => write!(f, "fully-connected"),
            Configuration::Other => write!(f, "other"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub members: Vec<usize>,
    pub configuration: Configuration,
}

/// Users grouped by connectivity of the undirected transmitter/receiver
/// graph; each group sorted, groups ordered by smallest member.
pub fn connected_components(t: &Topology) -> Vec<Vec<usize>> {
    let k = t.users();
    // union-find over user pairs: a link (tx, rx) joins pair tx and pair rx
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in t.cross_links() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for u in 0..k {
        let root = find(&mut parent, u);
        groups.entry(root).or_default().push(u);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

fn member_mask(members: &[usize]) -> u32 {
    members.iter().fold(0, |m, &u| m | 1 << u)
}

/// Tags a connected component as one-to-many, fully connected or other.
pub fn classify_component(t: &Topology, members: &[usize]) -> Result<Configuration> {
    member_index(members, t.users())?;
    let mask = member_mask(members);
    if members
        .iter()
        .any(|&u| t.out_mask(u) & !mask != 0 || t.in_mask(u) & !mask != 0)
    {
        return Err(Error::Contract(
            "members have links leaving the member set".into(),
        ));
    }
    let induced = t.induced(members)?;
    if connected_components(&induced).len() != 1 {
        return Err(Error::Contract("members are not connected".into()));
    }
    Ok(match classify_connected(&induced) {
        Configuration::OneToMany { hub } => Configuration::OneToMany { hub: members[hub] },
        c => c,
    })
}

/// Classification of a topology assumed to be one connected component.
pub(crate) fn classify_connected(t: &Topology) -> Configuration {
    let m = t.users();
    let all = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let links = t.link_count();
    if m == 1 {
        return Configuration::OneToMany { hub: 0 };
    }
    if links == 2 * m - 1 {
        let hubs: Vec<usize> = (0..m).filter(|&u| t.out_mask(u) == all).collect();
        if let [hub] = hubs[..] {
            let others_direct_only = (0..m)
                .filter(|&u| u != hub)
                .all(|u| t.out_mask(u) == 1 << u);
            if others_direct_only {
                return Configuration::OneToMany { hub };
            }
        }
    }
    if links == m * m {
        return Configuration::FullyConnected;
    }
    Configuration::Other
}

/// Components with their classification (hub indices are global).
pub fn components(t: &Topology) -> Vec<Component> {
    connected_components(t)
        .into_iter()
        .map(|members| {
            let induced = t.induced(&members).expect("component members are valid");
            let configuration = match classify_connected(&induced) {
                Configuration::OneToMany { hub } => Configuration::OneToMany { hub: members[hub] },
                c => c,
            };
            Component {
                members,
                configuration,
            }
        })
        .collect()
}

/// One orbit of three-user cross-link sets under simultaneous relabeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyClass {
    pub representative: Topology,
    pub orbit_size: usize,
}

/// Canonical representative of `t`'s orbit: the relabeling with the smallest
/// cross mask.
pub fn canonical_form(t: &Topology) -> Topology {
    let k = t.users();
    permutations(k)
        .iter()
        .map(|p| t.relabel(p).expect("valid permutation"))
        .min_by_key(|r| r.cross_mask())
        .expect("at least one permutation")
}

/// Every cross-link subset on `users` users (at most 8), in subset order.
pub fn all_topologies(users: usize) -> impl Iterator<Item = Topology> {
    assert!(users <= 8, "at most 8 users");
    let cross: Vec<(usize, usize)> = (0..users)
        .flat_map(|t| (0..users).map(move |r| (t, r)))
        .filter(|(t, r)| t != r)
        .collect();
    (0u64..1 << cross.len()).map(move |subset| {
        Topology::with_cross_links(
            users,
            cross
                .iter()
                .enumerate()
                .filter(|(i, _)| subset >> i & 1 == 1)
                .map(|(_, &l)| l),
        )
        .expect("cross links are in range")
    })
}

/// The orbits of all `2^(K(K-1))` cross-link subsets for `K` users.
pub fn enumerate_topology_classes(users: usize) -> Result<Vec<TopologyClass>> {
    if !(1..=4).contains(&users) {
        return Err(Error::SizeGuard {
            what: "users for orbit enumeration",
            value: users,
            limit: 4,
        });
    }
    let mut orbits: BTreeMap<(usize, u64), usize> = BTreeMap::new();
    for t in all_topologies(users) {
        let canon = canonical_form(&t);
        *orbits
            .entry((canon.cross_links().count(), canon.cross_mask()))
            .or_default() += 1;
    }
    orbits
        .into_iter()
        .map(|((_, mask), orbit_size)| {
            Ok(TopologyClass {
                representative: Topology::from_cross_mask(users, mask)?,
                orbit_size,
            })
        })
        .collect()
}

pub fn enumerate_three_user_classes() -> Vec<TopologyClass> {
    enumerate_topology_classes(3).expect("three users are within the guard")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(k: usize, cross: &[(usize, usize)]) -> Topology {
        Topology::with_cross_links(k, cross.iter().map(|&(t, r)| (t - 1, r - 1))).unwrap()
    }

    #[test]
    fn received_signal_examples() {
        let gm = GainMatrix::from_links(2, &[(0, 0, 2), (1, 1, 2), (0, 1, 1), (1, 0, 0)]).unwrap();
        let x1 = BitVector::from_levels(&[1, 0]).unwrap();
        let x2 = BitVector::from_levels(&[0, 1]).unwrap();
        let y = gm.received_signal(&[x1, x2]).unwrap();
        assert_eq!(y[0].to_levels(), vec![1, 0]);
        // X1 level 1 lands on Y2 level 2 and cancels X2 level 2
        assert_eq!(y[1].to_levels(), vec![0, 0]);

        let single = GainMatrix::from_links(1, &[(0, 0, 3)]).unwrap();
        let x = BitVector::from_levels(&[1, 1, 0]).unwrap();
        assert_eq!(single.received_signal(&[x]).unwrap(), vec![x]);

        let zeros = vec![BitVector::zeros(2).unwrap(); 2];
        assert!(gm
            .received_signal(&zeros)
            .unwrap()
            .iter()
            .all(BitVector::is_zero));
        assert!(gm.received_signal(&[x1]).is_err());
        assert!(gm
            .received_signal(&[x1, BitVector::zeros(3).unwrap()])
            .is_err());
    }

    #[test]
    fn component_examples() {
        assert_eq!(
            connected_components(&Topology::diagonal(3).unwrap()),
            vec![vec![0], vec![1], vec![2]]
        );
        assert_eq!(
            connected_components(&topo(3, &[(1, 2)])),
            vec![vec![0, 1], vec![2]]
        );
        assert_eq!(
            connected_components(&Topology::fully_connected(3).unwrap()),
            vec![vec![0, 1, 2]]
        );
    }

    #[test]
    fn classify_examples() {
        let t = topo(3, &[(1, 2), (1, 3)]);
        assert_eq!(
            classify_component(&t, &[0, 1, 2]).unwrap(),
            Configuration::OneToMany { hub: 0 }
        );
        let full2 = Topology::fully_connected(2).unwrap();
        assert_eq!(
            classify_component(&full2, &[0, 1]).unwrap(),
            Configuration::FullyConnected
        );
        let z = topo(3, &[(1, 2)]);
        assert_eq!(
            classify_component(&z, &[0, 1]).unwrap(),
            Configuration::OneToMany { hub: 0 }
        );
        assert_eq!(
            classify_component(&z, &[2]).unwrap(),
            Configuration::OneToMany { hub: 2 }
        );
        // many-to-one
        assert_eq!(
            classify_component(&topo(3, &[(1, 2), (3, 2)]), &[0, 1, 2]).unwrap(),
            Configuration::Other
        );
    }

    #[test]
    fn classify_rejects_non_components() {
        let t = topo(3, &[(1, 2)]);
        assert!(classify_component(&t, &[0]).is_err());
        assert!(classify_component(&t, &[0, 2]).is_err());
        assert!(classify_component(&Topology::diagonal(2).unwrap(), &[0, 1]).is_err());
    }

    #[test]
    fn three_user_orbits() {
        let classes = enumerate_three_user_classes();
        assert_eq!(classes.len(), 16);
        assert_eq!(classes.iter().map(|c| c.orbit_size).sum::<usize>(), 64);
        assert_eq!(classes[0].representative.cross_links().count(), 0);
        assert_eq!(classes[0].orbit_size, 1);
    }

    #[test]
    fn gain_assignment_count() {
        let t = topo(2, &[(1, 2)]);
        let all: Vec<GainMatrix> = gain_assignments(&t, 2).collect();
        assert_eq!(all.len(), 27);
        assert_eq!(gain_assignments(&t, 2).total(), 27);
        assert!(all.iter().all(|g| g.max_gain() <= 2));
        let distinct: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 27);
    }

    #[test]
    fn permutations_are_complete() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn from_links_rejects_bad_input() {
        assert!(GainMatrix::from_links(2, &[(0, 0, 1)]).is_err());
        assert!(GainMatrix::from_links(2, &[(0, 0, 1), (1, 1, 1), (0, 0, 2)]).is_err());
        assert!(GainMatrix::from_links(2, &[(0, 0, 1), (1, 1, 1), (0, 2, 1)]).is_err());
    }
}
