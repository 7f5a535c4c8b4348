//! Local views after one and a half rounds of message passing.
//!
//! Distances live on the undirected graph whose nodes are the transmitters
//! and receivers and whose edges are the links. A link's distance from a node
//! is one more than the distance to its nearer endpoint, so incident links sit
//! at distance 1. Transmitters learn every link within distance 2, receivers
//! every link within distance 3.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{GainMatrix, Topology};

/// Radius of a transmitter's view.
pub const TX_RADIUS: usize = 2;
/// Radius of a receiver's view.
pub const RX_RADIUS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Transmitter,
    Receiver,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub role: Role,
    pub user: usize,
}

impl NodeId {
    pub fn tx(user: usize) -> Self {
        Self {
            role: Role::Transmitter,
            user,
        }
    }

    pub fn rx(user: usize) -> Self {
        Self {
            role: Role::Receiver,
            user,
        }
    }

    fn graph_index(&self, users: usize) -> usize {
        match self.role {
            Role::Transmitter => self.user,
            Role::Receiver => users + self.user,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.role {
            Role::Transmitter => 'T',
            Role::Receiver => 'R',
        };
        write!(f, "{tag}{}", self.user + 1)
    }
}

impl FromStr for NodeId {
    type Err = Error;

    /// Parses `T3` / `R1` (1-based, case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: None,
            field: Some("node".into()),
            message: format!("expected T<k> or R<k>, got `{s}`"),
        };
        let mut chars = s.trim().chars();
        let role = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('T') => Role::Transmitter,
            Some('R') => Role::Receiver,
            _ => return Err(bad()),
        };
        let user: usize = chars.as_str().parse().map_err(|_| bad())?;
        if user == 0 {
            return Err(bad());
        }
        Ok(NodeId {
            role,
            user: user - 1,
        })
    }
}

/// What one node knows: gains of the links in its ball, and optionally the
/// global connectivity handed out by a genie.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalView {
    pub owner: NodeId,
    pub known: BTreeMap<(usize, usize), usize>,
    pub genie_topology: Option<Topology>,
}

impl LocalView {
    pub fn knows(&self, tx: usize, rx: usize) -> bool {
        self.known.contains_key(&(tx, rx))
    }

    pub fn gain(&self, tx: usize, rx: usize) -> Option<usize> {
        self.known.get(&(tx, rx)).copied()
    }

    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.known.keys().copied()
    }
}

fn node_distances(t: &Topology, from: NodeId) -> Vec<Option<usize>> {
    let k = t.users();
    let mut dist = vec![None; 2 * k];
    let start = from.graph_index(k);
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        let d = dist[node].expect("queued nodes have a distance");
        let neighbours: Vec<usize> = if node < k {
            (0..k)
                .filter(|&r| t.has_link(node, r))
                .map(|r| k + r)
                .collect()
        } else {
            (0..k).filter(|&tx| t.has_link(tx, node - k)).collect()
        };
        for n in neighbours {
            if dist[n].is_none() {
                dist[n] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

fn check_node(t: &Topology, v: NodeId) -> Result<()> {
    if v.user >= t.users() {
        return Err(Error::Topology(format!(
            "node {v} outside 1..={}",
            t.users()
        )));
    }
    Ok(())
}

/// Hop distance of `link` from node `v`; `None` when they are disconnected.
pub fn link_hop_distance(t: &Topology, v: NodeId, link: (usize, usize)) -> Result<Option<usize>> {
    check_node(t, v)?;
    if !t.has_link(link.0, link.1) {
        return Err(Error::Topology(format!(
            "link ({},{}) does not exist",
            link.0 + 1,
            link.1 + 1
        )));
    }
    let dist = node_distances(t, v);
    Ok(link_distance(&dist, t.users(), link))
}

fn link_distance(dist: &[Option<usize>], k: usize, (tx, rx): (usize, usize)) -> Option<usize> {
    let a = dist[tx];
    let b = dist[k + rx];
    match (a, b) {
        (Some(a), Some(b)) => Some(1 + a.min(b)),
        (Some(d), None) | (None, Some(d)) => Some(1 + d),
        (None, None) => None,
    }
}

fn view_within(gm: &GainMatrix, owner: NodeId, radius: usize, genie: bool) -> Result<LocalView> {
    let t = gm.topology();
    check_node(t, owner)?;
    let dist = node_distances(t, owner);
    let known = gm
        .links()
        .filter(|&(tx, rx, _)| {
            link_distance(&dist, t.users(), (tx, rx)).is_some_and(|d| d <= radius)
        })
        .map(|(tx, rx, g)| ((tx, rx), g))
        .collect();
    Ok(LocalView {
        owner,
        known,
        genie_topology: genie.then(|| t.clone()),
    })
}

/// Transmitter `k`'s view: its own links and every link touching a receiver
/// it reaches.
pub fn tx_view(gm: &GainMatrix, k: usize, genie: bool) -> Result<LocalView> {
    view_within(gm, NodeId::tx(k), TX_RADIUS, genie)
}

/// Receiver `j`'s view: every link within three hops.
pub fn rx_view(gm: &GainMatrix, j: usize, genie: bool) -> Result<LocalView> {
    view_within(gm, NodeId::rx(j), RX_RADIUS, genie)
}

pub fn node_view(gm: &GainMatrix, node: NodeId, genie: bool) -> Result<LocalView> {
    match node.role {
        Role::Transmitter => tx_view(gm, node.user, genie),
        Role::Receiver => rx_view(gm, node.user, genie),
    }
}

pub fn tx_views(gm: &GainMatrix, genie: bool) -> Result<Vec<LocalView>> {
    (0..gm.users()).map(|k| tx_view(gm, k, genie)).collect()
}
