//! Reduction of a large non-qualifying component to a three-user one.
//!
//! Every user outside the chosen triple gets zero gains on all its links and
//! everyone is told so, which leaves a three-user channel embedded in the
//! larger one.

use std::fmt;

use crate::error::{Error, Result};
use crate::network::{classify_component, components, Configuration, GainMatrix, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionCase {
    /// A transmitter whose degree is strictly between 1 and the component size.
    PartialDegree,
    /// Every degree is 1 or the component size.
    ExtremeDegrees,
    /// The component already has three users.
    AlreadyThree,
}

impl fmt::Display for ReductionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionCase::PartialDegree => "partial-degree",
            ReductionCase::ExtremeDegrees => "extreme-degrees",
            ReductionCase::AlreadyThree => "already-three",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenieReduction {
    /// Selected users, ascending.
    pub users: [usize; 3],
    pub case: ReductionCase,
    /// Topology induced on the selected users (renumbered 0..3).
    pub induced: Topology,
}

impl GenieReduction {
    /// Embeds three-user gains into the full network with every other link
    /// at gain zero.
    pub fn lift(&self, full: &Topology, sub: &GainMatrix) -> Result<GainMatrix> {
        if sub.topology() != &self.induced {
            return Err(Error::Contract(
                "gains are not over the induced topology".into(),
            ));
        }
        Ok(GainMatrix::from_fn(full.clone(), |t, r| {
            match (self.local(t), self.local(r)) {
                (Some(a), Some(b)) => sub.gain(a, b),
                _ => 0,
            }
        }))
    }

    fn local(&self, u: usize) -> Option<usize> {
        self.users.iter().position(|&x| x == u)
    }
}

impl fmt::Display for GenieReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.users;
        write!(f, "users {{{},{},{}}} ({})", a + 1, b + 1, c + 1, self.case)
    }
}

/// Picks three users of the first non-qualifying component whose induced
/// topology is connected and non-qualifying.
pub fn genie_reduce(t: &Topology) -> Result<GenieReduction> {
    let comp = components(t)
        .into_iter()
        .find(|c| c.configuration == Configuration::Other && c.members.len() >= 3)
        .ok_or_else(|| {
            Error::NotReducible("every component is one-to-many or fully connected".into())
        })?;
    let members = &comp.members;
    let size = members.len();

    let (mut users, case) = if size == 3 {
        (
            [members[0], members[1], members[2]],
            ReductionCase::AlreadyThree,
        )
    } else if let Some(&a) = members
        .iter()
        .find(|&&u| (2..size).contains(&t.tx_degree(u)))
    {
        let victims: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&r| t.has_link(a, r))
            .collect();
        let touches = |p: usize, d: usize| t.has_link(p, d) || t.has_link(d, p);
        let p = members
            .iter()
            .copied()
            .filter(|u| !victims.contains(u))
            .find(|&u| victims.iter().any(|&d| touches(u, d)))
            .ok_or_else(|| {
                Error::Invariant("connected component has no outside neighbour".into())
            })?;
        let j = if t.has_link(p, a) {
            victims.iter().copied().find(|&d| d != a)
        } else {
            victims.iter().copied().find(|&d| d != a && touches(p, d))
        }
        .ok_or_else(|| Error::Invariant("no second victim for the reduction".into()))?;
        ([a, j, p], ReductionCase::PartialDegree)
    } else {
        let full: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&u| t.tx_degree(u) == size)
            .collect();
        let single = members.iter().copied().find(|&u| t.tx_degree(u) == 1);
        match (full.as_slice(), single) {
            ([x, y, ..], Some(z)) => ([*x, *y, z], ReductionCase::ExtremeDegrees),
            _ => {
                return Err(Error::Invariant(
                    "non-qualifying component without two full-degree transmitters".into(),
                ))
            }
        }
    };
    users.sort_unstable();
    let induced = t.induced(&users)?;
    let all = [0, 1, 2];
    let shape = classify_component(&induced, &all);
    if !matches!(shape, Ok(Configuration::Other)) {
        return Err(Error::Invariant(format!(
            "selected users {:?} induce {shape:?}",
            users.map(|u| u + 1)
        )));
    }
    Ok(GenieReduction {
        users,
        case,
        induced,
    })
}
