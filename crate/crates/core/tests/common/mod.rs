#![allow(dead_code)]

use std::collections::HashMap;

use ldic_core::network::{connected_components, GainMatrix, Topology};
use ldic_core::oracle::brute_force_sum_capacity;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Oracle sums keyed by gain matrix.
#[derive(Default)]
pub struct OracleMemo(HashMap<GainMatrix, usize>);

impl OracleMemo {
    pub fn sum(&mut self, gm: &GainMatrix) -> usize {
        if let Some(&s) = self.0.get(gm) {
            return s;
        }
        let s = brute_force_sum_capacity(gm)
            .expect("within the oracle guard")
            .sum;
        self.0.insert(gm.clone(), s);
        s
    }
}

pub fn random_topology(rng: &mut ChaCha8Rng, users: usize, density: f64) -> Topology {
    let cross: Vec<(usize, usize)> = (0..users)
        .flat_map(|t| (0..users).map(move |r| (t, r)))
        .filter(|(t, r)| t != r)
        .collect();
    let picked: Vec<(usize, usize)> = cross
        .into_iter()
        .filter(|_| rng.random_bool(density))
        .collect();
    Topology::with_cross_links(users, picked).unwrap()
}

pub fn random_gains(rng: &mut ChaCha8Rng, t: Topology, bound: usize) -> GainMatrix {
    GainMatrix::from_fn(t, |_, _| rng.random_range(0..=bound))
}

/// Topology with one link removed, gains kept elsewhere.
pub fn without_link(gm: &GainMatrix, link: (usize, usize)) -> GainMatrix {
    let t = gm.topology();
    let kept = Topology::new(t.users(), t.links().filter(|&l| l != link)).unwrap();
    GainMatrix::from_fn(kept, |a, b| gm.gain(a, b))
}

/// Shape of a connected user set, decided straight from the cross links.
#[derive(Debug, PartialEq, Eq)]
pub enum Shape {
    OneToMany,
    FullyConnected,
    Other,
}

pub fn shape_of(t: &Topology, members: &[usize]) -> Shape {
    let cross: Vec<(usize, usize)> = members
        .iter()
        .flat_map(|&a| members.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a != b && t.has_link(a, b))
        .collect();
    let m = members.len();
    if members.iter().any(|&h| cross.iter().all(|&(a, _)| a == h)) {
        Shape::OneToMany
    } else if cross.len() == m * (m - 1) {
        Shape::FullyConnected
    } else {
        Shape::Other
    }
}

/// True when some connected component is neither one-to-many nor fully connected.
pub fn has_other_component(t: &Topology) -> bool {
    connected_components(t)
        .iter()
        .any(|c| shape_of(t, c) == Shape::Other)
}
