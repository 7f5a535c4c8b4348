mod common;

use std::collections::BTreeSet;

use common::{random_gains, random_topology, shape_of, Shape};
use ldic_core::network::{
    all_topologies, canonical_form, classify_component, components, enumerate_three_user_classes,
    permutations, Configuration, GainMatrix, Topology,
};
use ldic_core::views::{rx_view, tx_view};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tag(c: Configuration) -> Shape {
    match c {
        Configuration::OneToMany { .. } => Shape::OneToMany,
        Configuration::FullyConnected => Shape::FullyConnected,
        Configuration::Other => Shape::Other,
    }
}

#[test]
fn classification_matches_direct_rule_and_survives_relabeling() {
    for users in 1..=4 {
        let perms = permutations(users);
        for t in all_topologies(users) {
            for c in components(&t) {
                assert_eq!(tag(c.configuration), shape_of(&t, &c.members), "{t}");
                for p in &perms {
                    let moved = t.relabel(p).unwrap();
                    let members: Vec<usize> = c.members.iter().map(|&u| p[u]).collect();
                    let mut sorted = members.clone();
                    sorted.sort_unstable();
                    let shape = classify_component(&moved, &sorted).unwrap();
                    assert_eq!(tag(shape), tag(c.configuration), "{t} under {p:?}");
                }
            }
        }
    }
}

#[test]
fn every_three_user_topology_has_one_representative() {
    let reps: Vec<Topology> = enumerate_three_user_classes()
        .into_iter()
        .map(|c| c.representative)
        .collect();
    for t in all_topologies(3) {
        let matching = reps
            .iter()
            .filter(|r| permutations(3).iter().any(|p| &t.relabel(p).unwrap() == *r))
            .count();
        assert_eq!(matching, 1, "{t}");
        assert!(reps.contains(&canonical_form(&t)));
    }
}

#[test]
fn qualifying_topologies_stay_qualifying_after_removing_a_user() {
    for users in 2..=4 {
        for t in all_topologies(users).filter(Topology::qualifies) {
            for gone in 0..users {
                let rest: Vec<usize> = (0..users).filter(|&u| u != gone).collect();
                assert!(
                    t.induced(&rest).unwrap().qualifies(),
                    "{t} without {}",
                    gone + 1
                );
            }
        }
    }
}

/// Hop distances on the undirected transmitter/receiver graph; node `u` is
/// transmitter u, node `k + u` is receiver u.
fn distances(t: &Topology) -> Vec<Vec<usize>> {
    let k = t.users();
    let n = 2 * k;
    let far = usize::MAX / 4;
    let mut d = vec![vec![far; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (a, b) in t.links() {
        d[a][k + b] = 1;
        d[k + b][a] = 1;
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][m] + d[m][j]);
            }
        }
    }
    d
}

fn within(t: &Topology, node: usize, radius: usize) -> BTreeSet<(usize, usize)> {
    let d = distances(t);
    let k = t.users();
    t.links()
        .filter(|&(a, b)| d[node][a].min(d[node][k + b]) < radius)
        .collect()
}

#[test]
fn views_match_floyd_warshall_balls() {
    for users in 1..=4 {
        for t in all_topologies(users) {
            let gm = GainMatrix::uniform(t.clone(), 1);
            for k in 0..users {
                let tx: BTreeSet<_> = tx_view(&gm, k, false).unwrap().links().collect();
                let rx: BTreeSet<_> = rx_view(&gm, k, false).unwrap().links().collect();
                assert_eq!(tx, within(&t, k, 2), "{t} T{}", k + 1);
                assert_eq!(rx, within(&t, users + k, 3), "{t} R{}", k + 1);
                assert!(tx.is_subset(&rx));
            }
        }
    }
}

#[test]
fn qualifying_components_are_covered_by_the_right_views() {
    for users in 1..=4 {
        for t in all_topologies(users) {
            let gm = GainMatrix::uniform(t.clone(), 1);
            for c in components(&t) {
                let comp_links: BTreeSet<(usize, usize)> =
                    t.links().filter(|(a, _)| c.members.contains(a)).collect();
                let covering: Vec<usize> = match c.configuration {
                    Configuration::OneToMany { hub } => vec![hub],
                    Configuration::FullyConnected => c.members.clone(),
                    Configuration::Other => continue,
                };
                for k in covering {
                    let seen: BTreeSet<_> = tx_view(&gm, k, false).unwrap().links().collect();
                    assert!(comp_links.is_subset(&seen), "{t} T{}", k + 1);
                }
            }
        }
    }
}

#[test]
fn views_depend_only_on_their_own_links() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let users = rng.random_range(2..=6);
        let t = random_topology(&mut rng, users, 0.3);
        let gm = random_gains(&mut rng, t.clone(), 3);
        let k = rng.random_range(0..users);
        let view = tx_view(&gm, k, false).unwrap();
        let mut other = gm.clone();
        for (a, b) in t.links().filter(|&(a, b)| !view.knows(a, b)) {
            other.set_gain(a, b, rng.random_range(0..=3)).unwrap();
        }
        assert_eq!(tx_view(&other, k, false).unwrap(), view);
        for ((a, b), g) in &view.known {
            assert_eq!(gm.gain(*a, *b), *g);
        }
        assert!(view.knows(k, k));
    }
}
