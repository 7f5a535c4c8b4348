mod common;

use common::{random_gains, random_topology, OracleMemo};
use ldic_core::network::{all_topologies, components, gain_assignments, Configuration, GainMatrix};
use ldic_core::oracle::{brute_force_sum_capacity, one_to_many_sum_capacity};
use ldic_core::strategy::{achieved_sum_rate, fully_connected_assignment, simulate, StrategyCase};
use ldic_core::views::tx_views;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn safe_everywhere_and_optimal_when_qualifying_up_to_three_users() {
    let mut runs = 0;
    for users in 1..=3 {
        for t in all_topologies(users) {
            let comps = components(&t);
            for gm in gain_assignments(&t, 3) {
                runs += 1;
                let rates = achieved_sum_rate(&gm, false).unwrap_or_else(|e| panic!("{gm}: {e}"));
                let oracle = brute_force_sum_capacity(&gm).unwrap().sum;
                assert!(rates.sum() <= oracle, "{gm}");
                if t.qualifies() {
                    assert_eq!(rates.sum(), oracle, "{gm}");
                }
                for c in &comps {
                    if let Configuration::OneToMany { hub } = c.configuration {
                        let got: usize = c.members.iter().map(|&u| rates[u]).sum();
                        let closed = one_to_many_sum_capacity(&gm, &c.members, hub).unwrap();
                        assert_eq!(got, closed, "{gm} component {:?}", c.members);
                    }
                }
            }
        }
    }
    assert_eq!(runs, 1_000_000 + 400 + 4);
}

#[test]
fn genie_runs_are_safe_up_to_three_users() {
    for t in all_topologies(3) {
        for gm in gain_assignments(&t, 2) {
            achieved_sum_rate(&gm, true).unwrap_or_else(|e| panic!("{gm}: {e}"));
        }
    }
}

#[test]
fn sampled_four_user_runs_are_safe() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut memo = OracleMemo::default();
    for i in 0..500 {
        let density = rng.random_range(0.1..0.6);
        let t = random_topology(&mut rng, 4, density);
        let gm = random_gains(&mut rng, t.clone(), 3);
        let rates = achieved_sum_rate(&gm, i % 2 == 0).unwrap_or_else(|e| panic!("{gm}: {e}"));
        let oracle = memo.sum(&gm);
        assert!(rates.sum() <= oracle, "{gm}");
        if t.qualifies() {
            assert_eq!(rates.sum(), oracle, "{gm}");
        }
    }
}

#[test]
fn one_to_many_example() {
    let gm = GainMatrix::from_links(3, &[(0, 0, 2), (1, 1, 1), (2, 2, 1), (0, 1, 1), (0, 2, 1)])
        .unwrap();
    let sim = simulate(&gm, false).unwrap();
    assert_eq!(sim.rates().as_slice(), [1, 1, 1]);
    assert_eq!(sim.strategy.codebook(0).as_levels(), Some(vec![2]));
    assert_eq!(sim.cases[0], StrategyCase::Hub);
}

#[test]
fn fully_connected_members_derive_the_same_assignment() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 200 {
        let users = rng.random_range(2..=4);
        let t = random_topology(&mut rng, users, 0.8);
        let bound = if users == 4 { 2 } else { 3 };
        let gm = random_gains(&mut rng, t.clone(), bound);
        let views = tx_views(&gm, false).unwrap();
        for c in components(&t) {
            if c.configuration != Configuration::FullyConnected {
                continue;
            }
            checked += 1;
            let first = fully_connected_assignment(&views[c.members[0]]).unwrap();
            for &m in &c.members[1..] {
                assert_eq!(
                    fully_connected_assignment(&views[m]).unwrap(),
                    first,
                    "{gm}"
                );
            }
        }
    }
}
