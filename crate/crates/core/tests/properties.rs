// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Invariants checked on random instances.

mod common;

use num_rational::BigRational;
use num_traits::Zero;
use pathvote::candidates::{enumerate_candidates, PathLimits};
use pathvote::economics::{calibrate_fare, global_net_income, path_cost, utility_matrix, Fare, UtilityMatrix};
use pathvote::manipulation::{
    analyze_stv, brute_force_cm, range_cm, sincere_order_ballots, stv_cm_upper, stv_tm, Status, DEFAULT_MAX_M,
};
use pathvote::topology::{all_demands, generate_geometric_topology, Carrier, CarrierId, CostPreset, Link, Topology};
use pathvote::voting::{eb_round, range_winner, stv_winner, OrderBallot, RangeBallot, VotingSystem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{close, naive_stv, random_utilities};

/// Connected graph on `n` carriers: a random spanning tree plus extra links.
fn small_topology() -> impl Strategy<Value = Topology> {
    (2usize..=7)
        .prop_flat_map(|n| {
            let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
            let extra = proptest::collection::vec((0..n, 0..n), 0..=n);
            (Just(n), parents, extra)
        })
        .prop_map(|(n, parents, extra)| {
            let mut pairs: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            for (a, b) in extra {
                if a != b {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
            pairs.sort_unstable();
            pairs.dedup();
            let carriers = (0..n)
                .map(|i| Carrier {
                    id: CarrierId(i),
                    name: format!("C{i}"),
                    x: None,
                    y: None,
                })
                .collect();
            let links = pairs
                .iter()
                .map(|&(a, b)| Link {
                    a: CarrierId(a),
                    b: CarrierId(b),
                    distance: 100.0 + 37.0 * ((a * 7 + b * 3) % 11) as f64,
                })
                .collect();
            Topology::new(carriers, links).unwrap()
        })
}

/// Every loop-free path from `from` to `to`, with no pruning.
fn all_simple_paths(topology: &Topology, from: usize, to: usize) -> Vec<Vec<usize>> {
    fn go(t: &Topology, to: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let here = *path.last().unwrap();
        if here == to {
            out.push(path.clone());
            return;
        }
        for next in t.neighbors(CarrierId(here)) {
            if !path.contains(&next.0) {
                path.push(next.0);
                go(t, to, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(topology, to, &mut vec![from], &mut out);
    out
}

/// The hop-threshold rule applied to an explicit path list.
fn rule_oracle(paths: &[Vec<usize>], limits: PathLimits) -> Vec<Vec<usize>> {
    let h_min = paths.iter().map(|p| p.len() - 1).min().unwrap();
    let longest = paths.iter().map(|p| p.len() - 1).max().unwrap();
    let mut bound = h_min + limits.delta_min;
    loop {
        let within: Vec<Vec<usize>> = paths.iter().filter(|p| p.len() - 1 <= bound).cloned().collect();
        if within.len() >= limits.m_min || bound >= longest {
            return within;
        }
        bound += 1;
    }
}

fn utilities() -> impl Strategy<Value = UtilityMatrix> {
    (any::<u64>(), 1usize..=6, 1usize..=5)
        .prop_map(|(seed, n, m)| random_utilities(&mut ChaCha8Rng::seed_from_u64(seed), n, m, 4, 10.0))
}

fn tiny_utilities() -> impl Strategy<Value = UtilityMatrix> {
    (any::<u64>(), 1usize..=4, 2usize..=3)
        .prop_map(|(seed, n, m)| random_utilities(&mut ChaCha8Rng::seed_from_u64(seed), n, m, 3, 10.0))
}

fn rank(status: Status) -> u8 {
    match status {
        Status::NotManipulable => 0,
        Status::Inconclusive => 1,
        Status::Manipulable => 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn candidates_match_exhaustive_enumeration(t in small_topology(), m_min in 1usize..=6, delta_min in 0usize..=2) {
        let limits = PathLimits::new(m_min, delta_min);
        for demand in all_demands(&t) {
            let set = enumerate_candidates(&t, demand, limits);
            let mut got: Vec<Vec<usize>> =
                set.paths.iter().map(|p| p.carriers().iter().map(|c| c.0).collect()).collect();
            let mut want = rule_oracle(&all_simple_paths(&t, demand.ingress.0, demand.egress.0), limits);
            got.sort();
            want.sort();
            prop_assert_eq!(got, want);
            prop_assert!(set.paths.iter().all(|p| p.is_valid_in(&t)));
            prop_assert!(set.paths.windows(2).all(|w| w[0].hops() <= w[1].hops()));
        }
    }

    #[test]
    fn candidates_grow_with_m_min(t in small_topology(), m_min in 1usize..=5, delta_min in 0usize..=1) {
        for demand in all_demands(&t) {
            let small = enumerate_candidates(&t, demand, PathLimits::new(m_min, delta_min));
            let large = enumerate_candidates(&t, demand, PathLimits::new(m_min + 1, delta_min));
            prop_assert!(small.paths.iter().all(|p| large.paths.contains(p)));
            prop_assert!(small.len() >= m_min || small.saturated);
        }
    }

    #[test]
    fn path_incomes_sum_to_fare_minus_cost(seed in 0u64..1000, preset_index in 0usize..3) {
        let t = generate_geometric_topology(10, seed, 3.0).unwrap();
        let preset = [CostPreset::Linear, CostPreset::Intermediate, CostPreset::Constant][preset_index];
        let model = preset.model(&t).unwrap();
        let fare = calibrate_fare(&t, &model);
        for demand in all_demands(&t).into_iter().step_by(7) {
            let set = enumerate_candidates(&t, demand, PathLimits::FEW);
            let u = utility_matrix(&set, &t, &model, fare).unwrap();
            for (j, path) in set.paths.iter().enumerate() {
                let expected = fare.amount() - path_cost(&t, &model, path);
                prop_assert!(close(global_net_income(&u, j), expected, 1e-9));
                let on: usize = (0..u.electors()).filter(|&i| u.is_on_path(i, j)).count();
                prop_assert_eq!(on, path.carriers().len());
            }
        }
    }

    #[test]
    fn stv_agrees_with_naive_rounds(seed in any::<u64>(), n in 1usize..=7, m in 1usize..=5) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keys: Vec<Vec<i64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let ballots: Vec<OrderBallot> = keys
            .iter()
            .map(|k| OrderBallot::from_keys(k.iter().map(|&x| x as f64).collect()).unwrap())
            .collect();
        let result = stv_winner(&ballots).unwrap();
        let (winner, trace) = naive_stv(&keys, m);
        prop_assert_eq!(result.winner, winner);
        prop_assert_eq!(result.elimination_order(), trace.iter().map(|(_, loser)| *loser).collect::<Vec<_>>());
    }

    #[test]
    fn eb_round_conserves_votes(u in utilities(), drop in any::<u64>()) {
        let ballots = sincere_order_ballots(&u);
        let m = u.candidates();
        let mut remaining: Vec<usize> = (0..m).filter(|c| (drop >> c) & 1 == 1).collect();
        if remaining.is_empty() {
            remaining.push(0);
        }
        let tallies = eb_round(&remaining, &ballots).unwrap();
        let total: BigRational = tallies.iter().map(|(_, t)| t.clone()).sum();
        prop_assert_eq!(total, BigRational::from_integer(u.electors().into()));
        prop_assert!(tallies.iter().all(|(_, t)| *t >= BigRational::zero()));
    }

    #[test]
    fn range_winner_ignores_uniform_note_shift(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=5, shift in -3i32..=3) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let on = vec![true; m];
        let notes: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(-5..=5) as f64).collect()).collect();
        let ballots = |d: f64| -> Vec<RangeBallot> {
            notes.iter().map(|r| RangeBallot::new(r.iter().map(|x| x + d).collect(), &on, 10.0).unwrap()).collect()
        };
        prop_assert_eq!(range_winner(&ballots(0.0)).unwrap().winner, range_winner(&ballots(shift as f64)).unwrap().winner);
    }

    #[test]
    fn indifferent_elector_changes_nothing(u in utilities()) {
        let w = u.with_indifferent_elector(CarrierId(99));
        prop_assert_eq!(range_cm(&u).status, range_cm(&w).status);
        let (a, b) = (analyze_stv(&u, DEFAULT_MAX_M), analyze_stv(&w, DEFAULT_MAX_M));
        prop_assert_eq!(a.sincere_winner, b.sincere_winner);
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.tm.successful_challengers, b.tm.successful_challengers);
    }

    #[test]
    fn stv_bounds_bracket_exact_manipulability(u in tiny_utilities()) {
        let tm = stv_tm(&u).status;
        let exact = brute_force_cm(&u, VotingSystem::Stv).unwrap().status;
        let upper = stv_cm_upper(&u, DEFAULT_MAX_M).status;
        prop_assert!(rank(tm) <= rank(exact));
        prop_assert!(rank(exact) <= rank(upper));
    }

    #[test]
    fn range_trivial_strategy_is_exact(u in tiny_utilities()) {
        prop_assert_eq!(range_cm(&u).status, brute_force_cm(&u, VotingSystem::Range).unwrap().status);
    }

    #[test]
    fn more_manipulators_never_hurt_the_upper_bound(u in utilities(), copies in 1usize..=2) {
        // Duplicating a coalition member adds manipulator weight only.
        let upper = stv_cm_upper(&u, DEFAULT_MAX_M);
        if let Some(c) = upper.challenger {
            let winner = analyze_stv(&u, DEFAULT_MAX_M).sincere_winner;
            if let Some(row) = (0..u.electors()).find(|&i| u.value(i, c) > u.value(i, winner)) {
                let mut values: Vec<Vec<f64>> = (0..u.electors()).map(|i| u.row(i).to_vec()).collect();
                let mut on: Vec<Vec<bool>> = (0..u.electors()).map(|i| u.on_path_row(i).to_vec()).collect();
                for _ in 0..copies {
                    values.push(u.row(row).to_vec());
                    on.push(u.on_path_row(row).to_vec());
                }
                let grown = UtilityMatrix::from_rows(Fare::new(10.0).unwrap(), values, on).unwrap();
                if analyze_stv(&grown, DEFAULT_MAX_M).sincere_winner == winner {
                    prop_assert_eq!(stv_cm_upper(&grown, DEFAULT_MAX_M).status, Status::Manipulable);
                }
            }
        }
    }

    #[test]
    fn generator_is_deterministic(seed in any::<u64>(), n in 2usize..=20) {
        let a = generate_geometric_topology(n, seed, 3.0).unwrap();
        let b = generate_geometric_topology(n, seed, 3.0).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }
}
