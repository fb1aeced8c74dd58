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

//! Independent reference implementations and instance generators shared by
//! the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use pathvote::economics::{Fare, UtilityMatrix};
use pathvote::topology::{CostModel, Topology};
use rand::Rng;

/// STV by the book: every round recomputes each elector's favorite
/// remaining candidates from its keys, splits its vote equally among them,
/// and eliminates the lowest-index candidate with the smallest tally.
/// Returns the winner and the per-round `(tallies, eliminated)` trace.
pub fn naive_stv(keys: &[Vec<i64>], m: usize) -> (usize, Vec<(Vec<BigRational>, usize)>) {
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut trace = Vec::new();
    while remaining.len() > 1 {
        let mut tally = vec![BigRational::zero(); m];
        for ballot in keys {
            let best = remaining.iter().map(|&c| ballot[c]).max().unwrap();
            let tops: Vec<usize> = remaining.iter().copied().filter(|&c| ballot[c] == best).collect();
            let share = BigRational::new(BigInt::from(1), BigInt::from(tops.len()));
            for c in tops {
                tally[c] += &share;
            }
        }
        let mut loser = remaining[0];
        for &c in &remaining {
            if tally[c] < tally[loser] {
                loser = c;
            }
        }
        let row: Vec<BigRational> = remaining.iter().map(|&c| tally[c].clone()).collect();
        trace.push((row, loser));
        remaining.retain(|&c| c != loser);
    }
    (remaining[0], trace)
}

/// All-pairs least link costs by Floyd-Warshall over `c0 + d / d0`.
pub fn floyd_warshall(topology: &Topology, model: &CostModel) -> Vec<Vec<f64>> {
    let n = topology.len();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for link in topology.links() {
        let cost = model.c0 + link.distance / model.d0;
        let (a, b) = (link.a.index(), link.b.index());
        dist[a][b] = dist[a][b].min(cost);
        dist[b][a] = dist[b][a].min(cost);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist
}

/// Random utility matrix: every elector is on a non-empty random subset of
/// the candidates, with integer utilities in `[-spread, spread]` there.
pub fn random_utilities(
    rng: &mut impl Rng,
    electors: usize,
    candidates: usize,
    spread: i64,
    fare: f64,
) -> UtilityMatrix {
    let mut values = Vec::with_capacity(electors);
    let mut on_path = Vec::with_capacity(electors);
    for _ in 0..electors {
        let mut on: Vec<bool> = (0..candidates).map(|_| rng.gen_bool(0.6)).collect();
        if !on.iter().any(|&x| x) {
            on[rng.gen_range(0..candidates)] = true;
        }
        let row = on
            .iter()
            .map(|&o| if o { rng.gen_range(-spread..=spread) as f64 } else { 0.0 })
            .collect();
        values.push(row);
        on_path.push(on);
    }
    UtilityMatrix::from_rows(Fare::new(fare).unwrap(), values, on_path).unwrap()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
