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

//! Sincere range and STV elections on one demand, with the STV round table.
//!
//! Run with `cargo run --example voting`.

use pathvote::candidates::{enumerate_candidates, PathLimits};
use pathvote::economics::{calibrate_fare, global_net_income, utility_matrix};
use pathvote::topology::{europe38_approx, CostPreset, Demand};
use pathvote::voting::{format_rational, range_winner, sincere_order_ballot, sincere_range_ballot, stv_winner};

fn main() {
    let europe = europe38_approx();
    let model = CostPreset::Intermediate.model(&europe).unwrap();
    let fare = calibrate_fare(&europe, &model);
    let demand = Demand::new(
        europe.carrier_by_name("Spain").unwrap(),
        europe.carrier_by_name("Hungary").unwrap(),
    )
    .unwrap();
    let set = enumerate_candidates(&europe, demand, PathLimits::FEW);
    let u = utility_matrix(&set, &europe, &model, fare).unwrap();

    let range: Vec<_> = (0..u.electors()).map(|row| sincere_range_ballot(&u, row)).collect();
    let winner = range_winner(&range).unwrap().winner;
    println!("range winner {winner}: {}", set.paths[winner].display_names(&europe));

    let orders: Vec<_> = (0..u.electors()).map(|row| sincere_order_ballot(&u, row)).collect();
    let result = stv_winner(&orders).unwrap();
    for (k, round) in result.rounds.iter().enumerate() {
        let cells: Vec<String> = round
            .tallies
            .iter()
            .map(|(c, t)| format!("{c}:{}", format_rational(t)))
            .collect();
        println!(
            "round {:>2}: {}  -> eliminate {}",
            k + 1,
            cells.join(" "),
            round.eliminated
        );
    }
    println!(
        "stv winner {}: {}",
        result.winner,
        set.paths[result.winner].display_names(&europe)
    );

    let best = (0..set.len())
        .max_by(|&a, &b| global_net_income(&u, a).total_cmp(&global_net_income(&u, b)))
        .unwrap();
    println!("income-optimal candidate {best}");
}
