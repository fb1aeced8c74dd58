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

//! Manipulability of one demand: exact coalition manipulation for range
//! voting, and both bounds for STV.
//!
//! Run with `cargo run --example manipulation`.

use pathvote::candidates::{enumerate_candidates, PathLimits};
use pathvote::economics::{calibrate_fare, global_net_income, utility_matrix};
use pathvote::manipulation::{analyze_stv, insincere_outcomes, range_cm, range_sincere_winner, DEFAULT_MAX_M};
use pathvote::topology::{europe38_approx, CostPreset, Demand};

fn main() {
    let europe = europe38_approx();
    let model = CostPreset::Intermediate.model(&europe).unwrap();
    let fare = calibrate_fare(&europe, &model);
    let demand = Demand::new(
        europe.carrier_by_name("Italy").unwrap(),
        europe.carrier_by_name("Sweden").unwrap(),
    )
    .unwrap();
    let set = enumerate_candidates(&europe, demand, PathLimits::FEW);
    let u = utility_matrix(&set, &europe, &model, fare).unwrap();
    println!("{} candidates, {} electors", u.candidates(), u.electors());

    let winner = range_sincere_winner(&u);
    let range = range_cm(&u);
    let outcome = insincere_outcomes(&u, winner, &range.successful_challengers);
    println!(
        "range: sincere winner {winner} (income {:.3}), {}, challengers {:?}",
        global_net_income(&u, winner),
        range.status,
        range.successful_challengers
    );
    println!(
        "  income if manipulated: average {:.3}, worst {:.3}",
        outcome.average, outcome.worst
    );

    let stv = analyze_stv(&u, DEFAULT_MAX_M);
    println!(
        "stv: sincere winner {} (income {:.3}), trivial manipulation {}, verdict {}",
        stv.sincere_winner,
        global_net_income(&u, stv.sincere_winner),
        stv.tm.status,
        stv.verdict
    );
    if let Some(upper) = &stv.upper {
        println!("  relaxed upper bound: {}", upper.status);
    }
}
