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

//! Fare calibration, path costs and the utility matrix of one demand.
//!
//! Run with `cargo run --example economics`.

use pathvote::candidates::{enumerate_candidates, PathLimits};
use pathvote::economics::{calibrate_fare, global_net_income, least_cost_path_cost, path_cost, utility_matrix};
use pathvote::topology::{europe38_approx, CostPreset, Demand};

fn main() {
    let europe = europe38_approx();
    let demand = Demand::new(
        europe.carrier_by_name("France").unwrap(),
        europe.carrier_by_name("Austria").unwrap(),
    )
    .unwrap();

    for preset in CostPreset::ALL {
        let model = preset.model(&europe).unwrap();
        let fare = calibrate_fare(&europe, &model);
        let set = enumerate_candidates(&europe, demand, PathLimits::FEW);
        let u = utility_matrix(&set, &europe, &model, fare).unwrap();
        println!(
            "{preset}: fare {:.4}, least cost {:.4}",
            fare.amount(),
            least_cost_path_cost(&europe, &model, demand)
        );
        for (j, path) in set.paths.iter().enumerate() {
            println!(
                "  {j}: cost {:>8.4}  income {:>8.4}  {}",
                path_cost(&europe, &model, path),
                global_net_income(&u, j),
                path.display_names(&europe)
            );
        }
    }
}
