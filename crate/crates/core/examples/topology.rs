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

//! Load the bundled European topology, generate a random one, and compare
//! the three link cost presets.
//!
//! Run with `cargo run --example topology`.

use pathvote::topology::{all_demands, europe38_approx, generate_geometric_topology, CostPreset};

fn main() {
    let europe = europe38_approx();
    println!(
        "europe: {} carriers, {} links, {} demands",
        europe.len(),
        europe.links().len(),
        all_demands(&europe).len()
    );
    let longest = europe
        .links()
        .iter()
        .max_by(|a, b| a.distance.total_cmp(&b.distance))
        .unwrap();
    println!(
        "longest link {} - {}: {:.1} km",
        europe.carrier(longest.a).name,
        europe.carrier(longest.b).name,
        longest.distance
    );
    for preset in CostPreset::ALL {
        let model = preset.model(&europe).unwrap();
        let cost = europe.link_cost(&model, longest.a, longest.b).unwrap();
        println!(
            "{preset:<13} c0 = {:<4} d0 = {:<12.1} longest link costs {cost:.4}",
            model.c0, model.d0
        );
    }

    let generated = generate_geometric_topology(20, 7, 4.0).unwrap();
    let degree = 2.0 * generated.links().len() as f64 / generated.len() as f64;
    println!("generated: {} carriers, average degree {degree:.2}", generated.len());
    println!("{}", generated.to_json().lines().take(3).collect::<Vec<_>>().join("\n"));
}
