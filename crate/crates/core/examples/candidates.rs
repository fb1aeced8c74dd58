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

//! Candidate paths of one demand under both path-limit presets.
//!
//! Run with `cargo run --example candidates`.

use pathvote::candidates::{enumerate_candidates, Participation, PathLimits};
use pathvote::topology::{europe38_approx, Demand};

fn main() {
    let europe = europe38_approx();
    let ingress = europe.carrier_by_name("Portugal").unwrap();
    let egress = europe.carrier_by_name("Poland").unwrap();
    let demand = Demand::new(ingress, egress).unwrap();

    for limits in PathLimits::PRESETS {
        let set = enumerate_candidates(&europe, demand, limits);
        println!(
            "{limits}: {} candidates, h_min = {}, delta_h = {}",
            set.len(),
            set.h_min,
            set.delta_h
        );
        for path in set.paths.iter().take(6) {
            println!("  {} hops  {}", path.hops(), path.display_names(&europe));
        }
        if set.len() > 6 {
            println!("  ... {} more", set.len() - 6);
        }
        let electorate = Participation::new(&set, europe.len()).electorate();
        println!("  electorate: {} carriers", electorate.len());
    }
}
