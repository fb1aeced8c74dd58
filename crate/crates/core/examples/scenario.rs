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

//! One full scenario over every demand of a generated topology, with the
//! reports written to a directory.
//!
//! Run with `cargo run --release --example scenario [OUT_DIR]`.

use std::path::PathBuf;

use pathvote::experiment::{run_scenario, write_reports, ScenarioConfig};
use pathvote::topology::generate_geometric_topology;

fn main() {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "scenario-out".into()).into();
    let topology = generate_geometric_topology(16, 1, 4.0).unwrap();
    let config = ScenarioConfig::default();
    let metrics = run_scenario(&topology, &config).unwrap();
    println!(
        "{}: {} demands, fare {:.3}",
        metrics.scenario,
        metrics.demands,
        metrics.fare.amount()
    );
    for m in &metrics.systems {
        println!(
            "  {:<5} sincere {:6.2}%  cm {:6.2}%..{:6.2}%  insincere avg {:6.2}%  worst {:6.2}%",
            m.system.name(),
            m.sincere_efficiency,
            m.cm_lower,
            m.cm_upper,
            m.insincere_efficiency_avg,
            m.insincere_efficiency_worst
        );
    }
    println!(
        "  random candidate {:6.2}%, worst candidate {:6.2}%",
        metrics.random_efficiency, metrics.worst_efficiency
    );
    write_reports(&out, &[metrics]).unwrap();
    println!("reports written to {}", out.display());
}
