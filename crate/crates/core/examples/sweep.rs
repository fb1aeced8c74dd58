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

//! The six-configuration sweep on the bundled European topology.
//!
//! Run with `cargo run --release --example sweep [OUT_DIR]`. Expect several
//! minutes per core.

use std::path::PathBuf;

use pathvote::experiment::{sweep, write_reports, ScenarioConfig};
use pathvote::topology::europe38_approx;

fn main() {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "sweep-out".into()).into();
    let europe = europe38_approx();
    let all = sweep(&europe, &ScenarioConfig::default()).unwrap();
    println!(
        "{:<20}{:<7}{:>9}{:>9}{:>9}{:>9}",
        "scenario", "system", "sincere", "cm_low", "cm_up", "ins_avg"
    );
    for s in &all {
        for m in &s.systems {
            println!(
                "{:<20}{:<7}{:>9.2}{:>9.2}{:>9.2}{:>9.2}",
                s.scenario,
                m.system.name(),
                m.sincere_efficiency,
                m.cm_lower,
                m.cm_upper,
                m.insincere_efficiency_avg
            );
        }
    }
    write_reports(&out, &all).unwrap();
    println!("reports written to {}", out.display());
}
