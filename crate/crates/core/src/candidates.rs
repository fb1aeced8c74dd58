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

//! Candidate path enumeration with the hop-threshold rule.
//!
//! For a demand, the supervisor computes the minimum hop count `h_min`, then
//! admits every loop-free path of at most `h_min + delta_h` hops, where
//! `delta_h` is the smallest threshold `>= delta_min` admitting at least
//! `m_min` paths.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::topology::{CarrierId, Demand, Topology};

/// Loop-free carrier sequence from ingress to egress.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidatePath {
    carriers: Vec<CarrierId>,
}

impl CandidatePath {
    /// Checks the loop-free and adjacency invariants against `topology`.
    pub fn new(topology: &Topology, carriers: Vec<CarrierId>) -> Option<Self> {
        let path = CandidatePath { carriers };
        path.is_valid_in(topology).then_some(path)
    }

    pub fn carriers(&self) -> &[CarrierId] {
        &self.carriers
    }

    pub fn hops(&self) -> usize {
        self.carriers.len() - 1
    }

    pub fn contains(&self, carrier: CarrierId) -> bool {
        self.carriers.contains(&carrier)
    }

    pub fn ingress(&self) -> CarrierId {
        self.carriers[0]
    }

    pub fn egress(&self) -> CarrierId {
        *self.carriers.last().expect("paths have at least two carriers")
    }

    /// Consecutive carrier pairs.
    pub fn links(&self) -> impl Iterator<Item = (CarrierId, CarrierId)> + '_ {
        self.carriers.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn is_valid_in(&self, topology: &Topology) -> bool {
        if self.carriers.len() < 2 || self.carriers.iter().any(|c| c.index() >= topology.len()) {
            return false;
        }
        let mut seen = vec![false; topology.len()];
        for c in &self.carriers {
            if std::mem::replace(&mut seen[c.index()], true) {
                return false;
            }
        }
        self.links().all(|(a, b)| topology.is_linked(a, b))
    }

    /// Carrier names joined by `-`.
    pub fn display_names(&self, topology: &Topology) -> String {
        self.carriers
            .iter()
            .map(|&c| topology.carrier(c).name.as_str())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for CandidatePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.carriers.iter().map(|c| c.to_string()).collect();
        f.write_str(&ids.join("-"))
    }
}

/// `(m_min, delta_min)` parameters of the limitation rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathLimits {
    pub m_min: usize,
    pub delta_min: usize,
}

impl PathLimits {
    pub const FEW: PathLimits = PathLimits { m_min: 5, delta_min: 0 };
    pub const MANY: PathLimits = PathLimits {
        m_min: 10,
        delta_min: 1,
    };
    pub const PRESETS: [PathLimits; 2] = [PathLimits::FEW, PathLimits::MANY];

    pub fn new(m_min: usize, delta_min: usize) -> Self {
        PathLimits { m_min, delta_min }
    }
}

impl fmt::Display for PathLimits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m_min, self.delta_min)
    }
}

/// The candidates for one demand. A path's position in `paths` is its
/// candidate index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub demand: Demand,
    pub paths: Vec<CandidatePath>,
    pub m_min: usize,
    pub delta_min: usize,
    pub h_min: usize,
    pub delta_h: usize,
    /// True when the topology has fewer than `m_min` loop-free paths for the
    /// demand and all of them were returned.
    pub saturated: bool,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn max_hops(&self) -> usize {
        self.h_min + self.delta_h
    }
}

/// Which carriers lie on which candidates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Participation {
    members: Vec<Vec<CarrierId>>,
    by_carrier: Vec<Vec<usize>>,
}

impl Participation {
    pub fn new(candidates: &CandidateSet, carriers: usize) -> Self {
        let mut by_carrier = vec![Vec::new(); carriers];
        let members = candidates
            .paths
            .iter()
            .enumerate()
            .map(|(j, path)| {
                let mut m = path.carriers().to_vec();
                m.sort_unstable();
                for c in &m {
                    by_carrier[c.index()].push(j);
                }
                m
            })
            .collect();
        Participation { members, by_carrier }
    }

    /// `E_j`, ascending by carrier index.
    pub fn members(&self, candidate: usize) -> &[CarrierId] {
        &self.members[candidate]
    }

    /// Candidate indices `carrier` lies on, ascending.
    pub fn candidates_of(&self, carrier: CarrierId) -> &[usize] {
        &self.by_carrier[carrier.index()]
    }

    /// Carriers on at least one candidate, ascending.
    pub fn electorate(&self) -> Vec<CarrierId> {
        (0..self.by_carrier.len())
            .filter(|&i| !self.by_carrier[i].is_empty())
            .map(CarrierId)
            .collect()
    }
}

/// Hop distances from `target` to every carrier, avoiding `blocked` ones.
fn hop_distances(topology: &Topology, target: CarrierId, blocked: &[bool]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; topology.len()];
    dist[target.index()] = 0;
    let mut queue = VecDeque::from([target]);
    while let Some(v) = queue.pop_front() {
        for &w in topology.neighbors(v) {
            if dist[w.index()] == usize::MAX && !blocked[w.index()] {
                dist[w.index()] = dist[v.index()] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Breadth-first hop count between the demand's endpoints.
pub fn min_hops(topology: &Topology, demand: Demand) -> usize {
    hop_distances(topology, demand.egress, &vec![false; topology.len()])[demand.ingress.index()]
}

/// All loop-free paths with at most `max_hops` hops, by depth-limited DFS.
///
/// Before expanding a carrier, hop distances to the egress are recomputed in
/// the graph without the carriers already on the path, so every explored
/// branch ends in at least one admissible path.
fn simple_paths_within(topology: &Topology, demand: Demand, max_hops: usize) -> Vec<CandidatePath> {
    fn visit(
        topology: &Topology,
        egress: CarrierId,
        max_hops: usize,
        stack: &mut Vec<CarrierId>,
        on_stack: &mut [bool],
        out: &mut Vec<CandidatePath>,
    ) {
        let here = *stack.last().expect("stack starts with the ingress");
        if here == egress {
            out.push(CandidatePath {
                carriers: stack.clone(),
            });
            return;
        }
        let hops = stack.len() - 1;
        let to_egress = hop_distances(topology, egress, on_stack);
        for &next in topology.neighbors(here) {
            let remaining = to_egress[next.index()];
            if on_stack[next.index()] || remaining == usize::MAX || hops + 1 + remaining > max_hops {
                continue;
            }
            on_stack[next.index()] = true;
            stack.push(next);
            visit(topology, egress, max_hops, stack, on_stack, out);
            stack.pop();
            on_stack[next.index()] = false;
        }
    }

    let mut out = Vec::new();
    let mut on_stack = vec![false; topology.len()];
    on_stack[demand.ingress.index()] = true;
    let mut stack = vec![demand.ingress];
    visit(topology, demand.egress, max_hops, &mut stack, &mut on_stack, &mut out);
    out
}

/// Applies the hop-threshold rule to `demand`.
///
/// Paths are ordered by hop count, then by carrier-index sequence.
pub fn enumerate_candidates(topology: &Topology, demand: Demand, limits: PathLimits) -> CandidateSet {
    let PathLimits { m_min, delta_min } = limits;
    let h_min = min_hops(topology, demand);
    // A loop-free path visits every carrier at most once.
    let longest_possible = topology.len() - 1;

    let mut delta_h = delta_min;
    let (mut paths, saturated) = loop {
        let bound = h_min + delta_h;
        let paths = simple_paths_within(topology, demand, bound);
        if paths.len() >= m_min {
            break (paths, false);
        }
        if bound >= longest_possible {
            break (paths, true);
        }
        delta_h += 1;
    };
    if saturated {
        let longest = paths.iter().map(CandidatePath::hops).max().unwrap_or(h_min);
        delta_h = delta_min.max(longest - h_min);
    }
    paths.sort_by(|a, b| a.hops().cmp(&b.hops()).then_with(|| a.carriers.cmp(&b.carriers)));
    CandidateSet {
        demand,
        paths,
        m_min,
        delta_min,
        h_min,
        delta_h,
        saturated,
    }
}
