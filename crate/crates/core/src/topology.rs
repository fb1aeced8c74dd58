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

//! Multi-carrier interconnection graphs.
//!
//! A [`Topology`] is an undirected, connected graph whose nodes are carriers
//! and whose edges are interconnection links annotated with a distance in
//! kilometers. Link costs are derived from distances through a [`CostModel`].

use std::fmt;
use std::path::Path;

use petgraph::graph::{NodeIndex, UnGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense carrier index in `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CarrierId(pub usize);

impl CarrierId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CarrierId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A carrier network, one elector in every path election it takes part in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Carrier {
    pub id: CarrierId,
    pub name: String,
    /// Optional planar coordinates, for documentation and plotting only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

/// An interconnection link between two distinct carriers, stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub a: CarrierId,
    pub b: CarrierId,
    /// Kilometers.
    pub distance: f64,
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("topology parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read topology file: {0}")]
    Io(#[from] std::io::Error),
    #[error("topology has no carriers")]
    Empty,
    #[error("carrier ids must be exactly 0..{n}; offending id {id}")]
    NonContiguousIds { id: usize, n: usize },
    #[error("duplicate carrier id {0}")]
    DuplicateCarrierId(usize),
    #[error("duplicate carrier name {0:?}")]
    DuplicateName(String),
    #[error("link references unknown carrier {0}")]
    UnknownCarrier(usize),
    #[error("self-loop on carrier {0}")]
    SelfLoop(CarrierId),
    #[error("duplicate link between carriers {0} and {1}")]
    DuplicateLink(CarrierId, CarrierId),
    #[error("link between carriers {a} and {b} has non-positive distance {distance}")]
    NonPositiveDistance { a: CarrierId, b: CarrierId, distance: f64 },
    #[error("topology is disconnected: carrier {0} is unreachable from carrier 0")]
    Disconnected(CarrierId),
    #[error("no link between carriers {0} and {1}")]
    NoSuchLink(CarrierId, CarrierId),
    #[error("invalid cost model: c0={c0}, d0={d0}")]
    InvalidCostModel { c0: f64, d0: f64 },
    #[error("invalid generator parameters: {0}")]
    InvalidGenerator(String),
}

/// On-disk representation of a topology.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TopologyFile {
    pub carriers: Vec<Carrier>,
    pub links: Vec<Link>,
}

/// A validated, immutable interconnection graph.
#[derive(Clone, Debug)]
pub struct Topology {
    carriers: Vec<Carrier>,
    links: Vec<Link>,
    adjacency: Vec<Vec<CarrierId>>,
    distances: Vec<Option<f64>>,
    graph: UnGraph<(), f64>,
}

impl Topology {
    /// Validates carriers and links and builds the topology.
    ///
    /// Carrier ids must form the contiguous range `0..n`; carriers may be given
    /// in any order. Links may be given with either endpoint first.
    pub fn new(mut carriers: Vec<Carrier>, links: Vec<Link>) -> Result<Self, TopologyError> {
        if carriers.is_empty() {
            return Err(TopologyError::Empty);
        }
        let n = carriers.len();
        let mut seen = vec![false; n];
        for c in &carriers {
            let id = c.id.index();
            if id >= n {
                return Err(TopologyError::NonContiguousIds { id, n });
            }
            if std::mem::replace(&mut seen[id], true) {
                return Err(TopologyError::DuplicateCarrierId(id));
            }
        }
        carriers.sort_by_key(|c| c.id);
        let mut names: Vec<&str> = carriers.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(TopologyError::DuplicateName(w[0].to_string()));
        }

        let mut distances = vec![None; n * n];
        let mut normalized = Vec::with_capacity(links.len());
        for link in links {
            let (a, b) = (link.a.index(), link.b.index());
            for id in [a, b] {
                if id >= n {
                    return Err(TopologyError::UnknownCarrier(id));
                }
            }
            if a == b {
                return Err(TopologyError::SelfLoop(link.a));
            }
            let (a, b) = (a.min(b), a.max(b));
            let (ca, cb) = (CarrierId(a), CarrierId(b));
            if !(link.distance > 0.0) || !link.distance.is_finite() {
                return Err(TopologyError::NonPositiveDistance {
                    a: ca,
                    b: cb,
                    distance: link.distance,
                });
            }
            if distances[a * n + b].is_some() {
                return Err(TopologyError::DuplicateLink(ca, cb));
            }
            distances[a * n + b] = Some(link.distance);
            distances[b * n + a] = Some(link.distance);
            normalized.push(Link {
                a: ca,
                b: cb,
                distance: link.distance,
            });
        }
        normalized.sort_by_key(|l| (l.a, l.b));

        let mut adjacency = vec![Vec::new(); n];
        let mut graph = UnGraph::with_capacity(n, normalized.len());
        for _ in 0..n {
            graph.add_node(());
        }
        for l in &normalized {
            adjacency[l.a.index()].push(l.b);
            adjacency[l.b.index()].push(l.a);
            graph.add_edge(NodeIndex::new(l.a.index()), NodeIndex::new(l.b.index()), l.distance);
        }
        for neighbors in &mut adjacency {
            neighbors.sort_unstable();
        }

        let topology = Topology {
            carriers,
            links: normalized,
            adjacency,
            distances,
            graph,
        };
        if let Some(unreached) = topology.first_unreachable() {
            return Err(TopologyError::Disconnected(unreached));
        }
        Ok(topology)
    }

    pub fn from_file_repr(file: TopologyFile) -> Result<Self, TopologyError> {
        Self::new(file.carriers, file.links)
    }

    /// Parses and validates a JSON topology document.
    pub fn from_json(source: &str) -> Result<Self, TopologyError> {
        let file: TopologyFile = serde_json::from_str(source)?;
        Self::from_file_repr(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TopologyError> {
        let source = std::fs::read_to_string(path)?;
        Self::from_json(&source)
    }

    pub fn to_file_repr(&self) -> TopologyFile {
        TopologyFile {
            carriers: self.carriers.clone(),
            links: self.links.clone(),
        }
    }

    /// One carrier and one link per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n \"carriers\": [\n");
        let rows: Vec<String> = self
            .carriers
            .iter()
            .map(|c| format!("  {}", serde_json::to_string(c).expect("carrier serializes")))
            .collect();
        out.push_str(&rows.join(",\n"));
        out.push_str("\n ],\n \"links\": [\n");
        let rows: Vec<String> = self
            .links
            .iter()
            .map(|l| format!("  {}", serde_json::to_string(l).expect("link serializes")))
            .collect();
        out.push_str(&rows.join(",\n"));
        out.push_str("\n ]\n}\n");
        out
    }

    pub fn len(&self) -> usize {
        self.carriers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carriers.is_empty()
    }

    pub fn carriers(&self) -> &[Carrier] {
        &self.carriers
    }

    pub fn carrier(&self, id: CarrierId) -> &Carrier {
        &self.carriers[id.index()]
    }

    pub fn carrier_by_name(&self, name: &str) -> Option<CarrierId> {
        self.carriers.iter().find(|c| c.name == name).map(|c| c.id)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Neighbors of `id`, ascending.
    pub fn neighbors(&self, id: CarrierId) -> &[CarrierId] {
        &self.adjacency[id.index()]
    }

    pub fn distance(&self, a: CarrierId, b: CarrierId) -> Option<f64> {
        let n = self.len();
        if a.index() >= n || b.index() >= n {
            return None;
        }
        self.distances[a.index() * n + b.index()]
    }

    pub fn is_linked(&self, a: CarrierId, b: CarrierId) -> bool {
        self.distance(a, b).is_some()
    }

    pub fn max_distance(&self) -> Option<f64> {
        self.links.iter().map(|l| l.distance).reduce(f64::max)
    }

    pub fn min_distance(&self) -> Option<f64> {
        self.links.iter().map(|l| l.distance).reduce(f64::min)
    }

    /// `c0 + d/d0` for the link between `a` and `b`.
    pub fn link_cost(&self, model: &CostModel, a: CarrierId, b: CarrierId) -> Result<f64, TopologyError> {
        self.distance(a, b)
            .map(|d| model.cost_of_distance(d))
            .ok_or(TopologyError::NoSuchLink(a, b))
    }

    pub(crate) fn graph(&self) -> &UnGraph<(), f64> {
        &self.graph
    }

    fn first_unreachable(&self) -> Option<CarrierId> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(node) = stack.pop() {
            for next in &self.adjacency[node] {
                if !std::mem::replace(&mut seen[next.index()], true) {
                    stack.push(next.index());
                }
            }
        }
        seen.iter().position(|s| !s).map(CarrierId)
    }
}

/// Linear link-cost model `c0 + d / d0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub c0: f64,
    pub d0: f64,
}

impl CostModel {
    pub fn new(c0: f64, d0: f64) -> Result<Self, TopologyError> {
        if !(c0 >= 0.0 && d0 > 0.0 && c0.is_finite() && d0.is_finite()) {
            return Err(TopologyError::InvalidCostModel { c0, d0 });
        }
        Ok(CostModel { c0, d0 })
    }

    #[inline]
    pub fn cost_of_distance(&self, distance: f64) -> f64 {
        self.c0 + distance / self.d0
    }
}

/// The three link-cost options, each scaled to the longest link of a topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostPreset {
    /// `c0 = 1`, `d0 = 100 * d_max`: every link costs about the same.
    Constant,
    /// `c0 = 0`, `d0 = d_max`.
    Linear,
    /// `c0 = 1`, `d0 = d_max / 3`.
    Intermediate,
}

impl CostPreset {
    pub const ALL: [CostPreset; 3] = [CostPreset::Linear, CostPreset::Intermediate, CostPreset::Constant];

    pub fn name(self) -> &'static str {
        match self {
            CostPreset::Constant => "constant",
            CostPreset::Linear => "linear",
            CostPreset::Intermediate => "intermediate",
        }
    }

    /// Instantiates the preset on `topology`. `None` when it has no links.
    pub fn model(self, topology: &Topology) -> Option<CostModel> {
        let d_max = topology.max_distance()?;
        let (c0, d0) = match self {
            CostPreset::Constant => (1.0, 100.0 * d_max),
            CostPreset::Linear => (0.0, d_max),
            CostPreset::Intermediate => (1.0, d_max / 3.0),
        };
        Some(CostModel { c0, d0 })
    }
}

impl fmt::Display for CostPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CostPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constant" => Ok(CostPreset::Constant),
            "linear" => Ok(CostPreset::Linear),
            "intermediate" => Ok(CostPreset::Intermediate),
            other => Err(format!(
                "unknown cost model {other:?} (expected constant, linear or intermediate)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PresetCostModels {
    pub constant: CostModel,
    pub linear: CostModel,
    pub intermediate: CostModel,
}

/// The constant-dominated, purely linear and intermediate cost models for `topology`.
pub fn preset_cost_models(topology: &Topology) -> Option<PresetCostModels> {
    Some(PresetCostModels {
        constant: CostPreset::Constant.model(topology)?,
        linear: CostPreset::Linear.model(topology)?,
        intermediate: CostPreset::Intermediate.model(topology)?,
    })
}

/// Ingress/egress pair requesting an end-to-end connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Demand {
    pub ingress: CarrierId,
    pub egress: CarrierId,
}

impl Demand {
    pub fn new(ingress: CarrierId, egress: CarrierId) -> Option<Self> {
        (ingress != egress).then_some(Demand { ingress, egress })
    }
}

/// All ordered carrier pairs, in (ingress, egress) lexicographic order.
pub fn all_demands(topology: &Topology) -> Vec<Demand> {
    let n = topology.len();
    let mut demands = Vec::with_capacity(n * n.saturating_sub(1));
    for ingress in 0..n {
        for egress in 0..n {
            if ingress != egress {
                demands.push(Demand {
                    ingress: CarrierId(ingress),
                    egress: CarrierId(egress),
                });
            }
        }
    }
    demands
}

/// Side of the square the generator places points in, in kilometers.
pub const GENERATOR_SQUARE_KM: f64 = 3000.0;

/// Seeded random geometric topology.
///
/// Points are drawn uniformly in a square. Each point is linked to its
/// nearest neighbor, then its second nearest, and so on, until the link count
/// reaches `round(n * avg_degree / 2)`. Remaining components are then joined
/// by repeatedly adding the shortest link between two different components.
pub fn generate_geometric_topology(n: usize, seed: u64, avg_degree: f64) -> Result<Topology, TopologyError> {
    if n < 2 {
        return Err(TopologyError::InvalidGenerator(format!(
            "need at least 2 carriers, got {n}"
        )));
    }
    if !(avg_degree >= 2.0) {
        return Err(TopologyError::InvalidGenerator(format!(
            "average degree must be at least 2, got {avg_degree}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.gen::<f64>() * GENERATOR_SQUARE_KM,
                rng.gen::<f64>() * GENERATOR_SQUARE_KM,
            )
        })
        .collect();
    let dist = |i: usize, j: usize| {
        let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
        dx.hypot(dy)
    };

    // Neighbors of each point, nearest first.
    let by_nearness: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| dist(i, a).total_cmp(&dist(i, b)).then(a.cmp(&b)));
            others
        })
        .collect();

    let max_links = n * (n - 1) / 2;
    let target = ((n as f64 * avg_degree / 2.0).round() as usize).min(max_links);
    let mut linked = vec![false; n * n];
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(target + n);
    let add = |i: usize, j: usize, linked: &mut Vec<bool>, edges: &mut Vec<(usize, usize)>| {
        let (a, b) = (i.min(j), i.max(j));
        if !linked[a * n + b] {
            linked[a * n + b] = true;
            edges.push((a, b));
        }
    };
    'rank: for rank in 0..n - 1 {
        for (i, order) in by_nearness.iter().enumerate() {
            if edges.len() >= target {
                break 'rank;
            }
            add(i, order[rank], &mut linked, &mut edges);
        }
    }

    // Join components with the shortest cross-component pair.
    loop {
        let component = components(n, &edges);
        if component.iter().all(|&c| c == 0) {
            break;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            for j in i + 1..n {
                if component[i] != component[j] {
                    let d = dist(i, j);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, i, j));
                    }
                }
            }
        }
        let (_, i, j) = best.expect("disconnected graph has a cross pair");
        add(i, j, &mut linked, &mut edges);
    }

    let carriers = points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Carrier {
            id: CarrierId(i),
            name: format!("N{i:02}"),
            x: Some(x),
            y: Some(y),
        })
        .collect();
    let links = edges
        .into_iter()
        .map(|(a, b)| Link {
            a: CarrierId(a),
            b: CarrierId(b),
            distance: dist(a, b),
        })
        .collect();
    Topology::new(carriers, links)
}

fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

const EUROPE38_JSON: &str = include_str!("../data/europe38.json");

/// A 38-carrier European interconnection approximation: one carrier per
/// country, great-circle distances between capitals, links between land
/// neighbors plus a few short sea crossings.
///
/// This is a hand-built stand-in, not a published reference instance.
pub fn europe38_approx() -> Topology {
    Topology::from_json(EUROPE38_JSON).expect("bundled europe38 topology is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn carriers(names: &[&str]) -> Vec<Carrier> {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| Carrier {
                id: CarrierId(i),
                name: n.to_string(),
                x: None,
                y: None,
            })
            .collect()
    }

    fn link(a: usize, b: usize, distance: f64) -> Link {
        Link {
            a: CarrierId(a),
            b: CarrierId(b),
            distance,
        }
    }

    #[test]
    fn minimal_two_carrier_instance() {
        let doc = r#"{"carriers":[{"id":0,"name":"A"},{"id":1,"name":"B"}],
                      "links":[{"a":0,"b":1,"distance":100}]}"#;
        let t = Topology::from_json(doc).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.links().len(), 1);
        assert_eq!(t.distance(CarrierId(1), CarrierId(0)), Some(100.0));
    }

    #[test]
    fn rejects_self_loop() {
        let err = Topology::new(carriers(&["A", "B"]), vec![link(0, 1, 100.0), link(0, 0, 50.0)]).unwrap_err();
        assert!(matches!(err, TopologyError::SelfLoop(CarrierId(0))));
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn path_graph_is_connected() {
        let t = Topology::new(carriers(&["A", "B", "C"]), vec![link(0, 1, 1.0), link(1, 2, 1.0)]);
        assert!(t.is_ok());
    }

    #[test]
    fn rejects_disconnected_duplicate_and_bad_distance() {
        let err = Topology::new(carriers(&["A", "B", "C"]), vec![link(0, 1, 1.0)]).unwrap_err();
        assert!(matches!(err, TopologyError::Disconnected(CarrierId(2))));
        let err = Topology::new(carriers(&["A", "B"]), vec![link(0, 1, 1.0), link(1, 0, 2.0)]).unwrap_err();
        assert!(matches!(err, TopologyError::DuplicateLink(CarrierId(0), CarrierId(1))));
        let err = Topology::new(carriers(&["A", "B"]), vec![link(0, 1, 0.0)]).unwrap_err();
        assert!(matches!(err, TopologyError::NonPositiveDistance { .. }));
        let err = Topology::new(carriers(&["A", "A"]), vec![link(0, 1, 1.0)]).unwrap_err();
        assert!(matches!(err, TopologyError::DuplicateName(_)));
        let err = Topology::new(carriers(&["A", "B"]), vec![link(0, 3, 1.0)]).unwrap_err();
        assert!(matches!(err, TopologyError::UnknownCarrier(3)));
        assert!(matches!(Topology::from_json("{"), Err(TopologyError::Parse(_))));
    }

    #[test]
    fn link_cost_formula() {
        let t = Topology::new(carriers(&["A", "B"]), vec![link(0, 1, 100.0)]).unwrap();
        let cm = CostModel::new(0.0, 100.0).unwrap();
        assert_eq!(t.link_cost(&cm, CarrierId(0), CarrierId(1)).unwrap(), 1.0);
        let t = Topology::new(carriers(&["A", "B"]), vec![link(0, 1, 600.0)]).unwrap();
        let cm = CostModel::new(1.0, 300.0).unwrap();
        assert_eq!(t.link_cost(&cm, CarrierId(1), CarrierId(0)).unwrap(), 3.0);
        let t = Topology::new(carriers(&["A", "B", "C"]), vec![link(0, 1, 1.0), link(1, 2, 1.0)]).unwrap();
        assert!(matches!(
            t.link_cost(&cm, CarrierId(0), CarrierId(2)),
            Err(TopologyError::NoSuchLink(..))
        ));
        assert!(CostModel::new(-1.0, 1.0).is_err());
        assert!(CostModel::new(0.0, 0.0).is_err());
    }

    #[test]
    fn presets_scale_with_longest_link() {
        let t = Topology::new(carriers(&["A", "B", "C"]), vec![link(0, 1, 1200.0), link(1, 2, 3000.0)]).unwrap();
        let p = preset_cost_models(&t).unwrap();
        assert_eq!(p.linear, CostModel { c0: 0.0, d0: 3000.0 });
        assert_eq!(p.intermediate, CostModel { c0: 1.0, d0: 1000.0 });
        assert_eq!(p.constant, CostModel { c0: 1.0, d0: 300000.0 });
    }

    #[test]
    fn constant_preset_costs_within_one_percent() {
        let t = europe38_approx();
        let cm = CostPreset::Constant.model(&t).unwrap();
        for l in t.links() {
            let c = t.link_cost(&cm, l.a, l.b).unwrap();
            assert!(c > 1.0 && c <= 1.01, "{c}");
        }
    }

    #[test]
    fn demands_enumeration() {
        let t = Topology::new(carriers(&["A", "B"]), vec![link(0, 1, 1.0)]).unwrap();
        let d = all_demands(&t);
        assert_eq!(
            d,
            vec![
                Demand::new(CarrierId(0), CarrierId(1)).unwrap(),
                Demand::new(CarrierId(1), CarrierId(0)).unwrap()
            ]
        );
        let t = Topology::new(carriers(&["A", "B", "C"]), vec![link(0, 1, 1.0), link(1, 2, 1.0)]).unwrap();
        assert_eq!(all_demands(&t).len(), 6);
        assert_eq!(all_demands(&europe38_approx()).len(), 38 * 37);
        assert!(Demand::new(CarrierId(1), CarrierId(1)).is_none());
    }

    #[test]
    fn generator_two_nodes_gets_single_link() {
        for seed in 0..5 {
            let t = generate_geometric_topology(2, seed, 2.0).unwrap();
            assert_eq!(t.links().len(), 1);
        }
    }

    #[test]
    fn generator_is_deterministic_connected_and_near_target_degree() {
        let a = generate_geometric_topology(38, 1, 4.0).unwrap();
        let b = generate_geometric_topology(38, 1, 4.0).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let degree = 2.0 * a.links().len() as f64 / a.len() as f64;
        assert!((3.0..=5.0).contains(&degree), "average degree {degree}");
        let c = generate_geometric_topology(38, 2, 4.0).unwrap();
        assert_ne!(a.to_json(), c.to_json());
        assert!(generate_geometric_topology(1, 0, 4.0).is_err());
        assert!(generate_geometric_topology(5, 0, 1.5).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = europe38_approx();
        let back = Topology::from_json(&t.to_json()).unwrap();
        assert_eq!(back.to_json(), t.to_json());
        assert_eq!(t.carrier_by_name("France"), Some(CarrierId(2)));
    }
}
