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

//! Carrier costs, the flat client fare, sincere utilities and global income.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use petgraph::algo::dijkstra;
use petgraph::graph::NodeIndex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::{CandidatePath, CandidateSet, Participation};
use crate::topology::{all_demands, CarrierId, CostModel, Demand, Topology};

/// Ratio of the flat fare to the mean least-cost path cost.
pub const FARE_FACTOR: f64 = 1.4;

#[derive(Debug, Error, PartialEq)]
pub enum EconomicsError {
    #[error("carrier {0} is not on the path")]
    CarrierNotOnPath(CarrierId),
    #[error("fare must be positive and finite, got {0}")]
    InvalidFare(f64),
    #[error("candidate set is empty")]
    NoCandidates,
    #[error("aggregate optimal income {0} is not positive")]
    NonPositiveOptimum(f64),
    #[error("income series have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("utility matrix shape mismatch: {0}")]
    Shape(String),
    #[error("elector row {row} has non-zero utility {value} for off-path candidate {candidate}")]
    OffPathUtility { row: usize, candidate: usize, value: f64 },
    #[error("utility matrix contains a non-finite value")]
    NonFinite,
}

/// Flat amount a client pays for one demand.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fare(f64);

impl Fare {
    pub fn new(amount: f64) -> Result<Self, EconomicsError> {
        if amount > 0.0 && amount.is_finite() {
            Ok(Fare(amount))
        } else {
            Err(EconomicsError::InvalidFare(amount))
        }
    }

    pub fn amount(self) -> f64 {
        self.0
    }
}

/// Sum of `values`, computed exactly and rounded once.
///
/// The result does not depend on the iteration order.
pub fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let total = values.into_iter().fold(BigRational::zero(), |acc, v| {
        acc + BigRational::from_float(v).expect("finite value")
    });
    total.to_f64().expect("finite sum")
}

/// Sum of the link costs along `path`.
pub fn path_cost(topology: &Topology, model: &CostModel, path: &CandidatePath) -> f64 {
    path.links()
        .map(|(a, b)| topology.link_cost(model, a, b).expect("candidate paths follow links"))
        .sum()
}

/// Cost `carrier` bears for `path`: half of the incoming link plus half of
/// the outgoing link.
pub fn path_cost_share(
    topology: &Topology,
    model: &CostModel,
    path: &CandidatePath,
    carrier: CarrierId,
) -> Result<f64, EconomicsError> {
    let carriers = path.carriers();
    let pos = carriers
        .iter()
        .position(|&c| c == carrier)
        .ok_or(EconomicsError::CarrierNotOnPath(carrier))?;
    let cost = |a: CarrierId, b: CarrierId| topology.link_cost(model, a, b).expect("candidate paths follow links");
    let incoming = if pos > 0 { cost(carriers[pos - 1], carrier) } else { 0.0 };
    let outgoing = if pos + 1 < carriers.len() {
        cost(carrier, carriers[pos + 1])
    } else {
        0.0
    };
    Ok(0.5 * incoming + 0.5 * outgoing)
}

fn costs_from(topology: &Topology, model: &CostModel, source: CarrierId) -> Vec<f64> {
    let costs = dijkstra(topology.graph(), NodeIndex::new(source.index()), None, |e| {
        model.cost_of_distance(*e.weight())
    });
    (0..topology.len()).map(|i| costs[&NodeIndex::new(i)]).collect()
}

/// Cost of the cheapest path between the demand's endpoints over the whole
/// graph.
pub fn least_cost_path_cost(topology: &Topology, model: &CostModel, demand: Demand) -> f64 {
    costs_from(topology, model, demand.ingress)[demand.egress.index()]
}

/// Least costs for every demand of `all_demands`, in the same order.
pub fn least_costs(topology: &Topology, model: &CostModel) -> Vec<f64> {
    let n = topology.len();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| costs_from(topology, model, CarrierId(i))).collect();
    all_demands(topology)
        .into_iter()
        .map(|d| rows[d.ingress.index()][d.egress.index()])
        .collect()
}

/// Fare equal to [`FARE_FACTOR`] times the mean least cost over all demands.
pub fn calibrate_fare(topology: &Topology, model: &CostModel) -> Fare {
    calibrate_fare_with_factor(topology, model, FARE_FACTOR)
}

pub fn calibrate_fare_with_factor(topology: &Topology, model: &CostModel, factor: f64) -> Fare {
    let costs = least_costs(topology, model);
    let mean = exact_sum(costs.iter().copied()) / costs.len() as f64;
    Fare::new(factor * mean).expect("least costs are positive")
}

/// Sincere utilities of every elector for every candidate of one demand.
///
/// Rows are electors (the carriers lying on at least one candidate, by
/// ascending index); columns are candidates.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityMatrix {
    demand: Option<Demand>,
    fare: Fare,
    electorate: Vec<CarrierId>,
    candidates: usize,
    values: Vec<f64>,
    on_path: Vec<bool>,
}

impl UtilityMatrix {
    /// Builds a matrix directly from per-elector rows.
    ///
    /// Off-path entries must be exactly zero. Electors are numbered `0..n`.
    pub fn from_rows(fare: Fare, values: Vec<Vec<f64>>, on_path: Vec<Vec<bool>>) -> Result<Self, EconomicsError> {
        if values.len() != on_path.len() {
            return Err(EconomicsError::Shape(format!(
                "{} utility rows but {} participation rows",
                values.len(),
                on_path.len()
            )));
        }
        let candidates = values.first().map_or(0, Vec::len);
        for (row, (v, p)) in values.iter().zip(&on_path).enumerate() {
            if v.len() != candidates || p.len() != candidates {
                return Err(EconomicsError::Shape(format!("row {row} has the wrong length")));
            }
            for (candidate, (&value, &on)) in v.iter().zip(p).enumerate() {
                if !value.is_finite() {
                    return Err(EconomicsError::NonFinite);
                }
                if !on && value != 0.0 {
                    return Err(EconomicsError::OffPathUtility { row, candidate, value });
                }
            }
        }
        Ok(UtilityMatrix {
            demand: None,
            fare,
            electorate: (0..values.len()).map(CarrierId).collect(),
            candidates,
            values: values.into_iter().flatten().collect(),
            on_path: on_path.into_iter().flatten().collect(),
        })
    }

    pub fn demand(&self) -> Option<Demand> {
        self.demand
    }

    pub fn fare(&self) -> Fare {
        self.fare
    }

    pub fn electorate(&self) -> &[CarrierId] {
        &self.electorate
    }

    pub fn electors(&self) -> usize {
        self.electorate.len()
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    #[inline]
    pub fn value(&self, row: usize, candidate: usize) -> f64 {
        self.values[row * self.candidates + candidate]
    }

    #[inline]
    pub fn is_on_path(&self, row: usize, candidate: usize) -> bool {
        self.on_path[row * self.candidates + candidate]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.candidates..(row + 1) * self.candidates]
    }

    pub fn on_path_row(&self, row: usize) -> &[bool] {
        &self.on_path[row * self.candidates..(row + 1) * self.candidates]
    }

    /// Appends an elector lying on no candidate.
    pub fn with_indifferent_elector(&self, carrier: CarrierId) -> Self {
        let mut out = self.clone();
        out.electorate.push(carrier);
        out.values.extend(std::iter::repeat_n(0.0, self.candidates));
        out.on_path.extend(std::iter::repeat_n(false, self.candidates));
        out
    }
}

/// `u[i][j] = A / |E_j| - alpha[i][j]` for carriers on path `j`, zero otherwise.
pub fn utility_matrix(
    candidates: &CandidateSet,
    topology: &Topology,
    model: &CostModel,
    fare: Fare,
) -> Result<UtilityMatrix, EconomicsError> {
    if candidates.is_empty() {
        return Err(EconomicsError::NoCandidates);
    }
    let participation = Participation::new(candidates, topology.len());
    let electorate = participation.electorate();
    let m = candidates.len();
    let mut values = vec![0.0; electorate.len() * m];
    let mut on_path = vec![false; electorate.len() * m];
    for (j, path) in candidates.paths.iter().enumerate() {
        let share = fare.amount() / path.carriers().len() as f64;
        for &carrier in path.carriers() {
            let row = electorate.binary_search(&carrier).expect("path carriers are electors");
            let alpha = path_cost_share(topology, model, path, carrier)?;
            values[row * m + j] = share - alpha;
            on_path[row * m + j] = true;
        }
    }
    Ok(UtilityMatrix {
        demand: Some(candidates.demand),
        fare,
        electorate,
        candidates: m,
        values,
        on_path,
    })
}

/// Sum of all electors' utilities for candidate `j`, which equals the fare
/// minus the path's total link cost.
pub fn global_net_income(utilities: &UtilityMatrix, j: usize) -> f64 {
    exact_sum((0..utilities.electors()).map(|row| utilities.value(row, j)))
}

/// Aggregate income of the selected candidates as a percentage of the
/// aggregate optimal income.
pub fn efficiency(selected: &[f64], optimal: &[f64]) -> Result<f64, EconomicsError> {
    if selected.len() != optimal.len() {
        return Err(EconomicsError::LengthMismatch(selected.len(), optimal.len()));
    }
    let optimum = exact_sum(optimal.iter().copied());
    if !(optimum > 0.0) {
        return Err(EconomicsError::NonPositiveOptimum(optimum));
    }
    let achieved = exact_sum(selected.iter().copied());
    Ok(100.0 * (achieved / optimum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::{enumerate_candidates, PathLimits};
    use crate::topology::{Carrier, Link};

    fn topo(links: &[(usize, usize, f64)], n: usize) -> Topology {
        let carriers = (0..n)
            .map(|i| Carrier {
                id: CarrierId(i),
                name: format!("C{i}"),
                x: None,
                y: None,
            })
            .collect();
        let links = links
            .iter()
            .map(|&(a, b, d)| Link {
                a: CarrierId(a),
                b: CarrierId(b),
                distance: d,
            })
            .collect();
        Topology::new(carriers, links).unwrap()
    }

    fn unit_costs() -> CostModel {
        CostModel::new(0.0, 1.0).unwrap()
    }

    fn path(t: &Topology, ids: &[usize]) -> CandidatePath {
        CandidatePath::new(t, ids.iter().map(|&i| CarrierId(i)).collect()).unwrap()
    }

    #[test]
    fn cost_shares_are_half_links() {
        let t = topo(&[(0, 1, 2.0), (1, 2, 4.0)], 3);
        let cm = unit_costs();
        let p = path(&t, &[0, 1, 2]);
        let shares: Vec<f64> = (0..3)
            .map(|i| path_cost_share(&t, &cm, &p, CarrierId(i)).unwrap())
            .collect();
        assert_eq!(shares, vec![1.0, 3.0, 2.0]);
        assert_eq!(shares.iter().sum::<f64>(), path_cost(&t, &cm, &p));

        let t2 = topo(&[(0, 1, 2.0)], 2);
        let p2 = path(&t2, &[0, 1]);
        assert_eq!(path_cost_share(&t2, &cm, &p2, CarrierId(0)).unwrap(), 1.0);
        assert_eq!(path_cost_share(&t2, &cm, &p2, CarrierId(1)).unwrap(), 1.0);

        let p3 = path(&t, &[0, 1]);
        assert_eq!(
            path_cost_share(&t, &cm, &p3, CarrierId(2)),
            Err(EconomicsError::CarrierNotOnPath(CarrierId(2)))
        );
    }

    #[test]
    fn least_cost_goes_around_expensive_link() {
        let t = topo(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)], 3);
        let d = Demand::new(CarrierId(0), CarrierId(2)).unwrap();
        assert_eq!(least_cost_path_cost(&t, &unit_costs(), d), 2.0);
        let t2 = topo(&[(0, 1, 5.0)], 2);
        let d2 = Demand::new(CarrierId(0), CarrierId(1)).unwrap();
        assert_eq!(least_cost_path_cost(&t2, &unit_costs(), d2), 5.0);
    }

    #[test]
    fn fare_calibration() {
        let t2 = topo(&[(0, 1, 5.0)], 2);
        assert!((calibrate_fare(&t2, &unit_costs()).amount() - 7.0).abs() < 1e-12);
        // Least costs A-B 1, A-C 2, B-A 1, B-C 1, C-A 2, C-B 1.
        let t = topo(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)], 3);
        let fare = calibrate_fare(&t, &unit_costs()).amount();
        assert!((fare - 1.4 * 8.0 / 6.0).abs() < 1e-12);
        assert_eq!(FARE_FACTOR, 1.4);
    }

    #[test]
    fn utilities_follow_equal_split() {
        // Single path of three carriers, alpha for the middle carrier = 3.
        let t = topo(&[(0, 1, 2.0), (1, 2, 4.0)], 3);
        let d = Demand::new(CarrierId(0), CarrierId(2)).unwrap();
        let cs = enumerate_candidates(&t, d, PathLimits::new(1, 0));
        let u = utility_matrix(&cs, &t, &unit_costs(), Fare::new(10.0).unwrap()).unwrap();
        assert!((u.value(1, 0) - (10.0 / 3.0 - 3.0)).abs() < 1e-12);
        assert!((global_net_income(&u, 0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn off_path_carrier_is_indifferent() {
        let t = topo(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)], 3);
        let d = Demand::new(CarrierId(0), CarrierId(2)).unwrap();
        let cs = enumerate_candidates(&t, d, PathLimits::new(2, 0));
        let u = utility_matrix(&cs, &t, &unit_costs(), Fare::new(10.0).unwrap()).unwrap();
        assert_eq!(u.electorate(), &[CarrierId(0), CarrierId(1), CarrierId(2)]);
        assert!(!u.is_on_path(1, 0));
        assert_eq!(u.value(1, 0), 0.0);
    }

    #[test]
    fn four_node_matrix_matches_hand_values() {
        // Square 0-1-2-3-0 plus diagonal 0-2; distances in unit-cost currency.
        let t = topo(&[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 3.0), (0, 3, 4.0), (0, 2, 6.0)], 4);
        let d = Demand::new(CarrierId(0), CarrierId(2)).unwrap();
        let cs = enumerate_candidates(&t, d, PathLimits::new(3, 0));
        let order: Vec<String> = cs.paths.iter().map(|p| p.to_string()).collect();
        assert_eq!(order, vec!["0-2", "0-1-2", "0-3-2"]);
        let u = utility_matrix(&cs, &t, &unit_costs(), Fare::new(12.0).unwrap()).unwrap();
        // Hand computation, rows = carriers 0..3, columns = candidates.
        let expected = [
            [6.0 - 3.0, 4.0 - 0.5, 4.0 - 2.0],
            [0.0, 4.0 - 1.5, 0.0],
            [6.0 - 3.0, 4.0 - 1.0, 4.0 - 1.5],
            [0.0, 0.0, 4.0 - 3.5],
        ];
        for (row, exp) in expected.iter().enumerate() {
            for (j, &e) in exp.iter().enumerate() {
                assert!((u.value(row, j) - e).abs() < 1e-12, "u[{row}][{j}]");
            }
        }
        let incomes: Vec<f64> = (0..3).map(|j| global_net_income(&u, j)).collect();
        assert_eq!(incomes, vec![6.0, 9.0, 5.0]);
    }

    #[test]
    fn net_income_may_be_negative() {
        let t = topo(&[(0, 1, 12.0)], 2);
        let d = Demand::new(CarrierId(0), CarrierId(1)).unwrap();
        let cs = enumerate_candidates(&t, d, PathLimits::new(1, 0));
        let u = utility_matrix(&cs, &t, &unit_costs(), Fare::new(10.0).unwrap()).unwrap();
        assert!((global_net_income(&u, 0) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn efficiency_statistic() {
        assert_eq!(efficiency(&[1.0, 3.0], &[1.0, 3.0]).unwrap(), 100.0);
        assert_eq!(efficiency(&[-3.0], &[4.0]).unwrap(), -75.0);
        assert_eq!(efficiency(&[0.5, 1.5], &[1.0, 3.0]).unwrap(), 50.0);
        assert!(matches!(
            efficiency(&[1.0], &[-1.0]),
            Err(EconomicsError::NonPositiveOptimum(_))
        ));
        assert!(efficiency(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn exact_sum_is_order_independent() {
        let v = [1e16, 1.0, -1e16, 0.1, 0.2];
        let mut rev = v;
        rev.reverse();
        assert_eq!(exact_sum(v), exact_sum(rev));
        assert_eq!(exact_sum(v), 1.3);
    }

    #[test]
    fn from_rows_rejects_off_path_values() {
        let fare = Fare::new(10.0).unwrap();
        assert!(UtilityMatrix::from_rows(fare, vec![vec![1.0, 2.0]], vec![vec![true, false]]).is_err());
        assert!(UtilityMatrix::from_rows(fare, vec![vec![1.0, 0.0]], vec![vec![true, false]]).is_ok());
        assert!(Fare::new(0.0).is_err());
    }
}
