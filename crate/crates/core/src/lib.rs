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

//! Routing a demand across carrier networks by electing one of its candidate
//! paths, and measuring how much coalitions of carriers can gain by voting
//! insincerely.
//!
//! The pipeline is: a [`topology::Topology`] of carriers, the
//! [`candidates`] paths of one demand, the [`economics`] utility of every
//! carrier for every path, an election under range voting or STV
//! ([`voting`]) and the [`manipulation`] analysis. [`experiment`] runs that
//! pipeline over every demand of a topology.

pub mod candidates;
pub mod cli;
pub mod economics;
pub mod experiment;
pub mod manipulation;
pub mod topology;
pub mod voting;

pub use candidates::{enumerate_candidates, CandidatePath, CandidateSet, PathLimits};
pub use economics::{calibrate_fare, utility_matrix, Fare, UtilityMatrix};
pub use manipulation::{analyze_stv, range_cm, stv_cm_upper, stv_tm, ManipulabilityVerdict, Status};
pub use topology::{CarrierId, CostModel, CostPreset, Demand, Topology};
pub use voting::{OrderBallot, RangeBallot, VotingSystem};
