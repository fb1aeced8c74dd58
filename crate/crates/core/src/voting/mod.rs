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

//! Ballots and election engines.
//!
//! Range voting sums numeric notes. STV takes a weak order from every
//! elector once and runs `m - 1` elimination rounds; an elector whose
//! favorite remaining candidates are tied splits its vote equally among
//! them, and the least-supported candidate (lowest index on ties) is
//! eliminated. Tallies are exact rationals.

pub(crate) mod tally;

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economics::UtilityMatrix;
use tally::Tallies;

#[derive(Debug, Error, PartialEq)]
pub enum VotingError {
    #[error("no ballots")]
    EmptyProfile,
    #[error("ballots disagree on the number of candidates ({0} vs {1})")]
    Inconsistent(usize, usize),
    #[error("no candidates")]
    NoCandidates,
    #[error("invalid ballot: {0}")]
    InvalidBallot(String),
    #[error("candidate {0} does not exist")]
    UnknownCandidate(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VotingSystem {
    Range,
    Stv,
}

impl VotingSystem {
    pub const ALL: [VotingSystem; 2] = [VotingSystem::Range, VotingSystem::Stv];

    pub fn name(self) -> &'static str {
        match self {
            VotingSystem::Range => "range",
            VotingSystem::Stv => "stv",
        }
    }
}

impl fmt::Display for VotingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for VotingSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "range" => Ok(VotingSystem::Range),
            "stv" => Ok(VotingSystem::Stv),
            other => Err(format!("unknown voting system {other:?} (expected range or stv)")),
        }
    }
}

/// Numeric notes, one per candidate, bounded by `[-bound, +bound]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeBallot {
    notes: Vec<f64>,
}

impl RangeBallot {
    /// Validates the bound and that off-path candidates get a zero note.
    pub fn new(notes: Vec<f64>, on_path: &[bool], bound: f64) -> Result<Self, VotingError> {
        if notes.len() != on_path.len() {
            return Err(VotingError::Inconsistent(notes.len(), on_path.len()));
        }
        for (j, (&note, &on)) in notes.iter().zip(on_path).enumerate() {
            if !note.is_finite() || note.abs() > bound {
                return Err(VotingError::InvalidBallot(format!(
                    "note {note} for candidate {j} is out of range"
                )));
            }
            if !on && note != 0.0 {
                return Err(VotingError::InvalidBallot(format!(
                    "non-zero note for candidate {j} the elector is not on"
                )));
            }
        }
        Ok(RangeBallot { notes })
    }

    pub fn notes(&self) -> &[f64] {
        &self.notes
    }

    pub fn len(&self) -> usize {
        self.notes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notes.is_empty()
    }
}

/// Whether an elector likes, dislikes or is indifferent to a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attitude {
    Like,
    Dislike,
    Indifferent,
}

/// Weak order over candidates, given by real rank keys.
///
/// Candidates the elector is not on sit at key 0, the indifference level.
/// Positive keys mean "like", negative keys "dislike". Only the induced order
/// is ever used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderBallot {
    keys: Vec<f64>,
    on_path: Vec<bool>,
}

impl OrderBallot {
    pub fn new(keys: Vec<f64>, on_path: Vec<bool>) -> Result<Self, VotingError> {
        if keys.len() != on_path.len() {
            return Err(VotingError::Inconsistent(keys.len(), on_path.len()));
        }
        for (j, (&key, &on)) in keys.iter().zip(&on_path).enumerate() {
            if !key.is_finite() {
                return Err(VotingError::InvalidBallot(format!("non-finite key for candidate {j}")));
            }
            if !on && key != 0.0 {
                return Err(VotingError::InvalidBallot(format!(
                    "candidate {j} is off the elector's paths but not at the indifference level"
                )));
            }
        }
        Ok(OrderBallot { keys, on_path })
    }

    /// Ballot over candidates the elector is entirely on.
    pub fn from_keys(keys: Vec<f64>) -> Result<Self, VotingError> {
        let on_path = vec![true; keys.len()];
        Self::new(keys, on_path)
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn on_path(&self) -> &[bool] {
        &self.on_path
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn attitude(&self, candidate: usize) -> Attitude {
        let key = self.keys[candidate];
        if key > 0.0 {
            Attitude::Like
        } else if key < 0.0 {
            Attitude::Dislike
        } else {
            Attitude::Indifferent
        }
    }

    /// Indifference classes, most preferred first.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.keys.len()).collect();
        order.sort_by(|&a, &b| {
            self.keys[b]
                .partial_cmp(&self.keys[a])
                .expect("finite keys")
                .then(a.cmp(&b))
        });
        let mut levels: Vec<Vec<usize>> = Vec::new();
        let mut last = f64::NAN;
        for c in order {
            let key = self.keys[c];
            match levels.last_mut() {
                Some(level) if key == last => level.push(c),
                _ => levels.push(vec![c]),
            }
            last = key;
        }
        levels
    }
}

/// Sincere range ballot: utilities clamped to `[-A, +A]`.
pub fn sincere_range_ballot(utilities: &UtilityMatrix, row: usize) -> RangeBallot {
    let bound = utilities.fare().amount();
    let notes = utilities.row(row).iter().map(|&u| u.clamp(-bound, bound)).collect();
    RangeBallot { notes }
}

/// Whether sincere notes for `row` had to be clamped.
pub fn needs_clamping(utilities: &UtilityMatrix, row: usize) -> bool {
    let bound = utilities.fare().amount();
    utilities.row(row).iter().any(|u| u.abs() > bound)
}

/// Sincere order ballot: rank keys are the utilities themselves.
pub fn sincere_order_ballot(utilities: &UtilityMatrix, row: usize) -> OrderBallot {
    OrderBallot {
        keys: utilities.row(row).to_vec(),
        on_path: utilities.on_path_row(row).to_vec(),
    }
}

/// One STV or exhaustive-ballot round.
#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    /// Tally of every remaining candidate, ascending by candidate index.
    pub tallies: Vec<(usize, BigRational)>,
    pub eliminated: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElectionResult {
    pub winner: usize,
    /// Elimination rounds; empty for range voting.
    pub rounds: Vec<Round>,
}

impl ElectionResult {
    /// Eliminated candidates, in order.
    pub fn elimination_order(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.eliminated).collect()
    }
}

fn candidate_count<T>(ballots: &[T], len: impl Fn(&T) -> usize) -> Result<usize, VotingError> {
    let first = ballots.first().ok_or(VotingError::EmptyProfile)?;
    let m = len(first);
    if m == 0 {
        return Err(VotingError::NoCandidates);
    }
    if let Some(b) = ballots.iter().find(|b| len(b) != m) {
        return Err(VotingError::Inconsistent(m, len(b)));
    }
    Ok(m)
}

/// Exact note sums per candidate.
pub fn range_scores(ballots: &[RangeBallot]) -> Result<Vec<BigRational>, VotingError> {
    let m = candidate_count(ballots, RangeBallot::len)?;
    let mut scores = vec![BigRational::zero(); m];
    for ballot in ballots {
        for (score, &note) in scores.iter_mut().zip(&ballot.notes) {
            if note != 0.0 {
                *score += BigRational::from_float(note).expect("finite note");
            }
        }
    }
    Ok(scores)
}

/// Index of the maximum, lowest index on ties.
pub(crate) fn argmax_lowest<T: PartialOrd>(values: &[T]) -> usize {
    let mut best = 0;
    for (j, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = j;
        }
    }
    best
}

/// Candidate with the largest note sum; lowest index on ties.
pub fn range_winner(ballots: &[RangeBallot]) -> Result<ElectionResult, VotingError> {
    let scores = range_scores(ballots)?;
    Ok(ElectionResult {
        winner: argmax_lowest(&scores),
        rounds: Vec::new(),
    })
}

/// Tallies of one exhaustive-ballot round over `remaining`.
///
/// Each elector gives `1/k` to each of its `k` favorite remaining candidates.
pub fn eb_round(remaining: &[usize], ballots: &[OrderBallot]) -> Result<Vec<(usize, BigRational)>, VotingError> {
    let m = candidate_count(ballots, OrderBallot::len)?;
    if let Some(&c) = remaining.iter().find(|&&c| c >= m) {
        return Err(VotingError::UnknownCandidate(c));
    }
    let mut remaining = remaining.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    if remaining.is_empty() {
        return Err(VotingError::NoCandidates);
    }
    let tops: Vec<Vec<usize>> = ballots
        .iter()
        .map(|b| {
            let best = remaining.iter().map(|&c| b.keys[c]).fold(f64::NEG_INFINITY, f64::max);
            remaining.iter().copied().filter(|&c| b.keys[c] == best).collect()
        })
        .collect();
    let tallies = Tallies::count(m, &tops);
    Ok(remaining.iter().map(|&c| (c, tallies.value(c))).collect())
}

/// Outcome of an STV count without per-round tallies.
pub(crate) struct StvOutcome {
    pub winner: usize,
    pub rounds: Vec<Round>,
}

/// STV over pre-computed indifference classes.
///
/// Each elector's current top set is updated only when one of its members is
/// eliminated, which realizes the automatic vote transfer.
pub(crate) fn run_stv(m: usize, levels: &[Vec<Vec<usize>>], trace: bool) -> StvOutcome {
    let mut remaining = vec![true; m];
    let mut level_of = vec![0usize; levels.len()];
    let mut tops: Vec<Vec<usize>> = levels.iter().map(|l| l.first().cloned().unwrap_or_default()).collect();
    let mut rounds = Vec::new();
    for _ in 1..m {
        let tallies = Tallies::count(m, &tops);
        let alive = (0..m).filter(|&c| remaining[c]);
        let loser = tallies.weakest(alive).expect("at least two candidates remain");
        if trace {
            rounds.push(Round {
                tallies: (0..m)
                    .filter(|&c| remaining[c])
                    .map(|c| (c, tallies.value(c)))
                    .collect(),
                eliminated: loser,
            });
        }
        remaining[loser] = false;
        for (i, top) in tops.iter_mut().enumerate() {
            let Some(pos) = top.iter().position(|&c| c == loser) else {
                continue;
            };
            top.remove(pos);
            while top.is_empty() {
                level_of[i] += 1;
                let Some(level) = levels[i].get(level_of[i]) else {
                    break;
                };
                top.extend(level.iter().copied().filter(|&c| remaining[c]));
            }
        }
    }
    let winner = (0..m).find(|&c| remaining[c]).expect("one candidate remains");
    StvOutcome { winner, rounds }
}

/// STV winner with the full round trace.
pub fn stv_winner(ballots: &[OrderBallot]) -> Result<ElectionResult, VotingError> {
    let m = candidate_count(ballots, OrderBallot::len)?;
    let levels: Vec<Vec<Vec<usize>>> = ballots.iter().map(OrderBallot::levels).collect();
    let outcome = run_stv(m, &levels, true);
    Ok(ElectionResult {
        winner: outcome.winner,
        rounds: outcome.rounds,
    })
}

/// `p/q` rendering of an exact tally (`p` alone for integers).
pub fn format_rational(value: &BigRational) -> String {
    value.to_string()
}
