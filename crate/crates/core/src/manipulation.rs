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

//! Coalition manipulability of path elections.
//!
//! For a challenger `c` and the sincere winner `v`, the coalition is every
//! elector strictly preferring `c` to `v`. Electors can never change what
//! they report about candidates they are not on.
//!
//! * Range voting: the trivial strategy (`+A` for `c`, `-A` for every other
//!   candidate the member is on) is optimal, so the check is exact.
//! * STV: trivial manipulation gives a constructive lower bound. An upper
//!   bound comes from a relaxed system in which manipulators may re-vote each
//!   round, split their vote arbitrarily and ignore the on-path constraint;
//!   the relaxed question reduces to reachability over sets of remaining
//!   candidates.

use std::collections::HashSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economics::{global_net_income, UtilityMatrix};
use crate::voting::tally::Tallies;
use crate::voting::{
    argmax_lowest, range_winner, run_stv, sincere_order_ballot, sincere_range_ballot, OrderBallot, RangeBallot,
    VotingError, VotingSystem,
};

/// Default candidate count above which the relaxed search is skipped.
pub const DEFAULT_MAX_M: usize = 25;

/// Largest instance [`brute_force_cm`] accepts.
pub const BRUTE_FORCE_MAX_CANDIDATES: usize = 4;
pub const BRUTE_FORCE_MAX_ELECTORS: usize = 8;
pub const BRUTE_FORCE_MAX_COALITION: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum ManipulationError {
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Voting(#[from] VotingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Manipulable,
    NotManipulable,
    Inconclusive,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Manipulable => "manipulable",
            Status::NotManipulable => "not_manipulable",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Witness backing a `Manipulable` status.
#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    /// Insincere range ballots of the coalition members, by elector row.
    RangeProfile(Vec<(usize, RangeBallot)>),
    /// Insincere order ballots of the coalition members, by elector row.
    OrderProfile(Vec<(usize, OrderBallot)>),
    /// Elimination order reaching the challenger in the relaxed system.
    EliminationOrder(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManipulabilityVerdict {
    pub status: Status,
    pub challenger: Option<usize>,
    pub evidence: Option<Evidence>,
    pub successful_challengers: Vec<usize>,
}

impl ManipulabilityVerdict {
    fn not_manipulable() -> Self {
        ManipulabilityVerdict {
            status: Status::NotManipulable,
            challenger: None,
            evidence: None,
            successful_challengers: Vec::new(),
        }
    }

    fn inconclusive() -> Self {
        ManipulabilityVerdict {
            status: Status::Inconclusive,
            ..Self::not_manipulable()
        }
    }

    pub fn is_manipulable(&self) -> bool {
        self.status == Status::Manipulable
    }
}

/// Electors strictly preferring `challenger` to the sincere winner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalition {
    pub challenger: usize,
    pub sincere_winner: usize,
    /// Elector rows, ascending.
    pub members: Vec<usize>,
}

impl Coalition {
    pub fn new(utilities: &UtilityMatrix, challenger: usize, sincere_winner: usize) -> Self {
        let members = (0..utilities.electors())
            .filter(|&row| utilities.value(row, challenger) > utilities.value(row, sincere_winner))
            .collect();
        Coalition {
            challenger,
            sincere_winner,
            members,
        }
    }

    pub fn weight(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn contains(&self, row: usize) -> bool {
        self.members.binary_search(&row).is_ok()
    }
}

/// Non-empty coalitions against `winner`, one per challenger.
fn coalitions(utilities: &UtilityMatrix, winner: usize) -> impl Iterator<Item = Coalition> + '_ {
    (0..utilities.candidates())
        .filter(move |&c| c != winner)
        .map(move |c| Coalition::new(utilities, c, winner))
        .filter(|coalition| !coalition.is_empty())
}

pub fn sincere_range_ballots(utilities: &UtilityMatrix) -> Vec<RangeBallot> {
    (0..utilities.electors())
        .map(|row| sincere_range_ballot(utilities, row))
        .collect()
}

pub fn sincere_order_ballots(utilities: &UtilityMatrix) -> Vec<OrderBallot> {
    (0..utilities.electors())
        .map(|row| sincere_order_ballot(utilities, row))
        .collect()
}

pub fn range_sincere_winner(utilities: &UtilityMatrix) -> usize {
    range_winner(&sincere_range_ballots(utilities))
        .expect("utility matrices have electors and candidates")
        .winner
}

pub fn stv_sincere_winner(utilities: &UtilityMatrix) -> usize {
    let levels: Vec<Vec<Vec<usize>>> = sincere_order_ballots(utilities)
        .iter()
        .map(OrderBallot::levels)
        .collect();
    run_stv(utilities.candidates(), &levels, false).winner
}

pub fn sincere_winner(utilities: &UtilityMatrix, system: VotingSystem) -> usize {
    match system {
        VotingSystem::Range => range_sincere_winner(utilities),
        VotingSystem::Stv => stv_sincere_winner(utilities),
    }
}

/// Trivial range ballot for `challenger`: `+A` for it, `-A` for every other
/// candidate the elector is on, zero elsewhere.
fn trivial_range_ballot(utilities: &UtilityMatrix, row: usize, challenger: usize) -> RangeBallot {
    let bound = utilities.fare().amount();
    let on_path = utilities.on_path_row(row);
    let notes = on_path
        .iter()
        .enumerate()
        .map(|(j, &on)| match (on, j == challenger) {
            (false, _) => 0.0,
            (true, true) => bound,
            (true, false) => -bound,
        })
        .collect();
    RangeBallot::new(notes, on_path, bound).expect("corner notes are within bounds")
}

fn rational(note: f64) -> BigRational {
    if note == 0.0 {
        BigRational::zero()
    } else {
        BigRational::from_float(note).expect("finite note")
    }
}

/// Exact coalition manipulability of range voting.
pub fn range_cm(utilities: &UtilityMatrix) -> ManipulabilityVerdict {
    let sincere = sincere_range_ballots(utilities);
    let m = utilities.candidates();
    let mut scores = vec![BigRational::zero(); m];
    for ballot in &sincere {
        for (score, &note) in scores.iter_mut().zip(ballot.notes()) {
            *score += rational(note);
        }
    }
    let winner = argmax_lowest(&scores);

    let mut verdict = ManipulabilityVerdict::not_manipulable();
    for coalition in coalitions(utilities, winner) {
        let c = coalition.challenger;
        let mut manipulated = scores.clone();
        let mut profile = Vec::with_capacity(coalition.weight());
        for &row in &coalition.members {
            let insincere = trivial_range_ballot(utilities, row, c);
            for j in 0..m {
                manipulated[j] -= rational(sincere[row].notes()[j]);
                manipulated[j] += rational(insincere.notes()[j]);
            }
            profile.push((row, insincere));
        }
        if argmax_lowest(&manipulated) == c {
            if verdict.challenger.is_none() {
                verdict.status = Status::Manipulable;
                verdict.challenger = Some(c);
                verdict.evidence = Some(Evidence::RangeProfile(profile));
            }
            verdict.successful_challengers.push(c);
        }
    }
    verdict
}

/// Trivial STV ballot: the challenger above everything (if the elector is on
/// it), the sincere winner below everything (if the elector is on it), other
/// candidates unchanged.
fn trivial_order_ballot(ballot: &OrderBallot, challenger: usize, winner: usize) -> OrderBallot {
    let mut keys = ballot.keys().to_vec();
    let top = keys.iter().copied().fold(0.0, f64::max);
    let bottom = keys.iter().copied().fold(0.0, f64::min);
    if ballot.on_path()[challenger] {
        keys[challenger] = top + 1.0;
    }
    if ballot.on_path()[winner] {
        keys[winner] = bottom - 1.0;
    }
    OrderBallot::new(keys, ballot.on_path().to_vec()).expect("only on-path keys changed")
}

/// Trivial coalition manipulation of STV (constructive lower bound).
pub fn stv_tm(utilities: &UtilityMatrix) -> ManipulabilityVerdict {
    let m = utilities.candidates();
    let ballots = sincere_order_ballots(utilities);
    let sincere_levels: Vec<Vec<Vec<usize>>> = ballots.iter().map(OrderBallot::levels).collect();
    let winner = run_stv(m, &sincere_levels, false).winner;

    let mut verdict = ManipulabilityVerdict::not_manipulable();
    for coalition in coalitions(utilities, winner) {
        let c = coalition.challenger;
        let mut levels = sincere_levels.clone();
        let mut profile = Vec::with_capacity(coalition.weight());
        for &row in &coalition.members {
            let insincere = trivial_order_ballot(&ballots[row], c, winner);
            levels[row] = insincere.levels();
            profile.push((row, insincere));
        }
        if run_stv(m, &levels, false).winner == c {
            if verdict.challenger.is_none() {
                verdict.status = Status::Manipulable;
                verdict.challenger = Some(c);
                verdict.evidence = Some(Evidence::OrderProfile(profile));
            }
            verdict.successful_challengers.push(c);
        }
    }
    verdict
}

fn full_mask(m: usize) -> u128 {
    if m == 128 {
        u128::MAX
    } else {
        (1u128 << m) - 1
    }
}

fn members_of(mask: u128) -> impl Iterator<Item = usize> {
    let mut bits = mask;
    std::iter::from_fn(move || {
        (bits != 0).then(|| {
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            c
        })
    })
}

/// Visited remaining-candidate sets of one search. Every set contains the
/// challenger, whose bit is dropped to index a dense bitmap when small.
enum Visited {
    Dense { words: Vec<u64>, challenger: usize },
    Sparse(HashSet<u128>),
}

impl Visited {
    const DENSE_MAX_M: usize = 28;

    fn new(m: usize, challenger: usize) -> Self {
        if m <= Self::DENSE_MAX_M {
            Visited::Dense {
                words: vec![0; (1usize << (m - 1)).div_ceil(64)],
                challenger,
            }
        } else {
            Visited::Sparse(HashSet::new())
        }
    }

    /// Marks `state`; false if it was already marked.
    fn insert(&mut self, state: u128) -> bool {
        match self {
            Visited::Dense { words, challenger } => {
                let low = state & ((1u128 << *challenger) - 1);
                let high = (state >> (*challenger + 1)) << *challenger;
                let index = (low | high) as usize;
                let (word, bit) = (index / 64, 1u64 << (index % 64));
                let fresh = words[word] & bit == 0;
                words[word] |= bit;
                fresh
            }
            Visited::Sparse(set) => set.insert(state),
        }
    }
}

fn first_top(levels: &[u128], state: u128) -> u128 {
    levels.iter().map(|&l| l & state).find(|&t| t != 0).unwrap_or(0)
}

struct FixedScale {
    /// `shares[k] = lcm(1..=m) / k`.
    shares: Vec<u64>,
    /// `W` whole votes on the same scale.
    budget: u64,
}

impl FixedScale {
    const MAX_M: usize = 28;

    fn new(m: usize, weight: usize) -> Self {
        let scale = (1..=m as u64).fold(1u64, num_integer::lcm);
        FixedScale {
            shares: (0..=m as u64).map(|k| scale.checked_div(k).unwrap_or(0)).collect(),
            budget: scale * weight as u64,
        }
    }
}

/// Non-manipulator tallies for the relaxed search.
///
/// Up to [`FixedScale::MAX_M`] candidates every tally is an integer multiple
/// of `1 / lcm(1..=m)`; larger instances use exact [`Tallies`].
struct RelaxedTallies<'a> {
    m: usize,
    levels: &'a [Vec<u128>],
    weight: usize,
    fixed: Option<FixedScale>,
    /// Per candidate `d`, the largest tally from which `d` can still be
    /// eliminated later; see [`RelaxedTallies::set_ceilings`].
    ceiling: Option<Vec<u64>>,
}

impl<'a> RelaxedTallies<'a> {
    fn new(m: usize, levels: &'a [Vec<u128>], weight: usize) -> Self {
        RelaxedTallies {
            m,
            levels,
            weight,
            fixed: (m <= FixedScale::MAX_M).then(|| FixedScale::new(m, weight)),
            ceiling: None,
        }
    }

    fn count(&self, state: u128) -> [u64; FixedScale::MAX_M] {
        let fixed = self.fixed.as_ref().expect("fixed scale");
        let mut tally = [0u64; FixedScale::MAX_M];
        for levels in self.levels {
            let top = first_top(levels, state);
            let share = fixed.shares[top.count_ones() as usize];
            for c in members_of(top) {
                tally[c] += share;
            }
        }
        tally
    }

    /// Tallies only grow as candidates are removed. Every later set `S`
    /// from which `d` is eliminated contains `c`, so `t_S(c)` is at most
    /// `c`'s tally against `d` alone while `t_S(d)` is at least its current
    /// tally. Once `t(d)` exceeds `W + t_{c,d}(c)`, `d` can never go.
    fn set_ceilings(&mut self, challenger: usize) {
        let Some(fixed) = &self.fixed else {
            return;
        };
        let budget = fixed.budget;
        let ceiling = (0..self.m)
            .map(|d| match d == challenger {
                true => u64::MAX,
                false => self.count(1u128 << challenger | 1u128 << d)[challenger] + budget,
            })
            .collect();
        self.ceiling = Some(ceiling);
    }

    /// Candidates of `state` other than `keep` that the coalition can
    /// eliminate, as a mask.
    fn eliminable(&self, state: u128, keep: usize) -> u128 {
        let keep_mask = !(1u128 << keep);
        let Some(fixed) = &self.fixed else {
            let tops: Vec<u128> = self.levels.iter().map(|levels| first_top(levels, state)).collect();
            let tallies = Tallies::count(self.m, &tops);
            return members_of(state & keep_mask)
                .filter(|&d| tallies.can_eliminate(d, members_of(state), self.weight))
                .fold(0, |mask, d| mask | 1u128 << d);
        };
        let tally = self.count(state);
        if let Some(ceiling) = &self.ceiling {
            if members_of(state & keep_mask).any(|d| tally[d] > ceiling[d]) {
                return 0;
            }
        }
        let mut sorted = [0u64; FixedScale::MAX_M];
        let mut len = 0;
        for c in members_of(state) {
            sorted[len] = tally[c];
            len += 1;
        }
        let sorted = &mut sorted[..len];
        sorted.sort_unstable();
        // Eliminating d costs the total deficit of the candidates strictly
        // below it. The cost grows with d's tally, so the eliminable
        // candidates are those at or below a threshold.
        let mut threshold = None;
        let mut below_sum = 0u64;
        let mut i = 0;
        while i < len {
            let value = sorted[i];
            if i as u64 * value - below_sum > fixed.budget {
                break;
            }
            threshold = Some(value);
            while i < len && sorted[i] == value {
                below_sum += value;
                i += 1;
            }
        }
        let Some(threshold) = threshold else {
            return 0;
        };
        members_of(state & keep_mask)
            .filter(|&d| tally[d] <= threshold)
            .fold(0, |mask, d| mask | 1u128 << d)
    }
}

/// Searches the relaxed system for an elimination order leaving only
/// `coalition.challenger`. Returns that order when one exists.
///
/// From a remaining set `R`, candidate `d` can be eliminated when the
/// coalition's `W` divisible votes suffice to lift every other candidate of
/// `R` to `d`'s non-manipulator tally. Ties go to the manipulators.
///
/// The last opponent `d` must be eliminable from `{c, d}`, so sets without
/// such a candidate are never entered.
fn relaxed_elimination_order(
    m: usize,
    non_manipulator_levels: &[Vec<u128>],
    coalition: &Coalition,
) -> Option<Vec<usize>> {
    let c = coalition.challenger;
    let goal = 1u128 << c;
    let mut tallies = RelaxedTallies::new(m, non_manipulator_levels, coalition.weight());
    tallies.set_ceilings(c);

    let finalists = (0..m)
        .filter(|&d| d != c)
        .filter(|&d| tallies.eliminable(goal | 1u128 << d, c) != 0)
        .fold(0u128, |mask, d| mask | 1u128 << d);
    let start = full_mask(m);
    if finalists == 0 {
        return None;
    }

    let mut visited = Visited::new(m, c);
    visited.insert(start);
    // Depth-first frames: a set and its untried eliminations. The candidate
    // being tried from each frame forms the current elimination order.
    let mut frames = vec![(start, tallies.eliminable(start, c))];
    let mut order: Vec<usize> = Vec::new();
    while let Some((state, options)) = frames.last_mut() {
        if *options == 0 {
            frames.pop();
            order.pop();
            continue;
        }
        let d = options.trailing_zeros() as usize;
        *options &= *options - 1;
        let next = *state & !(1u128 << d);
        if next == goal {
            order.push(d);
            return Some(order);
        }
        if next & finalists == 0 || !visited.insert(next) {
            continue;
        }
        order.push(d);
        let options = tallies.eliminable(next, c);
        frames.push((next, options));
    }
    None
}

fn level_masks(ballot: &OrderBallot) -> Vec<u128> {
    ballot
        .levels()
        .iter()
        .map(|level| level.iter().fold(0u128, |mask, &c| mask | (1u128 << c)))
        .collect()
}

/// Upper bound on STV coalition manipulability through the relaxed,
/// exhaustive-ballot-like system.
///
/// `NotManipulable` is a proof for STV. `Manipulable` only means the relaxed
/// system can be manipulated; `successful_challengers` then holds the first
/// challenger found. `Inconclusive` when the candidate count exceeds `max_m`.
pub fn stv_cm_upper(utilities: &UtilityMatrix, max_m: usize) -> ManipulabilityVerdict {
    let m = utilities.candidates();
    if m <= 1 {
        return ManipulabilityVerdict::not_manipulable();
    }
    if m > max_m.min(128) {
        return ManipulabilityVerdict::inconclusive();
    }
    let ballots = sincere_order_ballots(utilities);
    let levels: Vec<Vec<Vec<usize>>> = ballots.iter().map(OrderBallot::levels).collect();
    let winner = run_stv(m, &levels, false).winner;
    let masks: Vec<Vec<u128>> = ballots.iter().map(level_masks).collect();

    for coalition in coalitions(utilities, winner) {
        let non_manipulators: Vec<Vec<u128>> = (0..utilities.electors())
            .filter(|&row| !coalition.contains(row))
            .map(|row| masks[row].clone())
            .collect();
        if let Some(order) = relaxed_elimination_order(m, &non_manipulators, &coalition) {
            return ManipulabilityVerdict {
                status: Status::Manipulable,
                challenger: Some(coalition.challenger),
                evidence: Some(Evidence::EliminationOrder(order)),
                successful_challengers: vec![coalition.challenger],
            };
        }
    }
    ManipulabilityVerdict::not_manipulable()
}

/// Both STV bounds and the resulting verdict for one demand.
#[derive(Clone, Debug, PartialEq)]
pub struct StvAnalysis {
    pub sincere_winner: usize,
    pub tm: ManipulabilityVerdict,
    /// Relaxed search result; `None` when trivial manipulation already
    /// succeeded.
    pub upper: Option<ManipulabilityVerdict>,
    /// `Manipulable` iff trivial manipulation succeeds, `NotManipulable` iff
    /// the relaxed search proves impossibility, `Inconclusive` otherwise.
    pub verdict: Status,
}

pub fn analyze_stv(utilities: &UtilityMatrix, max_m: usize) -> StvAnalysis {
    let sincere_winner = stv_sincere_winner(utilities);
    let tm = stv_tm(utilities);
    if tm.is_manipulable() {
        return StvAnalysis {
            sincere_winner,
            tm,
            upper: None,
            verdict: Status::Manipulable,
        };
    }
    let upper = stv_cm_upper(utilities, max_m);
    let verdict = match upper.status {
        Status::NotManipulable => Status::NotManipulable,
        Status::Manipulable | Status::Inconclusive => Status::Inconclusive,
    };
    StvAnalysis {
        sincere_winner,
        tm,
        upper: Some(upper),
        verdict,
    }
}

/// Every weak order over `items` on-path candidates, plus the indifference
/// block when `with_zero` is set, as rank keys for the on-path candidates.
fn weak_order_keys(items: usize, with_zero: bool) -> Vec<Vec<f64>> {
    let slots = items + usize::from(with_zero);
    let mut out = Vec::new();
    let mut levels = vec![0usize; slots];
    loop {
        let used = levels.iter().copied().max().map_or(0, |x| x + 1);
        let surjective = (0..used).all(|l| levels.contains(&l));
        if surjective {
            let reference = if with_zero { levels[items] as f64 } else { used as f64 };
            out.push(levels[..items].iter().map(|&l| reference - l as f64).collect());
        }
        // Next assignment in 0..slots per slot.
        let mut i = 0;
        loop {
            if i == slots {
                return out;
            }
            levels[i] += 1;
            if levels[i] < slots {
                break;
            }
            levels[i] = 0;
            i += 1;
        }
    }
}

/// Multisets of size `k` over `0..n`, as non-decreasing index vectors.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, from: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in from..n {
            current.push(i);
            rec(n, k, i, current, out);
            current.pop();
        }
    }
    rec(n, k, 0, &mut current, &mut out);
    out
}

enum Ballots {
    Range(Vec<RangeBallot>),
    Order(Vec<Vec<Vec<usize>>>),
}

/// Exact coalition manipulability by exhaustive enumeration of the
/// coalition's joint ballots. Only for tiny instances.
///
/// Each member may report any ballot consistent with the candidates it is
/// not on: for range voting every `{-A, +A}` corner on its on-path
/// candidates, for STV every weak order of its on-path candidates relative
/// to the indifference level. Members with identical participation are
/// interchangeable, so joint ballots are enumerated as multisets.
pub fn brute_force_cm(
    utilities: &UtilityMatrix,
    system: VotingSystem,
) -> Result<ManipulabilityVerdict, ManipulationError> {
    let m = utilities.candidates();
    let n = utilities.electors();
    if m > BRUTE_FORCE_MAX_CANDIDATES || n > BRUTE_FORCE_MAX_ELECTORS {
        return Err(ManipulationError::TooLarge(format!("{n} electors, {m} candidates")));
    }
    if n == 0 || m == 0 {
        return Err(VotingError::EmptyProfile.into());
    }
    let bound = utilities.fare().amount();
    let winner = match system {
        VotingSystem::Range => range_winner(&sincere_range_ballots(utilities))?.winner,
        VotingSystem::Stv => crate::voting::stv_winner(&sincere_order_ballots(utilities))?.winner,
    };
    let all: Vec<Coalition> = coalitions(utilities, winner).collect();
    if let Some(big) = all.iter().find(|c| c.weight() > BRUTE_FORCE_MAX_COALITION) {
        return Err(ManipulationError::TooLarge(format!(
            "coalition of {} for challenger {}",
            big.weight(),
            big.challenger
        )));
    }

    let mut verdict = ManipulabilityVerdict::not_manipulable();
    for coalition in all {
        let c = coalition.challenger;
        // Members grouped by participation pattern.
        let mut groups: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
        for &row in &coalition.members {
            let pattern = utilities.on_path_row(row).to_vec();
            match groups.iter_mut().find(|(p, _)| *p == pattern) {
                Some((_, rows)) => rows.push(row),
                None => groups.push((pattern, vec![row])),
            }
        }
        // Strategy space per group.
        let options: Vec<Vec<Ballots>> = groups
            .iter()
            .map(|(pattern, _)| {
                let on: Vec<usize> = (0..m).filter(|&j| pattern[j]).collect();
                match system {
                    VotingSystem::Range => (0..1usize << on.len())
                        .map(|bits| {
                            let mut notes = vec![0.0; m];
                            for (k, &j) in on.iter().enumerate() {
                                notes[j] = if bits >> k & 1 == 1 { bound } else { -bound };
                            }
                            Ballots::Range(vec![RangeBallot::new(notes, pattern, bound).expect("corner ballot")])
                        })
                        .collect(),
                    VotingSystem::Stv => weak_order_keys(on.len(), on.len() < m)
                        .into_iter()
                        .map(|keys| {
                            let mut full = vec![0.0; m];
                            for (&j, key) in on.iter().zip(keys) {
                                full[j] = key;
                            }
                            let ballot = OrderBallot::new(full, pattern.clone()).expect("on-path keys only");
                            Ballots::Order(vec![ballot.levels()])
                        })
                        .collect(),
                }
            })
            .collect();
        let choices: Vec<Vec<Vec<usize>>> = groups
            .iter()
            .zip(&options)
            .map(|((_, rows), opts)| multisets(opts.len(), rows.len()))
            .collect();

        let sincere_range = sincere_range_ballots(utilities);
        let sincere_levels: Vec<Vec<Vec<usize>>> = sincere_order_ballots(utilities)
            .iter()
            .map(OrderBallot::levels)
            .collect();
        let mut pick = vec![0usize; groups.len()];
        let found = 'search: loop {
            let mut range_profile = sincere_range.clone();
            let mut order_profile = sincere_levels.clone();
            for (g, (_, rows)) in groups.iter().enumerate() {
                for (&row, &opt) in rows.iter().zip(&choices[g][pick[g]]) {
                    match &options[g][opt] {
                        Ballots::Range(b) => range_profile[row] = b[0].clone(),
                        Ballots::Order(l) => order_profile[row] = l[0].clone(),
                    }
                }
            }
            let elected = match system {
                VotingSystem::Range => range_winner(&range_profile)?.winner,
                VotingSystem::Stv => run_stv(m, &order_profile, false).winner,
            };
            if elected == c {
                break 'search true;
            }
            let mut g = 0;
            loop {
                if g == groups.len() {
                    break 'search false;
                }
                pick[g] += 1;
                if pick[g] < choices[g].len() {
                    break;
                }
                pick[g] = 0;
                g += 1;
            }
        };
        if found {
            if verdict.challenger.is_none() {
                verdict.status = Status::Manipulable;
                verdict.challenger = Some(c);
            }
            verdict.successful_challengers.push(c);
        }
    }
    Ok(verdict)
}

/// Global net incomes if a successful challenger is elected instead of the
/// sincere winner.
#[derive(Clone, Debug, PartialEq)]
pub struct InsincereOutcome {
    /// `(challenger, income)` per successful challenger.
    pub incomes: Vec<(usize, f64)>,
    /// Expected income when one successful manipulation is picked uniformly.
    pub average: f64,
    /// Lowest income over successful manipulations.
    pub worst: f64,
}

/// Income consequences of the successful manipulations; with none, both
/// aggregates equal the sincere winner's income.
pub fn insincere_outcomes(utilities: &UtilityMatrix, sincere_winner: usize, successful: &[usize]) -> InsincereOutcome {
    if successful.is_empty() {
        let income = global_net_income(utilities, sincere_winner);
        return InsincereOutcome {
            incomes: Vec::new(),
            average: income,
            worst: income,
        };
    }
    let incomes: Vec<(usize, f64)> = successful
        .iter()
        .map(|&c| (c, global_net_income(utilities, c)))
        .collect();
    InsincereOutcome {
        average: outcome_average(incomes.iter().map(|&(_, x)| x)),
        worst: incomes.iter().map(|&(_, x)| x).fold(f64::INFINITY, f64::min),
        incomes,
    }
}

fn outcome_average(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    crate::economics::exact_sum(values) / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economics::Fare;

    fn matrix(rows: &[&[f64]], fare: f64) -> UtilityMatrix {
        let values: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        let on = values.iter().map(|r| vec![true; r.len()]).collect();
        UtilityMatrix::from_rows(Fare::new(fare).unwrap(), values, on).unwrap()
    }

    fn matrix_on(rows: &[&[f64]], on: &[&[bool]], fare: f64) -> UtilityMatrix {
        UtilityMatrix::from_rows(
            Fare::new(fare).unwrap(),
            rows.iter().map(|r| r.to_vec()).collect(),
            on.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn range_trivial_manipulation_overturns_sum() {
        // Sincere sums (7, 8); e1 alone recasts (10, -10) giving (13, -3).
        let u = matrix(&[&[4.0, 1.0], &[1.0, 4.0], &[2.0, 3.0]], 10.0);
        assert_eq!(range_sincere_winner(&u), 1);
        assert_eq!(Coalition::new(&u, 0, 1).members, vec![0]);
        let v = range_cm(&u);
        assert_eq!(v.status, Status::Manipulable);
        assert_eq!(v.challenger, Some(0));
        match v.evidence {
            Some(Evidence::RangeProfile(ref p)) => {
                assert_eq!(p.len(), 1);
                assert_eq!(p[0].1.notes(), &[10.0, -10.0]);
            }
            ref other => panic!("unexpected evidence {other:?}"),
        }
        assert_eq!(
            brute_force_cm(&u, VotingSystem::Range).unwrap().status,
            Status::Manipulable
        );
    }

    #[test]
    fn dictator_and_unanimity_are_not_manipulable() {
        let u = matrix(&[&[5.0, 1.0, -2.0]], 10.0);
        assert_eq!(range_cm(&u).status, Status::NotManipulable);
        assert_eq!(stv_tm(&u).status, Status::NotManipulable);
        let u = matrix(&[&[3.0, 1.0], &[2.0, -1.0], &[4.0, 0.5]], 10.0);
        assert_eq!(range_cm(&u).status, Status::NotManipulable);
        assert_eq!(stv_tm(&u).status, Status::NotManipulable);
        assert_eq!(stv_cm_upper(&u, DEFAULT_MAX_M).status, Status::NotManipulable);
    }

    #[test]
    fn stv_majority_resists_single_manipulator() {
        // Two electors for v = candidate 0, one for c = candidate 1.
        let u = matrix(&[&[2.0, 1.0], &[2.0, 1.0], &[1.0, 2.0]], 10.0);
        assert_eq!(stv_sincere_winner(&u), 0);
        assert_eq!(stv_tm(&u).status, Status::NotManipulable);
        // Non-manipulator tallies t(v) = 2, t(c) = 0 against W = 1.
        assert_eq!(stv_cm_upper(&u, DEFAULT_MAX_M).status, Status::NotManipulable);
        assert_eq!(
            brute_force_cm(&u, VotingSystem::Stv).unwrap().status,
            Status::NotManipulable
        );
    }

    #[test]
    fn relaxed_search_wins_ties() {
        // c = candidate 0 loses the sincere 1-1 tie on lowest index; the
        // relaxed system lets the manipulator win it, real STV does not.
        let u = matrix(&[&[1.0, 2.0], &[2.0, 1.0]], 10.0);
        assert_eq!(stv_sincere_winner(&u), 1);
        assert_eq!(stv_tm(&u).status, Status::NotManipulable);
        let upper = stv_cm_upper(&u, DEFAULT_MAX_M);
        assert_eq!(upper.status, Status::Manipulable);
        assert_eq!(upper.evidence, Some(Evidence::EliminationOrder(vec![1])));
        assert_eq!(analyze_stv(&u, DEFAULT_MAX_M).verdict, Status::Inconclusive);
        assert_eq!(
            brute_force_cm(&u, VotingSystem::Stv).unwrap().status,
            Status::NotManipulable
        );
    }

    #[test]
    fn trivial_manipulation_rescues_first_eliminated() {
        // Sincere tallies (2, 1, 1): candidate 1 goes first, then 0 beats 2
        // by 5/2 to 3/2. Electors 1 and 2 top candidate 1 instead, giving
        // (2, 2, 0), and 0 then loses the 2-2 tie on index.
        let u = matrix(
            &[
                &[3.0, -3.0, -2.0],
                &[-3.0, 1.0, 3.0],
                &[0.0, 3.0, 0.0],
                &[0.0, -2.0, -1.0],
            ],
            10.0,
        );
        let sincere = crate::voting::stv_winner(&sincere_order_ballots(&u)).unwrap();
        assert_eq!(sincere.winner, 0);
        assert_eq!(sincere.elimination_order(), vec![1, 2]);
        let tm = stv_tm(&u);
        assert_eq!(tm.status, Status::Manipulable);
        assert_eq!(tm.challenger, Some(1));
        match tm.evidence {
            Some(Evidence::OrderProfile(ref p)) => {
                assert_eq!(p[0], (1, OrderBallot::from_keys(vec![-4.0, 4.0, 3.0]).unwrap()));
                assert_eq!(p[1], (2, OrderBallot::from_keys(vec![-1.0, 4.0, 0.0]).unwrap()));
            }
            ref other => panic!("unexpected evidence {other:?}"),
        }
        assert_eq!(stv_cm_upper(&u, DEFAULT_MAX_M).status, Status::Manipulable);
        assert_eq!(analyze_stv(&u, DEFAULT_MAX_M).verdict, Status::Manipulable);
    }

    #[test]
    fn single_candidate_has_no_challenger() {
        let u = matrix(&[&[1.0], &[-1.0]], 10.0);
        assert_eq!(stv_cm_upper(&u, DEFAULT_MAX_M).status, Status::NotManipulable);
        assert_eq!(stv_tm(&u).status, Status::NotManipulable);
        assert_eq!(range_cm(&u).status, Status::NotManipulable);
    }

    #[test]
    fn skip_rule_above_max_m() {
        let u = matrix(&[&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]], 10.0);
        assert_eq!(stv_cm_upper(&u, 2).status, Status::Inconclusive);
    }

    #[test]
    fn off_path_member_can_only_demote_the_winner() {
        // Elector 2 is off candidate 0 and dislikes candidate 1.
        let u = matrix_on(
            &[&[1.0, 2.0], &[2.0, 1.0], &[0.0, -1.0]],
            &[&[true, true], &[true, true], &[false, true]],
            10.0,
        );
        let ballots = sincere_order_ballots(&u);
        let t = trivial_order_ballot(&ballots[2], 0, 1);
        assert_eq!(t.keys(), &[0.0, -2.0]);
        let t = trivial_order_ballot(&ballots[0], 0, 1);
        assert_eq!(t.keys(), &[3.0, -1.0]);
    }

    #[test]
    fn weak_order_enumeration_counts() {
        // Ordered set partitions (Fubini numbers) of 1..=4 items.
        assert_eq!(weak_order_keys(1, false).len(), 1);
        assert_eq!(weak_order_keys(2, false).len(), 3);
        assert_eq!(weak_order_keys(3, false).len(), 13);
        assert_eq!(weak_order_keys(3, true).len(), 75);
        assert_eq!(weak_order_keys(1, true).len(), 3);
        assert_eq!(multisets(3, 2).len(), 6);
    }

    #[test]
    fn brute_force_rejects_large_instances() {
        let u = matrix(&[&[1.0, 2.0, 3.0, 4.0, 5.0]], 10.0);
        assert!(matches!(
            brute_force_cm(&u, VotingSystem::Stv),
            Err(ManipulationError::TooLarge(_))
        ));
    }

    #[test]
    fn insincere_aggregates() {
        let u = matrix(&[&[4.0, -2.0, 1.0]], 10.0);
        let none = insincere_outcomes(&u, 2, &[]);
        assert_eq!((none.average, none.worst), (1.0, 1.0));
        let some = insincere_outcomes(&u, 2, &[0, 1]);
        assert_eq!(some.average, 1.0);
        assert_eq!(some.worst, -2.0);
    }
}
