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

//! Exact per-round tallies.
//!
//! Every elector contributes `1/k` to each of the `k` candidates in its top
//! set. Tallies are kept over a common denominator (the lcm of the top-set
//! sizes) in `u128`, falling back to arbitrary-precision rationals when that
//! would overflow.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

/// A set of candidates sharing one elector's vote.
pub(crate) trait TopSet {
    fn size(&self) -> usize;
    fn for_each_member(&self, f: impl FnMut(usize));
}

impl TopSet for Vec<usize> {
    fn size(&self) -> usize {
        self.len()
    }

    fn for_each_member(&self, f: impl FnMut(usize)) {
        self.iter().copied().for_each(f)
    }
}

impl TopSet for u128 {
    fn size(&self) -> usize {
        self.count_ones() as usize
    }

    fn for_each_member(&self, mut f: impl FnMut(usize)) {
        let mut bits = *self;
        while bits != 0 {
            f(bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Tallies {
    /// `value(c) = values[c] / scale`.
    Scaled {
        scale: u128,
        values: Vec<u128>,
    },
    Exact(Vec<BigRational>),
}

impl Tallies {
    /// Counts `sets` over `m` candidates. Empty sets are skipped.
    pub(crate) fn count<T: TopSet>(m: usize, sets: &[T]) -> Tallies {
        if let Some(t) = Self::count_scaled(m, sets) {
            return t;
        }
        let mut values = vec![BigRational::zero(); m];
        for set in sets {
            let k = set.size();
            if k == 0 {
                continue;
            }
            let share = BigRational::new(BigInt::from(1), BigInt::from(k));
            set.for_each_member(|c| values[c] += &share);
        }
        Tallies::Exact(values)
    }

    fn count_scaled<T: TopSet>(m: usize, sets: &[T]) -> Option<Tallies> {
        let mut scale: u128 = 1;
        let mut last_k = 0;
        for set in sets {
            let k = set.size();
            if k == 0 || k == last_k {
                continue;
            }
            last_k = k;
            let k = k as u128;
            let g = scale.gcd(&k);
            scale = scale.checked_mul(k / g)?;
        }
        scale.checked_mul(sets.len().max(1) as u128)?;
        let mut values = vec![0u128; m];
        for set in sets {
            let k = set.size();
            if k == 0 {
                continue;
            }
            let share = scale / k as u128;
            set.for_each_member(|c| values[c] += share);
        }
        Some(Tallies::Scaled { scale, values })
    }

    pub(crate) fn value(&self, c: usize) -> BigRational {
        match self {
            Tallies::Scaled { scale, values } => BigRational::new(BigInt::from(values[c]), BigInt::from(*scale)),
            Tallies::Exact(values) => values[c].clone(),
        }
    }

    pub(crate) fn cmp(&self, a: usize, b: usize) -> Ordering {
        match self {
            Tallies::Scaled { values, .. } => values[a].cmp(&values[b]),
            Tallies::Exact(values) => values[a].cmp(&values[b]),
        }
    }

    /// Lowest-index candidate with the minimum tally among `remaining`.
    pub(crate) fn weakest(&self, remaining: impl IntoIterator<Item = usize>) -> Option<usize> {
        let mut best: Option<usize> = None;
        for c in remaining {
            match best {
                Some(b) if self.cmp(c, b) != Ordering::Less => {}
                _ => best = Some(c),
            }
        }
        best
    }

    /// Whether `budget` whole votes, divisible at will, can lift every other
    /// remaining candidate to at least `target`'s tally.
    pub(crate) fn can_eliminate(
        &self,
        target: usize,
        remaining: impl IntoIterator<Item = usize>,
        budget: usize,
    ) -> bool {
        match self {
            Tallies::Scaled { scale, values } => {
                let Some(limit) = scale.checked_mul(budget as u128) else {
                    return self.to_exact().can_eliminate(target, remaining, budget);
                };
                let level = values[target];
                let mut needed: u128 = 0;
                for e in remaining {
                    if e != target && values[e] < level {
                        needed += level - values[e];
                        if needed > limit {
                            return false;
                        }
                    }
                }
                true
            }
            Tallies::Exact(values) => {
                let limit = BigRational::from_integer(BigInt::from(budget));
                let level = &values[target];
                let mut needed = BigRational::zero();
                for e in remaining {
                    if e != target && &values[e] < level {
                        needed += level - &values[e];
                        if needed > limit {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    fn to_exact(&self) -> Tallies {
        match self {
            Tallies::Scaled { values, .. } => Tallies::Exact((0..values.len()).map(|c| self.value(c)).collect()),
            Tallies::Exact(_) => self.clone(),
        }
    }
}
