//! Partition Tree Weighting over Krichevsky-Trofimov leaves.
//!
//! A depth-`D` tree covers time `1..=2^D`. Every node mixes, with prior weight
//! 1/2 each, "no split" (one KT estimator over the node's whole interval) and
//! "split at the midpoint" (product of the two children's weighted
//! probabilities). Only the nodes on the path to the current time are live, so
//! the state is one slot per level and each step costs `O(N * D)`. All
//! probabilities are kept as natural logarithms.

use std::f64::consts::LN_2;

use crate::dist::{Alphabet, Distribution};
use crate::error::{Error, Result};
use crate::models::SequentialModel;

/// Largest supported depth; `2^MAX_DEPTH` letters.
pub const MAX_DEPTH: u32 = 62;

#[derive(Clone, Debug, PartialEq)]
struct Level {
    counts: Vec<f64>,
    total: f64,
    /// log KT probability of the node's data so far
    log_base: f64,
    /// log weighted probability of the node's data so far
    log_weighted: f64,
    /// log weighted probability of the finished left child, 0 while still in it
    log_left: f64,
}

impl Level {
    fn new(n: usize) -> Self {
        Level {
            counts: vec![0.0; n],
            total: 0.0,
            log_base: 0.0,
            log_weighted: 0.0,
            log_left: 0.0,
        }
    }

    #[inline]
    fn kt_ln(&self, letter: usize) -> f64 {
        ((self.counts[letter] + 0.5) / (self.total + 0.5 * self.counts.len() as f64)).ln()
    }

    fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0.0);
        self.total = 0.0;
        self.log_base = 0.0;
        self.log_weighted = 0.0;
        self.log_left = 0.0;
    }
}

/// `ln(e^a / 2 + e^b / 2)`
#[inline]
fn ln_half_sum(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p() - LN_2
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionTreeWeighting {
    depth: u32,
    /// index j covers intervals of length 2^(depth - j); index 0 is the root
    levels: Vec<Level>,
    step: u64,
}

impl PartitionTreeWeighting {
    pub fn new(alphabet: Alphabet, depth: u32) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::domain(format!(
                "tree depth {depth} exceeds the maximum {MAX_DEPTH}"
            )));
        }
        Ok(PartitionTreeWeighting {
            depth,
            levels: (0..=depth).map(|_| Level::new(alphabet.size())).collect(),
            step: 0,
        })
    }

    /// Smallest tree covering `horizon` letters.
    pub fn for_horizon(alphabet: Alphabet, horizon: u64) -> Result<Self> {
        Self::new(alphabet, depth_for(horizon))
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn capacity(&self) -> u64 {
        1u64 << self.depth
    }

    /// Natural log of the weighted probability of everything seen so far.
    pub fn log_probability(&self) -> f64 {
        self.levels[0].log_weighted
    }

    fn check_capacity(&self) -> Result<()> {
        if self.step >= self.capacity() {
            Err(Error::Capacity {
                consumed: self.step,
                capacity: self.capacity(),
            })
        } else {
            Ok(())
        }
    }

    /// Root log probability if `letter` were appended, without mutating.
    fn log_probability_with(&self, letter: usize) -> f64 {
        let d = self.depth as usize;
        let mut child = self.levels[d].log_base + self.levels[d].kt_ln(letter);
        for level in self.levels[..d].iter().rev() {
            let base = level.log_base + level.kt_ln(letter);
            child = ln_half_sum(base, level.log_left + child);
        }
        child
    }
}

/// `ceil(log2(horizon))`, at least zero.
pub fn depth_for(horizon: u64) -> u32 {
    if horizon <= 1 {
        0
    } else {
        64 - (horizon - 1).leading_zeros()
    }
}

impl SequentialModel for PartitionTreeWeighting {
    fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.levels[0].counts.len()).expect("at least two letters")
    }

    fn steps(&self) -> u64 {
        self.step
    }

    fn predict(&self) -> Distribution {
        let current = self.log_probability();
        let n = self.alphabet().size();
        let mut mass: Vec<f64> = (0..n)
            .map(|a| (self.log_probability_with(a) - current).exp())
            .collect();
        let total: f64 = mass.iter().sum();
        mass.iter_mut().for_each(|m| *m /= total);
        Distribution::from_normalized(mass)
    }

    fn update(&mut self, letter: usize) -> Result<()> {
        self.observe(letter).map(|_| ())
    }

    fn observe(&mut self, letter: usize) -> Result<f64> {
        self.alphabet().check(letter)?;
        self.check_capacity()?;
        let before = self.log_probability();
        let d = self.depth as usize;

        for level in self.levels.iter_mut() {
            level.log_base += level.kt_ln(letter);
            level.counts[letter] += 1.0;
            level.total += 1.0;
        }
        self.levels[d].log_weighted = self.levels[d].log_base;
        for j in (0..d).rev() {
            let child = self.levels[j + 1].log_weighted;
            let level = &mut self.levels[j];
            level.log_weighted = ln_half_sum(level.log_base, level.log_left + child);
        }

        self.step += 1;
        let t = self.step;
        // close every node whose interval ends at t, deepest first
        for j in (1..=d).rev() {
            let span = 1u64 << (d - j);
            if !t.is_multiple_of(span) {
                break;
            }
            if (t / span) % 2 == 1 {
                self.levels[j - 1].log_left = self.levels[j].log_weighted;
            }
            self.levels[j].clear();
        }

        Ok(before - self.log_probability())
    }
}
