//! Alphabets and probability vectors.
//!
//! Letters are zero-based indices `0..N`. All mass is stored as `f64`.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a [`Distribution`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finite alphabet `{0, .., N-1}` with `N >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidAlphabet(size));
        }
        Ok(Alphabet(size))
    }

    pub const BINARY: Alphabet = Alphabet(2);

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    #[inline]
    pub fn check(self, letter: usize) -> Result<()> {
        if letter < self.0 {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange {
                letter,
                size: self.0,
            })
        }
    }

    pub fn check_all(self, letters: &[usize]) -> Result<()> {
        letters.iter().try_for_each(|&x| self.check(x))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A probability vector over an [`Alphabet`].
///
/// Entries are nonnegative and sum to one within [`MASS_TOLERANCE`].
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    mass: Vec<f64>,
}

impl Distribution {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        Alphabet::new(mass.len())?;
        if let Some((i, m)) = mass
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m >= 0.0))
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {m}, expected a finite nonnegative value"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "mass sums to {total}, expected 1"
            )));
        }
        Ok(Distribution { mass })
    }

    /// Wraps a vector produced by a model whose update rule preserves
    /// normalization. Checked only in debug builds.
    pub(crate) fn from_normalized(mass: Vec<f64>) -> Self {
        debug_assert!(mass.len() >= 2);
        debug_assert!(mass.iter().all(|m| *m >= 0.0));
        debug_assert!((mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Distribution { mass }
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weights must be nonnegative with positive finite sum, got total {total}"
            )));
        }
        Distribution::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.size();
        Distribution {
            mass: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on `letter`.
    pub fn point(alphabet: Alphabet, letter: usize) -> Result<Self> {
        alphabet.check(letter)?;
        let mut mass = vec![0.0; alphabet.size()];
        mass[letter] = 1.0;
        Ok(Distribution { mass })
    }

    #[inline]
    pub fn alphabet(&self) -> Alphabet {
        Alphabet(self.mass.len())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    /// Always false; distributions have at least two letters.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.mass
    }

    pub fn min_mass(&self) -> f64 {
        self.mass.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(1 - eps) * self + eps * uniform`.
    pub fn mix_uniform(&self, eps: f64) -> Distribution {
        let n = self.len() as f64;
        Distribution {
            mass: self
                .mass
                .iter()
                .map(|m| (1.0 - eps) * m + eps / n)
                .collect(),
        }
    }
}

impl Index<usize> for Distribution {
    type Output = f64;

    #[inline]
    fn index(&self, letter: usize) -> &f64 {
        &self.mass[letter]
    }
}
