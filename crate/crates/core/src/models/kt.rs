//! Krichevsky-Trofimov estimator and its count-aging variants.

use crate::dist::{Alphabet, Distribution};
use crate::error::{Error, Result};
use crate::models::SequentialModel;

/// Count-aging policy applied after each increment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KtVariant {
    /// Plain add-1/2 estimator.
    Plain,
    /// Multiply every count by `discount` after each step.
    CountScale { discount: f64 },
    /// Halve every count at steps that are multiples of `period`.
    Halve { period: u64 },
    /// Zero all counts at the end of the intervals of length 1, 2, 4, ...
    Reset,
}

impl KtVariant {
    /// Halving with period `floor(sqrt(horizon))`. The horizon is required.
    pub fn halving(horizon: Option<u64>) -> Result<Self> {
        let horizon = horizon.ok_or_else(|| {
            Error::Config("count halving needs the sequence length to fix its period".into())
        })?;
        if horizon == 0 {
            return Err(Error::Config(
                "count halving needs a positive horizon".into(),
            ));
        }
        Ok(KtVariant::Halve {
            period: isqrt(horizon).max(1),
        })
    }

    pub fn count_scaling(discount: f64) -> Result<Self> {
        if !(discount > 0.0 && discount <= 1.0) {
            return Err(Error::domain(format!("discount {discount} not in (0, 1]")));
        }
        Ok(KtVariant::CountScale { discount })
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrichevskyTrofimov {
    counts: Vec<f64>,
    total: f64,
    variant: KtVariant,
    step: u64,
}

impl KrichevskyTrofimov {
    pub fn new(alphabet: Alphabet, variant: KtVariant) -> Self {
        KrichevskyTrofimov {
            counts: vec![0.0; alphabet.size()],
            total: 0.0,
            variant,
            step: 0,
        }
    }

    /// Starts from explicit (possibly fractional) counts.
    pub fn with_counts(counts: Vec<f64>, variant: KtVariant) -> Result<Self> {
        Alphabet::new(counts.len())?;
        if counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::domain("counts must be finite and nonnegative"));
        }
        let total = counts.iter().sum();
        Ok(KrichevskyTrofimov {
            counts,
            total,
            variant,
            step: 0,
        })
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn variant(&self) -> KtVariant {
        self.variant
    }

    fn scale(&mut self, factor: f64) {
        self.counts.iter_mut().for_each(|c| *c *= factor);
        self.total *= factor;
    }

    fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0.0);
        self.total = 0.0;
    }
}

impl SequentialModel for KrichevskyTrofimov {
    fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.counts.len()).expect("at least two counts")
    }

    fn steps(&self) -> u64 {
        self.step
    }

    fn predict(&self) -> Distribution {
        let denom = self.total + 0.5 * self.counts.len() as f64;
        Distribution::from_normalized(self.counts.iter().map(|c| (c + 0.5) / denom).collect())
    }

    #[inline]
    fn probability(&self, letter: usize) -> f64 {
        (self.counts[letter] + 0.5) / (self.total + 0.5 * self.counts.len() as f64)
    }

    fn update(&mut self, letter: usize) -> Result<()> {
        self.alphabet().check(letter)?;
        self.counts[letter] += 1.0;
        self.total += 1.0;
        self.step += 1;
        match self.variant {
            KtVariant::Plain => {}
            KtVariant::CountScale { discount } => self.scale(discount),
            KtVariant::Halve { period } => {
                if self.step.is_multiple_of(period) {
                    self.scale(0.5);
                }
            }
            KtVariant::Reset => {
                // intervals end after steps 1, 3, 7, 15, ...
                if (self.step + 1).is_power_of_two() {
                    self.clear();
                }
            }
        }
        Ok(())
    }
}
