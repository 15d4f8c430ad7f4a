//! Randomized sweeps of measured redundancy against both closed-form bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::dist::{Alphabet, Distribution};
use crate::error::Result;
use crate::exec::{derive_seed, Execution};
use crate::lab::bounds::{check_fixed, check_varying, BoundReport};
use crate::models::schedule_fixed;
use crate::pws::{sample_pws_with, sample_sequence_with, PwsSpec};

/// One drawn case: source, sequence and fixed smoothing parameters.
#[derive(Clone, Debug)]
pub struct BoundCase {
    pub seed: u64,
    pub spec: PwsSpec,
    pub x: Vec<usize>,
    pub alpha: f64,
    pub eps: f64,
    pub initial: Distribution,
}

/// Draws a case of length `len` over `alphabet` from `seed`. The segment
/// count is uniform on `1..=min(len, 64)`. Half of the cases use the tuned
/// fixed schedule from a uniform start, the other half arbitrary admissible
/// parameters and a random positive start.
pub fn draw_case(alphabet: Alphabet, len: u64, seed: u64) -> Result<BoundCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let segments = rng.gen_range(1..=len.min(64));
    let spec = sample_pws_with(alphabet, len, segments, &mut rng)?;
    let x = sample_sequence_with(&spec, &mut rng);
    let n = alphabet.size() as f64;
    let (alpha, eps, initial) = if rng.gen_bool(0.5) {
        let (a, e) = schedule_fixed(alphabet, len.max(2))?;
        (a, e, Distribution::uniform(alphabet))
    } else {
        let alpha = rng.gen_range(0.01..0.9999);
        let eps = rng.gen_range(0.0..1.0 - 1.0 / n).max(1e-6);
        // the start must sit inside [eps/(N-1), 1-eps]; mix towards uniform
        let w: Vec<f64> = (0..alphabet.size())
            .map(|_| rng.sample::<f64, _>(Exp1))
            .collect();
        let raw = Distribution::from_weights(w)?;
        let floor = eps / (n - 1.0);
        let lam = if raw.min_mass() >= floor {
            0.0
        } else {
            ((floor - raw.min_mass()) / (1.0 / n - raw.min_mass())).min(1.0)
        };
        (alpha, eps, raw.mix_uniform(lam))
    };
    Ok(BoundCase {
        seed,
        spec,
        x,
        alpha,
        eps,
        initial,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundOutcome {
    pub seed: u64,
    pub alphabet: usize,
    pub len: u64,
    pub fixed: BoundReport,
    pub varying: BoundReport,
}

/// Checks one case against both bounds, each scaled by `scale`.
pub fn check_case(case: &BoundCase, scale: f64) -> Result<BoundOutcome> {
    let fixed = check_fixed(&case.spec, &case.x, case.alpha, case.eps, &case.initial)?;
    let varying = check_varying(
        &case.spec,
        &case.x,
        &Distribution::uniform(case.spec.alphabet()),
    )?;
    Ok(BoundOutcome {
        seed: case.seed,
        alphabet: case.spec.alphabet().size(),
        len: case.spec.len(),
        fixed: fixed.scaled(scale),
        varying: varying.scaled(scale),
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepSummary {
    pub outcomes: Vec<BoundOutcome>,
}

impl SweepSummary {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn fixed_violations(&self) -> impl Iterator<Item = &BoundOutcome> {
        self.outcomes.iter().filter(|o| !o.fixed.satisfied)
    }

    pub fn varying_violations(&self) -> impl Iterator<Item = &BoundOutcome> {
        self.outcomes.iter().filter(|o| !o.varying.satisfied)
    }

    pub fn all_satisfied(&self) -> bool {
        self.outcomes
            .iter()
            .all(|o| o.fixed.satisfied && o.varying.satisfied)
    }

    /// Smallest `bound - measured` for the fixed and varying bounds.
    pub fn worst_slack(&self) -> (f64, f64) {
        self.outcomes
            .iter()
            .fold((f64::INFINITY, f64::INFINITY), |(a, b), o| {
                (a.min(o.fixed.slack()), b.min(o.varying.slack()))
            })
    }
}

/// Seed of sample `index` in a sweep seeded with `seed`.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    derive_seed(seed, &[index])
}

/// Checks `samples` cases; sample `i` uses shape `shape(i)` and seed
/// [`sample_seed`]`(seed, i)`.
pub fn sweep_bounds<F>(
    samples: u64,
    seed: u64,
    scale: f64,
    exec: Execution,
    shape: F,
) -> Result<SweepSummary>
where
    F: Fn(u64) -> (Alphabet, u64) + Sync + Send,
{
    let outcomes = exec
        .map((0..samples).collect(), |i| {
            let (a, len) = shape(i);
            check_case(&draw_case(a, len, sample_seed(seed, i))?, scale)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepSummary { outcomes })
}
