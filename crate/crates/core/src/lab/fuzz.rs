//! Randomized driver for the inequality oracles in [`super::lemmas`].
//!
//! Each instance is drawn from its own seed, derived from the run seed, the
//! lemma and the instance index. A failing instance can be replayed from the
//! reported seed with [`draw`].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::dist::{Alphabet, Distribution};
use crate::error::Result;
use crate::exec::{derive_seed, Execution};
use crate::lab::lemmas::{
    check_eps_proximity, check_erfi_sum, check_kl_l1, check_progress_invariant, check_segment_sum,
    scan_erfi_sum, InequalityCheck,
};
use crate::models::smooth;
use crate::pws::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    EpsProximity,
    ProgressInvariant,
    KlL1,
    ErfiSum,
    SegmentSum,
}

impl Lemma {
    pub const ALL: [Lemma; 5] = [
        Lemma::EpsProximity,
        Lemma::ProgressInvariant,
        Lemma::KlL1,
        Lemma::ErfiSum,
        Lemma::SegmentSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::EpsProximity => "eps-proximity",
            Lemma::ProgressInvariant => "progress-invariant",
            Lemma::KlL1 => "kl-l1",
            Lemma::ErfiSum => "erfi-sum",
            Lemma::SegmentSum => "segment-sum",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One randomly drawn input to an oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    EpsProximity {
        p: Distribution,
        q: Distribution,
        y: usize,
        alpha: f64,
        eps: f64,
    },
    ProgressInvariant {
        p: Distribution,
        q: Distribution,
        y: usize,
        alpha: f64,
        eps: f64,
    },
    KlL1 {
        p: Distribution,
        w: Distribution,
        v: Distribution,
        m: f64,
    },
    ErfiSum {
        len: u64,
    },
    SegmentSum {
        partition: Partition,
        weights: Vec<f64>,
        table: Vec<Vec<f64>>,
        cap: f64,
    },
}

impl Instance {
    pub fn check(&self) -> Result<InequalityCheck> {
        match self {
            Instance::EpsProximity {
                p,
                q,
                y,
                alpha,
                eps,
            } => check_eps_proximity(p, q, *y, *alpha, *eps),
            Instance::ProgressInvariant {
                p,
                q,
                y,
                alpha,
                eps,
            } => check_progress_invariant(p, q, *y, *alpha, *eps),
            Instance::KlL1 { p, w, v, m } => check_kl_l1(p, w, v, *m),
            Instance::ErfiSum { len } => check_erfi_sum(*len),
            Instance::SegmentSum {
                partition,
                weights,
                table,
                cap,
            } => check_segment_sum(partition, weights, table, *cap),
        }
    }
}

fn random_alphabet<R: Rng>(rng: &mut R) -> Alphabet {
    Alphabet::new(rng.gen_range(2..=8)).unwrap()
}

/// Strictly positive distribution; sometimes nearly uniform, sometimes very
/// peaked.
fn random_dist<R: Rng>(alphabet: Alphabet, rng: &mut R) -> Distribution {
    let sharpness = [1.0, 1.0, 3.0, 8.0][rng.gen_range(0..4)];
    loop {
        let w: Vec<f64> = (0..alphabet.size())
            .map(|_| rng.sample::<f64, _>(Exp1).powf(sharpness))
            .collect();
        if let Ok(d) = Distribution::from_weights(w) {
            if d.min_mass() > 0.0 {
                return d;
            }
        }
    }
}

/// Any distribution, including ones with zero entries.
fn random_any_dist<R: Rng>(alphabet: Alphabet, rng: &mut R) -> Distribution {
    if rng.gen_bool(0.2) {
        Distribution::point(alphabet, rng.gen_range(0..alphabet.size())).unwrap()
    } else {
        random_dist(alphabet, rng)
    }
}

fn random_alpha<R: Rng>(rng: &mut R) -> f64 {
    let a = if rng.gen_bool(0.5) {
        rng.gen::<f64>()
    } else {
        // close to one, where 1/ln(1/alpha) is large
        1.0 - 10f64.powf(-rng.gen_range(0.5..6.0))
    };
    a.clamp(1e-6, 1.0 - 1e-9)
}

fn random_eps<R: Rng>(alphabet: Alphabet, rng: &mut R) -> f64 {
    let top = 1.0 - 1.0 / alphabet.size() as f64;
    match rng.gen_range(0..4) {
        0 => 0.0,
        1 => top * 10f64.powf(-rng.gen_range(1.0..6.0)),
        2 => top,
        _ => rng.gen_range(0.0..=top),
    }
}

/// `p` with `p(y)` set to `value` and the other letters rescaled to fill the
/// remaining mass. `p` must be positive off `y`.
fn pin_letter(p: &Distribution, y: usize, value: f64) -> Distribution {
    let rest: f64 = (0..p.len()).filter(|&a| a != y).map(|a| p[a]).sum();
    let mut mass: Vec<f64> = p.mass().iter().map(|m| m / rest * (1.0 - value)).collect();
    mass[y] = value;
    Distribution::from_weights(mass).unwrap()
}

/// Draws the instance for `lemma` determined by `seed`.
pub fn draw(lemma: Lemma, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    match lemma {
        Lemma::EpsProximity => {
            let a = random_alphabet(rng);
            let y = rng.gen_range(0..a.size());
            let alpha = random_alpha(rng);
            let eps = random_eps(a, rng);
            let mut p = random_dist(a, rng);
            if rng.gen_bool(0.25) {
                let floor = (eps / (a.size() - 1) as f64).max(1e-12);
                p = pin_letter(&p, y, floor);
            }
            let q = random_any_dist(a, rng);
            Instance::EpsProximity {
                p,
                q,
                y,
                alpha,
                eps,
            }
        }
        Lemma::ProgressInvariant => {
            let a = random_alphabet(rng);
            let y = rng.gen_range(0..a.size());
            let alpha = random_alpha(rng);
            let p = random_dist(a, rng);
            if rng.gen_bool(0.25) {
                // the concave objective's maximizer in q(y), for eps = 0
                let next = smooth(&p, y, alpha, 0.0).unwrap();
                let qy = (-alpha.ln() / (next[y] / (alpha * p[y])).ln()).clamp(1e-300, 1.0);
                let q = pin_letter(&random_dist(a, rng), y, qy);
                Instance::ProgressInvariant {
                    p,
                    q,
                    y,
                    alpha,
                    eps: 0.0,
                }
            } else {
                let eps = random_eps(a, rng);
                let mut q = random_any_dist(a, rng);
                if q[y] == 0.0 {
                    q = q.mix_uniform(0.5);
                }
                Instance::ProgressInvariant {
                    p,
                    q,
                    y,
                    alpha,
                    eps,
                }
            }
        }
        Lemma::KlL1 => {
            let a = random_alphabet(rng);
            let p = random_dist(a, rng);
            let w = random_dist(a, rng);
            let v = random_any_dist(a, rng);
            let m = p.min_mass().min(w.min_mass());
            Instance::KlL1 { p, w, v, m }
        }
        Lemma::ErfiSum => Instance::ErfiSum {
            len: rng.gen_range(2..=100_000),
        },
        Lemma::SegmentSum => {
            let len: u64 = rng.gen_range(1..=64);
            let segments = rng.gen_range(1..=len);
            let mut cuts: Vec<u64> =
                rand::seq::index::sample(rng, (len - 1) as usize, (segments - 1) as usize)
                    .into_iter()
                    .map(|i| i as u64 + 2)
                    .collect();
            cuts.sort_unstable();
            let partition = Partition::from_cuts(len, &cuts).unwrap();
            let constant = rng.gen_bool(0.2);
            let mut acc = rng.gen_range(0.0..3.0);
            let weights: Vec<f64> = (0..=len)
                .map(|_| {
                    if !constant {
                        acc += rng.sample::<f64, _>(Exp1);
                    }
                    acc
                })
                .collect();
            let cap = rng.gen_range(0.0..5.0);
            let table = (0..segments)
                .map(|_| (0..=len).map(|_| cap - rng.gen_range(0.0..6.0)).collect())
                .collect();
            Instance::SegmentSum {
                partition,
                weights,
                table,
                cap,
            }
        }
    }
}

/// Instance counts for a fuzz run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzPlan {
    /// Random draws for each of the three single-step lemmas.
    pub lemma_draws: u64,
    /// Largest `T` in the exhaustive erfi-sum scan; below 2 skips it.
    pub erfi_max_len: u64,
    pub segment_instances: u64,
}

impl FuzzPlan {
    /// `iterations` draws per single-step lemma, an erfi scan up to
    /// `10 * iterations` (capped at one million) and `iterations / 10`
    /// segment-sum instances.
    pub fn from_iterations(iterations: u64) -> Self {
        FuzzPlan {
            lemma_draws: iterations,
            erfi_max_len: iterations.saturating_mul(10).min(1_000_000),
            segment_instances: iterations / 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaStats {
    pub lemma: Lemma,
    pub instances: u64,
    pub violations: u64,
    pub min_slack: f64,
    /// Seed of the first violating instance, if any.
    pub failing_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzReport {
    pub stats: Vec<LemmaStats>,
}

impl FuzzReport {
    pub fn violations(&self) -> u64 {
        self.stats.iter().map(|s| s.violations).sum()
    }

    pub fn get(&self, lemma: Lemma) -> Option<&LemmaStats> {
        self.stats.iter().find(|s| s.lemma == lemma)
    }
}

fn lemma_key(lemma: Lemma) -> u64 {
    Lemma::ALL.iter().position(|l| *l == lemma).unwrap() as u64
}

/// Seed of instance `index` of `lemma` in a run seeded with `seed`.
pub fn instance_seed(seed: u64, lemma: Lemma, index: u64) -> u64 {
    derive_seed(seed, &[lemma_key(lemma), index])
}

fn fuzz_one(lemma: Lemma, count: u64, seed: u64, exec: Execution) -> Result<LemmaStats> {
    let results = exec.map((0..count).collect(), |i| {
        let s = instance_seed(seed, lemma, i);
        draw(lemma, s).check().map(|c| (s, c))
    });
    let mut stats = LemmaStats {
        lemma,
        instances: count,
        violations: 0,
        min_slack: f64::INFINITY,
        failing_seed: None,
    };
    for r in results {
        let (s, c) = r?;
        stats.min_slack = stats.min_slack.min(c.slack());
        if !c.ok {
            stats.violations += 1;
            stats.failing_seed.get_or_insert(s);
        }
    }
    Ok(stats)
}

/// Runs every oracle according to `plan`.
pub fn run_fuzz(plan: FuzzPlan, seed: u64, exec: Execution) -> Result<FuzzReport> {
    let mut stats = vec![
        fuzz_one(Lemma::EpsProximity, plan.lemma_draws, seed, exec)?,
        fuzz_one(Lemma::ProgressInvariant, plan.lemma_draws, seed, exec)?,
        fuzz_one(Lemma::KlL1, plan.lemma_draws, seed, exec)?,
    ];
    let scan = if plan.erfi_max_len >= 2 {
        scan_erfi_sum(plan.erfi_max_len)
    } else {
        scan_erfi_sum(1)
    };
    stats.push(LemmaStats {
        lemma: Lemma::ErfiSum,
        instances: scan.checked,
        violations: scan.violations,
        min_slack: scan.min_slack,
        failing_seed: None,
    });
    stats.push(fuzz_one(
        Lemma::SegmentSum,
        plan.segment_instances,
        seed,
        exec,
    )?);
    Ok(FuzzReport { stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible() {
        for lemma in Lemma::ALL {
            for i in 0..20 {
                let s = instance_seed(99, lemma, i);
                assert_eq!(draw(lemma, s), draw(lemma, s));
            }
        }
    }

    #[test]
    fn zero_iterations_is_vacuous() {
        let r = run_fuzz(FuzzPlan::from_iterations(0), 1, Execution::Sequential).unwrap();
        assert_eq!(r.violations(), 0);
        assert!(r.stats.iter().all(|s| s.instances == 0));
    }

    #[test]
    fn small_run_has_no_violations() {
        let r = run_fuzz(FuzzPlan::from_iterations(2000), 5, Execution::default()).unwrap();
        for s in &r.stats {
            assert_eq!(s.violations, 0, "{s:?}");
        }
    }

    #[test]
    fn modes_agree() {
        let plan = FuzzPlan::from_iterations(300);
        let a = run_fuzz(plan, 8, Execution::Sequential).unwrap();
        let b = run_fuzz(plan, 8, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
