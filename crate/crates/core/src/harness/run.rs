use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{derive_seed, Execution};
use crate::harness::config::ExperimentConfig;
use crate::harness::report::{ResultRow, ResultTable};
use crate::lab::total_code_length;
use crate::models::ModelSpec;
use crate::pws::{sample_pws_with, sample_sequence_with};

/// Seed of trial `trial` at segment count `segments`.
pub fn trial_seed(seed: u64, segments: u64, trial: u64) -> u64 {
    derive_seed(seed, &[segments, trial])
}

fn resolve(config: &ExperimentConfig) -> Result<Vec<ModelSpec>> {
    config
        .models
        .iter()
        .map(|k| k.configure(config.alphabet, config.len))
        .collect()
}

fn run_trial_with(
    config: &ExperimentConfig,
    specs: &[ModelSpec],
    segments: u64,
    trial: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, segments, trial));
    // one sequence shared by every model in the roster; redraw in the
    // measure-zero case of a letter the source cannot emit
    let (x, reference) = loop {
        let source = sample_pws_with(config.alphabet, config.len, segments, &mut rng)?;
        let x = sample_sequence_with(&source, &mut rng);
        let reference = source.code_length(&x)?;
        if reference.is_finite() {
            break (x, reference);
        }
    };
    specs
        .iter()
        .map(|spec| {
            let mut model = spec.build(config.alphabet)?;
            Ok(total_code_length(&mut model, &x)? - reference)
        })
        .collect()
}

/// Redundancy (nats) of each roster model on one trial, in roster order.
/// Every model starts fresh and sees the same sampled sequence.
pub fn run_trial(config: &ExperimentConfig, segments: u64, trial: u64) -> Result<Vec<f64>> {
    config.validate()?;
    run_trial_with(config, &resolve(config)?, segments, trial)
}

/// Mean and sample standard deviation (zero for a single value).
fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Runs every (segment count, trial) pair and averages per model.
pub fn run_experiment(config: &ExperimentConfig, exec: Execution) -> Result<ResultTable> {
    config.validate()?;
    let specs = resolve(config)?;
    let jobs: Vec<(u64, u64)> = config
        .segments
        .iter()
        .flat_map(|&s| (0..config.trials).map(move |t| (s, t)))
        .collect();
    let results = exec.map(jobs, |(s, t)| run_trial_with(config, &specs, s, t));

    // jobs are grouped by segment count, trials in order
    let mut rows = Vec::new();
    let mut results = results.into_iter();
    for &s in &config.segments {
        let per_trial = (0..config.trials)
            .map(|_| results.next().unwrap())
            .collect::<Result<Vec<_>>>()?;
        for (m, kind) in config.models.iter().enumerate() {
            let values: Vec<f64> = per_trial.iter().map(|r| r[m]).collect();
            let (mean, std_dev) = mean_std(&values);
            if !mean.is_finite() {
                return Err(Error::domain(format!(
                    "non-finite mean redundancy for {kind} at S={s}"
                )));
            }
            rows.push(ResultRow {
                segments: s,
                model: *kind,
                mean,
                std_dev,
                trials: config.trials,
            });
        }
    }
    Ok(ResultTable::new(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::model_code_length;
    use crate::models::{KrichevskyTrofimov, KtVariant, ModelKind};
    use crate::pws::PwsSpec;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            len: 256,
            segments: vec![1, 4, 16],
            trials: 5,
            models: vec![ModelKind::Ps1, ModelKind::Kt, ModelKind::PtwKt],
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn single_kt_trial_is_the_ledger_difference() {
        let cfg = ExperimentConfig {
            len: 300,
            segments: vec![1],
            trials: 1,
            models: vec![ModelKind::Kt],
            ..ExperimentConfig::default()
        };
        let table = run_experiment(&cfg, Execution::Sequential).unwrap();
        assert_eq!(table.rows().len(), 1);

        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, 1, 0));
        let src: PwsSpec = sample_pws_with(cfg.alphabet, 300, 1, &mut rng).unwrap();
        let x = sample_sequence_with(&src, &mut rng);
        let mut kt = KrichevskyTrofimov::new(cfg.alphabet, KtVariant::Plain);
        let expected =
            model_code_length(&mut kt, &x).unwrap().total() - src.code_length(&x).unwrap();
        let row = &table.rows()[0];
        assert!((row.mean - expected).abs() < 1e-9);
        assert_eq!(row.std_dev, 0.0);
    }

    #[test]
    fn deterministic_and_mode_independent() {
        let cfg = small();
        let a = run_experiment(&cfg, Execution::Parallel).unwrap();
        let b = run_experiment(&cfg, Execution::Sequential).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows().len(), 9);
    }

    #[test]
    fn trials_do_not_depend_on_order() {
        let cfg = small();
        let forward: Vec<Vec<f64>> = (0..5).map(|t| run_trial(&cfg, 4, t).unwrap()).collect();
        let backward: Vec<Vec<f64>> = (0..5)
            .rev()
            .map(|t| run_trial(&cfg, 4, t).unwrap())
            .collect();
        for t in 0..5 {
            assert_eq!(forward[t], backward[4 - t]);
        }
    }

    #[test]
    fn mean_and_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
