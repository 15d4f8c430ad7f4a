use crate::error::Result;
use crate::models::SequentialModel;

/// Per-letter code lengths (nats) assigned by a model to a sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeLengthLedger {
    per_step: Vec<f64>,
    total: f64,
}

impl CodeLengthLedger {
    pub fn per_step(&self) -> &[f64] {
        &self.per_step
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn total_bits(&self) -> f64 {
        self.total / std::f64::consts::LN_2
    }

    pub fn len(&self) -> usize {
        self.per_step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_step.is_empty()
    }
}

/// Runs `model` over `x`, recording `ln(1 / p_t(x_t))` for each letter with
/// `p_t` the prediction made before `x_t` is consumed. The model should be
/// fresh; it is left having consumed all of `x`.
pub fn model_code_length<M: SequentialModel + ?Sized>(
    model: &mut M,
    x: &[usize],
) -> Result<CodeLengthLedger> {
    let per_step = x
        .iter()
        .map(|&a| model.observe(a))
        .collect::<Result<Vec<f64>>>()?;
    let total = per_step.iter().sum();
    Ok(CodeLengthLedger { per_step, total })
}

/// Total code length only, without keeping the per-letter ledger.
pub fn total_code_length<M: SequentialModel + ?Sized>(model: &mut M, x: &[usize]) -> Result<f64> {
    x.iter()
        .try_fold(0.0, |acc, &a| Ok(acc + model.observe(a)?))
}
