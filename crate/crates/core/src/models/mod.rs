//! Online elementary models over a finite alphabet.

pub mod kt;
pub mod ps;
pub mod ptw;

use std::fmt;
use std::str::FromStr;

use crate::dist::{Alphabet, Distribution};
use crate::error::{Error, Result};

pub use kt::{KrichevskyTrofimov, KtVariant};
pub use ps::{schedule_fixed, schedule_varying, smooth, ProbabilitySmoothing, PsSchedule};
pub use ptw::PartitionTreeWeighting;

/// Discount used by the count-scaling KT variant in the experiments.
pub const KT_CS_DISCOUNT: f64 = 0.98;

/// A sequential predictor: predicts the next letter, then consumes it.
pub trait SequentialModel {
    fn alphabet(&self) -> Alphabet;

    /// Number of letters consumed so far.
    fn steps(&self) -> u64;

    fn predict(&self) -> Distribution;

    /// Predicted mass of a single letter. Models override this when it is
    /// cheaper than a full prediction.
    fn probability(&self, letter: usize) -> f64 {
        self.predict()[letter]
    }

    fn update(&mut self, letter: usize) -> Result<()>;

    /// Code length in nats of `letter` under the current prediction, then
    /// consumes it. Infinite when the letter had zero mass.
    fn observe(&mut self, letter: usize) -> Result<f64> {
        self.alphabet().check(letter)?;
        let p = self.probability(letter);
        self.update(letter)?;
        Ok(-p.ln())
    }
}

/// Always predicts the uniform distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformModel {
    alphabet: Alphabet,
    step: u64,
}

impl UniformModel {
    pub fn new(alphabet: Alphabet) -> Self {
        UniformModel { alphabet, step: 0 }
    }
}

impl SequentialModel for UniformModel {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn steps(&self) -> u64 {
        self.step
    }

    fn predict(&self) -> Distribution {
        Distribution::uniform(self.alphabet)
    }

    fn probability(&self, _letter: usize) -> f64 {
        1.0 / self.alphabet.size() as f64
    }

    fn update(&mut self, letter: usize) -> Result<()> {
        self.alphabet.check(letter)?;
        self.step += 1;
        Ok(())
    }
}

/// Model roster names used by the experiment harness and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Uniform,
    Ps1,
    Ps2,
    Kt,
    KtCs,
    KtH,
    KtR,
    PtwKt,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::Uniform,
        ModelKind::Ps1,
        ModelKind::Ps2,
        ModelKind::Kt,
        ModelKind::KtCs,
        ModelKind::KtH,
        ModelKind::KtR,
        ModelKind::PtwKt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Uniform => "UNIFORM",
            ModelKind::Ps1 => "PS1",
            ModelKind::Ps2 => "PS2",
            ModelKind::Kt => "KT",
            ModelKind::KtCs => "KT-CS",
            ModelKind::KtH => "KT-H",
            ModelKind::KtR => "KT-R",
            ModelKind::PtwKt => "PTW-KT",
        }
    }

    /// Stable one-byte identifier used in compressed streams.
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    /// Resolves the experiment parameterization for sequences of length `horizon`.
    pub fn configure(self, alphabet: Alphabet, horizon: u64) -> Result<ModelSpec> {
        Ok(match self {
            ModelKind::Uniform => ModelSpec::Uniform,
            ModelKind::Ps1 => {
                let (alpha, eps) = schedule_fixed(alphabet, horizon.max(2))?;
                ModelSpec::PsFixed { alpha, eps }
            }
            ModelKind::Ps2 => ModelSpec::PsVarying,
            ModelKind::Kt => ModelSpec::Kt(KtVariant::Plain),
            ModelKind::KtCs => ModelSpec::Kt(KtVariant::count_scaling(KT_CS_DISCOUNT)?),
            ModelKind::KtH => ModelSpec::Kt(KtVariant::halving(Some(horizon))?),
            ModelKind::KtR => ModelSpec::Kt(KtVariant::Reset),
            ModelKind::PtwKt => ModelSpec::Ptw {
                depth: ptw::depth_for(horizon),
            },
        })
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(wanted))
            .ok_or_else(|| Error::Config(format!("unknown model name {wanted:?}")))
    }
}

/// A fully resolved model configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSpec {
    Uniform,
    /// Fixed-parameter smoothing from a uniform start.
    PsFixed {
        alpha: f64,
        eps: f64,
    },
    /// Time-varying smoothing from a uniform start.
    PsVarying,
    Kt(KtVariant),
    Ptw {
        depth: u32,
    },
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Uniform => ModelKind::Uniform,
            ModelSpec::PsFixed { .. } => ModelKind::Ps1,
            ModelSpec::PsVarying => ModelKind::Ps2,
            ModelSpec::Kt(KtVariant::Plain) => ModelKind::Kt,
            ModelSpec::Kt(KtVariant::CountScale { .. }) => ModelKind::KtCs,
            ModelSpec::Kt(KtVariant::Halve { .. }) => ModelKind::KtH,
            ModelSpec::Kt(KtVariant::Reset) => ModelKind::KtR,
            ModelSpec::Ptw { .. } => ModelKind::PtwKt,
        }
    }

    pub fn build(&self, alphabet: Alphabet) -> Result<AnyModel> {
        Ok(match *self {
            ModelSpec::Uniform => AnyModel::Uniform(UniformModel::new(alphabet)),
            ModelSpec::PsFixed { alpha, eps } => AnyModel::Ps(ProbabilitySmoothing::fixed(
                alpha,
                eps,
                Distribution::uniform(alphabet),
            )?),
            ModelSpec::PsVarying => AnyModel::Ps(ProbabilitySmoothing::anytime(alphabet)),
            ModelSpec::Kt(variant) => AnyModel::Kt(KrichevskyTrofimov::new(alphabet, variant)),
            ModelSpec::Ptw { depth } => {
                AnyModel::Ptw(PartitionTreeWeighting::new(alphabet, depth)?)
            }
        })
    }
}

/// Closed set of models, dispatched statically.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyModel {
    Uniform(UniformModel),
    Ps(ProbabilitySmoothing),
    Kt(KrichevskyTrofimov),
    Ptw(PartitionTreeWeighting),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            AnyModel::Uniform($m) => $body,
            AnyModel::Ps($m) => $body,
            AnyModel::Kt($m) => $body,
            AnyModel::Ptw($m) => $body,
        }
    };
}

impl SequentialModel for AnyModel {
    fn alphabet(&self) -> Alphabet {
        dispatch!(self, m => m.alphabet())
    }

    fn steps(&self) -> u64 {
        dispatch!(self, m => m.steps())
    }

    fn predict(&self) -> Distribution {
        dispatch!(self, m => m.predict())
    }

    fn probability(&self, letter: usize) -> f64 {
        dispatch!(self, m => m.probability(letter))
    }

    fn update(&mut self, letter: usize) -> Result<()> {
        dispatch!(self, m => m.update(letter))
    }

    fn observe(&mut self, letter: usize) -> Result<f64> {
        dispatch!(self, m => m.observe(letter))
    }
}
