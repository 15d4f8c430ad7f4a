//! Generalized Probability Smoothing.
//!
//! After seeing letter `y` the estimate `p` becomes
//!
//! ```text
//! p'(y) = a * p(y) + (1 - a) * (1 - e)
//! p'(x) = a * p(x) + (1 - a) * e / (N - 1)     for x != y
//! ```
//!
//! where `a` is the smoothing rate and `e` the share factor in effect for the
//! current step. The rate and share factor are either constant
//! ([`PsSchedule::Fixed`]) or follow the time-varying rule of
//! [`schedule_varying`].

use crate::dist::{Alphabet, Distribution};
use crate::error::{Error, Result};
use crate::models::SequentialModel;

/// Fixed parameters tuned for a known horizon `horizon`:
/// `alpha = exp(-sqrt(ln(N T) / (N T)))` and `eps = 1 / T`.
pub fn schedule_fixed(alphabet: Alphabet, horizon: u64) -> Result<(f64, f64)> {
    if horizon < 2 {
        return Err(Error::domain(format!(
            "fixed schedule needs a horizon of at least 2, got {horizon}"
        )));
    }
    let nt = alphabet.size() as f64 * horizon as f64;
    let alpha = (-(nt.ln() / nt).sqrt()).exp();
    Ok((alpha, 1.0 / horizon as f64))
}

/// Time-varying parameters for step `t >= 1`:
/// `eps_t = 1 / (t + 1)` and `alpha_t = exp(-sqrt(ln(N / eps_t) / (2 N t)))`.
///
/// The looser form `alpha_t ~ exp(-sqrt(ln(N t) / (N t)))`, `eps_t ~ 1/t` is
/// not used; this rule is the one the varying-rate redundancy bound is
/// stated for.
pub fn schedule_varying(alphabet: Alphabet, t: u64) -> Result<(f64, f64)> {
    if t < 1 {
        return Err(Error::domain("varying schedule is indexed from step 1"));
    }
    Ok(varying_at(alphabet.size() as f64, t))
}

#[inline]
fn varying_at(n: f64, t: u64) -> (f64, f64) {
    let t = t as f64;
    let eps = 1.0 / (t + 1.0);
    let alpha = (-((n * (t + 1.0)).ln() / (2.0 * n * t)).sqrt()).exp();
    (alpha, eps)
}

/// One smoothing step applied to an arbitrary distribution.
pub fn smooth(p: &Distribution, letter: usize, alpha: f64, eps: f64) -> Result<Distribution> {
    p.alphabet().check(letter)?;
    let mut out = p.mass().to_vec();
    smooth_in_place(&mut out, letter, alpha, eps);
    Ok(Distribution::from_normalized(out))
}

#[inline]
fn smooth_in_place(p: &mut [f64], letter: usize, alpha: f64, eps: f64) {
    let n = p.len() as f64;
    let rest = (1.0 - alpha) * eps / (n - 1.0);
    for m in p.iter_mut() {
        *m = alpha * *m + rest;
    }
    p[letter] += (1.0 - alpha) * (1.0 - eps) - rest;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PsSchedule {
    Fixed { alpha: f64, eps: f64 },
    Varying,
}

impl PsSchedule {
    /// Rate and share factor used while consuming the `t`-th letter (1-based).
    #[inline]
    pub fn at(&self, alphabet: Alphabet, t: u64) -> (f64, f64) {
        match *self {
            PsSchedule::Fixed { alpha, eps } => (alpha, eps),
            PsSchedule::Varying => varying_at(alphabet.size() as f64, t.max(1)),
        }
    }

    /// Share factor of the first step, which bounds the admissible initial estimate.
    fn first_eps(&self) -> f64 {
        match *self {
            PsSchedule::Fixed { eps, .. } => eps,
            PsSchedule::Varying => 0.5,
        }
    }
}

/// Probability Smoothing model state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilitySmoothing {
    schedule: PsSchedule,
    estimate: Vec<f64>,
    step: u64,
}

impl ProbabilitySmoothing {
    /// Constant rate `alpha` and share factor `eps`.
    ///
    /// Requires `0 < alpha < 1`, `0 <= eps <= 1 - 1/N` and
    /// `initial(x) >= eps / (N - 1)` for every letter.
    pub fn fixed(alpha: f64, eps: f64, initial: Distribution) -> Result<Self> {
        let n = initial.len() as f64;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "smoothing rate {alpha} not in (0, 1)"
            )));
        }
        if !(0.0..=1.0 - 1.0 / n).contains(&eps) {
            return Err(Error::domain(format!(
                "share factor {eps} not in [0, 1 - 1/N] for N = {n}"
            )));
        }
        Self::with_schedule(PsSchedule::Fixed { alpha, eps }, initial)
    }

    /// Time-varying schedule; requires `initial(x) >= 1 / (2 (N - 1))`.
    pub fn varying(initial: Distribution) -> Result<Self> {
        Self::with_schedule(PsSchedule::Varying, initial)
    }

    fn with_schedule(schedule: PsSchedule, initial: Distribution) -> Result<Self> {
        let n = initial.len() as f64;
        let floor = schedule.first_eps() / (n - 1.0);
        // Tolerate representation error of e.g. 1/3 against 1/3.
        if initial.min_mass() < floor * (1.0 - 1e-12) {
            return Err(Error::domain(format!(
                "initial estimate has mass {} below the floor {floor}",
                initial.min_mass()
            )));
        }
        Ok(ProbabilitySmoothing {
            schedule,
            estimate: initial.into_vec(),
            step: 0,
        })
    }

    /// Fixed parameters from [`schedule_fixed`] with a uniform start.
    pub fn for_horizon(alphabet: Alphabet, horizon: u64) -> Result<Self> {
        let (alpha, eps) = schedule_fixed(alphabet, horizon)?;
        Self::fixed(alpha, eps, Distribution::uniform(alphabet))
    }

    /// Time-varying parameters with a uniform start.
    pub fn anytime(alphabet: Alphabet) -> Self {
        ProbabilitySmoothing {
            schedule: PsSchedule::Varying,
            estimate: Distribution::uniform(alphabet).into_vec(),
            step: 0,
        }
    }

    pub fn schedule(&self) -> PsSchedule {
        self.schedule
    }

    pub fn estimate(&self) -> &[f64] {
        &self.estimate
    }
}

impl SequentialModel for ProbabilitySmoothing {
    fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.estimate.len()).expect("estimate has at least two letters")
    }

    fn steps(&self) -> u64 {
        self.step
    }

    fn predict(&self) -> Distribution {
        Distribution::from_normalized(self.estimate.clone())
    }

    #[inline]
    fn probability(&self, letter: usize) -> f64 {
        self.estimate[letter]
    }

    fn update(&mut self, letter: usize) -> Result<()> {
        self.alphabet().check(letter)?;
        let t = self.step + 1;
        let (alpha, eps) = self.schedule.at(self.alphabet(), t);
        smooth_in_place(&mut self.estimate, letter, alpha, eps);
        self.step = t;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> Distribution {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn update_binary_no_share() {
        let mut ps = ProbabilitySmoothing::fixed(0.5, 0.0, dist(&[0.5, 0.5])).unwrap();
        ps.update(0).unwrap();
        assert_eq!(ps.estimate(), &[0.75, 0.25]);
        ps.update(0).unwrap();
        assert_eq!(ps.predict().mass(), &[0.875, 0.125]);
    }

    #[test]
    fn update_binary_with_share() {
        let mut ps = ProbabilitySmoothing::fixed(0.9, 0.25, dist(&[0.5, 0.5])).unwrap();
        ps.update(0).unwrap();
        let p = ps.estimate();
        assert!((p[0] - 0.525).abs() < 1e-15);
        assert!((p[1] - 0.475).abs() < 1e-15);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn update_ternary_matches_direct_formula() {
        let (a, e) = (0.8_f64, 0.3_f64);
        let third = 1.0 / 3.0;
        let mut ps = ProbabilitySmoothing::fixed(a, e, dist(&[third; 3])).unwrap();
        ps.update(1).unwrap();
        let hit = a * third + (1.0 - a) * (1.0 - e);
        let miss = a * third + (1.0 - a) * e / 2.0;
        let p = ps.estimate();
        assert!((p[0] - miss).abs() < 1e-15);
        assert!((p[1] - hit).abs() < 1e-15);
        assert!((p[2] - miss).abs() < 1e-15);
        // 0.8/3 + 0.2*0.7 and 0.8/3 + 0.2*0.15
        assert!((hit - 0.406_666_666_666_666_7).abs() < 1e-15);
        assert!((miss - 0.296_666_666_666_666_6).abs() < 1e-15);
    }

    #[test]
    fn fresh_state_predicts_initial() {
        let ps = ProbabilitySmoothing::fixed(0.7, 0.1, dist(&[0.5, 0.5])).unwrap();
        assert_eq!(ps.predict().mass(), &[0.5, 0.5]);
        assert_eq!(ps.steps(), 0);
    }

    #[test]
    fn out_of_range_letter() {
        let mut ps = ProbabilitySmoothing::anytime(Alphabet::BINARY);
        assert!(matches!(ps.update(2), Err(Error::LetterOutOfRange { .. })));
        assert_eq!(ps.steps(), 0);
    }

    #[test]
    fn fixed_parameter_validation() {
        let u = Distribution::uniform(Alphabet::BINARY);
        assert!(ProbabilitySmoothing::fixed(0.0, 0.1, u.clone()).is_err());
        assert!(ProbabilitySmoothing::fixed(1.0, 0.1, u.clone()).is_err());
        assert!(ProbabilitySmoothing::fixed(0.5, 0.6, u.clone()).is_err());
        assert!(ProbabilitySmoothing::fixed(0.5, -0.1, u.clone()).is_err());
        assert!(ProbabilitySmoothing::fixed(0.5, 0.5, u).is_ok());
        // initial below eps / (N - 1)
        assert!(ProbabilitySmoothing::fixed(0.5, 0.2, dist(&[0.9, 0.1])).is_err());
        assert!(ProbabilitySmoothing::varying(dist(&[0.6, 0.4])).is_err());
        let third = Distribution::uniform(Alphabet::new(3).unwrap());
        assert!(ProbabilitySmoothing::varying(third).is_ok());
    }

    #[test]
    fn fixed_schedule_values() {
        let (a, e) = schedule_fixed(Alphabet::BINARY, 8192).unwrap();
        assert_eq!(e, 1.0 / 8192.0);
        assert!((a - (-(16384f64.ln() / 16384.0).sqrt()).exp()).abs() < 1e-15);
        assert!((a - 0.9760).abs() < 5e-5);

        let (a, e) = schedule_fixed(Alphabet::BINARY, 4).unwrap();
        assert_eq!(e, 0.25);
        assert!((a - (-(8f64.ln() / 8.0).sqrt()).exp()).abs() < 1e-15);

        assert!(schedule_fixed(Alphabet::BINARY, 1).is_err());
    }

    #[test]
    fn varying_schedule_values() {
        let (a, e) = schedule_varying(Alphabet::BINARY, 1).unwrap();
        assert_eq!(e, 0.5);
        assert!((a - (-(4f64.ln() / 4.0).sqrt()).exp()).abs() < 1e-15);
        assert!((a - 0.555).abs() < 5e-4);

        let (a, e) = schedule_varying(Alphabet::new(4).unwrap(), 100).unwrap();
        assert_eq!(e, 1.0 / 101.0);
        assert!((a - (-(404f64.ln() / 800.0).sqrt()).exp()).abs() < 1e-15);

        assert!(schedule_varying(Alphabet::BINARY, 0).is_err());
    }

    #[test]
    fn varying_schedule_monotone() {
        let mut prev = schedule_varying(Alphabet::BINARY, 1).unwrap();
        for t in 2..=100_000 {
            let cur = schedule_varying(Alphabet::BINARY, t).unwrap();
            assert!(cur.0 >= prev.0, "alpha decreased at t={t}");
            assert!(cur.1 <= prev.1, "eps increased at t={t}");
            prev = cur;
        }
    }
}
