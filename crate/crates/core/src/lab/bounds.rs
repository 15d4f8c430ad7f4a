//! Closed-form redundancy bounds for Probability Smoothing against a
//! piecewise stationary source, and checks of measured redundancy against
//! them.

use crate::dist::{Alphabet, Distribution};
use crate::error::{Error, Result};
use crate::lab::kernel::kl_unchecked;
use crate::lab::ledger::total_code_length;
use crate::models::ProbabilitySmoothing;
use crate::pws::PwsSpec;

/// Absolute tolerance when comparing measured redundancy against a bound.
pub const BOUND_TOLERANCE: f64 = 1e-6;

/// The three named parts of a redundancy bound, in nats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundTerms {
    /// Grows with the sequence length, independent of the source.
    pub penalty: f64,
    /// Proportional to the source complexity.
    pub complexity: f64,
    /// `N * D(u || initial)`.
    pub initial: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.penalty + self.complexity + self.initial
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub measured: f64,
    pub bound: f64,
    pub terms: BoundTerms,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(measured: f64, terms: BoundTerms) -> Self {
        let bound = terms.total();
        BoundReport {
            measured,
            bound,
            terms,
            satisfied: measured <= bound + BOUND_TOLERANCE,
        }
    }

    /// `bound - measured`; negative when violated.
    pub fn slack(&self) -> f64 {
        self.bound - self.measured
    }

    /// The same measurement against `factor` times the bound.
    pub fn scaled(&self, factor: f64) -> Self {
        let terms = BoundTerms {
            penalty: self.terms.penalty * factor,
            complexity: self.terms.complexity * factor,
            initial: self.terms.initial * factor,
        };
        BoundReport::new(self.measured, terms)
    }

    /// `measured,bound,term1,term2,term3,satisfied` with the terms in
    /// penalty, complexity, initial order.
    pub fn to_csv_record(&self) -> String {
        format!(
            "{:?},{:?},{:?},{:?},{:?},{}",
            self.measured,
            self.bound,
            self.terms.penalty,
            self.terms.complexity,
            self.terms.initial,
            self.satisfied
        )
    }

    pub fn from_csv_record(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 6 {
            return Err(Error::Format(format!("expected 6 fields, got {}", f.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Format(format!("bad number {s:?}")))
        };
        let satisfied = f[5]
            .parse::<bool>()
            .map_err(|_| Error::Format(format!("bad flag {:?}", f[5])))?;
        Ok(BoundReport {
            measured: num(f[0])?,
            bound: num(f[1])?,
            terms: BoundTerms {
                penalty: num(f[2])?,
                complexity: num(f[3])?,
                initial: num(f[4])?,
            },
            satisfied,
        })
    }
}

fn check_complexity(c: f64) -> Result<()> {
    if c.is_nan() || c < 1.0 {
        return Err(Error::domain(format!("source complexity {c} is below 1")));
    }
    Ok(())
}

fn initial_term(alphabet: Alphabet, initial: &Distribution) -> Result<f64> {
    if initial.alphabet() != alphabet {
        return Err(Error::domain("initial estimate over a different alphabet"));
    }
    let u = Distribution::uniform(alphabet);
    Ok(alphabet.size() as f64 * kl_unchecked(u.mass(), initial.mass()))
}

/// Bound for fixed parameters `(alpha, eps, initial)` over `len` letters
/// against a source of complexity `complexity`:
///
/// ```text
/// [ln(1/(1-e)) / ln(1/a) + N ln(1/a) + (N+1) ln(1/(1-e))] T
///   + ln(N/e) / ln(1/a) * C
///   + N D(u || p)
/// ```
///
/// The complexity term is infinite when `eps = 0`.
pub fn fixed_bound(
    alphabet: Alphabet,
    len: u64,
    alpha: f64,
    eps: f64,
    initial: &Distribution,
    complexity: f64,
) -> Result<BoundTerms> {
    let n = alphabet.size() as f64;
    if len < 1 {
        return Err(Error::domain("bound needs at least one letter"));
    }
    if !(alpha > 0.0 && alpha < 1.0) || !(0.0..=1.0 - 1.0 / n).contains(&eps) {
        return Err(Error::domain(format!(
            "parameters alpha={alpha}, eps={eps} violate 0<alpha<1, 0<=eps<=1-1/N"
        )));
    }
    check_complexity(complexity)?;
    let inv_alpha = -alpha.ln();
    let inv_keep = -(-eps).ln_1p();
    let penalty = (inv_keep / inv_alpha + n * inv_alpha + (n + 1.0) * inv_keep) * len as f64;
    let complexity_term = if eps == 0.0 {
        f64::INFINITY
    } else {
        (n / eps).ln() / inv_alpha * complexity
    };
    Ok(BoundTerms {
        penalty,
        complexity: complexity_term,
        initial: initial_term(alphabet, initial)?,
    })
}

/// Explicit (non-asymptotic) bound for the time-varying schedule:
///
/// ```text
/// sqrt(2N(T+1) ln(N(T+1))) (1 + C)
///   + sqrt(2N) [1/sqrt(ln 2N) + 8 sqrt(T / ln T)]
///   + N D(u || p) + N ln(T+1) + 1
/// ```
pub fn varying_bound(
    alphabet: Alphabet,
    len: u64,
    complexity: f64,
    initial: &Distribution,
) -> Result<BoundTerms> {
    if len < 2 {
        return Err(Error::domain(format!(
            "varying-schedule bound needs at least 2 letters, got {len}"
        )));
    }
    check_complexity(complexity)?;
    let n = alphabet.size() as f64;
    let t = len as f64;
    let lead = (2.0 * n * (t + 1.0) * (n * (t + 1.0)).ln()).sqrt();
    let erfi = (2.0 * n).sqrt() * (1.0 / (2.0 * n).ln().sqrt() + 8.0 * (t / t.ln()).sqrt());
    Ok(BoundTerms {
        penalty: lead + erfi + n * (t + 1.0).ln() + 1.0,
        complexity: lead * complexity,
        initial: initial_term(alphabet, initial)?,
    })
}

/// Measured redundancy of fixed-parameter smoothing on `x` against `spec`,
/// compared with [`fixed_bound`].
pub fn check_fixed(
    spec: &PwsSpec,
    x: &[usize],
    alpha: f64,
    eps: f64,
    initial: &Distribution,
) -> Result<BoundReport> {
    let mut model = ProbabilitySmoothing::fixed(alpha, eps, initial.clone())?;
    let measured = total_code_length(&mut model, x)? - spec.code_length(x)?;
    let terms = fixed_bound(
        spec.alphabet(),
        spec.len(),
        alpha,
        eps,
        initial,
        spec.complexity(),
    )?;
    Ok(BoundReport::new(measured, terms))
}

/// Measured redundancy of time-varying smoothing on `x` against `spec`,
/// compared with [`varying_bound`].
pub fn check_varying(spec: &PwsSpec, x: &[usize], initial: &Distribution) -> Result<BoundReport> {
    let mut model = ProbabilitySmoothing::varying(initial.clone())?;
    let measured = total_code_length(&mut model, x)? - spec.code_length(x)?;
    let terms = varying_bound(spec.alphabet(), spec.len(), spec.complexity(), initial)?;
    Ok(BoundReport::new(measured, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::schedule_fixed;
    use crate::pws::{sample_pws, sample_sequence};

    #[test]
    fn uniform_start_has_no_initial_term() {
        let a = Alphabet::new(3).unwrap();
        let u = Distribution::uniform(a);
        let t = fixed_bound(a, 100, 0.9, 0.01, &u, 2.0).unwrap();
        assert_eq!(t.initial, 0.0);
        assert!(t.total() > 0.0);
        let t = varying_bound(a, 100, 2.0, &u).unwrap();
        assert_eq!(t.initial, 0.0);
    }

    #[test]
    fn fixed_closed_form_binary_8192() {
        let a = Alphabet::BINARY;
        let (alpha, eps) = schedule_fixed(a, 8192).unwrap();
        let t = fixed_bound(a, 8192, alpha, eps, &Distribution::uniform(a), 3.0).unwrap();
        // independent evaluation of the same expression
        let la = (16384f64.ln() / 16384.0).sqrt();
        let le = (8192.0f64 / 8191.0).ln();
        let penalty = (le / la + 2.0 * la + 3.0 * le) * 8192.0;
        let complexity = (2.0 * 8192.0f64).ln() / la * 3.0;
        assert!((t.penalty - penalty).abs() < 1e-9 * penalty);
        assert!((t.complexity - complexity).abs() < 1e-9 * complexity);
        assert!(
            (t.total() - 1_639.041_079_669).abs() < 1e-6,
            "{}",
            t.total()
        );
    }

    #[test]
    fn zero_share_factor_is_unbounded() {
        let a = Alphabet::BINARY;
        let t = fixed_bound(a, 10, 0.9, 0.0, &Distribution::uniform(a), 1.0).unwrap();
        assert_eq!(t.complexity, f64::INFINITY);
    }

    #[test]
    fn varying_small_case_and_domain() {
        let a = Alphabet::BINARY;
        let u = Distribution::uniform(a);
        let t = varying_bound(a, 2, 1.0, &u).unwrap();
        let lead = (12.0 * 6f64.ln()).sqrt();
        let expected = 2.0 * lead
            + 2.0 * (1.0 / 4f64.ln().sqrt() + 8.0 * (2.0 / 2f64.ln()).sqrt())
            + 2.0 * 3f64.ln()
            + 1.0;
        assert!((t.total() - expected).abs() < 1e-12);
        assert!(varying_bound(a, 1, 1.0, &u).is_err());
        assert!(varying_bound(a, 10, 0.0, &u).is_err());
    }

    #[test]
    fn varying_monotone_in_c_and_t() {
        let a = Alphabet::new(4).unwrap();
        let u = Distribution::uniform(a);
        let mut prev = 0.0;
        for len in 2..500 {
            let b = varying_bound(a, len, 1.5, &u).unwrap().total();
            assert!(b > prev);
            prev = b;
        }
        let mut prev = 0.0;
        for c in 1..50 {
            let b = varying_bound(a, 64, c as f64, &u).unwrap().total();
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn csv_record_round_trip() {
        let a = Alphabet::BINARY;
        let spec = sample_pws(a, 256, 4, 5).unwrap();
        let x = sample_sequence(&spec, 6);
        let (alpha, eps) = schedule_fixed(a, 256).unwrap();
        let r = check_fixed(&spec, &x, alpha, eps, &Distribution::uniform(a)).unwrap();
        assert!(r.satisfied);
        let back = BoundReport::from_csv_record(&r.to_csv_record()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.to_csv_record().split(',').count(), 6);
    }

    #[test]
    fn scaling_to_zero_flags_violation() {
        let a = Alphabet::BINARY;
        let spec = sample_pws(a, 128, 1, 1).unwrap();
        let x = sample_sequence(&spec, 2);
        let r = check_varying(&spec, &x, &Distribution::uniform(a)).unwrap();
        assert!(r.satisfied);
        if r.measured > BOUND_TOLERANCE {
            assert!(!r.scaled(0.0).satisfied);
        }
    }
}
