//! Numeric oracles for the inequalities the redundancy bounds are built from.
//!
//! Every check is normalized to the form `lhs <= rhs` and passes when
//! `lhs <= rhs + LEMMA_SLACK`.

use crate::dist::{Alphabet, Distribution};
use crate::error::{Error, Result};
use crate::lab::kernel::{kl_unchecked, l1_variation};
use crate::models::smooth;
use crate::pws::Partition;

/// Absolute slack granted to every inequality oracle.
pub const LEMMA_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl InequalityCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            lhs,
            rhs,
            ok: lhs <= rhs + LEMMA_SLACK,
        }
    }

    /// `rhs - lhs`; negative on a violation.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn check_rate_and_share(alphabet: Alphabet, alpha: f64, eps: f64) -> Result<()> {
    let n = alphabet.size() as f64;
    if !(alpha > 0.0 && alpha < 1.0) || !(0.0..=1.0 - 1.0 / n).contains(&eps) {
        return Err(Error::domain(format!(
            "alpha={alpha}, eps={eps} violate 0<alpha<1, 0<=eps<=1-1/N"
        )));
    }
    Ok(())
}

fn same_size(a: &Distribution, b: &Distribution) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::domain("distributions over different alphabets"));
    }
    Ok(())
}

/// Share-factor proximity: with `p0 = smooth(p, y, alpha, 0)` and
/// `pe = smooth(p, y, alpha, eps)`,
/// `D(q || pe) - ln(1/(1-eps)) <= D(q || p0)`.
pub fn check_eps_proximity(
    p: &Distribution,
    q: &Distribution,
    y: usize,
    alpha: f64,
    eps: f64,
) -> Result<InequalityCheck> {
    same_size(p, q)?;
    check_rate_and_share(p.alphabet(), alpha, eps)?;
    let p0 = smooth(p, y, alpha, 0.0)?;
    let pe = smooth(p, y, alpha, eps)?;
    let lhs = kl_unchecked(q.mass(), pe.mass()) + (-eps).ln_1p();
    let rhs = kl_unchecked(q.mass(), p0.mass());
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Progress invariant for one smoothing step `p' = smooth(p, y, alpha, eps)`:
///
/// ```text
/// ln(1/p(y)) - ln(1/q(y))
///   <= [D(q||p) - D(q||p') + ln(1/(1-eps))] / ln(1/alpha)
///      + N [D(u||p) - D(u||p') + ln(1/((1-eps) alpha))]
/// ```
///
/// Requires `p > 0` everywhere and `q(y) > 0`.
pub fn check_progress_invariant(
    p: &Distribution,
    q: &Distribution,
    y: usize,
    alpha: f64,
    eps: f64,
) -> Result<InequalityCheck> {
    same_size(p, q)?;
    check_rate_and_share(p.alphabet(), alpha, eps)?;
    p.alphabet().check(y)?;
    if p.min_mass() <= 0.0 {
        return Err(Error::domain(
            "progress invariant needs p(x) > 0 everywhere",
        ));
    }
    if q[y] <= 0.0 {
        return Err(Error::domain("progress invariant needs q(y) > 0"));
    }
    let next = smooth(p, y, alpha, eps)?;
    let n = p.len() as f64;
    let log_ratio: Vec<f64> = next
        .mass()
        .iter()
        .zip(p.mass())
        .map(|(a, b)| (a / b).ln())
        .collect();
    // D(r||p) - D(r||p') = sum_x r(x) ln(p'(x)/p(x))
    let progress_q: f64 = q
        .mass()
        .iter()
        .zip(&log_ratio)
        .filter(|(qx, _)| **qx > 0.0)
        .map(|(qx, l)| qx * l)
        .sum();
    let progress_u: f64 = log_ratio.iter().sum::<f64>() / n;
    let inv_alpha = -alpha.ln();
    let inv_keep = -(-eps).ln_1p();

    let lhs = q[y].ln() - p[y].ln();
    let rhs = (progress_q + inv_keep) / inv_alpha + n * (progress_u + inv_keep + inv_alpha);
    Ok(InequalityCheck::new(lhs, rhs))
}

/// For `p, w >= m > 0` entrywise and any `v`:
/// `D(w||p) - D(v||p) <= ln(1/m) * ||w - v||`.
pub fn check_kl_l1(
    p: &Distribution,
    w: &Distribution,
    v: &Distribution,
    m: f64,
) -> Result<InequalityCheck> {
    same_size(p, w)?;
    same_size(p, v)?;
    if m.is_nan() || m <= 0.0 {
        return Err(Error::domain(format!("mass floor {m} must be positive")));
    }
    if p.min_mass() < m || w.min_mass() < m {
        return Err(Error::domain(format!(
            "p and w must put at least {m} on every letter"
        )));
    }
    let lhs = kl_unchecked(w.mass(), p.mass()) - kl_unchecked(v.mass(), p.mass());
    let rhs = -m.ln() * l1_variation(w, v);
    Ok(InequalityCheck::new(lhs, rhs))
}

fn erfi_rhs(t: u64) -> f64 {
    let t = t as f64;
    8.0 * (t / t.ln()).sqrt()
}

/// `sum_{1<t<=T} 1/sqrt(t ln t) <= 8 sqrt(T / ln T)` for `T >= 2`.
pub fn check_erfi_sum(len: u64) -> Result<InequalityCheck> {
    if len < 2 {
        return Err(Error::domain(format!("erfi sum needs T >= 2, got {len}")));
    }
    let lhs: f64 = (2..=len)
        .map(|t| {
            let t = t as f64;
            1.0 / (t * t.ln()).sqrt()
        })
        .sum();
    Ok(InequalityCheck::new(lhs, erfi_rhs(len)))
}

/// Result of checking the erfi-sum inequality for every `T` in a range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErfiScan {
    pub checked: u64,
    pub violations: u64,
    pub min_slack: f64,
    pub max_ratio: f64,
}

/// Checks [`check_erfi_sum`] for every `T` in `2..=max_len` with a running sum.
pub fn scan_erfi_sum(max_len: u64) -> ErfiScan {
    let mut scan = ErfiScan {
        checked: 0,
        violations: 0,
        min_slack: f64::INFINITY,
        max_ratio: 0.0,
    };
    let mut lhs = 0.0;
    for t in 2..=max_len {
        let tf = t as f64;
        lhs += 1.0 / (tf * tf.ln()).sqrt();
        let check = InequalityCheck::new(lhs, erfi_rhs(t));
        scan.checked += 1;
        scan.violations += u64::from(!check.ok);
        scan.min_slack = scan.min_slack.min(check.slack());
        scan.max_ratio = scan.max_ratio.max(check.lhs / check.rhs);
    }
    scan
}

/// Weighted telescoping over a partition of `{1, .., T}`.
///
/// `weights[t - 1]` is `w_t` for `t = 1..=T+1` and must be nondecreasing.
/// `table[k][t - 1]` is `d_t(S_k)` for `t = 1..=T+1`. Every segment
/// `S_k = [a, b)` must satisfy `d_t(S_k) <= cap` for `a <= t <= b`; the
/// endpoint `t = b` is included because the weighted telescoping step uses
/// `d_b(S_k)` as well.
///
/// ```text
/// sum_{S} sum_{t in S} w_t (d_t(S) - d_{t+1}(S))
///   <= w_{T+1} (cap - d_{T+1}(L)) - w_1 (cap - d_1(F))
///      + sum_{(t,A,B)} w_t (d_t(B) - d_t(A))
/// ```
pub fn check_segment_sum(
    partition: &Partition,
    weights: &[f64],
    table: &[Vec<f64>],
    cap: f64,
) -> Result<InequalityCheck> {
    let len = partition.len() as usize;
    let segs = partition.num_segments();
    if weights.len() != len + 1 {
        return Err(Error::domain(format!(
            "need {} weights (w_1..w_(T+1)), got {}",
            len + 1,
            weights.len()
        )));
    }
    if weights.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("weights must be nondecreasing"));
    }
    if table.len() != segs || table.iter().any(|row| row.len() != len + 1) {
        return Err(Error::domain(format!(
            "table must have {segs} rows of {} entries",
            len + 1
        )));
    }
    for (k, seg) in partition.segments().enumerate() {
        let (a, b) = (seg.start as usize, seg.end as usize);
        if table[k][a - 1..b].iter().any(|d| *d > cap) {
            return Err(Error::domain(format!(
                "table values for segment {k} exceed the cap {cap}"
            )));
        }
    }

    let w = |t: usize| weights[t - 1];
    let d = |k: usize, t: usize| table[k][t - 1];

    let mut lhs = 0.0;
    for (k, seg) in partition.segments().enumerate() {
        for t in seg.start as usize..seg.end as usize {
            lhs += w(t) * (d(k, t) - d(k, t + 1));
        }
    }
    let last = segs - 1;
    let mut rhs = w(len + 1) * (cap - d(last, len + 1)) - w(1) * (cap - d(0, 1));
    for tr in partition.transitions() {
        let t = tr.at as usize;
        rhs += w(t) * (d(tr.right, t) - d(tr.left, t));
    }
    Ok(InequalityCheck::new(lhs, rhs))
}
