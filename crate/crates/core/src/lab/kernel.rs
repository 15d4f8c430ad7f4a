//! Entropy, KL divergence and L1 variation, all in nats.

use crate::dist::Distribution;
use crate::error::{Error, Result};

fn same_alphabet(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::domain(format!(
            "distributions over alphabets of size {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// `D(p || q)`; terms with `p(x) = 0` contribute nothing. Requires `q > 0`.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    same_alphabet(p, q)?;
    if let Some(x) = q.mass().iter().position(|m| *m <= 0.0) {
        return Err(Error::domain(format!(
            "KL divergence needs q(x) > 0 everywhere, q({x}) = 0"
        )));
    }
    Ok(kl_unchecked(p.mass(), q.mass()))
}

#[inline]
pub(crate) fn kl_unchecked(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi).ln())
        .sum()
}

pub fn entropy(p: &Distribution) -> f64 {
    p.mass()
        .iter()
        .filter(|m| **m > 0.0)
        .map(|m| -m * m.ln())
        .sum()
}

/// `sum_x |p(x) - q(x)|`, in `[0, 2]`.
pub fn l1_variation(p: &Distribution, q: &Distribution) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    p.mass()
        .iter()
        .zip(q.mass())
        .map(|(a, b)| (a - b).abs())
        .sum()
}
