//! Piecewise stationary sources.
//!
//! Time is 1-based: a source for sequences of length `T` partitions
//! `{1, .., T}` into consecutive segments `[start, end)` and predicts one fixed
//! distribution inside each segment.

use std::fmt::{self, Write as _};
use std::ops::Range;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::dist::{Alphabet, Distribution};
use crate::error::{Error, Result};
use crate::lab::kernel::l1_variation;

/// Consecutive segments `[b_k, b_{k+1})` with `b_0 = 1` and `b_n = T + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    boundaries: Vec<u64>,
}

/// A boundary between two adjacent segments: `left` ends where `right`
/// starts, at time `at`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub at: u64,
    pub left: usize,
    pub right: usize,
}

impl Partition {
    pub fn new(boundaries: Vec<u64>) -> Result<Self> {
        if boundaries.len() < 2 || boundaries[0] != 1 {
            return Err(Error::domain(
                "partition boundaries must start at 1 and define at least one segment",
            ));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "partition boundaries must be strictly increasing",
            ));
        }
        Ok(Partition { boundaries })
    }

    /// The one-segment partition of `{1, .., len}`.
    pub fn whole(len: u64) -> Result<Self> {
        Partition::new(vec![1, len + 1])
    }

    /// Builds a partition of `{1, .., len}` from interior cut points.
    pub fn from_cuts(len: u64, cuts: &[u64]) -> Result<Self> {
        let mut b = Vec::with_capacity(cuts.len() + 2);
        b.push(1);
        b.extend_from_slice(cuts);
        b.push(len + 1);
        Partition::new(b)
    }

    /// Sequence length `T`.
    pub fn len(&self) -> u64 {
        self.boundaries[self.boundaries.len() - 1] - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_segments(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn boundaries(&self) -> &[u64] {
        &self.boundaries
    }

    /// Segment `k` as a half-open range of 1-based times.
    pub fn segment(&self, k: usize) -> Range<u64> {
        self.boundaries[k]..self.boundaries[k + 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = Range<u64>> + '_ {
        self.boundaries.windows(2).map(|w| w[0]..w[1])
    }

    /// Index of the segment containing time `t`.
    pub fn segment_of(&self, t: u64) -> Result<usize> {
        if t < 1 || t > self.len() {
            return Err(Error::domain(format!(
                "time {t} outside 1..={}",
                self.len()
            )));
        }
        Ok(self.boundaries.partition_point(|&b| b <= t) - 1)
    }

    pub fn transitions(&self) -> Vec<Transition> {
        (1..self.num_segments())
            .map(|k| Transition {
                at: self.boundaries[k],
                left: k - 1,
                right: k,
            })
            .collect()
    }
}

/// A piecewise stationary source: a partition plus one distribution per segment.
#[derive(Clone, Debug, PartialEq)]
pub struct PwsSpec {
    partition: Partition,
    dists: Vec<Distribution>,
    seed: Option<u64>,
}

impl PwsSpec {
    pub fn new(partition: Partition, dists: Vec<Distribution>) -> Result<Self> {
        if dists.len() != partition.num_segments() {
            return Err(Error::domain(format!(
                "{} distributions for {} segments",
                dists.len(),
                partition.num_segments()
            )));
        }
        let a = dists[0].alphabet();
        if dists.iter().any(|d| d.alphabet() != a) {
            return Err(Error::domain(
                "segment distributions over different alphabets",
            ));
        }
        Ok(PwsSpec {
            partition,
            dists,
            seed: None,
        })
    }

    /// Stationary source: one segment covering `{1, .., len}`.
    pub fn stationary(len: u64, dist: Distribution) -> Result<Self> {
        PwsSpec::new(Partition::whole(len)?, vec![dist])
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn distributions(&self) -> &[Distribution] {
        &self.dists
    }

    pub fn alphabet(&self) -> Alphabet {
        self.dists[0].alphabet()
    }

    pub fn len(&self) -> u64 {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    /// Seed this source was sampled from, if it was sampled.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Distribution in effect at time `t` (1-based).
    pub fn predict(&self, t: u64) -> Result<&Distribution> {
        Ok(&self.dists[self.partition.segment_of(t)?])
    }

    /// Ideal code length in nats of `x` (`x[0]` is time 1). Infinite if a
    /// segment assigns zero mass to an observed letter.
    pub fn code_length(&self, x: &[usize]) -> Result<f64> {
        if x.len() as u64 != self.len() {
            return Err(Error::domain(format!(
                "sequence of length {} for a source of length {}",
                x.len(),
                self.len()
            )));
        }
        self.alphabet().check_all(x)?;
        Ok(self
            .partition
            .segments()
            .zip(&self.dists)
            .map(|(seg, d)| {
                x[(seg.start - 1) as usize..(seg.end - 1) as usize]
                    .iter()
                    .map(|&a| -d[a].ln())
                    .sum::<f64>()
            })
            .sum())
    }

    /// One plus the total L1 variation across the transitions.
    pub fn complexity(&self) -> f64 {
        1.0 + self
            .partition
            .transitions()
            .iter()
            .map(|tr| l1_variation(&self.dists[tr.left], &self.dists[tr.right]))
            .sum::<f64>()
    }

    /// Every segment distribution mixed toward uniform: `(1 - eps) p + eps / N`.
    pub fn mix_uniform(&self, eps: f64) -> PwsSpec {
        PwsSpec {
            partition: self.partition.clone(),
            dists: self.dists.iter().map(|d| d.mix_uniform(eps)).collect(),
            seed: None,
        }
    }

    /// Text form: a header line `N T S`, then one line
    /// `start end p(1) .. p(N)` per segment. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {}\n",
            self.alphabet().size(),
            self.len(),
            self.partition.num_segments()
        );
        for (seg, d) in self.partition.segments().zip(&self.dists) {
            write!(s, "{} {}", seg.start, seg.end).unwrap();
            for m in d.mass() {
                write!(s, " {m:?}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for PwsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for PwsSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Format(format!("line {line}: {msg}"));
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let head: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(1, "expected integers `N T S`")))
            .collect::<Result<_>>()?;
        let [n, len, s] = head[..] else {
            return Err(bad(1, "expected `N T S`"));
        };
        let mut boundaries = vec![1];
        let mut dists = Vec::with_capacity(s as usize);
        for (i, line) in lines {
            let lineno = i + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 + n as usize {
                return Err(bad(
                    lineno,
                    "expected `start end` followed by N probabilities",
                ));
            }
            let start: u64 = fields[0].parse().map_err(|_| bad(lineno, "bad start"))?;
            let end: u64 = fields[1].parse().map_err(|_| bad(lineno, "bad end"))?;
            if start != *boundaries.last().unwrap() {
                return Err(bad(
                    lineno,
                    "segment does not start where the previous one ended",
                ));
            }
            boundaries.push(end);
            let mass = fields[2..]
                .iter()
                .map(|t| t.parse::<f64>().map_err(|_| bad(lineno, "bad probability")))
                .collect::<Result<Vec<_>>>()?;
            dists.push(Distribution::new(mass).map_err(|e| bad(lineno, &e.to_string()))?);
        }
        if dists.len() as u64 != s {
            return Err(Error::Format(format!(
                "expected {s} segments, found {}",
                dists.len()
            )));
        }
        let partition = Partition::new(boundaries)?;
        if partition.len() != len {
            return Err(Error::Format(format!(
                "segments cover {} letters, header says {len}",
                partition.len()
            )));
        }
        PwsSpec::new(partition, dists)
    }
}

/// Uniform draw from the probability simplex (normalized exponential spacings).
pub fn sample_simplex<R: Rng + ?Sized>(alphabet: Alphabet, rng: &mut R) -> Distribution {
    loop {
        let w: Vec<f64> = (0..alphabet.size())
            .map(|_| rng.sample::<f64, _>(Exp1))
            .collect();
        if let Ok(d) = Distribution::from_weights(w) {
            return d;
        }
    }
}

/// Samples a source with exactly `segments` segments: the `segments - 1` cut
/// points are a uniform subset of `{2, .., len}` and each segment distribution
/// is uniform on the simplex.
pub fn sample_pws_with<R: Rng + ?Sized>(
    alphabet: Alphabet,
    len: u64,
    segments: u64,
    rng: &mut R,
) -> Result<PwsSpec> {
    if segments < 1 || segments > len {
        return Err(Error::domain(format!(
            "segment count {segments} must lie in 1..={len}"
        )));
    }
    let mut cuts: Vec<u64> = index::sample(rng, (len - 1) as usize, (segments - 1) as usize)
        .into_iter()
        .map(|i| i as u64 + 2)
        .collect();
    cuts.sort_unstable();
    let partition = Partition::from_cuts(len, &cuts)?;
    let dists = (0..segments)
        .map(|_| sample_simplex(alphabet, rng))
        .collect();
    PwsSpec::new(partition, dists)
}

/// [`sample_pws_with`] driven by a ChaCha8 generator seeded with `seed`; the
/// seed is recorded on the result.
pub fn sample_pws(alphabet: Alphabet, len: u64, segments: u64, seed: u64) -> Result<PwsSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = sample_pws_with(alphabet, len, segments, &mut rng)?;
    spec.seed = Some(seed);
    Ok(spec)
}

#[inline]
fn draw_letter<R: Rng + ?Sized>(d: &Distribution, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mass = d.mass();
    for (a, m) in mass.iter().enumerate() {
        acc += m;
        if u < acc {
            return a;
        }
    }
    // round-off left u above the running sum; fall back to the last letter with mass
    mass.iter()
        .rposition(|m| *m > 0.0)
        .unwrap_or(mass.len() - 1)
}

/// Draws `x_t` independently from the segment distribution in effect at `t`.
pub fn sample_sequence_with<R: Rng + ?Sized>(spec: &PwsSpec, rng: &mut R) -> Vec<usize> {
    let mut x = Vec::with_capacity(spec.len() as usize);
    for (seg, d) in spec.partition.segments().zip(&spec.dists) {
        for _ in seg {
            x.push(draw_letter(d, rng));
        }
    }
    x
}

pub fn sample_sequence(spec: &PwsSpec, seed: u64) -> Vec<usize> {
    sample_sequence_with(spec, &mut ChaCha8Rng::seed_from_u64(seed))
}
