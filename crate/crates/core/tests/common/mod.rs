//! Invariant checks shared by the property tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::LN_2;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use probsmooth::codec::{self, StreamDecoder, StreamEncoder};
use probsmooth::lab::total_code_length;
use probsmooth::models::{
    schedule_varying, KrichevskyTrofimov, KtVariant, PartitionTreeWeighting, ProbabilitySmoothing,
};
use probsmooth::pws::{sample_pws, sample_sequence};
use probsmooth::{Alphabet, Distribution, ModelKind, PwsSpec, SequentialModel};

pub type Check = Result<(), TestCaseError>;

pub fn alphabet(max: usize) -> impl Strategy<Value = Alphabet> {
    (2..=max).prop_map(|n| Alphabet::new(n).unwrap())
}

/// Alphabet with a letter sequence over it.
pub fn sequence(max_n: usize, max_len: usize) -> impl Strategy<Value = (Alphabet, Vec<usize>)> {
    alphabet(max_n)
        .prop_flat_map(move |a| (Just(a), prop::collection::vec(0..a.size(), 0..=max_len)))
}

/// Admissible fixed smoothing parameters with a uniform start.
pub fn fixed_params(max_n: usize) -> impl Strategy<Value = (Alphabet, f64, f64)> {
    alphabet(max_n).prop_flat_map(|a| {
        let top = 1.0 - 1.0 / a.size() as f64;
        (
            Just(a),
            1e-4..(1.0 - 1e-6),
            prop_oneof![Just(0.0), Just(top), 0.0..=top],
        )
    })
}

pub fn model_kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

fn check_distribution(p: &Distribution) -> Check {
    let sum: f64 = p.mass().iter().sum();
    prop_assert!((sum - 1.0).abs() <= 1e-9, "sum {sum}");
    prop_assert!(p.mass().iter().all(|&m| m >= 0.0));
    Ok(())
}

/// Every prediction along `x` is a distribution.
pub fn normalization(kind: ModelKind, a: Alphabet, x: &[usize]) -> Check {
    let mut m = kind
        .configure(a, (x.len() as u64).max(2))
        .and_then(|s| s.build(a))
        .unwrap();
    check_distribution(&m.predict())?;
    for &letter in x {
        m.update(letter).unwrap();
        check_distribution(&m.predict())?;
    }
    Ok(())
}

/// Fixed smoothing from a uniform start stays in `[eps/N, 1 - eps]`.
pub fn ps_floor_ceiling(a: Alphabet, alpha: f64, eps: f64, x: &[usize]) -> Check {
    let n = a.size() as f64;
    let mut m = ProbabilitySmoothing::fixed(alpha, eps, Distribution::uniform(a)).unwrap();
    let (lo, hi) = (eps / n, 1.0 - eps);
    for &letter in x {
        m.update(letter).unwrap();
        for &p in m.estimate() {
            prop_assert!(
                p >= lo * (1.0 - 1e-12) && p <= hi + 1e-12,
                "{p} outside [{lo}, {hi}]"
            );
        }
    }
    Ok(())
}

/// Time-varying smoothing after `t` steps keeps every entry above `eps_t / N`.
pub fn varying_floor(a: Alphabet, x: &[usize]) -> Check {
    let n = a.size() as f64;
    let mut m = ProbabilitySmoothing::anytime(a);
    for (i, &letter) in x.iter().enumerate() {
        m.update(letter).unwrap();
        let (_, eps_t) = schedule_varying(a, i as u64 + 1).unwrap();
        for &p in m.estimate() {
            prop_assert!(p >= eps_t / n * (1.0 - 1e-12), "{p} below {eps_t}/{n}");
        }
    }
    Ok(())
}

/// `alpha_t` nondecreasing and `eps_t` nonincreasing over `1..=len`.
pub fn schedule_monotone(a: Alphabet, len: u64) -> Check {
    let (mut pa, mut pe) = schedule_varying(a, 1).unwrap();
    for t in 2..=len {
        let (al, ep) = schedule_varying(a, t).unwrap();
        prop_assert!(al >= pa && ep <= pe, "t={t}");
        (pa, pe) = (al, ep);
    }
    Ok(())
}

/// PTW-KT never costs more than plain KT plus `depth * ln 2`.
pub fn ptw_dominance(a: Alphabet, x: &[usize]) -> Check {
    let mut ptw = PartitionTreeWeighting::for_horizon(a, x.len() as u64).unwrap();
    let depth = ptw.depth() as f64;
    let mut kt = KrichevskyTrofimov::new(a, KtVariant::Plain);
    let lp = total_code_length(&mut ptw, x).unwrap();
    let lk = total_code_length(&mut kt, x).unwrap();
    prop_assert!(
        lp <= lk + depth * LN_2 + 1e-9,
        "ptw {lp} kt {lk} depth {depth}"
    );
    Ok(())
}

/// `1 <= C <= 1 + 2 (S - 1)`, and mixing toward uniform by `eps` scales the
/// variation part by exactly `1 - eps`.
pub fn complexity_bounds(spec: &PwsSpec, eps: f64) -> Check {
    let c = spec.complexity();
    let s = spec.partition().num_segments() as f64;
    prop_assert!(
        c >= 1.0 && c <= 1.0 + 2.0 * (s - 1.0) + 1e-12,
        "C={c}, S={s}"
    );
    let mixed = spec.mix_uniform(eps).complexity();
    prop_assert!(((mixed - 1.0) - (1.0 - eps) * (c - 1.0)).abs() <= 1e-9 * c);
    prop_assert!(mixed <= c + 1e-12);
    Ok(())
}

pub fn random_spec(a: Alphabet, len: u64, segments: u64, seed: u64) -> PwsSpec {
    sample_pws(a, len, segments, seed).unwrap()
}

/// Sampling, trial runs and encoding repeat bit for bit.
pub fn determinism(a: Alphabet, len: u64, segments: u64, seed: u64) -> Check {
    let s1 = random_spec(a, len, segments, seed);
    let s2 = random_spec(a, len, segments, seed);
    prop_assert_eq!(&s1, &s2);
    let x = sample_sequence(&s1, seed ^ 1);
    prop_assert_eq!(&x, &sample_sequence(&s2, seed ^ 1));
    let spec = ModelKind::Ps2.configure(a, len).unwrap();
    prop_assert_eq!(
        codec::encode(&spec, a, &x).unwrap(),
        codec::encode(&spec, a, &x).unwrap()
    );
    Ok(())
}

/// After each letter the decoder's model equals the encoder's.
pub fn codec_lockstep(kind: ModelKind, a: Alphabet, x: &[usize]) -> Check {
    let spec = kind.configure(a, (x.len() as u64).max(1)).unwrap();
    let mut enc = StreamEncoder::new(&spec, a).unwrap();
    let mut states = vec![enc.model().clone()];
    for &letter in x {
        enc.push(letter).unwrap();
        states.push(enc.model().clone());
    }
    let payload = enc.finish();
    if x.is_empty() {
        prop_assert!(payload.is_empty());
        return Ok(());
    }
    let mut dec = StreamDecoder::new(&spec, a, &payload).unwrap();
    prop_assert_eq!(dec.model(), &states[0]);
    for (t, &letter) in x.iter().enumerate() {
        prop_assert_eq!(dec.next_letter().unwrap(), letter);
        prop_assert_eq!(dec.model(), &states[t + 1]);
    }
    prop_assert!(dec.finish().is_ok());
    Ok(())
}

/// Round trip plus payload length within `[ideal - 1, ideal + 64]` bits.
pub fn codec_round_trip(kind: ModelKind, a: Alphabet, x: &[usize]) -> Check {
    let spec = kind.configure(a, (x.len() as u64).max(1)).unwrap();
    let stream = codec::encode(&spec, a, x).unwrap();
    let (header, back) = codec::decode(&stream).unwrap();
    prop_assert_eq!(&back, x);
    prop_assert_eq!(header.spec, spec);
    let ideal = total_code_length(&mut spec.build(a).unwrap(), x).unwrap() / LN_2;
    let bits = codec::payload_bits(&stream).unwrap() as f64;
    prop_assert!(
        bits >= ideal - 1.0 && bits <= ideal + 64.0,
        "{kind}: payload {bits} bits, ideal {ideal}"
    );
    Ok(())
}
