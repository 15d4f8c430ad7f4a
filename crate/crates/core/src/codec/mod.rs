//! Compressor built from any [`SequentialModel`] and a range coder.
//!
//! A stream is a header followed by the range-coded payload:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SMC1"
//! 4       2     alphabet size N, big-endian
//! 6       1     model id
//! 7       2     parameter block length L, big-endian
//! 9       L     parameter block
//! 9+L     8     number of letters, big-endian
//! 17+L    ...   payload
//! ```
//!
//! Parameter blocks: PS1 `alpha, eps` (f64 each), KT-CS the discount (f64),
//! KT-H the halving period (u64), PTW-KT the tree depth (u8); the other models
//! take none. An empty sequence has no payload.

mod header;
mod range;

pub use header::{CodecHeader, FIXED_HEADER_LEN, MAGIC};
pub use range::{FreqTable, RangeDecoder, RangeEncoder, FREQ_BITS, FREQ_TOTAL};

use crate::dist::Alphabet;
use crate::error::{Error, Result};
use crate::models::{AnyModel, ModelSpec, SequentialModel};

/// Letter-at-a-time encoder. The model is updated after each coded letter.
#[derive(Clone, Debug)]
pub struct StreamEncoder {
    model: AnyModel,
    coder: RangeEncoder,
    position: usize,
}

impl StreamEncoder {
    pub fn new(spec: &ModelSpec, alphabet: Alphabet) -> Result<Self> {
        Ok(StreamEncoder {
            model: spec.build(alphabet)?,
            coder: RangeEncoder::new(),
            position: 0,
        })
    }

    pub fn model(&self) -> &AnyModel {
        &self.model
    }

    pub fn push(&mut self, letter: usize) -> Result<()> {
        self.model.alphabet().check(letter)?;
        let p = self.model.predict();
        if p[letter].is_nan() || p[letter] <= 0.0 {
            return Err(Error::Unencodable {
                letter,
                position: self.position,
            });
        }
        let (cum, freq) = FreqTable::new(&p).interval(letter);
        self.coder.encode(cum, freq);
        self.model.update(letter)?;
        self.position += 1;
        Ok(())
    }

    pub fn finish(self) -> Vec<u8> {
        if self.position == 0 {
            Vec::new()
        } else {
            self.coder.finish()
        }
    }
}

/// Letter-at-a-time decoder over a payload.
#[derive(Clone, Debug)]
pub struct StreamDecoder<'a> {
    model: AnyModel,
    coder: RangeDecoder<'a>,
}

impl<'a> StreamDecoder<'a> {
    pub fn new(spec: &ModelSpec, alphabet: Alphabet, payload: &'a [u8]) -> Result<Self> {
        Ok(StreamDecoder {
            model: spec.build(alphabet)?,
            coder: RangeDecoder::new(payload),
        })
    }

    pub fn model(&self) -> &AnyModel {
        &self.model
    }

    pub fn next_letter(&mut self) -> Result<usize> {
        let table = FreqTable::new(&self.model.predict());
        let letter = self.coder.decode(&table)?;
        self.model.update(letter)?;
        Ok(letter)
    }

    pub fn finish(self) -> Result<()> {
        self.coder.finish()
    }
}

/// Header plus payload for `x` coded with a fresh model built from `spec`.
pub fn encode(spec: &ModelSpec, alphabet: Alphabet, x: &[usize]) -> Result<Vec<u8>> {
    let header = CodecHeader {
        alphabet,
        spec: *spec,
        original_length: x.len() as u64,
    };
    let mut out = header.to_bytes()?;
    let mut enc = StreamEncoder::new(spec, alphabet)?;
    for &a in x {
        enc.push(a)?;
    }
    out.extend_from_slice(&enc.finish());
    Ok(out)
}

/// Inverse of [`encode`].
pub fn decode(stream: &[u8]) -> Result<(CodecHeader, Vec<usize>)> {
    let (header, start) = CodecHeader::parse(stream)?;
    let payload = &stream[start..];
    if header.original_length == 0 {
        if !payload.is_empty() {
            return Err(Error::Format("payload after an empty sequence".into()));
        }
        return Ok((header, Vec::new()));
    }
    if payload.is_empty() {
        return Err(Error::Truncated("missing payload".into()));
    }
    let mut dec = StreamDecoder::new(&header.spec, header.alphabet, payload)?;
    // cap the up-front allocation; a corrupt length fails on the payload
    let mut x = Vec::with_capacity(header.original_length.min(payload.len() as u64 * 8) as usize);
    for _ in 0..header.original_length {
        x.push(dec.next_letter()?);
    }
    dec.finish()?;
    Ok((header, x))
}

/// Payload length in bits, excluding the header.
pub fn payload_bits(stream: &[u8]) -> Result<u64> {
    let (_, start) = CodecHeader::parse(stream)?;
    Ok(8 * (stream.len() - start) as u64)
}
