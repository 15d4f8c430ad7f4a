//! 64-bit range coder with carry propagation and byte-wise renormalization.
//!
//! The encoder keeps `low` in a 65-bit register so a carry out of the top
//! byte can ripple back through a run of pending `0xFF` bytes. Frequencies
//! are on a fixed total of `2^FREQ_BITS`; the slack left by quantization is
//! simply never addressed.
//!
//! Every payload ends with a 32-bit tag coded at uniform probability, so a
//! truncated or altered payload is rejected except with probability 2^-32.

use crate::dist::Distribution;
use crate::error::{Error, Result};

pub const FREQ_BITS: u32 = 24;
pub const FREQ_TOTAL: u32 = 1 << FREQ_BITS;

const TOP: u64 = 1 << 56;
const LOW_MASK: u128 = (1 << 56) - 1;

/// Bytes of zero padding a decoder reads past the end of a well-formed
/// payload.
pub(crate) const TAIL_PADDING: usize = 7;

const END_TAG: [u8; 4] = [0xA5, 0x5A, 0xC3, 0x3C];
const TAG_FREQ: u32 = FREQ_TOTAL >> 8;

/// Cumulative frequency table for one prediction.
///
/// Every letter gets `floor(p * (2^24 - N)) + 1`, so no letter is ever
/// undecodable and the table total never exceeds `2^24`.
#[derive(Clone, Debug)]
pub struct FreqTable {
    cum: Vec<u32>,
}

impl FreqTable {
    pub fn new(p: &Distribution) -> Self {
        let scale = (FREQ_TOTAL as usize - p.len()) as f64;
        let mut cum = Vec::with_capacity(p.len() + 1);
        let mut acc = 0u32;
        cum.push(0);
        for &m in p.mass() {
            acc += (m * scale).floor() as u32 + 1;
            cum.push(acc);
        }
        debug_assert!(acc <= FREQ_TOTAL);
        FreqTable { cum }
    }

    pub fn len(&self) -> usize {
        self.cum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(cumulative, frequency)` of `letter`.
    pub fn interval(&self, letter: usize) -> (u32, u32) {
        (self.cum[letter], self.cum[letter + 1] - self.cum[letter])
    }

    pub fn total(&self) -> u32 {
        self.cum[self.len()]
    }

    /// Letter whose interval contains `target`.
    fn find(&self, target: u32) -> Option<usize> {
        if target >= self.total() {
            return None;
        }
        Some(self.cum.partition_point(|&c| c <= target) - 1)
    }
}

#[derive(Clone, Debug)]
pub struct RangeEncoder {
    low: u128,
    range: u64,
    cache: u8,
    pending: u64,
    /// The first byte out of the shift register is always zero and is dropped.
    leading: bool,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        RangeEncoder {
            low: 0,
            range: u64::MAX,
            cache: 0,
            pending: 1,
            leading: true,
            out: Vec::new(),
        }
    }

    fn emit(&mut self, byte: u8) {
        if self.leading {
            debug_assert_eq!(byte, 0);
            self.leading = false;
        } else {
            self.out.push(byte);
        }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF << 56 || self.low >= 1 << 64 {
            let carry = (self.low >> 64) as u8;
            let mut byte = self.cache;
            while self.pending > 0 {
                self.emit(byte.wrapping_add(carry));
                byte = 0xFF;
                self.pending -= 1;
            }
            self.cache = (self.low >> 56) as u8;
        }
        self.pending += 1;
        self.low = (self.low & LOW_MASK) << 8;
    }

    pub fn encode(&mut self, cum: u32, freq: u32) {
        debug_assert!(freq > 0 && cum + freq <= FREQ_TOTAL);
        let r = self.range >> FREQ_BITS;
        self.low += r as u128 * cum as u128;
        self.range = r * freq as u64;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    /// Writes the shortest tail that pins the final interval and returns the
    /// payload.
    pub fn finish(mut self) -> Vec<u8> {
        for b in END_TAG {
            self.encode(b as u32 * TAG_FREQ, TAG_FREQ);
        }
        // Any value in [low, low + range) decodes correctly; pick the one
        // with the most trailing zero bytes.
        self.low = (self.low + LOW_MASK) & !LOW_MASK;
        self.shift_low();
        self.shift_low();
        self.out
    }

    /// Payload bytes committed so far, including ones still held back for
    /// carry resolution.
    pub fn committed_len(&self) -> u64 {
        self.out.len() as u64 + self.pending
    }
}

#[derive(Clone, Debug)]
pub struct RangeDecoder<'a> {
    code: u64,
    range: u64,
    input: &'a [u8],
    pos: usize,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(input: &'a [u8]) -> Self {
        let mut d = RangeDecoder {
            code: 0,
            range: u64::MAX,
            input,
            pos: 0,
        };
        for _ in 0..8 {
            d.code = (d.code << 8) | d.next_byte() as u64;
        }
        d
    }

    fn next_byte(&mut self) -> u8 {
        let b = self.input.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }

    fn target(&self) -> u64 {
        self.code / (self.range >> FREQ_BITS)
    }

    fn consume(&mut self, cum: u32, freq: u32) {
        let r = self.range >> FREQ_BITS;
        self.code -= r * cum as u64;
        self.range = r * freq as u64;
        while self.range < TOP {
            self.range <<= 8;
            self.code = (self.code << 8) | self.next_byte() as u64;
        }
    }

    /// Decodes one letter against `table`.
    pub fn decode(&mut self, table: &FreqTable) -> Result<usize> {
        let letter = u32::try_from(self.target())
            .ok()
            .and_then(|t| table.find(t))
            .ok_or_else(|| Error::Format("code value outside the frequency table".into()))?;
        let (cum, freq) = table.interval(letter);
        self.consume(cum, freq);
        Ok(letter)
    }

    /// Checks the end tag and that the payload ended exactly where the
    /// encoder stopped.
    pub fn finish(mut self) -> Result<()> {
        for b in END_TAG {
            let t = self.target();
            if t >> 16 != b as u64 {
                return Err(if self.pos > self.input.len() + TAIL_PADDING {
                    Error::Truncated("payload ends early".into())
                } else {
                    Error::Format("end tag mismatch".into())
                });
            }
            self.consume(b as u32 * TAG_FREQ, TAG_FREQ);
        }
        let padded = self.pos as i64 - self.input.len() as i64;
        match padded.cmp(&(TAIL_PADDING as i64)) {
            std::cmp::Ordering::Equal => Ok(()),
            std::cmp::Ordering::Greater => Err(Error::Truncated(format!(
                "payload is {} byte(s) short",
                padded as usize - TAIL_PADDING
            ))),
            std::cmp::Ordering::Less => Err(Error::Format(format!(
                "{} unexpected trailing byte(s)",
                TAIL_PADDING as i64 - padded
            ))),
        }
    }
}
