use crate::dist::Alphabet;
use crate::error::{Error, Result};
use crate::models::{KtVariant, ModelKind, ModelSpec};

pub const MAGIC: [u8; 4] = *b"SMC1";

/// Fixed-size part of the header, excluding the parameter block.
pub const FIXED_HEADER_LEN: usize = 4 + 2 + 1 + 2 + 8;

/// Stream header: everything needed to rebuild the model and know when to
/// stop decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct CodecHeader {
    pub alphabet: Alphabet,
    pub spec: ModelSpec,
    pub original_length: u64,
}

fn param_block(spec: &ModelSpec) -> Vec<u8> {
    let mut out = Vec::new();
    match *spec {
        ModelSpec::PsFixed { alpha, eps } => {
            out.extend_from_slice(&alpha.to_be_bytes());
            out.extend_from_slice(&eps.to_be_bytes());
        }
        ModelSpec::Kt(KtVariant::CountScale { discount }) => {
            out.extend_from_slice(&discount.to_be_bytes())
        }
        ModelSpec::Kt(KtVariant::Halve { period }) => out.extend_from_slice(&period.to_be_bytes()),
        ModelSpec::Ptw { depth } => out.push(depth as u8),
        ModelSpec::Uniform
        | ModelSpec::PsVarying
        | ModelSpec::Kt(KtVariant::Plain)
        | ModelSpec::Kt(KtVariant::Reset) => {}
    }
    out
}

fn read_f64(b: &[u8]) -> f64 {
    f64::from_be_bytes(b.try_into().unwrap())
}

fn parse_params(kind: ModelKind, b: &[u8]) -> Result<ModelSpec> {
    let want = match kind {
        ModelKind::Ps1 => 16,
        ModelKind::KtCs | ModelKind::KtH => 8,
        ModelKind::PtwKt => 1,
        _ => 0,
    };
    if b.len() != want {
        return Err(Error::Format(format!(
            "{kind} expects {want} parameter bytes, found {}",
            b.len()
        )));
    }
    Ok(match kind {
        ModelKind::Uniform => ModelSpec::Uniform,
        ModelKind::Ps1 => ModelSpec::PsFixed {
            alpha: read_f64(&b[..8]),
            eps: read_f64(&b[8..]),
        },
        ModelKind::Ps2 => ModelSpec::PsVarying,
        ModelKind::Kt => ModelSpec::Kt(KtVariant::Plain),
        ModelKind::KtCs => ModelSpec::Kt(KtVariant::CountScale {
            discount: read_f64(b),
        }),
        ModelKind::KtH => ModelSpec::Kt(KtVariant::Halve {
            period: u64::from_be_bytes(b.try_into().unwrap()),
        }),
        ModelKind::KtR => ModelSpec::Kt(KtVariant::Reset),
        ModelKind::PtwKt => ModelSpec::Ptw { depth: b[0] as u32 },
    })
}

impl CodecHeader {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let n = u16::try_from(self.alphabet.size()).map_err(|_| {
            Error::domain(format!(
                "alphabet size {} does not fit the stream header",
                self.alphabet.size()
            ))
        })?;
        let params = param_block(&self.spec);
        let mut out = Vec::with_capacity(FIXED_HEADER_LEN + params.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&n.to_be_bytes());
        out.push(self.spec.kind().id());
        out.extend_from_slice(&(params.len() as u16).to_be_bytes());
        out.extend_from_slice(&params);
        out.extend_from_slice(&self.original_length.to_be_bytes());
        Ok(out)
    }

    /// Parses a header from the front of `bytes`, returning it with the
    /// number of bytes consumed.
    pub fn parse(bytes: &[u8]) -> Result<(Self, usize)> {
        let short = || Error::Truncated("stream ends inside the header".into());
        if bytes.len() < 4 || bytes[..4] != MAGIC {
            if bytes.len() < 4 && MAGIC.starts_with(bytes) {
                return Err(short());
            }
            return Err(Error::Format("bad magic".into()));
        }
        if bytes.len() < 9 {
            return Err(short());
        }
        let n = u16::from_be_bytes([bytes[4], bytes[5]]) as usize;
        let alphabet = Alphabet::new(n).map_err(|_| Error::Format(format!("alphabet size {n}")))?;
        let kind = ModelKind::from_id(bytes[6])
            .ok_or_else(|| Error::Format(format!("unknown model id {}", bytes[6])))?;
        let plen = u16::from_be_bytes([bytes[7], bytes[8]]) as usize;
        let end = 9 + plen + 8;
        if bytes.len() < end {
            return Err(short());
        }
        let spec = parse_params(kind, &bytes[9..9 + plen])?;
        let original_length = u64::from_be_bytes(bytes[9 + plen..end].try_into().unwrap());
        Ok((
            CodecHeader {
                alphabet,
                spec,
                original_length,
            },
            end,
        ))
    }
}
