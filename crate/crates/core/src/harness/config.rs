use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dist::Alphabet;
use crate::error::{Error, Result};
use crate::models::ModelKind;

pub const DEFAULT_SEED: u64 = 1;

/// Models compared in the default run.
pub const DEFAULT_ROSTER: [ModelKind; 6] = [
    ModelKind::Ps1,
    ModelKind::Ps2,
    ModelKind::KtCs,
    ModelKind::KtH,
    ModelKind::KtR,
    ModelKind::PtwKt,
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub alphabet: Alphabet,
    /// Sequence length `T`.
    pub len: u64,
    /// Segment counts `S`, ascending and distinct.
    pub segments: Vec<u64>,
    pub trials: u64,
    pub models: Vec<ModelKind>,
    pub seed: u64,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alphabet: Alphabet::BINARY,
            len: 8192,
            segments: (1..=100).collect(),
            trials: 100,
            models: DEFAULT_ROSTER.to_vec(),
            seed: DEFAULT_SEED,
            output: PathBuf::from("results.csv"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.len < 2 {
            return Err(Error::Config(format!(
                "t must be at least 2, got {}",
                self.len
            )));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.segments.is_empty() {
            return Err(Error::Config("no segment counts".into()));
        }
        if let Some(&s) = self.segments.iter().find(|&&s| s < 1 || s > self.len) {
            return Err(Error::Config(format!(
                "segment count {s} outside 1..={}",
                self.len
            )));
        }
        if self.models.is_empty() {
            return Err(Error::Config("empty model roster".into()));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }
}

/// `"1..100"`, `"5"`, or comma lists of either; ranges are inclusive.
pub fn parse_segments(s: &str) -> Result<Vec<u64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| Error::Config(format!("bad segment count {:?}", t.trim())))
    };
    let mut out = Vec::new();
    for item in s.split(',') {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(Error::Config(format!("empty range {a}..{b}")));
                }
                out.extend(a..=b);
            }
            None => out.push(num(item)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn parse_models(s: &str) -> Result<Vec<ModelKind>> {
    let mut out = Vec::new();
    for name in s.split(',') {
        let k: ModelKind = name.parse()?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

fn format_segments(s: &[u64]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[j] + 1 {
            j += 1;
        }
        parts.push(if j > i {
            format!("{}..{}", s[i], s[j])
        } else {
            s[i].to_string()
        });
        i = j + 1;
    }
    parts.join(",")
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    /// Line-based `key = value`; `#` starts a comment. Missing keys keep
    /// their defaults.
    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: Error| match e {
                Error::Config(m) => Error::Config(format!("line {lineno}: {m}")),
                other => Error::Config(format!("line {lineno}: {other}")),
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {lineno}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(Error::Config(format!(
                    "line {lineno}: duplicate key {key:?}"
                )));
            }
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| at(Error::Config(format!("{key}: bad integer {v:?}"))))
            };
            match key {
                "n" => {
                    let n = int(value)?;
                    cfg.alphabet = usize::try_from(n)
                        .map_err(|_| Error::InvalidAlphabet(usize::MAX))
                        .and_then(Alphabet::new)
                        .map_err(at)?;
                }
                "t" => cfg.len = int(value)?,
                "segments" => cfg.segments = parse_segments(value).map_err(at)?,
                "trials" => cfg.trials = int(value)?,
                "models" => cfg.models = parse_models(value).map_err(at)?,
                "seed" => cfg.seed = int(value)?,
                "output" => {
                    if value.is_empty() {
                        return Err(at(Error::Config("empty output path".into())));
                    }
                    cfg.output = PathBuf::from(value);
                }
                _ => return Err(at(Error::Config(format!("unknown key {key:?}")))),
            }
            seen.push(key);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Writes the config back in the file format.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let models: Vec<&str> = self.models.iter().map(|m| m.name()).collect();
        writeln!(f, "n = {}", self.alphabet.size())?;
        writeln!(f, "t = {}", self.len)?;
        writeln!(f, "segments = {}", format_segments(&self.segments))?;
        writeln!(f, "trials = {}", self.trials)?;
        writeln!(f, "models = {}", models.join(","))?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "output = {}", self.output.display())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::default();
        assert_eq!(c.alphabet.size(), 2);
        assert_eq!(c.len, 8192);
        assert_eq!(c.segments, (1..=100).collect::<Vec<_>>());
        assert_eq!(c.trials, 100);
        assert_eq!(c.models.len(), 6);
        assert_eq!("".parse::<ExperimentConfig>().unwrap(), c);
    }

    #[test]
    fn display_round_trips() {
        let text = "n = 4\nt=512\nsegments = 1..3, 7, 10..12 # comment\ntrials = 3\n\
                    models = kt, ps1\nseed = 9\noutput = out/x.csv\n";
        let c: ExperimentConfig = text.parse().unwrap();
        assert_eq!(c.segments, vec![1, 2, 3, 7, 10, 11, 12]);
        assert_eq!(c.models, vec![ModelKind::Kt, ModelKind::Ps1]);
        assert_eq!(c.to_string().parse::<ExperimentConfig>().unwrap(), c);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("t = 10\nfoo = 1", 2),
            ("\n\nmodels = PS1, LZ77", 3),
            ("trials = x", 1),
            ("segments = 5..2", 1),
            ("n = 1", 1),
            ("seed = 1\nseed = 2", 2),
            ("novalue", 1),
        ] {
            let e = text.parse::<ExperimentConfig>().unwrap_err().to_string();
            assert!(e.contains(&format!("line {line}:")), "{text:?} -> {e}");
        }
    }

    #[test]
    fn invariants_are_checked() {
        assert!("trials = 0".parse::<ExperimentConfig>().is_err());
        assert!("t = 10\nsegments = 1..11"
            .parse::<ExperimentConfig>()
            .is_err());
        assert!("segments = 0".parse::<ExperimentConfig>().is_err());
    }
}
