//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! gammas = 0.005, 0.01, 0.02
//! v = 8
//! ws = 2, 4, 8
//! K = 7
//! s = 256
//! codec = rotation
//! random_bytes = 512      # or: image = picture.ppm
//! payload_seed = 1
//! trials = 10
//! seed = 0
//! modes = mrs, random
//! d = 256
//! stride = 128
//! p_sub = 0.17
//! p_ins = 0.40
//! p_del = 0.43
//! threads = 0             # 0 = all cores, 1 = sequential
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dnasim_core::bio::SegmentSpec;
use dnasim_core::channel::{ChannelSpec, DEFAULT_P_DEL, DEFAULT_P_INS, DEFAULT_P_SUB};
use dnasim_core::codec::{CodecSpec, CodecVariant, DEFAULT_CHUNK};
use dnasim_core::mrs::DEFAULT_KMER;

use crate::error::{HarnessError, Result};

pub const DEFAULT_GAMMAS: [f64; 5] = [0.005, 0.01, 0.02, 0.04, 0.08];
pub const DEFAULT_READS: usize = 8;
pub const DEFAULT_WS: [usize; 3] = [2, 4, 8];
pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_RANDOM_BYTES: usize = 512;
/// Random payloads are laid out as grayscale images of this width.
pub const RANDOM_IMAGE_WIDTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SelectionMode {
    Mrs,
    Random,
}

impl SelectionMode {
    pub fn id(self) -> u64 {
        match self {
            SelectionMode::Mrs => 0,
            SelectionMode::Random => 1,
        }
    }
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionMode::Mrs => "mrs",
            SelectionMode::Random => "random",
        })
    }
}

impl FromStr for SelectionMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mrs" => Ok(SelectionMode::Mrs),
            "random" => Ok(SelectionMode::Random),
            other => Err(format!("unknown selection mode {other:?} (expected mrs|random)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PayloadSource {
    Image(PathBuf),
    Random { len: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub gammas: Vec<f64>,
    pub v: usize,
    pub ws: Vec<usize>,
    pub kmer: usize,
    pub codec: CodecSpec,
    pub payload: PayloadSource,
    pub trials: usize,
    pub master_seed: u64,
    pub modes: Vec<SelectionMode>,
    pub constraint: SegmentSpec,
    pub p_sub: f64,
    pub p_ins: f64,
    pub p_del: f64,
    /// Worker threads for sweeps; 0 uses all cores.
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            gammas: DEFAULT_GAMMAS.to_vec(),
            v: DEFAULT_READS,
            ws: DEFAULT_WS.to_vec(),
            kmer: DEFAULT_KMER,
            codec: CodecSpec::new(CodecVariant::Rotation, DEFAULT_CHUNK),
            payload: PayloadSource::Random {
                len: DEFAULT_RANDOM_BYTES,
                seed: 0,
            },
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            modes: vec![SelectionMode::Mrs, SelectionMode::Random],
            constraint: SegmentSpec::default(),
            p_sub: DEFAULT_P_SUB,
            p_ins: DEFAULT_P_INS,
            p_del: DEFAULT_P_DEL,
            threads: 0,
            output: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn s(&self) -> usize {
        self.codec.chunk_length
    }

    /// Channel for one gamma; the seed is replaced per segment.
    pub fn channel(&self, gamma: f64) -> Result<ChannelSpec> {
        Ok(ChannelSpec::with_split(
            gamma,
            self.p_sub,
            self.p_ins,
            self.p_del,
            self.master_seed,
        )?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() || self.ws.is_empty() || self.modes.is_empty() {
            return Err(invalid("gammas, ws and modes must be non-empty"));
        }
        for &g in &self.gammas {
            self.channel(g)?;
        }
        if self.v == 0 {
            return Err(invalid("v must be at least 1"));
        }
        if let Some(&w) = self.ws.iter().find(|&&w| w == 0 || w > self.v) {
            return Err(invalid(format!("w = {w} must lie in 1..={}", self.v)));
        }
        if self.kmer == 0 || self.kmer >= self.s() {
            return Err(invalid(format!(
                "K = {} must lie in 1..s (s = {})",
                self.kmer,
                self.s()
            )));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        SegmentSpec::new(self.constraint.d, self.constraint.stride)?;
        if let PayloadSource::Random { len, .. } = self.payload {
            if len == 0 || len % RANDOM_IMAGE_WIDTH != 0 || len / RANDOM_IMAGE_WIDTH < 8 {
                return Err(invalid(format!(
                    "random payload length {len} must be a multiple of {RANDOM_IMAGE_WIDTH} and at least {}",
                    8 * RANDOM_IMAGE_WIDTH
                )));
            }
        }
        Ok(())
    }

    /// Apply `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected key = value", idx + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| invalid(format!("line {}: {e}", idx + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "gammas" => self.gammas = parse_list(value)?,
            "v" => self.v = parse(value)?,
            "ws" => self.ws = parse_list(value)?,
            "K" | "kmer" => self.kmer = parse(value)?,
            "s" => self.codec.chunk_length = parse(value)?,
            "codec" => self.codec.variant = value.parse()?,
            "image" => self.payload = PayloadSource::Image(PathBuf::from(value)),
            "random_bytes" => {
                let seed = match self.payload {
                    PayloadSource::Random { seed, .. } => seed,
                    PayloadSource::Image(_) => 0,
                };
                self.payload = PayloadSource::Random {
                    len: parse(value)?,
                    seed,
                };
            }
            "payload_seed" => match &mut self.payload {
                PayloadSource::Random { seed, .. } => *seed = parse(value)?,
                PayloadSource::Image(_) => return Err("payload_seed needs a random payload".into()),
            },
            "trials" => self.trials = parse(value)?,
            "seed" | "master_seed" => self.master_seed = parse(value)?,
            "modes" => self.modes = parse_list(value)?,
            "d" => self.constraint.d = parse(value)?,
            "stride" => self.constraint.stride = parse(value)?,
            "p_sub" => self.p_sub = parse(value)?,
            "p_ins" => self.p_ins = parse(value)?,
            "p_del" => self.p_del = parse(value)?,
            "threads" => self.threads = parse(value)?,
            "out" => self.output = Some(PathBuf::from(value)),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}

fn parse<T: FromStr>(s: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    s.trim()
        .parse()
        .map_err(|e| format!("cannot parse {s:?}: {e}"))
}

pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse)
        .collect()
}
