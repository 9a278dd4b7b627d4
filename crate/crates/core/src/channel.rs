//! Insertion/deletion/substitution channel and multi-read generation.
//!
//! Each input base independently suffers at most one error event with
//! probability `gamma`. Given an event, its type is drawn from
//! `(p_sub, p_ins, p_del)`:
//!
//! * substitution emits one of the three other bases, uniformly;
//! * insertion emits a uniformly random base followed by the original base;
//! * deletion emits nothing.
//!
//! Randomness comes from a ChaCha8 stream keyed by a 64-bit seed, so outputs
//! are identical on every platform. Read `i` of a read set uses
//! [`derive_seed`]`(master_seed, i)`, never a shared sequential stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dna::{Base, DnaSequence};
use crate::error::{Error, Result};

pub const DEFAULT_P_SUB: f64 = 0.17;
pub const DEFAULT_P_INS: f64 = 0.40;
pub const DEFAULT_P_DEL: f64 = 0.43;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub gamma: f64,
    pub p_sub: f64,
    pub p_ins: f64,
    pub p_del: f64,
    pub master_seed: u64,
}

impl ChannelSpec {
    /// Default substitution/insertion/deletion split.
    pub fn new(gamma: f64, master_seed: u64) -> Result<Self> {
        Self::with_split(gamma, DEFAULT_P_SUB, DEFAULT_P_INS, DEFAULT_P_DEL, master_seed)
    }

    pub fn with_split(
        gamma: f64,
        p_sub: f64,
        p_ins: f64,
        p_del: f64,
        master_seed: u64,
    ) -> Result<Self> {
        let spec = ChannelSpec {
            gamma,
            p_sub,
            p_ins,
            p_del,
            master_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.gamma) {
            return Err(Error::InvalidChannelSpec(format!(
                "gamma {} outside [0, 1]",
                self.gamma
            )));
        }
        if !(unit(self.p_sub) && unit(self.p_ins) && unit(self.p_del)) {
            return Err(Error::InvalidChannelSpec(
                "error-type probabilities must lie in [0, 1]".into(),
            ));
        }
        let total = self.p_sub + self.p_ins + self.p_del;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidChannelSpec(format!(
                "p_sub + p_ins + p_del = {total}, expected 1"
            )));
        }
        Ok(())
    }

    /// Expected output length for an input of `k` bases.
    pub fn expected_length(&self, k: usize) -> f64 {
        k as f64 * (1.0 - self.gamma * self.p_del + self.gamma * self.p_ins)
    }
}

/// What happened to one input base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelEvent {
    Keep,
    Substitute { from: Base, to: Base },
    Insert { inserted: Base },
    Delete,
}

impl ChannelEvent {
    pub fn is_error(&self) -> bool {
        !matches!(self, ChannelEvent::Keep)
    }
}

/// The `v` noisy copies of one source strand of length `source_length`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadSet {
    pub source_length: usize,
    pub reads: Vec<DnaSequence>,
}

impl ReadSet {
    pub fn new(source_length: usize, reads: Vec<DnaSequence>) -> Self {
        ReadSet {
            source_length,
            reads,
        }
    }

    pub fn v(&self) -> usize {
        self.reads.len()
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective 64-bit avalanche mix.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `master`.
///
/// `mix64(mix64(master) ^ mix64(index + GOLDEN))` with wrapping addition.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index.wrapping_add(GOLDEN_GAMMA)))
}

/// Fold [`derive_seed`] over a path of indices.
pub fn derive_seed_path(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(master, |acc, &i| derive_seed(acc, i))
}

fn run_channel(
    seq: &[Base],
    spec: &ChannelSpec,
    stream_seed: u64,
    mut log: Option<&mut Vec<ChannelEvent>>,
) -> DnaSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
    let mut out = Vec::with_capacity(seq.len() + seq.len() / 8 + 1);
    let ins_cut = spec.p_sub + spec.p_ins;
    for &b in seq {
        let u: f64 = rng.gen();
        let event = if u >= spec.gamma {
            out.push(b);
            ChannelEvent::Keep
        } else {
            let t: f64 = rng.gen();
            if t < spec.p_sub {
                // pick among the three other bases in canonical order
                let mut r = rng.gen_range(0..3u8);
                if r >= b.digit() {
                    r += 1;
                }
                let to = Base::ALL[r as usize];
                out.push(to);
                ChannelEvent::Substitute { from: b, to }
            } else if t < ins_cut {
                let inserted = Base::ALL[rng.gen_range(0..4usize)];
                out.push(inserted);
                out.push(b);
                ChannelEvent::Insert { inserted }
            } else {
                ChannelEvent::Delete
            }
        };
        if let Some(log) = log.as_deref_mut() {
            log.push(event);
        }
    }
    DnaSequence::from_bases(out)
}

pub fn corrupt(seq: &[Base], spec: &ChannelSpec, stream_seed: u64) -> DnaSequence {
    run_channel(seq, spec, stream_seed, None)
}

/// Same output as [`corrupt`], plus one event per input base.
pub fn corrupt_logged(
    seq: &[Base],
    spec: &ChannelSpec,
    stream_seed: u64,
) -> (DnaSequence, Vec<ChannelEvent>) {
    let mut log = Vec::with_capacity(seq.len());
    let out = run_channel(seq, spec, stream_seed, Some(&mut log));
    (out, log)
}

/// `v` reads; read `i` (1-based) uses `derive_seed(spec.master_seed, i)`.
pub fn generate_reads(seq: &[Base], spec: &ChannelSpec, v: usize) -> ReadSet {
    let reads = (1..=v as u64)
        .map(|i| corrupt(seq, spec, derive_seed(spec.master_seed, i)))
        .collect();
    ReadSet::new(seq.len(), reads)
}
