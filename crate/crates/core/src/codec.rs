//! Deterministic byte <-> strand codecs and positional consensus decoding.
//!
//! * Quaternary: each byte becomes its four big-endian base-4 digits,
//!   `A,C,G,T = 0,1,2,3`. 2 bits/nt.
//! * Rotation: each byte becomes six big-endian base-3 digits; every digit
//!   picks one of the three bases that differ from the previously emitted
//!   base (canonical order), starting from an implicit `A`. The output never
//!   repeats a base, so every homopolymer run has length 1. 8/6 bits/nt.

use std::fmt;
use std::str::FromStr;

use crate::dna::{segment, Base, DnaSequence};
use crate::error::{Error, Result};
use crate::scalar::Field;

pub type Payload = Vec<u8>;

pub const DEFAULT_CHUNK: usize = 256;
const ROTATION_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodecVariant {
    Quaternary,
    Rotation,
}

impl CodecVariant {
    pub fn nt_per_byte(self) -> usize {
        match self {
            CodecVariant::Quaternary => 4,
            CodecVariant::Rotation => ROTATION_DIGITS,
        }
    }

    pub fn bits_per_nt(self) -> f64 {
        8.0 / self.nt_per_byte() as f64
    }

    pub fn encode(self, bytes: &[u8]) -> DnaSequence {
        match self {
            CodecVariant::Quaternary => encode_quaternary(bytes),
            CodecVariant::Rotation => encode_rotation(bytes),
        }
    }

    pub fn decode(self, seq: &[Base]) -> Result<Payload> {
        match self {
            CodecVariant::Quaternary => decode_quaternary(seq),
            CodecVariant::Rotation => decode_rotation(seq),
        }
    }

    /// Best-effort decode of a damaged strand into exactly `n_bytes` bytes.
    ///
    /// The strand is truncated or padded with `A` to the nominal length.
    /// Rotation steps that repeat the previous base decode as digit 0 and
    /// out-of-range byte values saturate at 255.
    pub fn decode_lossy(self, seq: &[Base], n_bytes: usize) -> Payload {
        let nominal = n_bytes * self.nt_per_byte();
        let mut fitted: Vec<Base> = seq.iter().copied().take(nominal).collect();
        fitted.resize(nominal, Base::A);
        match self {
            CodecVariant::Quaternary => decode_quaternary(&fitted).expect("length is a multiple of 4"),
            CodecVariant::Rotation => {
                let mut prev = Base::A;
                fitted
                    .chunks(ROTATION_DIGITS)
                    .map(|chunk| {
                        let value = chunk.iter().fold(0u32, |acc, &b| {
                            let digit = rotation_digit(prev, b).unwrap_or(0);
                            prev = b;
                            acc * 3 + digit as u32
                        });
                        value.min(255) as u8
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for CodecVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecVariant::Quaternary => "quaternary",
            CodecVariant::Rotation => "rotation",
        })
    }
}

impl FromStr for CodecVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quaternary" => Ok(CodecVariant::Quaternary),
            "rotation" => Ok(CodecVariant::Rotation),
            other => Err(format!("unknown codec {other:?} (expected quaternary|rotation)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecSpec {
    pub variant: CodecVariant,
    pub chunk_length: usize,
}

impl CodecSpec {
    pub fn new(variant: CodecVariant, chunk_length: usize) -> Self {
        CodecSpec {
            variant,
            chunk_length,
        }
    }

    /// Encode and split into chunks of `chunk_length` bases.
    pub fn encode_chunks(&self, bytes: &[u8]) -> Vec<DnaSequence> {
        segment(&self.variant.encode(bytes), self.chunk_length)
    }

    pub fn decode_chunks<S: AsRef<[Base]>>(&self, chunks: &[S]) -> Result<Payload> {
        self.variant.decode(&crate::dna::concat_segments(chunks))
    }
}

impl Default for CodecSpec {
    fn default() -> Self {
        CodecSpec::new(CodecVariant::Rotation, DEFAULT_CHUNK)
    }
}

pub fn encode_quaternary(bytes: &[u8]) -> DnaSequence {
    bytes
        .iter()
        .flat_map(|&byte| (0..4).rev().map(move |i| Base::ALL[((byte >> (2 * i)) & 3) as usize]))
        .collect()
}

pub fn decode_quaternary(seq: &[Base]) -> Result<Payload> {
    if !seq.len().is_multiple_of(4) {
        return Err(Error::BadLength {
            len: seq.len(),
            multiple: 4,
        });
    }
    Ok(seq
        .chunks(4)
        .map(|c| c.iter().fold(0u8, |acc, b| (acc << 2) | b.digit()))
        .collect())
}

/// The base chosen by `digit` (0..3) after `prev`.
fn rotation_step(prev: Base, digit: u8) -> Base {
    let d = digit + u8::from(digit >= prev.digit());
    Base::ALL[d as usize]
}

fn rotation_digit(prev: Base, b: Base) -> Option<u8> {
    use std::cmp::Ordering::*;
    match b.digit().cmp(&prev.digit()) {
        Less => Some(b.digit()),
        Equal => None,
        Greater => Some(b.digit() - 1),
    }
}

pub fn encode_rotation(bytes: &[u8]) -> DnaSequence {
    let mut prev = Base::A;
    let mut out = Vec::with_capacity(bytes.len() * ROTATION_DIGITS);
    for &byte in bytes {
        let mut digits = [0u8; ROTATION_DIGITS];
        let mut x = byte;
        for slot in digits.iter_mut().rev() {
            *slot = x % 3;
            x /= 3;
        }
        for d in digits {
            prev = rotation_step(prev, d);
            out.push(prev);
        }
    }
    DnaSequence::from_bases(out)
}

pub fn decode_rotation(seq: &[Base]) -> Result<Payload> {
    if !seq.len().is_multiple_of(ROTATION_DIGITS) {
        return Err(Error::BadLength {
            len: seq.len(),
            multiple: ROTATION_DIGITS,
        });
    }
    let mut prev = Base::A;
    let mut out = Vec::with_capacity(seq.len() / ROTATION_DIGITS);
    for (ci, chunk) in seq.chunks(ROTATION_DIGITS).enumerate() {
        let mut value = 0u32;
        for (i, &b) in chunk.iter().enumerate() {
            let digit = rotation_digit(prev, b).ok_or(Error::AdjacentDuplicate {
                pos: ci * ROTATION_DIGITS + i,
            })?;
            value = value * 3 + digit as u32;
            prev = b;
        }
        // six ternary digits reach 728; anything above a byte is channel damage
        out.push(value.min(255) as u8);
    }
    Ok(out)
}

/// Column-wise plurality vote over decoder rows (symbols `1..=4`, `0` = pad).
/// Ties go to the canonical base order; columns holding only padding are
/// dropped.
pub fn consensus_decode<R: AsRef<[u8]>>(rows: &[R]) -> DnaSequence {
    let k = rows.iter().map(|r| r.as_ref().len()).max().unwrap_or(0);
    (0..k)
        .filter_map(|j| {
            let mut counts = [0usize; 4];
            for r in rows {
                if let Some(&s @ 1..=4) = r.as_ref().get(j) { counts[s as usize - 1] += 1 }
            }
            let best = (0..4).max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))?;
            (counts[best] > 0).then_some(Base::ALL[best])
        })
        .collect()
}

/// Symbol error rate: positional mismatches over the shared prefix plus the
/// length difference, relative to the reference length, capped at 1.
pub fn ber<T: Field>(reference: &[u8], decoded: &[u8]) -> Result<T> {
    if reference.is_empty() {
        return Err(Error::EmptySequence);
    }
    let errors = symbol_errors(reference, decoded).min(reference.len());
    Ok(T::from_usize_exact(errors) / T::from_usize_exact(reference.len()))
}

/// Uncapped error count behind [`ber`].
pub fn symbol_errors(reference: &[u8], decoded: &[u8]) -> usize {
    let mismatches = reference
        .iter()
        .zip(decoded)
        .filter(|(a, b)| a != b)
        .count();
    mismatches + reference.len().abs_diff(decoded.len())
}
