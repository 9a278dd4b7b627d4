//! Base alphabet, digit mappings and strand segmentation.
//!
//! Two integer views of a strand coexist:
//!
//! * digits `A,C,G,T -> 0,1,2,3`, used by the constraint statistics;
//! * decoder symbols `A,C,G,T -> 1,2,3,4` with `0` reserved as a trailing pad.
//!
//! Conversions between them are always explicit.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A nucleotide. The derived order `A < C < G < T` is the canonical order
/// used for every deterministic tie-break in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    A,
    C,
    G,
    T,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::T];

    #[inline]
    pub fn digit(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn from_digit(d: u8) -> Result<Base> {
        Base::ALL
            .get(d as usize)
            .copied()
            .ok_or(Error::InvalidDigit(d))
    }

    /// Decoder-row symbol: `A..T -> 1..4`.
    #[inline]
    pub fn symbol(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_char(ch: char) -> Option<Base> {
        match ch.to_ascii_uppercase() {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'T' => Some(Base::T),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }

    pub fn is_gc(self) -> bool {
        matches!(self, Base::C | Base::G)
    }
}

pub fn base_to_digit(b: Base) -> u8 {
    b.digit()
}

pub fn digit_to_base(d: u8) -> Result<Base> {
    Base::from_digit(d)
}

/// An ordered strand of bases. May be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DnaSequence(Vec<Base>);

impl DnaSequence {
    pub fn new() -> Self {
        DnaSequence(Vec::new())
    }

    pub fn from_bases(bases: Vec<Base>) -> Self {
        DnaSequence(bases)
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        digits.iter().map(|&d| Base::from_digit(d)).collect()
    }

    pub fn bases(&self) -> &[Base] {
        &self.0
    }

    pub fn into_bases(self) -> Vec<Base> {
        self.0
    }

    pub fn push(&mut self, b: Base) {
        self.0.push(b);
    }

    pub fn digits(&self) -> DigitSequence {
        DigitSequence(self.0.iter().map(|b| b.digit()).collect())
    }
}

impl Deref for DnaSequence {
    type Target = [Base];

    fn deref(&self) -> &[Base] {
        &self.0
    }
}

impl FromIterator<Base> for DnaSequence {
    fn from_iter<I: IntoIterator<Item = Base>>(iter: I) -> Self {
        DnaSequence(iter.into_iter().collect())
    }
}

impl FromStr for DnaSequence {
    type Err = Error;

    /// Case-insensitive; any character outside `ACGT` is rejected.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(pos, ch)| Base::from_char(ch).ok_or(Error::InvalidBase { ch, pos }))
            .collect()
    }
}

impl fmt::Display for DnaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", b.to_char())?;
        }
        Ok(())
    }
}

/// Digits in `0..=3`, the image of a [`DnaSequence`] under [`base_to_digit`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DigitSequence(Vec<u8>);

impl DigitSequence {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&d| d > 3) {
            return Err(Error::InvalidDigit(bad));
        }
        Ok(DigitSequence(digits))
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn to_sequence(&self) -> DnaSequence {
        self.0.iter().map(|&d| Base::ALL[d as usize]).collect()
    }
}

impl Deref for DigitSequence {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

/// Map a strand to a fixed-length decoder row: `A..T -> 1..4`, zero pad past
/// the end of `seq`, anything beyond `k` dropped.
pub fn to_decoder_symbols(seq: &[Base], k: usize) -> Vec<u8> {
    let mut row = vec![0u8; k];
    for (slot, b) in row.iter_mut().zip(seq) {
        *slot = b.symbol();
    }
    row
}

/// Split into consecutive non-overlapping pieces of length `s`; the final
/// piece may be shorter. Panics if `s == 0`.
pub fn segment(seq: &[Base], s: usize) -> Vec<DnaSequence> {
    assert!(s >= 1, "segment length must be positive");
    seq.chunks(s)
        .map(|c| DnaSequence::from_bases(c.to_vec()))
        .collect()
}

pub fn concat_segments<S: AsRef<[Base]>>(parts: &[S]) -> DnaSequence {
    let total = parts.iter().map(|p| p.as_ref().len()).sum();
    let mut out = Vec::with_capacity(total);
    for p in parts {
        out.extend_from_slice(p.as_ref());
    }
    DnaSequence(out)
}

impl AsRef<[Base]> for DnaSequence {
    fn as_ref(&self) -> &[Base] {
        &self.0
    }
}
