use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid base {ch:?} at position {pos}")]
    InvalidBase { ch: char, pos: usize },
    #[error("invalid digit {0}: expected 0..=3")]
    InvalidDigit(u8),
    #[error("malformed FASTA at line {line}: {msg}")]
    Fasta { line: usize, msg: String },
    #[error("empty sequence")]
    EmptySequence,
    #[error("invalid segment spec: d={d}, stride={stride}")]
    InvalidSegmentSpec { d: usize, stride: usize },
    #[error("sequence of length {len} is shorter than segment length {d}")]
    SequenceTooShort { len: usize, d: usize },
    #[error("invalid channel spec: {0}")]
    InvalidChannelSpec(String),
    #[error("cannot select {w} of {v} reads")]
    SelectionTooLarge { w: usize, v: usize },
    #[error("selection size must be at least 1")]
    EmptySelection,
    #[error("k-mer length {kmer} must be shorter than strand length {k}")]
    KmerTooLong { kmer: usize, k: usize },
    #[error("length {len} is not a multiple of {multiple}")]
    BadLength { len: usize, multiple: usize },
    #[error("equal adjacent bases at position {pos}")]
    AdjacentDuplicate { pos: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize, usize),
        right: (usize, usize, usize),
    },
    #[error("image {width}x{height} is smaller than the {window}x{window} window")]
    ImageTooSmall {
        width: usize,
        height: usize,
        window: usize,
    },
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("netpbm: {0}")]
    Netpbm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
