//! Simulation toolkit for DNA data storage.
//!
//! Strands pass through an insertion/deletion/substitution [`channel`] that
//! yields several noisy reads per strand. [`mrs`] screens those reads by
//! positional consensus (with k-mer rescoring on ties), [`codec`] maps bytes
//! to strands and back, [`bio`] measures GC content, homopolymer runs and the
//! windowed composition penalty, and [`metrics`] scores the result.
//!
//! Numeric code is generic over [`scalar::Field`] / [`scalar::Real`]; read
//! scores are exact rationals ([`Score`]). The aliases below fix the usual
//! instantiations.

pub mod bio;
pub mod channel;
pub mod codec;
pub mod dna;
pub mod error;
pub mod fasta;
pub mod metrics;
pub mod mrs;
pub mod netpbm;
pub mod scalar;

pub use channel::{ChannelSpec, ReadSet};
pub use codec::{CodecSpec, CodecVariant, Payload};
pub use dna::{Base, DigitSequence, DnaSequence};
pub use error::{Error, Result};
pub use metrics::RasterImage;
pub use mrs::{Score, ScreeningResult};
pub use scalar::{Field, Real};

/// Exact rational scalar.
pub type Exact = num_rational::Ratio<i64>;

pub type ConstraintReport = bio::ConstraintReport<f64>;
pub type ConstraintReportF32 = bio::ConstraintReport<f32>;
pub type ConstraintReportExact = bio::ConstraintReport<Exact>;
pub type SegmentStat = bio::SegmentStat<f64>;
pub type SegmentStatExact = bio::SegmentStat<Exact>;
