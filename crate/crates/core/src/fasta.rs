//! Minimal FASTA reader and writer.
//!
//! Each record is a `>` header line followed by at most one sequence line.
//! Bases are accepted case-insensitively and normalized to uppercase; any
//! other character is an error. A header followed directly by another header
//! (or by an empty line, or end of input) is an empty sequence.

use std::io::{self, BufRead, Write};

use crate::dna::{Base, DnaSequence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    /// Header text without the leading `>`.
    pub id: String,
    pub seq: DnaSequence,
}

impl Record {
    pub fn new(id: impl Into<String>, seq: DnaSequence) -> Self {
        Record { id: id.into(), seq }
    }
}

pub fn parse_str(text: &str) -> Result<Vec<Record>> {
    let mut records: Vec<Record> = Vec::new();
    // whether the current record already received its sequence line
    let mut have_seq = true;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(header) = line.strip_prefix('>') {
            records.push(Record::new(header.trim(), DnaSequence::new()));
            have_seq = false;
            continue;
        }
        let Some(current) = records.last_mut() else {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::Fasta {
                line: line_no,
                msg: "sequence data before first header".into(),
            });
        };
        if have_seq {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::Fasta {
                line: line_no,
                msg: format!("record {:?} has more than one sequence line", current.id),
            });
        }
        have_seq = true;
        current.seq = line
            .trim()
            .chars()
            .enumerate()
            .map(|(pos, ch)| {
                Base::from_char(ch).ok_or_else(|| Error::Fasta {
                    line: line_no,
                    msg: format!("invalid base {ch:?} at column {}", pos + 1),
                })
            })
            .collect::<Result<_>>()?;
    }
    Ok(records)
}

pub fn read<R: BufRead>(mut reader: R) -> io::Result<Result<Vec<Record>>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    Ok(parse_str(&text))
}

pub fn write<W: Write>(mut out: W, records: &[Record]) -> io::Result<()> {
    for r in records {
        writeln!(out, ">{}", r.id)?;
        writeln!(out, "{}", r.seq)?;
    }
    Ok(())
}

pub fn to_string(records: &[Record]) -> String {
    let mut buf = Vec::new();
    write(&mut buf, records).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("FASTA output is ASCII")
}
