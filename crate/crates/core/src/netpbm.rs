//! Binary PGM (`P5`) and PPM (`P6`) images with maxval 255.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::metrics::RasterImage;

fn bad(msg: impl Into<String>) -> Error {
    Error::Netpbm(msg.into())
}

struct Header<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&c) = self.data.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(bad(format!("missing {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| bad(format!("{what} out of range")))
    }
}

pub fn decode(data: &[u8]) -> Result<RasterImage> {
    let channels = match data.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(bad("expected P5 or P6 magic")),
    };
    let mut h = Header { data, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval != 255 {
        return Err(bad(format!("maxval {maxval} unsupported (expected 255)")));
    }
    // exactly one whitespace byte separates the header from the raster
    match data.get(h.pos) {
        Some(c) if c.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(bad("missing whitespace after maxval")),
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| bad("image dimensions overflow"))?;
    let raster = data
        .get(h.pos..h.pos + len)
        .ok_or_else(|| bad(format!("truncated raster: need {len} bytes")))?;
    RasterImage::new(width, height, channels, raster.to_vec())
}

pub fn encode(img: &RasterImage) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn read_file(path: &std::path::Path) -> io::Result<Result<RasterImage>> {
    Ok(decode(&std::fs::read(path)?))
}

pub fn write_file(path: &std::path::Path, img: &RasterImage) -> io::Result<()> {
    std::fs::File::create(path)?.write_all(&encode(img))
}
