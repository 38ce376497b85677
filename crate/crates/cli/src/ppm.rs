//! Binary PPM (`P6`, maxval 255) reading and writing.

use std::io::{self, Read, Write};

use mact::exact::RgbU8;
use mact::harness::Image;

#[derive(Debug, thiserror::Error)]
pub enum PpmError {
    #[error("malformed PPM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0}, only 255 is read")]
    UnsupportedMaxval(u32),
    #[error("pixel data truncated: expected {expected} bytes, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, PpmError> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PpmError::MalformedHeader(format!("bad {what}")))
    }
}

pub fn read_ppm<R: Read>(mut r: R, label: &str) -> Result<Image, PpmError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if !bytes.starts_with(b"P6") {
        return Err(PpmError::MalformedHeader("missing P6 magic".into()));
    }
    let mut h = Header { bytes: &bytes, pos: 2 };
    let width = h.number("width")? as usize;
    let height = h.number("height")? as usize;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PpmError::MalformedHeader("zero image dimension".into()));
    }
    if maxval != 255 {
        return Err(PpmError::UnsupportedMaxval(maxval));
    }
    match bytes.get(h.pos) {
        Some(c) if c.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(PpmError::MalformedHeader("no separator before pixel data".into())),
    }
    let data = &bytes[h.pos..];
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| PpmError::MalformedHeader("image too large".into()))?;
    if data.len() < expected {
        return Err(PpmError::TruncatedData { expected, found: data.len() });
    }
    let pixels = data[..expected].chunks_exact(3).map(|c| RgbU8::new(c[0], c[1], c[2])).collect();
    Ok(Image { width, height, pixels, label: label.to_string() })
}

pub fn write_ppm<W: Write>(mut w: W, width: usize, height: usize, pixels: &[RgbU8]) -> io::Result<()> {
    assert_eq!(pixels.len(), width * height, "pixel count must match dimensions");
    write!(w, "P6\n{width} {height}\n255\n")?;
    let mut data = Vec::with_capacity(pixels.len() * 3);
    for p in pixels {
        data.extend_from_slice(&[p.r, p.g, p.b]);
    }
    w.write_all(&data)?;
    w.flush()
}
