//! Netpbm graymap reader (P2 and P5) and P5 writer.

use super::{GrayImage, ImageError};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
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

    /// Next ASCII decimal token, `None` at end of input.
    fn number(&mut self) -> Result<Option<u32>, String> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.data.get(self.pos) {
                None => Ok(None),
                Some(&c) => Err(format!("unexpected byte {:?} at offset {start}", c as char)),
            };
        }
        let text = std::str::from_utf8(&self.data[start..self.pos]).expect("digits are ascii");
        text.parse()
            .map(Some)
            .map_err(|_| format!("number {text} is too large"))
    }
}

fn header_field(cur: &mut Cursor<'_>, name: &str) -> Result<u32, ImageError> {
    match cur.number() {
        Ok(Some(v)) => Ok(v),
        Ok(None) => Err(ImageError::MalformedHeader(format!("missing {name}"))),
        Err(e) => Err(ImageError::MalformedHeader(format!("{name}: {e}"))),
    }
}

/// Decodes a P2 or P5 graymap. Samples are rescaled to 0..=255 when
/// `maxval` is below 255.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(ImageError::MalformedHeader("expected magic P2 or P5".into())),
    };
    let mut cur = Cursor { data: bytes, pos: 2 };
    if !cur.data.get(2).is_some_and(|c| c.is_ascii_whitespace() || *c == b'#') {
        return Err(ImageError::MalformedHeader("expected whitespace after magic".into()));
    }
    let width = header_field(&mut cur, "width")? as usize;
    let height = header_field(&mut cur, "height")? as usize;
    let maxval = header_field(&mut cur, "maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval == 0 || maxval > 255 {
        return Err(ImageError::UnsupportedMaxval(maxval));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| ImageError::MalformedHeader("dimensions overflow".into()))?;

    let raw: Vec<u32> = if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        if !cur.data.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(ImageError::MalformedHeader("expected whitespace after maxval".into()));
        }
        let start = cur.pos + 1;
        let payload = &bytes[start.min(bytes.len())..];
        if payload.len() < expected {
            return Err(ImageError::Truncated {
                expected,
                actual: payload.len(),
            });
        }
        payload[..expected].iter().map(|&b| b as u32).collect()
    } else {
        let mut values = Vec::with_capacity(expected);
        while values.len() < expected {
            match cur.number() {
                Ok(Some(v)) => values.push(v),
                Ok(None) => {
                    return Err(ImageError::Truncated {
                        expected,
                        actual: values.len(),
                    })
                }
                Err(e) => return Err(ImageError::MalformedPayload(e)),
            }
        }
        values
    };

    let mut luminance = Vec::with_capacity(expected);
    for (i, v) in raw.into_iter().enumerate() {
        if v > maxval {
            return Err(ImageError::MalformedPayload(format!(
                "sample {i} is {v}, above maxval {maxval}"
            )));
        }
        luminance.push(if maxval == 255 {
            v as u8
        } else {
            ((v * 255 * 2 + maxval) / (2 * maxval)) as u8
        });
    }
    GrayImage::new(width, height, luminance)
}

/// Encodes `img` as a binary (P5) graymap with maxval 255.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.luminance());
    out
}

/// Encodes `img` as an ASCII (P2) graymap, one image row per line.
pub fn write_pgm_ascii(img: &GrayImage) -> String {
    let mut out = format!("P2\n{} {}\n255\n", img.width(), img.height());
    for row in img.luminance().chunks(img.width()) {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
