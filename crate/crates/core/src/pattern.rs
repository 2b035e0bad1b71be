use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WisardError};

/// A width x height grid of bits, stored row-major.
///
/// A black (drawn) pixel is 1 and a white background pixel is 0. Pixel
/// `(x, y)` lives at linear index `y * width + x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryPattern {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl BinaryPattern {
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(WisardError::EmptyRetina);
        }
        let expected = width * height;
        if bits.len() != expected {
            return Err(WisardError::BitCountMismatch {
                width,
                height,
                expected,
                actual: bits.len(),
            });
        }
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(WisardError::NonBinaryBit { index, value });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0; width * height])
    }

    pub fn from_bools(width: usize, height: usize, bits: &[bool]) -> Result<Self> {
        Self::new(width, height, bits.iter().map(|&b| b as u8).collect())
    }

    /// Parses rows of `1`/`#` (black) and `0`/`.` (white).
    ///
    /// ```
    /// use wisard_core::BinaryPattern;
    /// let t = BinaryPattern::from_rows(&["111", ".1.", ".1."]).unwrap();
    /// assert_eq!(t.width(), 3);
    /// assert_eq!(t.ones(), 5);
    /// ```
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map(|r| r.as_ref().chars().count()).unwrap_or(0);
        let mut bits = Vec::with_capacity(width * height);
        for (y, row) in rows.iter().enumerate() {
            if row.as_ref().chars().count() != width {
                return Err(WisardError::InvalidPattern(format!("row {y} is ragged")));
            }
            for c in row.as_ref().chars() {
                bits.push(match c {
                    '1' | '#' => 1,
                    '0' | '.' => 0,
                    other => {
                        return Err(WisardError::InvalidPattern(format!(
                            "unexpected pattern character {other:?}"
                        )))
                    }
                });
            }
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    /// Bit at linear index `index`.
    pub fn get(&self, index: usize) -> Option<u8> {
        self.bits.get(index).copied()
    }

    pub fn at(&self, x: usize, y: usize) -> Option<u8> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.get(y * self.width + x)
    }

    pub fn set(&mut self, index: usize, value: bool) -> Result<()> {
        let len = self.bits.len();
        let bit = self
            .bits
            .get_mut(index)
            .ok_or(WisardError::IndexOutOfBounds { index, len })?;
        *bit = value as u8;
        Ok(())
    }

    /// Inverts the bit at `index`.
    pub fn flip(&mut self, index: usize) -> Result<()> {
        let len = self.bits.len();
        let bit = self
            .bits
            .get_mut(index)
            .ok_or(WisardError::IndexOutOfBounds { index, len })?;
        *bit ^= 1;
        Ok(())
    }

    /// Copy of this pattern with the given indices inverted.
    pub fn flipped(&self, indices: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        for &i in indices {
            out.flip(i)?;
        }
        Ok(out)
    }

    /// Number of black pixels.
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn same_dims(&self, width: usize, height: usize) -> bool {
        self.width == width && self.height == height
    }
}

impl fmt::Display for BinaryPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.bits.chunks(self.width).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for &b in row {
                f.write_str(if b == 1 { "#" } else { "." })?;
            }
        }
        Ok(())
    }
}
