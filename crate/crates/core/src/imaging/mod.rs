//! Real images in, binary retinas out; mental images back to grayscale.

mod dataset;
mod pgm;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mental::MentalImage;
use crate::pattern::BinaryPattern;

pub use dataset::{load_image_folder, load_labeled_dir, load_pattern, FileDiagnostic, Loaded};
pub use pgm::{load_pgm, write_pgm, write_pgm_ascii};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("malformed PGM payload: {0}")]
    MalformedPayload(String),
    #[error("truncated PGM payload: expected {expected} samples, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("unsupported PGM maxval {0} (must be 1..=255)")]
    UnsupportedMaxval(u32),
    #[error("image has {actual} samples but {width}x{height} requires {}", width * height)]
    SizeMismatch {
        width: usize,
        height: usize,
        actual: usize,
    },
    #[error("invalid binarize config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl ImageError {
    pub fn code(&self) -> &'static str {
        match self {
            ImageError::MalformedHeader(_)
            | ImageError::MalformedPayload(_)
            | ImageError::Truncated { .. }
            | ImageError::UnsupportedMaxval(_)
            | ImageError::SizeMismatch { .. } => "BAD_IMAGE",
            ImageError::InvalidConfig(_) => "INVALID_CONFIG",
            ImageError::Io { .. } => "IO_ERROR",
        }
    }
}

/// 8-bit luminance raster, row-major. 0 is black, 255 is white.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    luminance: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, luminance: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || luminance.len() != width * height {
            return Err(ImageError::SizeMismatch {
                width,
                height,
                actual: luminance.len(),
            });
        }
        Ok(Self {
            width,
            height,
            luminance,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Black (0) where the pattern is 1, white (255) elsewhere.
    pub fn from_pattern(pattern: &BinaryPattern) -> Self {
        Self {
            width: pattern.width(),
            height: pattern.height(),
            luminance: pattern.bits().iter().map(|&b| if b == 1 { 0 } else { 255 }).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn luminance(&self) -> &[u8] {
        &self.luminance
    }

    /// Nearest-neighbour enlargement by integer factors.
    pub fn upscale(&self, fx: usize, fy: usize) -> Self {
        let (w, h) = (self.width * fx, self.height * fy);
        let mut luminance = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                luminance.push(self.luminance[(y / fy) * self.width + x / fx]);
            }
        }
        Self {
            width: w,
            height: h,
            luminance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinarizeConfig {
    /// A pooled cell becomes 1 when its mean luminance is strictly below this.
    pub threshold: u8,
    pub target_width: usize,
    pub target_height: usize,
}

pub const DEFAULT_THRESHOLD: u8 = 128;

impl BinarizeConfig {
    pub fn new(target_width: usize, target_height: usize, threshold: u8) -> Result<Self, ImageError> {
        if target_width == 0 || target_height == 0 {
            return Err(ImageError::InvalidConfig(format!(
                "target size {target_width}x{target_height} has no pixels"
            )));
        }
        Ok(Self {
            threshold,
            target_width,
            target_height,
        })
    }
}

/// Source range `[start, end)` covered by output cell `i` of `out` cells.
fn span(i: usize, src: usize, out: usize) -> (usize, usize) {
    let start = i * src / out;
    let end = ((i + 1) * src / out).max(start + 1);
    (start, end)
}

/// Mean-pools `img` onto the target grid, then marks cells darker than the
/// threshold as 1.
///
/// Cell `(x, y)` averages source columns `[x*W/w, (x+1)*W/w)` and rows
/// `[y*H/h, (y+1)*H/h)`, each range widened to at least one pixel when
/// enlarging.
pub fn binarize(img: &GrayImage, cfg: &BinarizeConfig) -> BinaryPattern {
    let (tw, th) = (cfg.target_width, cfg.target_height);
    let threshold = cfg.threshold as u64;
    let mut bits = Vec::with_capacity(tw * th);
    for y in 0..th {
        let (y0, y1) = span(y, img.height, th);
        for x in 0..tw {
            let (x0, x1) = span(x, img.width, tw);
            let mut sum = 0u64;
            for row in y0..y1 {
                let base = row * img.width;
                sum += img.luminance[base + x0..base + x1]
                    .iter()
                    .map(|&v| v as u64)
                    .sum::<u64>();
            }
            let count = ((y1 - y0) * (x1 - x0)) as u64;
            // mean < threshold, without division
            bits.push((sum < threshold * count) as u8);
        }
    }
    BinaryPattern::new(tw, th, bits).expect("binarize produces a full grid")
}

/// Grayscale prototype: the largest count is black, zero is white.
///
/// `luminance = 255 - round(255 * count / max_count)`, rounding half away
/// from zero; an all-zero image renders white.
pub fn render_mental_image(mi: &MentalImage) -> GrayImage {
    let luminance = if mi.max_count == 0 {
        vec![255; mi.counts.len()]
    } else {
        let max = mi.max_count as u128;
        mi.counts
            .iter()
            .map(|&c| {
                let scaled = (255 * c as u128 * 2 + max) / (2 * max);
                (255 - scaled) as u8
            })
            .collect()
    };
    GrayImage {
        width: mi.width,
        height: mi.height,
        luminance,
    }
}
