//! Boundary pixels of a normalized digit.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::raster::{BinaryImage, NORMALIZED_SIZE};

/// A 64×64 binary image whose foreground is the contour of a digit: ink
/// pixels with at least one background (or off-image) 4-neighbor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContourImage(BinaryImage);

impl ContourImage {
    /// Wraps an image that is already a contour (e.g. a thin stroke), only
    /// checking its dimensions.
    pub fn from_binary(img: BinaryImage) -> Result<Self> {
        check_normalized(&img)?;
        Ok(ContourImage(img))
    }

    pub fn into_inner(self) -> BinaryImage {
        self.0
    }
}

impl Deref for ContourImage {
    type Target = BinaryImage;

    fn deref(&self) -> &BinaryImage {
        &self.0
    }
}

fn check_normalized(img: &BinaryImage) -> Result<()> {
    if img.width() != NORMALIZED_SIZE || img.height() != NORMALIZED_SIZE {
        return Err(Error::WrongDimensions {
            expected_w: NORMALIZED_SIZE,
            expected_h: NORMALIZED_SIZE,
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(())
}

pub fn extract_contour(bin: &BinaryImage) -> Result<ContourImage> {
    check_normalized(bin)?;
    let n = NORMALIZED_SIZE;
    let is_fg = |r: isize, c: isize| {
        r >= 0 && c >= 0 && (r as usize) < n && (c as usize) < n && bin.get(r as usize, c as usize)
    };
    let mut out = BinaryImage::new(n, n);
    for r in 0..n {
        for c in 0..n {
            if !bin.get(r, c) {
                continue;
            }
            let (ri, ci) = (r as isize, c as isize);
            let interior = is_fg(ri - 1, ci) && is_fg(ri + 1, ci) && is_fg(ri, ci - 1) && is_fg(ri, ci + 1);
            if !interior {
                out.set(r, c, true);
            }
        }
    }
    Ok(ContourImage(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel_is_its_own_contour() {
        let mut img = BinaryImage::new(64, 64);
        img.set(20, 30, true);
        assert_eq!(*extract_contour(&img).unwrap(), img);
    }

    #[test]
    fn solid_block_loses_center() {
        let img = BinaryImage::from_fn(64, 64, |r, c| (10..13).contains(&r) && (10..13).contains(&c));
        let contour = extract_contour(&img).unwrap();
        assert_eq!(contour.count_foreground(), 8);
        assert!(!contour.get(11, 11));
    }

    #[test]
    fn full_image_gives_frame() {
        let img = BinaryImage::from_fn(64, 64, |_, _| true);
        let contour = extract_contour(&img).unwrap();
        assert_eq!(contour.count_foreground(), 252);
        assert!(contour.get(0, 17) && contour.get(63, 63) && !contour.get(1, 1));
    }

    #[test]
    fn thin_strokes_are_unchanged() {
        let img = BinaryImage::from_fn(64, 64, |r, c| {
            (r == 5 && c < 30) || (c == 40 && (10..40).contains(&r)) || (r + c == 70 && r > 45)
        });
        assert_eq!(*extract_contour(&img).unwrap(), img);
    }

    #[test]
    fn wrong_dimensions() {
        assert!(matches!(
            extract_contour(&BinaryImage::new(32, 64)),
            Err(Error::WrongDimensions {
                width: 32,
                height: 64,
                ..
            })
        ));
    }
}
