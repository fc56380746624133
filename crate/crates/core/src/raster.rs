//! Raster types, image decoding and the preprocessing chain that turns a
//! scanned digit into a normalized 64×64 binary image.

use crate::error::{Error, Result};

/// Side length of a normalized digit image.
pub const NORMALIZED_SIZE: usize = 64;

/// An 8-bit grayscale raster, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(GrayImage { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        GrayImage {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.data[row * self.width + col] = value;
    }

    pub fn min_max(&self) -> (u8, u8) {
        self.data
            .iter()
            .fold((u8::MAX, u8::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// A binary raster, row-major, with 1 = foreground ink and 0 = background.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryImage {
    /// Builds a binary image, rejecting any value other than 0 or 1.
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        if let Some(v) = data.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidParameter(format!("binary image value {v} is not 0 or 1")));
        }
        Ok(BinaryImage { width, height, data })
    }

    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        BinaryImage {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut img = BinaryImage::new(width, height);
        for r in 0..height {
            for c in 0..width {
                img.data[r * width + c] = f(r, c) as u8;
            }
        }
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col] != 0
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.data[row * self.width + col] = on as u8;
    }

    pub fn count_foreground(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    /// Renders ink as black (0) on a white (255) background.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| if v != 0 { 0 } else { 255 }).collect(),
        }
    }

    /// Tight bounding box of the foreground as `(top, left, bottom, right)`,
    /// inclusive.
    pub fn foreground_bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bounds: Option<(usize, usize, usize, usize)> = None;
        for r in 0..self.height {
            for c in 0..self.width {
                if self.get(r, c) {
                    bounds = Some(match bounds {
                        None => (r, c, r, c),
                        Some((t, l, b, rt)) => (t.min(r), l.min(c), b.max(r), rt.max(c)),
                    });
                }
            }
        }
        bounds
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!(
            "image dimensions must be positive, got {width}x{height}"
        )));
    }
    if len != width * height {
        return Err(Error::LengthMismatch {
            expected: width * height,
            found: len,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

/// Decodes a portable graymap (`P2` or `P5`) or an 8-bit palettized,
/// uncompressed BMP into a grayscale image.
pub fn decode_image(bytes: &[u8]) -> Result<GrayImage> {
    match bytes {
        [] | [_] => Err(Error::MalformedHeader("input too short".into())),
        [b'P', b'2', ..] => decode_pgm(bytes, false),
        [b'P', b'5', ..] => decode_pgm(bytes, true),
        [b'P', b'3', ..] | [b'P', b'6', ..] => Err(Error::UnsupportedFormat("color pixmaps are not supported".into())),
        [b'P', n, ..] if n.is_ascii_digit() => Err(Error::UnsupportedFormat(format!("netpbm variant P{}", *n as char))),
        [b'B', b'M', ..] => decode_bmp(bytes),
        _ => Err(Error::MalformedHeader("unrecognized magic number".into())),
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn next_uint(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("invalid {what}")))
    }
}

fn decode_pgm(bytes: &[u8], binary: bool) -> Result<GrayImage> {
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.next_uint("width")? as usize;
    let height = cur.next_uint("height")? as usize;
    let maxval = cur.next_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::MalformedHeader(format!("maxval {maxval} out of range")));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;
    let rescale = |v: u32| -> Result<u8> {
        if v > maxval {
            return Err(Error::MalformedHeader(format!("sample {v} exceeds maxval {maxval}")));
        }
        Ok(((v as u64 * 255 + maxval as u64 / 2) / maxval as u64) as u8)
    };

    let mut data = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates maxval from the raster
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(Error::MalformedHeader("missing raster separator".into()));
        }
        let raster = &bytes[cur.pos + 1..];
        let bpp = if maxval > 255 { 2 } else { 1 };
        if raster.len() < n * bpp {
            return Err(Error::TruncatedData {
                expected: n * bpp,
                found: raster.len(),
            });
        }
        for chunk in raster[..n * bpp].chunks_exact(bpp) {
            let v = if bpp == 2 {
                u16::from_be_bytes([chunk[0], chunk[1]]) as u32
            } else {
                chunk[0] as u32
            };
            data.push(rescale(v)?);
        }
    } else {
        for _ in 0..n {
            cur.skip_whitespace_and_comments();
            if cur.pos >= bytes.len() {
                return Err(Error::TruncatedData {
                    expected: n,
                    found: data.len(),
                });
            }
            let v = cur.next_uint("sample")?;
            data.push(rescale(v)?);
        }
    }
    Ok(GrayImage { width, height, data })
}

fn read_u16_le(bytes: &[u8], at: usize) -> Result<u16> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| Error::MalformedHeader("bitmap header truncated".into()))
}

fn read_u32_le(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::MalformedHeader("bitmap header truncated".into()))
}

fn decode_bmp(bytes: &[u8]) -> Result<GrayImage> {
    const FILE_HEADER: usize = 14;
    let data_offset = read_u32_le(bytes, 10)? as usize;
    let dib_size = read_u32_le(bytes, FILE_HEADER)? as usize;
    if dib_size < 40 {
        return Err(Error::UnsupportedFormat(format!(
            "bitmap info header of {dib_size} bytes"
        )));
    }
    let width = read_u32_le(bytes, FILE_HEADER + 4)? as i32;
    let raw_height = read_u32_le(bytes, FILE_HEADER + 8)? as i32;
    let bpp = read_u16_le(bytes, FILE_HEADER + 14)?;
    let compression = read_u32_le(bytes, FILE_HEADER + 16)?;
    let colors_used = read_u32_le(bytes, FILE_HEADER + 32)? as usize;

    if width <= 0 || raw_height == 0 {
        return Err(Error::MalformedHeader(format!(
            "bitmap dimensions {width}x{raw_height}"
        )));
    }
    if bpp != 8 {
        return Err(Error::UnsupportedFormat(format!("{bpp}-bit bitmap")));
    }
    if compression != 0 {
        return Err(Error::UnsupportedFormat(format!(
            "compressed bitmap (method {compression})"
        )));
    }
    let width = width as usize;
    let top_down = raw_height < 0;
    let height = raw_height.unsigned_abs() as usize;

    let palette_len = if colors_used == 0 { 256 } else { colors_used.min(256) };
    let palette_start = FILE_HEADER + dib_size;
    let palette_bytes = bytes
        .get(palette_start..palette_start + 4 * palette_len)
        .ok_or_else(|| Error::MalformedHeader("bitmap palette truncated".into()))?;
    let mut palette = Vec::with_capacity(palette_len);
    for entry in palette_bytes.chunks_exact(4) {
        let (b, g, r) = (entry[0], entry[1], entry[2]);
        if r != g || g != b {
            return Err(Error::UnsupportedFormat("color palette".into()));
        }
        palette.push(r);
    }

    let stride = (width + 3) & !3;
    let expected = stride * height;
    let raster = bytes.get(data_offset..).unwrap_or(&[]);
    if raster.len() < expected {
        return Err(Error::TruncatedData {
            expected,
            found: raster.len(),
        });
    }
    let mut data = vec![0u8; width * height];
    for src_row in 0..height {
        let dst_row = if top_down { src_row } else { height - 1 - src_row };
        let line = &raster[src_row * stride..src_row * stride + width];
        for (c, &idx) in line.iter().enumerate() {
            data[dst_row * width + c] = *palette
                .get(idx as usize)
                .ok_or_else(|| Error::MalformedHeader(format!("palette index {idx} out of range")))?;
        }
    }
    Ok(GrayImage { width, height, data })
}

/// Encodes an image as a binary (`P5`) graymap with maxval 255.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

/// Encodes an image as an ASCII (`P2`) graymap with maxval 255.
pub fn encode_pgm_ascii(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", img.width, img.height);
    for row in img.data.chunks(img.width) {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

// ---------------------------------------------------------------------------
// Smoothing and thresholding
// ---------------------------------------------------------------------------

/// Normalized 1-D Gaussian kernel with radius `ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let two_sigma_sq = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|x| (-((x * x) as f64) / two_sigma_sq).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    k
}

/// Symmetric reflection with the edge sample repeated: `... b a | a b c ... | c b ...`.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m >= n {
        2 * n - 1 - m
    } else {
        m
    }
}

/// Separable Gaussian blur with reflected borders. `sigma <= 0` returns a copy.
pub fn gaussian_smooth(img: &GrayImage, sigma: f64) -> GrayImage {
    if sigma.is_nan() || sigma <= 0.0 {
        return img.clone();
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = (img.width, img.height);

    let mut horiz = vec![0f64; w * h];
    for r in 0..h {
        let row = &img.data[r * w..(r + 1) * w];
        for c in 0..w {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                acc += k * row[reflect(c as isize + t as isize - radius, w)] as f64;
            }
            horiz[r * w + c] = acc;
        }
    }

    let mut data = vec![0u8; w * h];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                acc += k * horiz[reflect(r as isize + t as isize - radius, h) * w + c];
            }
            data[r * w + c] = acc.round().clamp(0.0, 255.0) as u8;
        }
    }
    GrayImage {
        width: w,
        height: h,
        data,
    }
}

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in &img.data {
        hist[v as usize] += 1;
    }
    hist
}

/// Otsu's threshold: the level `t` maximizing the between-class variance of
/// the split `{v <= t}` / `{v > t}`. Ties go to the smallest `t`; a constant
/// image returns its own value.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let hist = histogram(img);
    let total = img.data.len() as f64;
    let total_sum: f64 = hist.iter().enumerate().map(|(v, &n)| v as f64 * n as f64).sum();

    let mut best: Option<(u8, f64)> = None;
    let mut weight_bg = 0f64;
    let mut sum_bg = 0f64;
    for (t, &count) in hist.iter().enumerate().take(255) {
        weight_bg += count as f64;
        sum_bg += t as f64 * count as f64;
        let weight_fg = total - weight_bg;
        if weight_bg == 0.0 || weight_fg == 0.0 {
            continue;
        }
        let mean_bg = sum_bg / weight_bg;
        let mean_fg = (total_sum - sum_bg) / weight_fg;
        let between = weight_bg * weight_fg * (mean_bg - mean_fg).powi(2);
        if best.is_none_or(|(_, v)| between > v) {
            best = Some((t as u8, between));
        }
    }
    match best {
        Some((t, _)) => t,
        None => img.data[0],
    }
}

/// Which side of the threshold is ink.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Polarity {
    /// Dark ink on a light page: `pixel <= t` is foreground.
    #[default]
    DarkInk,
    /// Light ink on a dark page: `pixel > t` is foreground.
    LightInk,
}

pub fn binarize(img: &GrayImage, threshold: u8, polarity: Polarity) -> BinaryImage {
    let data = img
        .data
        .iter()
        .map(|&v| match polarity {
            Polarity::DarkInk => (v <= threshold) as u8,
            Polarity::LightInk => (v > threshold) as u8,
        })
        .collect();
    BinaryImage {
        width: img.width,
        height: img.height,
        data,
    }
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Crops to the foreground bounding box, pads the short side to a square
/// (the odd pixel goes bottom/right) and nearest-neighbor resamples to 64×64.
pub fn normalize_digit(bin: &BinaryImage) -> Result<BinaryImage> {
    let (top, left, bottom, right) = bin.foreground_bounds().ok_or(Error::EmptyImage)?;
    let box_h = bottom - top + 1;
    let box_w = right - left + 1;
    let side = box_h.max(box_w);
    // offset of the cropped box inside the padded square
    let pad_top = (side - box_h) / 2;
    let pad_left = (side - box_w) / 2;

    let n = NORMALIZED_SIZE;
    let mut out = BinaryImage::new(n, n);
    for r in 0..n {
        let sr = r * side / n;
        let Some(br) = sr.checked_sub(pad_top).filter(|&v| v < box_h) else {
            continue;
        };
        for c in 0..n {
            let sc = c * side / n;
            if let Some(bc) = sc.checked_sub(pad_left).filter(|&v| v < box_w) {
                if bin.get(top + br, left + bc) {
                    out.set(r, c, true);
                }
            }
        }
    }
    Ok(out)
}

/// Parameters of the preprocessing chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreprocessConfig {
    /// Gaussian sigma; 0 disables smoothing.
    pub sigma: f64,
    pub polarity: Polarity,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            sigma: 1.0,
            polarity: Polarity::DarkInk,
        }
    }
}

/// Smooth, Otsu-binarize and normalize a grayscale digit.
///
/// An image that is constant after smoothing has no ink/page split and is
/// reported as [`Error::EmptyImage`].
pub fn preprocess(img: &GrayImage, config: &PreprocessConfig) -> Result<BinaryImage> {
    let smoothed = gaussian_smooth(img, config.sigma);
    let (lo, hi) = smoothed.min_max();
    if lo == hi {
        return Err(Error::EmptyImage);
    }
    let t = otsu_threshold(&smoothed);
    normalize_digit(&binarize(&smoothed, t, config.polarity))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_binary_pgm() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 255, 0]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.data(), &[0, 255, 255, 0]);
    }

    #[test]
    fn decodes_ascii_pgm() {
        let img = decode_image(b"P2 1 1 255 128").unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.data(), &[128]);
    }

    #[test]
    fn ascii_pgm_with_comments_and_rescale() {
        let img = decode_image(b"P2\n# a comment\n3 1\n# another\n15\n0 15 7\n").unwrap();
        assert_eq!(img.data(), &[0, 255, 119]);
    }

    #[test]
    fn sixteen_bit_pgm() {
        let mut bytes = b"P5 2 1 65535\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xff, 0x00, 0x00]);
        assert_eq!(decode_image(&bytes).unwrap().data(), &[255, 0]);
    }

    #[test]
    fn decode_errors() {
        assert!(matches!(decode_image(b""), Err(Error::MalformedHeader(_))));
        assert!(matches!(decode_image(b"P5 2"), Err(Error::MalformedHeader(_))));
        assert!(matches!(decode_image(b"GIF89a"), Err(Error::MalformedHeader(_))));
        assert!(matches!(
            decode_image(b"P6 1 1 255\n\x00\x00\x00"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            decode_image(b"P5 2 2 255\n\x00\x01"),
            Err(Error::TruncatedData { expected: 4, found: 2 })
        ));
        assert!(matches!(
            decode_image(b"P2 2 2 255 1 2 3"),
            Err(Error::TruncatedData { .. })
        ));
        assert!(matches!(decode_image(b"P2 1 1 10 11"), Err(Error::MalformedHeader(_))));
    }

    fn bmp8(width: usize, height: i32, palette: &[[u8; 3]], rows: &[&[u8]]) -> Vec<u8> {
        let stride = (width + 3) & !3;
        let offset = 14 + 40 + 4 * palette.len();
        let mut out = Vec::new();
        out.extend_from_slice(b"BM");
        out.extend_from_slice(&((offset + stride * rows.len()) as u32).to_le_bytes());
        out.extend_from_slice(&[0; 4]);
        out.extend_from_slice(&(offset as u32).to_le_bytes());
        out.extend_from_slice(&40u32.to_le_bytes());
        out.extend_from_slice(&(width as i32).to_le_bytes());
        out.extend_from_slice(&height.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&8u16.to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        out.extend_from_slice(&((stride * rows.len()) as u32).to_le_bytes());
        out.extend_from_slice(&[0; 8]);
        out.extend_from_slice(&(palette.len() as u32).to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        for p in palette {
            out.extend_from_slice(&[p[2], p[1], p[0], 0]);
        }
        for row in rows {
            let mut line = row.to_vec();
            line.resize(stride, 0);
            out.extend_from_slice(&line);
        }
        out
    }

    #[test]
    fn decodes_bottom_up_bmp() {
        let palette = [[0, 0, 0], [200, 200, 200]];
        // stored bottom row first
        let bytes = bmp8(3, 2, &palette, &[&[1, 1, 0], &[0, 1, 0]]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.data(), &[0, 200, 0, 200, 200, 0]);

        let bytes = bmp8(3, -2, &palette, &[&[1, 1, 0], &[0, 1, 0]]);
        assert_eq!(decode_image(&bytes).unwrap().data(), &[200, 200, 0, 0, 200, 0]);
    }

    #[test]
    fn bmp_rejects_color() {
        let bytes = bmp8(1, 1, &[[255, 0, 0]], &[&[0]]);
        assert!(matches!(decode_image(&bytes), Err(Error::UnsupportedFormat(_))));
        let mut bytes = bmp8(1, 1, &[[0, 0, 0]], &[&[0]]);
        bytes[28] = 24;
        assert!(matches!(decode_image(&bytes), Err(Error::UnsupportedFormat(_))));
        let mut bytes = bmp8(4, 2, &[[0, 0, 0]], &[&[0, 0, 0, 0], &[0, 0, 0, 0]]);
        bytes.truncate(bytes.len() - 2);
        assert!(matches!(decode_image(&bytes), Err(Error::TruncatedData { .. })));
    }

    #[test]
    fn pgm_round_trip() {
        let img = GrayImage::from_raw(3, 2, vec![0, 10, 20, 250, 255, 128]).unwrap();
        assert_eq!(decode_image(&encode_pgm(&img)).unwrap(), img);
        assert_eq!(decode_image(&encode_pgm_ascii(&img)).unwrap(), img);
    }

    #[test]
    fn smoothing_constant_and_identity() {
        let img = GrayImage::filled(9, 5, 100);
        for sigma in [0.5, 1.0, 2.7] {
            assert_eq!(gaussian_smooth(&img, sigma), img);
        }
        let img = GrayImage::from_raw(2, 2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(gaussian_smooth(&img, 0.0), img);
    }

    #[test]
    fn smoothing_impulse_matches_dense_convolution() {
        let mut img = GrayImage::filled(7, 7, 0);
        img.set(3, 3, 255);
        let out = gaussian_smooth(&img, 1.0);

        // dense 2-D convolution with the outer-product kernel, computed directly
        let radius = 3i32;
        let w: Vec<f64> = (-radius..=radius).map(|x| (-(x * x) as f64 / 2.0).exp()).collect();
        let s: f64 = w.iter().sum();
        let k0 = 1.0 / s;
        assert_eq!(out.get(3, 3), (255.0 * k0 * k0).round() as u8);
        for r in 0..7i32 {
            for c in 0..7i32 {
                let expected = 255.0 * w[(r - 3 + 3) as usize] * w[(c - 3 + 3) as usize] / (s * s);
                assert_eq!(out.get(r as usize, c as usize), expected.round() as u8);
            }
        }
    }

    #[test]
    fn reflect_indices() {
        let idx: Vec<usize> = (-4..8).map(|i| reflect(i, 4)).collect();
        assert_eq!(idx, vec![3, 2, 1, 0, 0, 1, 2, 3, 3, 2, 1, 0]);
        // kernel wider than the image
        assert_eq!(reflect(-3, 1), 0);
        assert_eq!(reflect(5, 2), 1);
    }

    #[test]
    fn otsu_constant_image_returns_value() {
        assert_eq!(otsu_threshold(&GrayImage::filled(4, 4, 77)), 77);
    }

    /// Exhaustive sweep of the between-class variance over every level.
    fn otsu_oracle(img: &GrayImage) -> u8 {
        let values: Vec<f64> = img.data().iter().map(|&v| v as f64).collect();
        let mut best = (img.data()[0], -1.0);
        for t in 0..=255u8 {
            let bg: Vec<f64> = values.iter().copied().filter(|&v| v <= t as f64).collect();
            let fg: Vec<f64> = values.iter().copied().filter(|&v| v > t as f64).collect();
            if bg.is_empty() || fg.is_empty() {
                continue;
            }
            let n = values.len() as f64;
            let (w0, w1) = (bg.len() as f64 / n, fg.len() as f64 / n);
            let m0 = bg.iter().sum::<f64>() / bg.len() as f64;
            let m1 = fg.iter().sum::<f64>() / fg.len() as f64;
            let var = w0 * w1 * (m0 - m1).powi(2);
            if var > best.1 + 1e-9 {
                best = (t, var);
            }
        }
        best.0
    }

    #[test]
    fn otsu_two_modes() {
        let mut data = vec![50u8; 100];
        data.extend(std::iter::repeat_n(200, 100));
        let img = GrayImage::from_raw(20, 10, data).unwrap();
        let t = otsu_threshold(&img);
        assert!((50..200).contains(&t));
        assert_eq!(t, otsu_oracle(&img));
        assert_eq!(t, 50);
    }

    #[test]
    fn otsu_black_white_separates() {
        let img = GrayImage::from_raw(4, 1, vec![0, 255, 255, 0]).unwrap();
        let t = otsu_threshold(&img);
        assert!(t <= 254);
        assert_eq!(t, otsu_oracle(&img));
        let bin = binarize(&img, t, Polarity::LightInk);
        assert_eq!(bin.data(), &[0, 1, 1, 0]);
    }

    #[test]
    fn otsu_matches_oracle_on_ramps() {
        let data: Vec<u8> = (0..240u32).map(|i| ((i * 37 + i * i) % 256) as u8).collect();
        let img = GrayImage::from_raw(24, 10, data).unwrap();
        assert_eq!(otsu_threshold(&img), otsu_oracle(&img));
    }

    #[test]
    fn binarize_examples() {
        let white = GrayImage::filled(3, 3, 255);
        assert_eq!(binarize(&white, 128, Polarity::DarkInk).count_foreground(), 0);
        let black = GrayImage::filled(3, 3, 0);
        assert_eq!(binarize(&black, 128, Polarity::DarkInk).count_foreground(), 9);
        let img = GrayImage::from_raw(2, 1, vec![0, 255]).unwrap();
        assert_eq!(binarize(&img, 128, Polarity::DarkInk).data(), &[1, 0]);
    }

    #[test]
    fn normalize_full_and_single_pixel() {
        let full = BinaryImage::from_fn(64, 64, |_, _| true);
        assert_eq!(normalize_digit(&full).unwrap(), full);

        let mut single = BinaryImage::new(30, 17);
        single.set(11, 4, true);
        assert_eq!(normalize_digit(&single).unwrap(), full);
    }

    #[test]
    fn normalize_square_block() {
        let img = BinaryImage::from_fn(100, 100, |r, c| (20..52).contains(&r) && (40..72).contains(&c));
        assert_eq!(
            normalize_digit(&img).unwrap(),
            BinaryImage::from_fn(64, 64, |_, _| true)
        );
    }

    #[test]
    fn normalize_tall_block_is_padded() {
        // 32 rows tall, 16 columns wide: padded with 8 columns on each side
        let img = BinaryImage::from_fn(50, 50, |r, c| (5..37).contains(&r) && (10..26).contains(&c));
        let out = normalize_digit(&img).unwrap();
        // reference resampler: dst column c samples padded column floor(c*32/64)
        for r in 0..64 {
            for c in 0..64 {
                let src = c * 32 / 64;
                assert_eq!(out.get(r, c), (8..24).contains(&src), "({r},{c})");
            }
        }
        assert_eq!(out.count_foreground(), 64 * 32);
    }

    #[test]
    fn normalize_odd_padding_goes_right() {
        // 3 tall, 2 wide: one pad column, placed on the right
        let img = BinaryImage::from_fn(2, 3, |_, _| true);
        let out = normalize_digit(&img).unwrap();
        for c in 0..64 {
            assert_eq!(out.get(0, c), c * 3 / 64 < 2);
        }
    }

    #[test]
    fn normalize_empty_is_error() {
        assert!(matches!(
            normalize_digit(&BinaryImage::new(8, 8)),
            Err(Error::EmptyImage)
        ));
    }

    #[test]
    fn preprocess_blank_is_empty() {
        let blank = GrayImage::filled(40, 40, 255);
        assert!(matches!(
            preprocess(&blank, &PreprocessConfig::default()),
            Err(Error::EmptyImage)
        ));
    }

    #[test]
    fn preprocess_dark_square() {
        let mut img = GrayImage::filled(40, 40, 240);
        for r in 10..30 {
            for c in 15..25 {
                img.set(r, c, 10);
            }
        }
        let out = preprocess(&img, &PreprocessConfig::default()).unwrap();
        assert_eq!((out.width(), out.height()), (64, 64));
        assert!(out.count_foreground() > 0);
        // tall box is centered horizontally
        assert!(!out.get(32, 0) && !out.get(32, 63) && out.get(32, 32));
    }
}
