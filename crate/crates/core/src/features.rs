//! Regional weighted run-length (RWRL) features.
//!
//! A 64×64 contour image is covered by 49 overlapping 16×16 windows placed
//! on an 8-pixel grid. Every window is split into four concentric square
//! bands; for each direction, each contour pixel contributes the length of
//! the maximal run of contour pixels through it (clipped to the window),
//! weighted 8/4/2/1 from the central band outwards. Four directions per
//! window give `49 * 4 = 196` values.

use std::io::{BufRead, Write};

use crate::contour::ContourImage;
use crate::error::{Error, Result};
use crate::raster::NORMALIZED_SIZE;

pub const WINDOW_SIZE: usize = 16;
pub const WINDOW_STRIDE: usize = 8;
/// Windows per row (and per column) of the grid.
pub const GRID_SIDE: usize = (NORMALIZED_SIZE - WINDOW_SIZE) / WINDOW_STRIDE + 1;
pub const WINDOW_COUNT: usize = GRID_SIDE * GRID_SIDE;
pub const FEATURE_DIM: usize = WINDOW_COUNT * Direction::ALL.len();
/// Number of concentric bands per window.
pub const REGION_COUNT: u32 = 4;

const FEATURE_FILE_MAGIC: &str = "#rwrl-v1";

/// A 16×16 window at a grid position of the normalized image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub origin_row: usize,
    pub origin_col: usize,
}

/// The 49 windows in row-major origin order.
pub fn window_grid() -> Vec<Window> {
    (0..GRID_SIDE)
        .flat_map(|r| {
            (0..GRID_SIDE).map(move |c| Window {
                origin_row: r * WINDOW_STRIDE,
                origin_col: c * WINDOW_STRIDE,
            })
        })
        .collect()
}

/// Scan direction of a run, as a unit `(row, col)` step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Horizontal,
    Vertical,
    /// Rising diagonal: up and to the right.
    DiagPlus45,
    /// Falling diagonal: down and to the right.
    DiagMinus45,
}

impl Direction {
    /// Fixed feature order.
    pub const ALL: [Direction; 4] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::DiagPlus45,
        Direction::DiagMinus45,
    ];

    pub const fn step(self) -> (isize, isize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::DiagPlus45 => (-1, 1),
            Direction::DiagMinus45 => (1, 1),
        }
    }
}

/// One of the four concentric bands of a window, `R1` innermost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    R1,
    R2,
    R3,
    R4,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::R1, Region::R2, Region::R3, Region::R4];

    /// 1-based band index.
    pub const fn index(self) -> u32 {
        match self {
            Region::R1 => 1,
            Region::R2 => 2,
            Region::R3 => 3,
            Region::R4 => 4,
        }
    }

    /// `2^(n - i)` with `n = 4` bands.
    pub const fn weight(self) -> u32 {
        1 << (REGION_COUNT - self.index())
    }
}

/// Band of a window-local pixel. Panics outside the 16×16 window.
pub fn region_of(local_row: usize, local_col: usize) -> Region {
    assert!(
        local_row < WINDOW_SIZE && local_col < WINDOW_SIZE,
        "({local_row}, {local_col}) is outside the window"
    );
    let edge_distance = local_row
        .min(local_col)
        .min(WINDOW_SIZE - 1 - local_row)
        .min(WINDOW_SIZE - 1 - local_col);
    match edge_distance {
        6.. => Region::R1,
        4..=5 => Region::R2,
        2..=3 => Region::R3,
        _ => Region::R4,
    }
}

static REGION_WEIGHTS: [[u8; WINDOW_SIZE]; WINDOW_SIZE] = {
    let mut table = [[0u8; WINDOW_SIZE]; WINDOW_SIZE];
    let mut r = 0;
    while r < WINDOW_SIZE {
        let mut c = 0;
        while c < WINDOW_SIZE {
            let mut d = r;
            if c < d {
                d = c;
            }
            if WINDOW_SIZE - 1 - r < d {
                d = WINDOW_SIZE - 1 - r;
            }
            if WINDOW_SIZE - 1 - c < d {
                d = WINDOW_SIZE - 1 - c;
            }
            table[r][c] = match d {
                6.. => 8,
                4..=5 => 4,
                2..=3 => 2,
                _ => 1,
            };
            c += 1;
        }
        r += 1;
    }
    table
};

/// Contour bits of one 16×16 window, one `u16` bitmask per row
/// (bit `c` = local column `c`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Patch {
    rows: [u16; WINDOW_SIZE],
}

impl Patch {
    pub fn from_rows(rows: [u16; WINDOW_SIZE]) -> Self {
        Patch { rows }
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> bool) -> Self {
        let mut patch = Patch::default();
        for r in 0..WINDOW_SIZE {
            for c in 0..WINDOW_SIZE {
                patch.set(r, c, f(r, c));
            }
        }
        patch
    }

    /// Copies the pixels of `window` out of a contour image.
    pub fn from_contour(contour: &ContourImage, window: Window) -> Self {
        let data = contour.data();
        let mut rows = [0u16; WINDOW_SIZE];
        for (r, row) in rows.iter_mut().enumerate() {
            let start = (window.origin_row + r) * NORMALIZED_SIZE + window.origin_col;
            for (c, &v) in data[start..start + WINDOW_SIZE].iter().enumerate() {
                *row |= ((v != 0) as u16) << c;
            }
        }
        Patch { rows }
    }

    pub fn rows(&self) -> &[u16; WINDOW_SIZE] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row] >> col & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        if on {
            self.rows[row] |= 1 << col;
        } else {
            self.rows[row] &= !(1 << col);
        }
    }

    pub fn count(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    #[inline]
    fn get_signed(&self, row: isize, col: isize) -> bool {
        (0..WINDOW_SIZE as isize).contains(&row)
            && (0..WINDOW_SIZE as isize).contains(&col)
            && self.get(row as usize, col as usize)
    }

    fn run_through(&self, row: usize, col: usize, dir: Direction) -> u32 {
        let (dr, dc) = dir.step();
        let (r0, c0) = (row as isize, col as isize);
        let mut len = 1;
        for sign in [1, -1] {
            let (mut r, mut c) = (r0 + sign * dr, c0 + sign * dc);
            while self.get_signed(r, c) {
                len += 1;
                r += sign * dr;
                c += sign * dc;
            }
        }
        len
    }
}

/// Length of the maximal run of foreground pixels through `(row, col)` along
/// `dir`, clipped at the window border.
pub fn run_length_at(patch: &Patch, row: usize, col: usize, dir: Direction) -> Result<u32> {
    if row >= WINDOW_SIZE || col >= WINDOW_SIZE || !patch.get(row, col) {
        return Err(Error::NotForeground { row, col });
    }
    Ok(patch.run_through(row, col, dir))
}

/// `F(d) = sum_i 2^(4-i) * R_i(d)`, where `R_i(d)` sums the run length through
/// every foreground pixel of band `i`.
pub fn window_feature(patch: &Patch, dir: Direction) -> u32 {
    let mut total = 0;
    for (r, &bits) in patch.rows.iter().enumerate() {
        let mut rest = bits;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += REGION_WEIGHTS[r][c] as u32 * patch.run_through(r, c, dir);
        }
    }
    total
}

/// The per-band run-length sums `[R1, R2, R3, R4]` for one direction.
pub fn region_sums(patch: &Patch, dir: Direction) -> [u32; 4] {
    let mut sums = [0; 4];
    for r in 0..WINDOW_SIZE {
        for c in 0..WINDOW_SIZE {
            if patch.get(r, c) {
                sums[region_of(r, c).index() as usize - 1] += patch.run_through(r, c, dir);
            }
        }
    }
    sums
}

/// An RWRL feature vector (or any fixed-length real feature vector).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        FeatureVector(values)
    }

    pub fn zeros(len: usize) -> Self {
        FeatureVector(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(v: Vec<f64>) -> Self {
        FeatureVector(v)
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Computes the 196 features of a contour image: windows in row-major
/// order, four directions per window in [`Direction::ALL`] order.
pub fn extract_features(contour: &ContourImage) -> FeatureVector {
    let mut values = Vec::with_capacity(FEATURE_DIM);
    for window in window_grid() {
        let patch = Patch::from_contour(contour, window);
        for dir in Direction::ALL {
            values.push(window_feature(&patch, dir) as f64);
        }
    }
    FeatureVector(values)
}

/// Per-dimension z-scoring statistics computed on training data.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    /// Mean and population standard deviation of every dimension.
    pub fn fit<V: AsRef<[f64]>>(vectors: &[V]) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyData)?;
        let dim = first.as_ref().len();
        let n = vectors.len() as f64;
        let mut mean = vec![0.0; dim];
        for v in vectors {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            mean.iter_mut().zip(v).for_each(|(m, x)| *m += x);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for v in vectors {
            for ((s, x), m) in var.iter_mut().zip(v.as_ref()).zip(&mean) {
                *s += (x - m) * (x - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(FeatureScaler { mean, std })
    }

    /// Mean 0, std 1: scaling is the identity.
    pub fn identity(dim: usize) -> Self {
        FeatureScaler {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, v: &[f64]) -> Result<Vec<f64>> {
        scale_features(&self.mean, &self.std, v)
    }
}

/// `(v - mean) / std` per dimension; zero-variance dimensions map to 0.
pub fn scale_features(mean: &[f64], std: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if mean.len() != std.len() {
        return Err(Error::LengthMismatch {
            expected: mean.len(),
            found: std.len(),
        });
    }
    if v.len() != mean.len() {
        return Err(Error::LengthMismatch {
            expected: mean.len(),
            found: v.len(),
        });
    }
    Ok(v.iter()
        .zip(mean.iter().zip(std))
        .map(|(x, (m, s))| if *s > 0.0 { (x - m) / s } else { 0.0 })
        .collect())
}

/// A feature vector with its class label.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub features: FeatureVector,
    pub label: u8,
}

impl LabeledSample {
    pub fn new(features: impl Into<FeatureVector>, label: u8) -> Self {
        LabeledSample {
            features: features.into(),
            label,
        }
    }
}

/// Writes `#rwrl-v1,dim=D` followed by one `label,f1,...,fD` line per sample.
pub fn write_feature_file<W: Write>(mut out: W, samples: &[LabeledSample]) -> Result<()> {
    let dim = samples.first().map_or(FEATURE_DIM, |s| s.features.len());
    writeln!(out, "{FEATURE_FILE_MAGIC},dim={dim}")?;
    let mut line = String::new();
    for s in samples {
        if s.features.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.features.len(),
            });
        }
        line.clear();
        line.push_str(&s.label.to_string());
        for v in s.features.as_slice() {
            line.push(',');
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Parses a feature file written by [`write_feature_file`]. Returns the
/// declared dimension with the samples.
pub fn read_feature_file<R: BufRead>(input: R) -> Result<(usize, Vec<LabeledSample>)> {
    let malformed = |line: usize, msg: String| Error::MalformedFeatureFile { line, msg };
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| malformed(1, "missing header".into()))?;
    let dim = header
        .trim()
        .strip_prefix(FEATURE_FILE_MAGIC)
        .and_then(|rest| rest.strip_prefix(",dim="))
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| malformed(1, format!("bad header {header:?}")))?;

    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label = fields
            .next()
            .and_then(|l| l.trim().parse::<u8>().ok())
            .ok_or_else(|| malformed(line_no, "invalid label".into()))?;
        let values = fields
            .map(|f| f.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| malformed(line_no, "invalid feature value".into()))?;
        if values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        samples.push(LabeledSample::new(values, label));
    }
    Ok((dim, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BinaryImage;

    #[test]
    fn grid_geometry() {
        let grid = window_grid();
        assert_eq!(grid.len(), 49);
        assert_eq!(FEATURE_DIM, 196);
        assert_eq!(
            grid[0],
            Window {
                origin_row: 0,
                origin_col: 0
            }
        );
        assert_eq!(
            grid[1],
            Window {
                origin_row: 0,
                origin_col: 8
            }
        );
        assert_eq!(
            grid[48],
            Window {
                origin_row: 48,
                origin_col: 48
            }
        );
        assert!(grid
            .iter()
            .all(|w| w.origin_row + WINDOW_SIZE <= 64 && w.origin_col + WINDOW_SIZE <= 64));
    }

    #[test]
    fn regions() {
        assert_eq!(region_of(7, 7), Region::R1);
        assert_eq!(region_of(4, 4), Region::R2);
        assert_eq!(region_of(0, 15), Region::R4);
        assert_eq!(region_of(2, 8), Region::R3);
        let mut sizes = [0; 4];
        for (r, row) in REGION_WEIGHTS.iter().enumerate() {
            for (c, &w) in row.iter().enumerate() {
                let region = region_of(r, c);
                sizes[region.index() as usize - 1] += 1;
                assert_eq!(w as u32, region.weight());
            }
        }
        assert_eq!(sizes, [16, 48, 80, 112]);
        let weights: Vec<u32> = Region::ALL.iter().map(|r| r.weight()).collect();
        assert_eq!(weights, vec![8, 4, 2, 1]);
    }

    #[test]
    fn run_lengths() {
        let mut patch = Patch::default();
        patch.set(3, 3, true);
        for d in Direction::ALL {
            assert_eq!(run_length_at(&patch, 3, 3, d).unwrap(), 1);
        }

        let patch = Patch::from_fn(|r, c| r == 7 && (6..=8).contains(&c));
        assert_eq!(run_length_at(&patch, 7, 7, Direction::Horizontal).unwrap(), 3);
        assert_eq!(run_length_at(&patch, 7, 7, Direction::Vertical).unwrap(), 1);

        let patch = Patch::from_fn(|r, c| matches!((r, c), (5, 10) | (6, 9) | (7, 8)));
        assert_eq!(run_length_at(&patch, 6, 9, Direction::DiagPlus45).unwrap(), 3);
        assert_eq!(run_length_at(&patch, 6, 9, Direction::DiagMinus45).unwrap(), 1);

        assert!(matches!(
            run_length_at(&patch, 0, 0, Direction::Horizontal),
            Err(Error::NotForeground { row: 0, col: 0 })
        ));
    }

    #[test]
    fn window_feature_examples() {
        for d in Direction::ALL {
            assert_eq!(window_feature(&Patch::default(), d), 0);
        }
        let patch = Patch::from_fn(|r, c| r == 7 && (6..=8).contains(&c));
        assert_eq!(window_feature(&patch, Direction::Horizontal), 72);
        assert_eq!(window_feature(&patch, Direction::Vertical), 24);

        let patch = Patch::from_fn(|r, _| r == 7);
        assert_eq!(window_feature(&patch, Direction::Horizontal), 960);
        assert_eq!(region_sums(&patch, Direction::Horizontal), [64, 64, 64, 64]);
    }

    #[test]
    fn window_feature_matches_region_sums() {
        let patch = Patch::from_fn(|r, c| (r * 7 + c * 3) % 5 < 2);
        for d in Direction::ALL {
            let sums = region_sums(&patch, d);
            let weighted: u32 = Region::ALL
                .iter()
                .zip(sums)
                .map(|(region, s)| region.weight() * s)
                .sum();
            assert_eq!(window_feature(&patch, d), weighted);
        }
    }

    #[test]
    fn blank_contour_gives_zero_vector() {
        let contour = ContourImage::from_binary(BinaryImage::new(64, 64)).unwrap();
        let v = extract_features(&contour);
        assert_eq!(v.len(), 196);
        assert!(v.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn window_runs_are_independent() {
        // a line across the whole image: runs clip at every window border
        let contour = ContourImage::from_binary(BinaryImage::from_fn(64, 64, |r, _| r == 4)).unwrap();
        let v = extract_features(&contour);
        // local row 4: cols 4..11 in R2, 2..3 and 12..13 in R3, the rest in R4
        let weight_sum = 8 * 4 + 4 * 2 + 4;
        for (w, chunk) in v.as_slice().chunks(4).enumerate() {
            if w < GRID_SIDE {
                assert_eq!(chunk, &[16.0 * weight_sum as f64, 44.0, 44.0, 44.0]);
            } else {
                assert_eq!(chunk, &[0.0; 4]);
            }
        }
    }

    #[test]
    fn scaling() {
        let v = [3.0, -1.0, 7.5];
        assert_eq!(scale_features(&v, &[1.0, 2.0, 3.0], &v).unwrap(), vec![0.0; 3]);
        assert_eq!(scale_features(&[1.0; 3], &[0.0; 3], &v).unwrap(), vec![0.0; 3]);
        assert_eq!(
            scale_features(&[0.0; 2], &[2.0; 2], &[2.0, 2.0]).unwrap(),
            vec![1.0, 1.0]
        );
        assert!(matches!(
            scale_features(&[0.0; 2], &[1.0; 2], &[1.0]),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn scaler_fit() {
        let data = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let scaler = FeatureScaler::fit(&data).unwrap();
        assert_eq!(scaler.mean, vec![2.0, 5.0]);
        assert_eq!(scaler.std, vec![1.0, 0.0]);
        assert_eq!(scaler.transform(&[3.0, 9.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn feature_file_round_trip() {
        let samples = vec![
            LabeledSample::new(vec![0.0, 72.0, 960.0], 3),
            LabeledSample::new(vec![1.0, 2.0, 3.0], 9),
        ];
        let mut buf = Vec::new();
        write_feature_file(&mut buf, &samples).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#rwrl-v1,dim=3\n3,0,72,960\n"));
        let (dim, back) = read_feature_file(&buf[..]).unwrap();
        assert_eq!(dim, 3);
        assert_eq!(back, samples);
    }

    #[test]
    fn feature_file_errors() {
        assert!(matches!(
            read_feature_file(&b"label,a,b\n"[..]),
            Err(Error::MalformedFeatureFile { line: 1, .. })
        ));
        assert!(matches!(
            read_feature_file(&b"#rwrl-v1,dim=2\n1,2\n"[..]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            read_feature_file(&b"#rwrl-v1,dim=2\n1,2,x\n"[..]),
            Err(Error::MalformedFeatureFile { line: 2, .. })
        ));
    }
}
