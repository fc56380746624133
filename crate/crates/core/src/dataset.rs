//! Dataset manifests and a deterministic synthetic digit generator.
//!
//! The generator draws ten fixed stroke templates, one per class. Each
//! instance gets its own random rotation, scale, translation and pen width,
//! so the corpus exercises the normalization stage the way scanned
//! handwriting would.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::{encode_pgm, GrayImage};

pub const NUM_CLASSES: u8 = 10;
const IMAGE_EXTENSIONS: [&str; 2] = ["pgm", "bmp"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path relative to the manifest root.
    pub path: PathBuf,
    pub label: u8,
}

/// Labelled image files under a root directory, sorted by
/// `(label, file name)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub root: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES as usize] {
        let mut counts = [0; NUM_CLASSES as usize];
        for e in &self.entries {
            counts[e.label as usize] += 1;
        }
        counts
    }

    pub fn labels(&self) -> Vec<u8> {
        self.entries.iter().map(|e| e.label).collect()
    }

    pub fn full_path(&self, entry: &ManifestEntry) -> PathBuf {
        self.root.join(&entry.path)
    }

    /// `path,label` rows with `/`-separated relative paths.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("path,label\n");
        for e in &self.entries {
            let parts: Vec<String> = e
                .path
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            writeln!(out, "{},{}", parts.join("/"), e.label).unwrap();
        }
        out
    }
}

/// Lists the images in `root/0` .. `root/9`.
pub fn scan_dataset(root: &Path) -> Result<Manifest> {
    let mut entries = Vec::new();
    for label in 0..NUM_CLASSES {
        let dir = root.join(label.to_string());
        if !dir.is_dir() {
            return Err(Error::MissingClassDir(dir));
        }
        let mut names = Vec::new();
        for item in fs::read_dir(&dir)? {
            let item = item?;
            if !item.file_type()?.is_file() {
                continue;
            }
            let path = item.path();
            let is_image = path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)));
            if is_image {
                names.push(item.file_name());
            }
        }
        names.sort();
        entries.extend(names.into_iter().map(|name| ManifestEntry {
            path: PathBuf::from(label.to_string()).join(name),
            label,
        }));
    }
    if entries.is_empty() {
        return Err(Error::NoImages(root.to_path_buf()));
    }
    Ok(Manifest {
        root: root.to_path_buf(),
        entries,
    })
}

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

type Point = (f64, f64);

/// Elliptical arc in unit glyph coordinates (y down), angles in degrees;
/// 90° points down.
fn arc(cx: f64, cy: f64, rx: f64, ry: f64, from: f64, to: f64) -> Vec<Point> {
    let steps = (((to - from).abs() / 7.5).ceil() as usize).max(2);
    (0..=steps)
        .map(|i| {
            let a = (from + (to - from) * i as f64 / steps as f64) * PI / 180.0;
            (cx + rx * a.cos(), cy + ry * a.sin())
        })
        .collect()
}

fn line(points: &[Point]) -> Vec<Point> {
    points.to_vec()
}

fn chain(parts: Vec<Vec<Point>>) -> Vec<Point> {
    parts.into_iter().flatten().collect()
}

/// Stroke polylines of class `label`, in a unit box.
pub fn template(label: u8) -> Vec<Vec<Point>> {
    match label {
        // round ring
        0 => vec![arc(0.5, 0.5, 0.32, 0.4, 0.0, 360.0)],
        // loop on top with a tail to the lower right
        1 => vec![chain(vec![
            arc(0.42, 0.3, 0.22, 0.2, 0.0, -270.0),
            line(&[(0.55, 0.6), (0.72, 0.95)]),
        ])],
        // hooked top with a flat foot
        2 => vec![chain(vec![
            arc(0.5, 0.3, 0.27, 0.2, 180.0, 405.0),
            line(&[(0.2, 0.85), (0.85, 0.85)]),
        ])],
        // two bowls open to the left
        3 => vec![
            arc(0.45, 0.28, 0.25, 0.18, 200.0, 450.0),
            arc(0.45, 0.68, 0.3, 0.22, 270.0, 520.0),
        ],
        // two side-by-side loops
        4 => vec![
            arc(0.3, 0.5, 0.2, 0.28, 0.0, 360.0),
            arc(0.72, 0.5, 0.18, 0.28, 0.0, 360.0),
        ],
        // stem with a bent arm and a top flag
        5 => vec![
            line(&[(0.85, 0.1), (0.62, 0.1), (0.62, 0.95)]),
            line(&[(0.18, 0.18), (0.28, 0.55), (0.62, 0.55)]),
        ],
        // bottom loop with a rising sweep
        6 => vec![
            arc(0.5, 0.68, 0.26, 0.24, 0.0, 360.0),
            arc(0.78, 0.68, 0.54, 0.58, 180.0, 265.0),
        ],
        // V with a curl at the top left
        7 => vec![
            line(&[(0.2, 0.2), (0.5, 0.92), (0.85, 0.12)]),
            arc(0.16, 0.16, 0.1, 0.08, 0.0, 330.0),
        ],
        // open wedge pointing left
        8 => vec![line(&[(0.82, 0.1), (0.18, 0.5), (0.82, 0.9)])],
        // loop on top with a tail sweeping down to the left
        9 => vec![
            arc(0.5, 0.28, 0.22, 0.2, 0.0, 360.0),
            arc(0.3, 0.28, 0.42, 0.68, 0.0, 100.0),
        ],
        _ => panic!("no template for class {label}"),
    }
}

/// Random instance parameters of one rendered glyph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jitter {
    /// Rotation in degrees, within ±10.
    pub rotation: f64,
    /// Isotropic scale, within 0.85..=1.15.
    pub scale: f64,
    /// Translation in pixels, each within ±3.
    pub shift: (f64, f64),
    /// Pen width in pixels, within 2..=4.
    pub thickness: f64,
}

impl Jitter {
    pub fn sample<R: Rng>(rng: &mut R) -> Self {
        Jitter {
            rotation: rng.random_range(-10.0..=10.0),
            scale: rng.random_range(0.85..=1.15),
            shift: (rng.random_range(-3.0..=3.0), rng.random_range(-3.0..=3.0)),
            thickness: rng.random_range(2.0..=4.0),
        }
    }
}

const CANVAS: usize = 64;
const GLYPH_BOX: f64 = 36.0;
const PAGE: f64 = 235.0;
const INK: f64 = 30.0;
const NOISE_SIGMA: f64 = 6.0;

fn instance_seed(seed: u64, label: u8, index: usize) -> u64 {
    seed ^ ((label as u64) << 32 | index as u64)
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    (qx * qx + qy * qy).sqrt()
}

/// Renders one glyph with the given jitter: dark ink on light paper, soft
/// pen edges, mild Gaussian sensor noise drawn from `rng`.
pub fn render_glyph<R: Rng>(label: u8, jitter: &Jitter, rng: &mut R) -> GrayImage {
    let center = CANVAS as f64 / 2.0;
    let (sin, cos) = (jitter.rotation * PI / 180.0).sin_cos();
    let to_canvas = |(u, v): Point| -> Point {
        let x = (u - 0.5) * GLYPH_BOX * jitter.scale;
        let y = (v - 0.5) * GLYPH_BOX * jitter.scale;
        (
            center + x * cos - y * sin + jitter.shift.0,
            center + x * sin + y * cos + jitter.shift.1,
        )
    };

    let radius = jitter.thickness / 2.0;
    let mut dist = vec![f64::INFINITY; CANVAS * CANVAS];
    for stroke in template(label) {
        let pts: Vec<Point> = stroke.into_iter().map(to_canvas).collect();
        for seg in pts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let reach = radius + 1.0;
            let x0 = (a.0.min(b.0) - reach).floor().max(0.0) as usize;
            let x1 = (a.0.max(b.0) + reach).ceil().min(CANVAS as f64 - 1.0) as usize;
            let y0 = (a.1.min(b.1) - reach).floor().max(0.0) as usize;
            let y1 = (a.1.max(b.1) + reach).ceil().min(CANVAS as f64 - 1.0) as usize;
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let d = point_segment_distance((x as f64 + 0.5, y as f64 + 0.5), a, b);
                    let slot = &mut dist[y * CANVAS + x];
                    if d < *slot {
                        *slot = d;
                    }
                }
            }
        }
    }

    let noise = Normal::new(0.0, NOISE_SIGMA).expect("valid noise sigma");
    let data = dist
        .iter()
        .map(|&d| {
            // coverage falls off over one pixel at the pen edge
            let coverage = (radius + 0.5 - d).clamp(0.0, 1.0);
            let value = PAGE + (INK - PAGE) * coverage + noise.sample(rng);
            value.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::from_raw(CANVAS, CANVAS, data).expect("canvas dimensions")
}

/// The `index`-th synthetic sample of class `label`. Depends only on
/// `(seed, label, index)`.
pub fn synth_image(seed: u64, label: u8, index: usize) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, label, index));
    let jitter = Jitter::sample(&mut rng);
    render_glyph(label, &jitter, &mut rng)
}

/// `per_class` images of every class, ordered by class then index.
pub fn synth_corpus(seed: u64, per_class: usize) -> Vec<(GrayImage, u8)> {
    (0..NUM_CLASSES)
        .flat_map(|label| (0..per_class).map(move |i| (label, i)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(label, i)| (synth_image(seed, label, i), label))
        .collect()
}

/// Writes `out/<digit>/<index>.pgm` for every synthetic sample plus
/// `out/manifest.csv`.
pub fn synth_generate(seed: u64, per_class: usize, out: &Path) -> Result<Manifest> {
    if per_class == 0 {
        return Err(Error::InvalidParameter("per_class must be at least 1".into()));
    }
    for label in 0..NUM_CLASSES {
        fs::create_dir_all(out.join(label.to_string()))?;
    }
    let entries: Vec<ManifestEntry> = (0..NUM_CLASSES)
        .flat_map(|label| (0..per_class).map(move |i| (label, i)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(label, i)| {
            let rel = PathBuf::from(label.to_string()).join(format!("{i:04}.pgm"));
            fs::write(out.join(&rel), encode_pgm(&synth_image(seed, label, i)))?;
            Ok(ManifestEntry { path: rel, label })
        })
        .collect::<Result<_>>()?;
    let manifest = Manifest {
        root: out.to_path_buf(),
        entries,
    };
    fs::write(out.join("manifest.csv"), manifest.to_csv())?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{preprocess, PreprocessConfig};

    #[test]
    fn synth_is_deterministic() {
        assert_eq!(synth_image(5, 3, 17), synth_image(5, 3, 17));
        assert_ne!(synth_image(5, 3, 17), synth_image(6, 3, 17));
        assert_ne!(synth_image(5, 3, 17), synth_image(5, 3, 18));
    }

    #[test]
    fn classes_differ() {
        let images: Vec<GrayImage> = (0..NUM_CLASSES).map(|c| synth_image(1, c, 0)).collect();
        for a in 0..images.len() {
            for b in a + 1..images.len() {
                let diff = images[a]
                    .data()
                    .iter()
                    .zip(images[b].data())
                    .filter(|(x, y)| x.abs_diff(**y) > 100)
                    .count();
                assert!(diff > 50, "classes {a} and {b} differ in only {diff} pixels");
            }
        }
    }

    #[test]
    fn jitter_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let j = Jitter::sample(&mut rng);
            assert!(j.rotation.abs() <= 10.0);
            assert!((0.85..=1.15).contains(&j.scale));
            assert!(j.shift.0.abs() <= 3.0 && j.shift.1.abs() <= 3.0);
            assert!((2.0..=4.0).contains(&j.thickness));
        }
    }

    #[test]
    fn glyphs_stay_on_canvas() {
        // worst-case jitter must not clip the glyph
        for label in 0..NUM_CLASSES {
            let jitter = Jitter {
                rotation: 10.0,
                scale: 1.15,
                shift: (3.0, 3.0),
                thickness: 4.0,
            };
            let img = render_glyph(label, &jitter, &mut ChaCha8Rng::seed_from_u64(0));
            let bin = preprocess(&img, &PreprocessConfig::default()).unwrap();
            assert!(bin.count_foreground() > 0);
            for i in 0..CANVAS {
                for edge in [
                    img.get(0, i),
                    img.get(CANVAS - 1, i),
                    img.get(i, 0),
                    img.get(i, CANVAS - 1),
                ] {
                    assert!(edge > 150, "class {label} touches the border");
                }
            }
        }
    }
}
