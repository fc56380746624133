#![allow(dead_code)]

use rayon::prelude::*;
use rwrl::dataset::synth_corpus;
use rwrl::eval::ConfusionMatrix;
use rwrl::features::{Direction, Patch};
use rwrl::{image_features, LabeledSample, PreprocessConfig};

/// A 10-class confusion matrix of 600 samples per class, rows are true
/// classes.
pub const REFERENCE_CONFUSION: [[u64; 10]; 10] = [
    [591, 1, 0, 0, 0, 1, 2, 1, 2, 2],
    [0, 584, 4, 1, 2, 1, 4, 3, 0, 1],
    [2, 7, 568, 4, 3, 0, 1, 6, 6, 3],
    [0, 1, 8, 560, 0, 16, 2, 4, 7, 2],
    [0, 1, 2, 0, 584, 0, 4, 2, 0, 7],
    [1, 3, 0, 17, 0, 563, 7, 0, 4, 5],
    [2, 5, 3, 2, 3, 4, 578, 0, 3, 0],
    [0, 6, 6, 3, 7, 0, 0, 564, 2, 12],
    [2, 2, 5, 7, 3, 4, 2, 4, 559, 12],
    [1, 4, 1, 5, 16, 8, 1, 8, 6, 550],
];

/// Per-class rows of its report at 3 decimals: TPR, FPR, precision, recall, F, MCC, AUC.
pub const REFERENCE_METRICS: [[f64; 7]; 10] = [
    [0.985, 0.001, 0.987, 0.985, 0.986, 0.984, 0.992],
    [0.973, 0.006, 0.951, 0.973, 0.962, 0.958, 0.984],
    [0.947, 0.005, 0.951, 0.947, 0.949, 0.943, 0.971],
    [0.933, 0.007, 0.935, 0.933, 0.934, 0.927, 0.963],
    [0.973, 0.006, 0.945, 0.973, 0.959, 0.954, 0.984],
    [0.938, 0.006, 0.943, 0.938, 0.941, 0.934, 0.966],
    [0.963, 0.004, 0.962, 0.963, 0.963, 0.958, 0.980],
    [0.940, 0.005, 0.953, 0.940, 0.946, 0.940, 0.967],
    [0.932, 0.006, 0.949, 0.932, 0.940, 0.934, 0.963],
    [0.917, 0.008, 0.926, 0.917, 0.921, 0.913, 0.954],
];

/// Average row, same columns as [`REFERENCE_METRICS`].
pub const REFERENCE_AVERAGE: [f64; 7] = [0.950, 0.006, 0.950, 0.950, 0.950, 0.945, 0.972];

pub fn reference_confusion() -> ConfusionMatrix {
    let rows: Vec<Vec<u64>> = REFERENCE_CONFUSION.iter().map(|r| r.to_vec()).collect();
    ConfusionMatrix::from_rows(&(0..10).collect::<Vec<u8>>(), &rows).unwrap()
}

pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Band weight from nested-square membership, written independently of the
/// library's edge-distance rule.
pub fn oracle_weight(r: usize, c: usize) -> u64 {
    let inside = |lo: usize, hi: usize| (lo..=hi).contains(&r) && (lo..=hi).contains(&c);
    if inside(6, 9) {
        8
    } else if inside(4, 11) {
        4
    } else if inside(2, 13) {
        2
    } else {
        1
    }
}

/// Every scan line of direction `d` through a 16×16 window, as ordered
/// pixel lists.
pub fn scan_lines(d: Direction) -> Vec<Vec<(usize, usize)>> {
    let n = 16i32;
    let mut lines = Vec::new();
    match d {
        Direction::Horizontal => {
            for r in 0..n {
                lines.push((0..n).map(|c| (r, c)).collect::<Vec<_>>());
            }
        }
        Direction::Vertical => {
            for c in 0..n {
                lines.push((0..n).map(|r| (r, c)).collect());
            }
        }
        Direction::DiagMinus45 => {
            // c - r constant
            for k in -(n - 1)..n {
                lines.push(
                    (0..n)
                        .map(|r| (r, r + k))
                        .filter(|&(_, c)| (0..n).contains(&c))
                        .collect(),
                );
            }
        }
        Direction::DiagPlus45 => {
            // r + c constant, walked upwards
            for s in 0..(2 * n - 1) {
                lines.push(
                    (0..n)
                        .rev()
                        .map(|r| (r, s - r))
                        .filter(|&(_, c)| (0..n).contains(&c))
                        .collect(),
                );
            }
        }
    }
    lines
        .into_iter()
        .map(|l| l.into_iter().map(|(r, c)| (r as usize, c as usize)).collect())
        .collect()
}

/// Brute-force window feature: split every scan line into maximal runs,
/// give each pixel its run's length, and sum the band-weighted lengths.
pub fn oracle_window_feature(bits: &[[bool; 16]; 16], d: Direction) -> u64 {
    let mut total = 0;
    for line in scan_lines(d) {
        let mut run: Vec<(usize, usize)> = Vec::new();
        let flush = |run: &mut Vec<(usize, usize)>, total: &mut u64| {
            let len = run.len() as u64;
            for &(r, c) in run.iter() {
                *total += oracle_weight(r, c) * len;
            }
            run.clear();
        };
        for (r, c) in line {
            if bits[r][c] {
                run.push((r, c));
            } else {
                flush(&mut run, &mut total);
            }
        }
        flush(&mut run, &mut total);
    }
    total
}

pub fn patch_from_bits(bits: &[[bool; 16]; 16]) -> Patch {
    Patch::from_fn(|r, c| bits[r][c])
}

/// Feature vectors of a synthetic corpus, ordered by class then index.
pub fn synthetic_samples(seed: u64, per_class: usize) -> Vec<LabeledSample> {
    let config = PreprocessConfig::default();
    synth_corpus(seed, per_class)
        .par_iter()
        .map(|(img, label)| LabeledSample::new(image_features(img, &config).unwrap(), *label))
        .collect()
}
