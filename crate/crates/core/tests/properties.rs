mod common;

use common::*;
use proptest::prelude::*;
use rwrl::features::{run_length_at, window_feature, Direction, Patch, FEATURE_DIM};
use rwrl::raster::{decode_image, encode_pgm, encode_pgm_ascii, gaussian_smooth, normalize_digit};
use rwrl::{extract_contour, extract_features, BinaryImage, GrayImage};

fn bits_strategy() -> impl Strategy<Value = [[bool; 16]; 16]> {
    prop::array::uniform16(prop::array::uniform16(any::<bool>()))
}

fn gray_strategy(max_side: usize) -> impl Strategy<Value = GrayImage> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), w * h).prop_map(move |data| GrayImage::from_raw(w, h, data).unwrap())
    })
}

fn binary_strategy(max_side: usize) -> impl Strategy<Value = BinaryImage> {
    (1..=max_side, 1..=max_side, 0.05f64..0.95).prop_flat_map(|(w, h, p)| {
        prop::collection::vec(prop::bool::weighted(p), w * h)
            .prop_map(move |bits| BinaryImage::from_fn(w, h, |r, c| bits[r * w + c]))
    })
}

fn contour_input() -> impl Strategy<Value = BinaryImage> {
    prop::collection::vec(prop::bool::weighted(0.4), 64 * 64)
        .prop_map(|bits| BinaryImage::from_fn(64, 64, |r, c| bits[r * 64 + c]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_feature_matches_oracle(bits in bits_strategy()) {
        let patch = patch_from_bits(&bits);
        for d in Direction::ALL {
            prop_assert_eq!(window_feature(&patch, d) as u64, oracle_window_feature(&bits, d));
        }
    }

    #[test]
    fn adding_a_pixel_never_lowers_a_feature(bits in bits_strategy(), r in 0usize..16, c in 0usize..16) {
        let before = patch_from_bits(&bits);
        let mut after = before;
        after.set(r, c, true);
        for d in Direction::ALL {
            prop_assert!(window_feature(&after, d) >= window_feature(&before, d));
        }
    }

    #[test]
    fn feature_is_bounded_by_full_runs(bits in bits_strategy()) {
        let patch = patch_from_bits(&bits);
        for d in Direction::ALL {
            // every run is at most 16 long and every weight at most 8
            prop_assert!(window_feature(&patch, d) <= 8 * 16 * patch.count());
            for (r, row) in bits.iter().enumerate() {
                for (c, &on) in row.iter().enumerate() {
                    match run_length_at(&patch, r, c, d) {
                        Ok(len) => prop_assert!(on && (1..=16).contains(&len)),
                        Err(_) => prop_assert!(!on),
                    }
                }
            }
        }
    }

    #[test]
    fn smoothing_stays_within_input_range(img in gray_strategy(24), sigma in 0.3f64..3.0) {
        let (lo, hi) = img.min_max();
        let out = gaussian_smooth(&img, sigma);
        prop_assert_eq!((out.width(), out.height()), (img.width(), img.height()));
        for &v in out.data() {
            prop_assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn smoothing_keeps_constant_images(w in 1usize..30, h in 1usize..30, v in any::<u8>(), sigma in 0.3f64..4.0) {
        let img = GrayImage::filled(w, h, v);
        prop_assert_eq!(gaussian_smooth(&img, sigma), img);
    }

    #[test]
    fn pgm_round_trip(img in gray_strategy(40)) {
        prop_assert_eq!(decode_image(&encode_pgm(&img)).unwrap(), img.clone());
        prop_assert_eq!(decode_image(&encode_pgm_ascii(&img)).unwrap(), img);
    }

    #[test]
    fn normalized_digit_is_64_square(bin in binary_strategy(90)) {
        prop_assume!(bin.count_foreground() > 0);
        let norm = normalize_digit(&bin).unwrap();
        prop_assert_eq!((norm.width(), norm.height()), (64, 64));
        prop_assert!(norm.count_foreground() >= 1);
    }

    #[test]
    fn contour_is_a_boundary_subset(bin in contour_input()) {
        let contour = extract_contour(&bin).unwrap();
        for r in 0..64 {
            for c in 0..64 {
                if !contour.get(r, c) {
                    continue;
                }
                prop_assert!(bin.get(r, c));
                let open = |dr: isize, dc: isize| {
                    let (rr, cc) = (r as isize + dr, c as isize + dc);
                    !(0..64).contains(&rr) || !(0..64).contains(&cc) || !bin.get(rr as usize, cc as usize)
                };
                prop_assert!(open(-1, 0) || open(1, 0) || open(0, -1) || open(0, 1));
            }
        }
    }

    #[test]
    fn translation_by_one_stride_permutes_windows(bits in prop::collection::vec(prop::bool::weighted(0.3), 56 * 56)) {
        // content confined to the top-left 56×56 so the shifted copy stays on the canvas
        let at = |r: usize, c: usize| r < 56 && c < 56 && bits[r * 56 + c];
        let original = extract_contour(&BinaryImage::from_fn(64, 64, at)).unwrap();
        let shifted = extract_contour(&BinaryImage::from_fn(64, 64, |r, c| r >= 8 && c >= 8 && at(r - 8, c - 8))).unwrap();
        let (f, g) = (extract_features(&original), extract_features(&shifted));
        prop_assert_eq!(f.len(), FEATURE_DIM);
        let block = |v: &[f64], wr: usize, wc: usize| v[(wr * 7 + wc) * 4..(wr * 7 + wc) * 4 + 4].to_vec();
        for wr in 0..6 {
            for wc in 0..6 {
                prop_assert_eq!(block(f.as_slice(), wr, wc), block(g.as_slice(), wr + 1, wc + 1));
            }
        }
    }
}

#[test]
fn oracle_scan_lines_cover_each_pixel_once() {
    for d in Direction::ALL {
        let mut seen = [[0u32; 16]; 16];
        for line in scan_lines(d) {
            for (r, c) in line {
                seen[r][c] += 1;
            }
        }
        assert!(seen.iter().flatten().all(|&n| n == 1), "{d:?}");
    }
}

#[test]
fn empty_patch_has_zero_features() {
    let patch = Patch::from_rows([0; 16]);
    for d in Direction::ALL {
        assert_eq!(window_feature(&patch, d), 0);
    }
}
