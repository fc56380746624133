//! Shows one synthetic digit at each stage of the pipeline and prints its
//! feature vector, one window per line.
//!
//! ```text
//! cargo run --example contour_features -- [digit] [seed]
//! ```

use rwrl::dataset::synth_image;
use rwrl::features::{window_grid, Direction};
use rwrl::raster::preprocess;
use rwrl::{extract_contour, extract_features, BinaryImage, PreprocessConfig};

fn ascii(img: &BinaryImage) -> String {
    let mut out = String::new();
    for r in 0..img.height() {
        for c in 0..img.width() {
            out.push(if img.get(r, c) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

fn main() -> rwrl::Result<()> {
    let mut args = std::env::args().skip(1);
    let digit: u8 = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let gray = synth_image(seed, digit % 10, 0);
    let normalized = preprocess(&gray, &PreprocessConfig::default())?;
    let contour = extract_contour(&normalized)?;
    println!(
        "normalized ({} ink pixels):\n{}",
        normalized.count_foreground(),
        ascii(&normalized)
    );
    println!("contour ({} pixels):\n{}", contour.count_foreground(), ascii(&contour));

    let features = extract_features(&contour);
    println!("window   {:?}", Direction::ALL);
    for (w, values) in window_grid().iter().zip(features.as_slice().chunks(4)) {
        if values.iter().any(|&v| v > 0.0) {
            println!("({:2},{:2})  {values:?}", w.origin_row, w.origin_col);
        }
    }
    Ok(())
}
