//! Decodes a PGM or BMP file, runs smoothing, Otsu thresholding and size
//! normalization, and writes the 64x64 result next to the input.
//!
//! ```text
//! cargo run --example preprocess_image -- digit.pgm [sigma] [--light-ink]
//! ```

use std::path::PathBuf;

use rwrl::raster::{binarize, decode_image, encode_pgm, gaussian_smooth, otsu_threshold, preprocess};
use rwrl::{Polarity, PreprocessConfig};

fn main() -> rwrl::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(input) = args.first().map(PathBuf::from) else {
        eprintln!("usage: preprocess_image <image.pgm|image.bmp> [sigma] [--light-ink]");
        std::process::exit(1);
    };
    let sigma = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let polarity = if args.iter().any(|a| a == "--light-ink") {
        Polarity::LightInk
    } else {
        Polarity::DarkInk
    };

    let img = decode_image(&std::fs::read(&input)?)?;
    let smoothed = gaussian_smooth(&img, sigma);
    let t = otsu_threshold(&smoothed);
    let ink = binarize(&smoothed, t, polarity).count_foreground();
    println!("{}x{}, Otsu threshold {t}, {ink} ink pixels", img.width(), img.height());

    let normalized = preprocess(&img, &PreprocessConfig { sigma, polarity })?;
    let output = input.with_extension("norm.pgm");
    std::fs::write(&output, encode_pgm(&normalized.to_gray()))?;
    println!("wrote {}", output.display());
    Ok(())
}
