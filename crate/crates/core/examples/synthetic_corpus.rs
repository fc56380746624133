//! Renders a small synthetic corpus to disk and prints one sample per class
//! as ASCII art.
//!
//! ```text
//! cargo run --example synthetic_corpus -- [output_dir] [per_class]
//! ```

use rwrl::dataset::{scan_dataset, synth_generate, synth_image};

fn main() -> rwrl::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("rwrl-synth"));
    let per_class: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);

    let manifest = synth_generate(1, per_class, &out)?;
    let rescanned = scan_dataset(&out)?;
    println!(
        "{} images in {} ({:?} per class, rescan finds {})",
        manifest.len(),
        out.display(),
        manifest.class_counts(),
        rescanned.len()
    );

    for label in 0..10 {
        let img = synth_image(1, label, 0);
        println!("\ndigit {label}");
        for r in (0..img.height()).step_by(2) {
            let line: String = (0..img.width())
                .step_by(2)
                .map(|c| match img.get(r, c) {
                    0..=90 => '#',
                    91..=170 => '+',
                    _ => ' ',
                })
                .collect();
            println!("{}", line.trim_end());
        }
    }
    Ok(())
}
