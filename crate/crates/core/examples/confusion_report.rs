//! Builds a metric report from a confusion matrix CSV, or from a built-in
//! 10-class matrix of 600 samples per class when no path is given.
//!
//! ```text
//! cargo run --example confusion_report -- [confusion.csv]
//! ```

use rwrl::eval::{ConfusionMatrix, Report};

const ROWS: [[u64; 10]; 10] = [
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

fn main() -> rwrl::Result<()> {
    let cm = match std::env::args().nth(1) {
        Some(path) => ConfusionMatrix::from_csv(&std::fs::read_to_string(path)?)?,
        None => {
            let rows: Vec<Vec<u64>> = ROWS.iter().map(|r| r.to_vec()).collect();
            ConfusionMatrix::from_rows(&(0..10).collect::<Vec<u8>>(), &rows)?
        }
    };
    let report = Report::new(cm);
    print!("{}", report.render_text());
    println!();
    print!("{}", report.per_class_csv());
    Ok(())
}
