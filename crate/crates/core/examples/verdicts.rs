//! Runs the existence and uniqueness checks on a handful of forcings.
//!
//! `cargo run --release --example verdicts`

use glosol::checks::verdict;
use glosol::problem::PhiModel;

fn main() {
    let cases = [
        ("gaussian c = 1e-4", PhiModel::gaussian(1e-4).unwrap()),
        ("gaussian c = 0.05", PhiModel::gaussian(0.05).unwrap()),
        ("gaussian c = -1", PhiModel::gaussian(-1.0).unwrap()),
        ("hermite-gaussian c = 2", PhiModel::hermite_gaussian(2.0).unwrap()),
        ("hermite-gaussian c = -1", PhiModel::hermite_gaussian(-1.0).unwrap()),
        ("constant P = 9", PhiModel::constant(9.0).unwrap()),
    ];
    for (name, phi) in cases {
        let v = verdict(&phi).unwrap();
        println!("{name}: {:?}", v.kind);
        for w in &v.witnesses {
            println!("    {} (margin {:.4e})", w.criterion, w.margin);
        }
        for n in &v.notes {
            println!("    note: {n}");
        }
    }
}
