//! Continues the global solutions of the Hermite-Gaussian family over c and prints the
//! branches with their folds, pitchforks and ends.
//!
//! `cargo run --release --example bifurcation_diagram` (about half a minute)

use glosol::bifurcation::{sweep, Family, SweepOpts};

fn main() {
    let opts = SweepOpts { n_seeds: 20, ..SweepOpts::default() };
    let d = sweep(&Family::HermiteGaussian, (-1.2, 1.0), &opts).unwrap();
    for (i, b) in d.branches.iter().enumerate() {
        let (lo, hi) = b.c_range();
        println!(
            "branch {i}: {} points, c in [{lo:.4}, {hi:.4}], symmetric {}, index {:?}, {:?} .. {:?}",
            b.points.len(),
            b.symmetric,
            b.dominant_index(),
            b.origin,
            b.termination
        );
    }
    for f in &d.folds {
        println!("fold at c = {:.4} (f0 = {:.4})", f.c, f.f0);
    }
    for p in &d.pitchforks {
        println!("pitchfork at c = {:.4} (f0 = {:.4}, mirror error {:.1e})", p.c, p.f0, p.mirror_error);
    }
    for e in &d.ends {
        println!("branch end at c = {:.4}: f0 = {:.4}, f'0 = {:.4}, smallest |lambda| {:?}", e.c, e.f0, e.fp0, e.smallest_abs);
    }
}
