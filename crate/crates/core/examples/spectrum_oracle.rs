//! Compares the discrete spectrum of d^2/dx^2 on [-pi/2, pi/2] with the exact -k^2,
//! then computes the linearized spectra about global solutions.
//!
//! `cargo run --release --example spectrum_oracle`

use glosol::bifurcation::{seed_solutions, Family, SweepOpts};
use glosol::integrate::Tolerance;
use glosol::spectrum::{discrete_spectrum, linearized_spectrum, SolutionProfile, DEFAULT_L_HALF, DEFAULT_N};
use std::f64::consts::PI;

fn main() {
    for n in [250, 500, 1000, 2000] {
        let ev = discrete_spectrum(|_| 0.0, PI / 2.0, n).unwrap();
        let errs: Vec<String> = (1..=3).map(|k| format!("{:.2e}", (ev[k - 1] + (k * k) as f64).abs())).collect();
        println!("n = {n:>4}: errors for k = 1..3: {}", errs.join(", "));
    }

    // Linearize about every solution of the Hermite-Gaussian forcing at c = 0.
    let family = Family::HermiteGaussian;
    let phi = family.model(0.0).unwrap();
    let opts = SweepOpts { n_seeds: 1, ..SweepOpts::default() };
    for s in seed_solutions(&family, (0.0, 0.0), &opts).unwrap() {
        let profile = SolutionProfile::from_point(&phi, s.f0, s.fp0, DEFAULT_L_HALF, Tolerance::default()).unwrap();
        let sp = linearized_spectrum(&profile, DEFAULT_L_HALF, DEFAULT_N).unwrap();
        println!(
            "f(0) = {:.6}, f'(0) = {:.6}: {} positive eigenvalues, smallest |lambda| {:.4}, top {:.4?}",
            s.f0,
            s.fp0,
            sp.n_positive,
            sp.smallest_abs,
            &sp.eigenvalues_head[..3]
        );
    }
}
