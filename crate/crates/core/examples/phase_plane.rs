//! Classifies a grid of phase-plane points for a Gaussian forcing and checks that
//! the energy of a funnel orbit stays put for constant forcing.
//!
//! `cargo run --release --example phase_plane`

use glosol::integrate::{integrate_to, IntegratorOpts};
use glosol::problem::{classify_region, funnel_extent, hamiltonian, PhasePoint, PhiModel, RegionTag};

fn main() {
    let phi = PhiModel::gaussian(1.0).unwrap();
    println!("regions at x = 0 for phi = e^(-x^2/2)  (1 = R1, 2 = R2, . = neither)");
    for j in (0..=12).rev() {
        let fp = -3.0 + 0.5 * j as f64;
        let row: String = (0..=24)
            .map(|i| {
                let p = PhasePoint::new(-3.0 + 0.25 * i as f64, fp, 0.0);
                match classify_region(&p, &phi).unwrap() {
                    RegionTag::R1 => '1',
                    RegionTag::R2 => '2',
                    _ => '.',
                }
            })
            .collect();
        println!("f' = {fp:>5.1}  {row}");
    }

    let p = 4.0;
    let (lo, hi, sp) = funnel_extent(p).unwrap();
    println!("\nfunnel for phi = {p}: f in [{lo}, {hi}], |f'| <= {sp:.4}");
    let constant = PhiModel::constant(p).unwrap();
    let start = PhasePoint::new(0.0, 1.0, 0.0);
    let t = integrate_to(&start, 50.0, &constant, &IntegratorOpts::default()).unwrap();
    let h0 = hamiltonian(&start, p).unwrap();
    let drift = t.samples.iter().map(|q| (hamiltonian(q, p).unwrap() - h0).abs()).fold(0.0, f64::max);
    println!("orbit from (0, 1): {} samples, energy {h0:.6}, max drift {drift:.2e}", t.samples.len());
}
