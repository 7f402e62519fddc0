//! Shoots from a few initial states at x = 0 and reports whether each solution
//! survives to x = 20 or blows up, and where.
//!
//! `cargo run --release --example shoot_and_blowup`

use glosol::integrate::{integrate_to, IntegratorOpts, Outcome};
use glosol::problem::{PhasePoint, PhiModel};

fn main() {
    let phi = PhiModel::gaussian(0.5).unwrap();
    let opts = IntegratorOpts::default();
    for (f0, fp0) in [(0.0, 0.0), (0.5, -0.5), (1.0, 0.0), (-1.0, 1.0), (0.3, -0.2), (2.0, 1.0)] {
        let t = integrate_to(&PhasePoint::new(f0, fp0, 0.0), 20.0, &phi, &opts).unwrap();
        let e = t.end();
        let what = match t.outcome {
            Outcome::Reached => format!("reaches x = 20 at f = {:.4e}", e.f),
            Outcome::BlowUp { x_blow } => format!("blows up near x = {x_blow:.6}"),
            Outcome::ToleranceFailure { x } => format!("step size underflow at x = {x}"),
        };
        println!("f(0) = {f0:>5}, f'(0) = {fp0:>5}: {what} ({} steps, error estimate {:.1e})", t.samples.len(), t.err_estimate);
    }
}
