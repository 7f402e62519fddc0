//! Samples both Z-curves for a weak Gaussian forcing and refines their crossings
//! into global solutions.
//!
//! `cargo run --release --example zset_gaussian -- [c]`

use glosol::problem::{PhasePoint, PhiModel};
use glosol::zset::{build_zcurve, default_d_range, intersect, verify_global, ShootOpts, Side};

fn main() {
    let c = std::env::args().nth(1).map(|a| a.parse().expect("numeric c")).unwrap_or(0.05);
    let phi = PhiModel::gaussian(c).unwrap();
    let opts = ShootOpts::default();
    let range = default_d_range(0.0);
    let zf = build_zcurve(&phi, 0.0, range, 160, Side::Forward, &opts).unwrap();
    let zb = build_zcurve(&phi, 0.0, range, 160, Side::Backward, &opts).unwrap();
    println!("Z: {} points, end {:?}", zf.points.len(), zf.boundary.map(|b| (b.f, b.fp)));
    println!("Z': {} points, end {:?}", zb.points.len(), zb.boundary.map(|b| (b.f, b.fp)));
    for x in intersect(&zf, &zb).unwrap() {
        let status = verify_global(&phi, &PhasePoint::new(x.f, x.fp, 0.0), opts.x_verify, opts.tol).unwrap();
        println!("crossing f(0) = {:.10}, f'(0) = {:.3e}, residual {:.1e}, {:?}: {status:?}", x.f, x.fp, x.residual, x.certainty);
    }
}
