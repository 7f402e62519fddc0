//! Builds the certified pole expansion for one seed and prints the boundary data it
//! supplies, next to the bare leading term.
//!
//! `cargo run --release --example series_boundary_data -- [c] [d]`

use glosol::problem::PhiModel;
use glosol::series::{build_expansion, certified_params, DEFAULT_ALPHA, DEFAULT_ORDER};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let c = args.next().unwrap_or(0.05);
    let d = args.next().unwrap_or(0.0);
    let phi = PhiModel::gaussian(c).unwrap();
    let params = certified_params(&phi, d, 0.0, DEFAULT_ALPHA, DEFAULT_ORDER).unwrap();
    println!("pole at d = {d}, envelope M = {:.4e}, radius R = {:.4}", params.m, params.r);
    let exp = build_expansion(&phi, &params).unwrap();
    println!("{:>6} {:>14} {:>14} {:>14} {:>12}", "x - d", "f", "f'", "6/(x-d)^2", "residual");
    for y in [8.0, 12.0, 16.0, 24.0, 32.0] {
        let v = exp.eval(d + y).unwrap();
        let r = exp.residual(d + y).unwrap();
        println!("{y:>6} {:>14.6e} {:>14.6e} {:>14.6e} {r:>12.3e}", v.f, v.fp, 6.0 / (y * y));
    }
}
