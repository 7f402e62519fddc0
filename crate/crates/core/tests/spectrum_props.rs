//! Finite-difference spectrum of `d^2/dx^2 - 2f` on `[-L, L]` with Dirichlet ends.

use glosol::spectrum::discrete_spectrum;
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    // Adding a constant s to f shifts every eigenvalue by -2s.
    #[test]
    fn constant_shift_moves_the_spectrum(s in -3.0..3.0f64, amp in 0.1..2.0f64, w in 0.3..3.0f64) {
        let f = |x: f64| amp * (-(x * x) / (w * w)).exp() - 0.5 * amp;
        let g = |x: f64| f(x) + s;
        let a = discrete_spectrum(f, 8.0, 300).unwrap();
        let b = discrete_spectrum(g, 8.0, 300).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - (x - 2.0 * s)).abs() <= 1e-12 * x.abs().max(1.0), "{} vs {}", y, x - 2.0 * s);
        }
    }
}

#[test]
fn error_quarters_per_grid_doubling() {
    // f = 0 on [-pi/2, pi/2]: eigenvalues -k^2.
    let half = PI / 2.0;
    let err = |n: usize| {
        let ev = discrete_spectrum(|_| 0.0, half, n).unwrap();
        (ev[1] + 4.0).abs()
    };
    let (e1, e2, e3) = (err(200), err(400), err(800));
    for r in [e1 / e2, e2 / e3] {
        assert!((3.5..=4.5).contains(&r), "ratio {r}");
    }
}

#[test]
fn eigenvalues_are_descending() {
    let ev = discrete_spectrum(|x: f64| 1.5 / (1.0 + x * x), 10.0, 400).unwrap();
    assert!(ev.windows(2).all(|w| w[0] >= w[1]));
}
