//! Properties of the phase plane and the integrator.

use glosol::integrate::{integrate_to, IntegratorOpts, Outcome, Tolerance};
use glosol::problem::{
    classify_region, classify_region_slack, cubic_part, funnel_extent, hamiltonian, max_speeds, PhasePoint, PhiModel,
    RegionTag,
};
use proptest::prelude::*;

/// A point inside the funnel for phi = P, from unit-square coordinates; `None` if rejected.
fn inside_funnel(p: f64, u: f64, v: f64, margin: f64) -> Option<PhasePoint> {
    let (lo, hi, sp) = funnel_extent(p).unwrap();
    let s = PhasePoint::new(lo + (hi - lo) * u, sp * (2.0 * v - 1.0), 0.0);
    (hamiltonian(&s, p).unwrap() > margin * p.powf(1.5) && s.f < hi).then_some(s)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn energy_is_conserved_in_the_funnel(p in prop::sample::select(vec![1.0, 9.0]), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let Some(s) = inside_funnel(p, u, v, 1e-3) else { return Ok(()) };
        let phi = PhiModel::constant(p).unwrap();
        let opts = IntegratorOpts::default();
        let t = integrate_to(&s, 20.0, &phi, &opts).unwrap();
        let h0 = hamiltonian(&s, p).unwrap();
        let scale = p.powf(1.5).max(1.0);
        for q in &t.samples {
            prop_assert!((hamiltonian(q, p).unwrap() - h0).abs() < 100.0 * opts.tol.rtol * scale);
        }
    }

    #[test]
    fn funnel_is_invariant(p in prop::sample::select(vec![1.0, 9.0]), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let Some(s) = inside_funnel(p, u, v, 1e-3) else { return Ok(()) };
        let phi = PhiModel::constant(p).unwrap();
        let t = integrate_to(&s, 30.0, &phi, &IntegratorOpts::default()).unwrap();
        prop_assert!(t.reached());
        let tol = 1e-6 * p.powf(1.5);
        for q in &t.samples {
            prop_assert!(hamiltonian(q, p).unwrap() > -tol && q.f <= p.sqrt() + 1e-9);
        }
    }

    #[test]
    fn above_the_saddle_escapes(p in prop::sample::select(vec![1.0, 9.0]), df in 1e-3..3.0f64, fp in 1e-3..5.0f64) {
        let phi = PhiModel::constant(p).unwrap();
        let t = integrate_to(&PhasePoint::new(p.sqrt() + df, fp, 0.0), 50.0, &phi, &IntegratorOpts::default()).unwrap();
        prop_assert!(matches!(t.outcome, Outcome::BlowUp { .. }), "{:?}", t.outcome);
        prop_assert!(t.end().f > 1e3);
    }

    #[test]
    fn speeds_bound_r1(c in 0.1..3.0f64, f0 in -2.0..1.0f64, fp0 in -2.0..2.0f64) {
        let phi = PhiModel::gaussian(c).unwrap();
        let t = integrate_to(&PhasePoint::new(f0, fp0, 0.0), 10.0, &phi, &IntegratorOpts::default()).unwrap();
        for q in &t.samples {
            if classify_region(q, &phi).unwrap() != RegionTag::R1 {
                continue;
            }
            let v = phi.eval(q.x);
            let (fs, fps) = max_speeds(v).unwrap();
            prop_assert!(q.fp.abs() <= fs * (1.0 + 1e-12) + 1e-12);
            prop_assert!((q.f * q.f - v).abs() <= fps * (1.0 + 1e-12) + 1e-12);
        }
    }

    // Away from the funnel the flow is hyperbolic and a round trip amplifies the forward
    // error exponentially, so reversibility is checked on the bounded orbits.
    #[test]
    fn reversible(p in prop::sample::select(vec![1.0, 9.0]), u in 0.0..1.0f64, v in 0.0..1.0f64, span in 0.5..2.0f64) {
        let Some(s) = inside_funnel(p, u, v, 1e-2) else { return Ok(()) };
        let phi = PhiModel::constant(p).unwrap();
        let opts = IntegratorOpts::default();
        let there = integrate_to(&s, span, &phi, &opts).unwrap();
        let back = integrate_to(&there.end(), 0.0, &phi, &opts).unwrap();
        prop_assert!(there.reached() && back.reached());
        let e = back.end();
        let scale = funnel_extent(p).unwrap().2.max(1.0);
        let tol = 10.0 * (opts.tol.rtol * scale + opts.tol.atol);
        prop_assert!((e.f - s.f).abs() < tol && (e.fp - s.fp).abs() < tol, "{e:?} vs {s:?}, tol {tol:e}");
    }

    #[test]
    fn complement_blows_up(c in 0.1..2.0f64, x0 in 0.0..3.0f64, f0 in -4.0..4.0f64, fp0 in -4.0..4.0f64) {
        let phi = PhiModel::gaussian(c).unwrap();
        let s = PhasePoint::new(f0, fp0, x0);
        prop_assume!(classify_region_slack(&s, &phi, 0.05).unwrap() == RegionTag::Complement);
        let t = integrate_to(&s, x0 + 100.0, &phi, &IntegratorOpts::default()).unwrap();
        prop_assert!(matches!(t.outcome, Outcome::BlowUp { .. }), "{s:?}: {:?}", t.outcome);
    }
}

#[test]
fn region_tags_partition_a_grid() {
    let phi = PhiModel::gaussian(1.5).unwrap();
    for x in [0.0, 0.5, 2.0] {
        let mut counts = [0usize; 3];
        for i in 0..100 {
            for j in 0..100 {
                let p = PhasePoint::new(-3.0 + 6.0 * i as f64 / 99.0, -3.0 + 6.0 * j as f64 / 99.0, x);
                let v = phi.eval(x);
                let h = hamiltonian(&p, v).unwrap();
                let tag = classify_region(&p, &phi);
                let r1 = h >= 0.0 && p.f <= v.sqrt();
                let r2 = !r1 && h <= 0.0 && cubic_part(&p) >= 0.0 && p.fp <= 0.0;
                let want = if r1 {
                    RegionTag::R1
                } else if r2 {
                    RegionTag::R2
                } else {
                    RegionTag::Complement
                };
                let got = tag.unwrap();
                assert_eq!(got, want, "{p:?}");
                counts[match got {
                    RegionTag::R1 => 0,
                    RegionTag::R2 => 1,
                    _ => 2,
                }] += 1;
            }
        }
        assert_eq!(counts.iter().sum::<usize>(), 10_000);
    }
}

#[test]
fn halving_tolerance_moves_endpoint_within_error_estimate() {
    let phi = PhiModel::constant(1.0).unwrap();
    let coarse = IntegratorOpts::with_tol(Tolerance::new(1e-6, 1e-9));
    let fine = IntegratorOpts::with_tol(Tolerance::new(5e-7, 5e-10));
    for (f0, fp0) in [(0.0, 0.0), (-1.5, 0.2), (0.5, -0.3)] {
        let s = PhasePoint::new(f0, fp0, 0.0);
        let a = integrate_to(&s, 10.0, &phi, &coarse).unwrap();
        let b = integrate_to(&s, 10.0, &phi, &fine).unwrap();
        let moved = (a.end().f - b.end().f).abs();
        assert!(moved < a.err_estimate, "moved {moved:e}, estimate {:e}", a.err_estimate);
    }
}
