//! Verdicts against the numerics, and monotonicity of the decay condition.

use glosol::bifurcation::{seed_solutions, Family, SweepOpts};
use glosol::checks::{decay_sufficient, max_passing_d, verdict, DecayCheckParams, VerdictKind};
use glosol::integrate::{integrate_to, IntegratorOpts};
use glosol::problem::{PhasePoint, PhiModel};
use glosol::zset::{verify_global, GlobalStatus};
use proptest::prelude::*;

fn radical(mut i: usize, b: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

fn global_solutions(family: &Family, c: f64) -> Vec<(f64, f64)> {
    let opts = SweepOpts { n_seeds: 1, ..SweepOpts::default() };
    let phi = family.model(c).unwrap();
    seed_solutions(family, (c, c), &opts)
        .unwrap()
        .into_iter()
        .filter(|s| {
            let p = PhasePoint::new(s.f0, s.fp0, 0.0);
            matches!(verify_global(&phi, &p, opts.shoot.x_verify, opts.shoot.tol), Ok(GlobalStatus::Global))
        })
        .map(|s| (s.f0, s.fp0))
        .collect()
}

fn positive_on_span(phi: &PhiModel, f0: f64, fp0: f64) -> bool {
    let opts = IntegratorOpts::default();
    let p = PhasePoint::new(f0, fp0, 0.0);
    let r = integrate_to(&p, 40.0, phi, &opts).unwrap();
    let l = integrate_to(&p.mirrored(), 40.0, &phi.reflected(), &opts).unwrap();
    r.samples.iter().chain(&l.samples).all(|q| q.f > 0.0)
}

#[test]
fn verdicts_agree_with_the_sweep() {
    let mut members: Vec<(Family, f64)> = (1..=20)
        .map(|i| {
            let u = radical(i, 3);
            if radical(i, 2) < 0.5 {
                (Family::Gaussian, -1.0 + 3.0 * u)
            } else {
                (Family::HermiteGaussian, -1.0 + 4.0 * u)
            }
        })
        .collect();
    members.push((Family::Gaussian, 1e-4));
    let mut unique_seen = false;
    for (family, c) in members {
        let phi = family.model(c).unwrap();
        let v = verdict(&phi).unwrap();
        let sols = global_solutions(&family, c);
        let cap = (8.0f64 / 3.0).sqrt() * phi.sup_norm().powf(0.75);
        for &(_, fp0) in &sols {
            assert!(fp0.abs() <= cap * (1.0 + 1e-9), "{family:?}({c}): f'(0) = {fp0} over {cap}");
        }
        match v.kind {
            VerdictKind::NoSolutions => assert!(sols.is_empty(), "{family:?}({c}): {sols:?}"),
            VerdictKind::UniquePositive => {
                unique_seen = true;
                assert_eq!(sols.len(), 1, "{family:?}({c}): {sols:?}");
                assert!(positive_on_span(&phi, sols[0].0, sols[0].1));
            }
            _ => {}
        }
    }
    assert!(unique_seen);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn decay_condition_is_monotone_in_d(c in 1e-6..5e-3f64, frac in 0.0..1.0f64) {
        let phi = PhiModel::gaussian(c).unwrap();
        let k = 6f64.sqrt() * c.powf(0.25);
        let d_max = max_passing_d(&phi, k, 4.0 / 3.0).unwrap().expect("condition holds just above D = 1");
        let below = 1.0 + 1e-9 + frac * (d_max - 1.0 - 2e-9);
        prop_assert!(decay_sufficient(&phi, &DecayCheckParams::new(below, k, 4.0 / 3.0).unwrap()).unwrap());
        prop_assert!(!decay_sufficient(&phi, &DecayCheckParams::new(d_max * (1.0 + 1e-6), k, 4.0 / 3.0).unwrap()).unwrap());
    }

    #[test]
    fn weaker_forcing_allows_larger_d(c in 1e-4..0.5f64, shrink in 0.1..1.0f64, k in 0.1..0.9f64) {
        let (strong, weak) = (PhiModel::gaussian(c).unwrap(), PhiModel::gaussian(c * shrink).unwrap());
        if let Some(ds) = max_passing_d(&strong, k, 1.5).unwrap() {
            let dw = max_passing_d(&weak, k, 1.5).unwrap();
            prop_assert!(dw.is_some_and(|dw| dw >= ds * (1.0 - 1e-8)), "{dw:?} < {ds}");
        }
    }
}
