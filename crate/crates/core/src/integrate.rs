//! Embedded Dormand-Prince 5(4) integration of `f'' = f^2 - phi(x)` with dense output,
//! blow-up detection and crossing events.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::{PhasePoint, PhiModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("integration target equals the start point x = {0}")]
    EmptySpan(f64),
    #[error("invalid tolerances rtol = {rtol}, atol = {atol}")]
    InvalidTolerance { rtol: f64, atol: f64 },
    #[error("initial point is not finite: {0:?}")]
    NonFiniteStart(PhasePoint),
    #[error("backward integration needs x_target < x0, got {target} >= {x0}")]
    NotBackward { x0: f64, target: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { rtol: self.rtol * factor, atol: self.atol * factor }
    }
}

/// Defaults: escape threshold 1e6 on |f| or |f'|, at most 10^6 steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOpts {
    pub tol: Tolerance,
    pub blowup: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOpts {
    fn default() -> Self {
        Self { tol: Tolerance::default(), blowup: 1e6, max_steps: 1_000_000 }
    }
}

impl IntegratorOpts {
    pub fn with_tol(tol: Tolerance) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    /// `x_blow` extrapolates the pole from the last sample with `f ~ 6/(x - x_blow)^2`.
    BlowUp { x_blow: f64 },
    ToleranceFailure { x: f64 },
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    x0: f64,
    h: f64,
    y0: [f64; 2],
    q: [[f64; 2]; 4],
}

impl Segment {
    fn eval(&self, x: f64) -> [f64; 2] {
        let th = (x - self.x0) / self.h;
        let mut y = self.y0;
        for c in 0..2 {
            let q = &self.q;
            let poly = th * (q[0][c] + th * (q[1][c] + th * (q[2][c] + th * q[3][c])));
            y[c] += self.h * poly;
        }
        y
    }

    fn contains(&self, x: f64) -> bool {
        let (a, b) = (self.x0, self.x0 + self.h);
        x >= a.min(b) && x <= a.max(b)
    }
}

/// Accepted step points (start included) with dense output in between.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<PhasePoint>,
    pub outcome: Outcome,
    /// Sum of the absolute local error estimates in f over all accepted steps.
    pub err_estimate: f64,
    segments: Vec<Segment>,
}

/// Serialized form of a trajectory: samples and outcome, without the dense-output data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub samples: Vec<PhasePoint>,
    pub outcome: Outcome,
    pub err_estimate: f64,
}

impl Trajectory {
    pub fn record(&self) -> TrajectoryRecord {
        TrajectoryRecord { samples: self.samples.clone(), outcome: self.outcome, err_estimate: self.err_estimate }
    }

    pub fn start(&self) -> PhasePoint {
        self.samples[0]
    }

    pub fn end(&self) -> PhasePoint {
        *self.samples.last().expect("trajectory has a start sample")
    }

    pub fn reached(&self) -> bool {
        self.outcome == Outcome::Reached
    }

    /// Covered interval as (min x, max x).
    pub fn span(&self) -> (f64, f64) {
        let (a, b) = (self.start().x, self.end().x);
        (a.min(b), a.max(b))
    }

    /// Dense-output state at `x`, or `None` outside the covered interval.
    pub fn eval(&self, x: f64) -> Option<PhasePoint> {
        let (lo, hi) = self.span();
        if x < lo || x > hi {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.start());
        }
        let forward = self.end().x >= self.start().x;
        let i = if forward {
            self.segments.partition_point(|s| s.x0 + s.h < x)
        } else {
            self.segments.partition_point(|s| s.x0 + s.h > x)
        };
        let seg = &self.segments[i.min(self.segments.len() - 1)];
        debug_assert!(seg.contains(x) || i >= self.segments.len());
        let y = seg.eval(x);
        Some(PhasePoint::new(y[0], y[1], x))
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    -71.0 / 57600.0,
    0.0,
    71.0 / 16695.0,
    -71.0 / 1920.0,
    17253.0 / 339200.0,
    -22.0 / 525.0,
    1.0 / 40.0,
];
// Continuous extension: y(x0 + th h) = y0 + h sum_i K_i sum_j P[i][j] th^(j+1).
const P: [[f64; 4]; 7] = [
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
];

#[inline]
fn rhs(phi: &PhiModel, x: f64, y: &[f64; 2]) -> [f64; 2] {
    [y[1], y[0] * y[0] - phi.eval(x)]
}

/// Integrates from `p0` to `x_target` in either direction.
pub fn integrate_to(
    p0: &PhasePoint,
    x_target: f64,
    phi: &PhiModel,
    opts: &IntegratorOpts,
) -> Result<Trajectory, IntegrateError> {
    let tol = opts.tol;
    if !(tol.rtol > 0.0 && tol.atol >= 0.0 && tol.rtol.is_finite() && tol.atol.is_finite()) {
        return Err(IntegrateError::InvalidTolerance { rtol: tol.rtol, atol: tol.atol });
    }
    if !(p0.f.is_finite() && p0.fp.is_finite() && p0.x.is_finite()) {
        return Err(IntegrateError::NonFiniteStart(*p0));
    }
    if x_target == p0.x {
        return Err(IntegrateError::EmptySpan(p0.x));
    }
    let span = (x_target - p0.x).abs();
    let dir = (x_target - p0.x).signum();
    let h_floor = 1e-13 * span.max(1e-300);
    let mut x = p0.x;
    let mut y = [p0.f, p0.fp];
    let mut samples = vec![*p0];
    let mut segments = Vec::new();
    let mut err_estimate = 0.0;

    let sc = |y: &[f64; 2], yn: &[f64; 2], i: usize| tol.atol + tol.rtol * y[i].abs().max(yn[i].abs());
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs(phi, x, &y);

    // Initial step from the usual order-based estimate.
    let d0 = ((y[0] / sc(&y, &y, 0)).powi(2) + (y[1] / sc(&y, &y, 1)).powi(2)).sqrt() / 2f64.sqrt();
    let d1 = ((k[0][0] / sc(&y, &y, 0)).powi(2) + (k[0][1] / sc(&y, &y, 1)).powi(2)).sqrt() / 2f64.sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span).max(h_floor * 10.0);

    let mut outcome = Outcome::Reached;
    let mut steps = 0usize;
    loop {
        let remaining = (x_target - x).abs();
        if remaining <= 0.0 {
            break;
        }
        let mut last = false;
        if h >= remaining * (1.0 - 1e-12) {
            h = remaining;
            last = true;
        }
        let hs = dir * h;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    ys[0] += hs * a * kj[0];
                    ys[1] += hs * a * kj[1];
                }
            }
            k[s] = rhs(phi, x + C[s] * hs, &ys);
        }
        let mut yn = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            yn[0] += hs * A[6][j] * kj[0];
            yn[1] += hs * A[6][j] * kj[1];
        }
        let mut err = [0.0; 2];
        for (j, kj) in k.iter().enumerate() {
            err[0] += hs * E[j] * kj[0];
            err[1] += hs * E[j] * kj[1];
        }
        let en = (((err[0] / sc(&y, &yn, 0)).powi(2) + (err[1] / sc(&y, &yn, 1)).powi(2)) / 2.0).sqrt();
        let finite = yn[0].is_finite() && yn[1].is_finite() && en.is_finite();
        if finite && en <= 1.0 {
            let mut q = [[0.0; 2]; 4];
            for (j, qj) in q.iter_mut().enumerate() {
                for (i, ki) in k.iter().enumerate() {
                    qj[0] += P[i][j] * ki[0];
                    qj[1] += P[i][j] * ki[1];
                }
            }
            segments.push(Segment { x0: x, h: hs, y0: y, q });
            x = if last { x_target } else { x + hs };
            y = yn;
            err_estimate += err[0].abs();
            samples.push(PhasePoint::new(y[0], y[1], x));
            // FSAL: the last stage is the derivative at the new point.
            k[0] = k[6];
            steps += 1;
            if y[0].abs() > opts.blowup || y[1].abs() > opts.blowup {
                let dx = if y[0] > 0.0 { (6.0 / y[0]).sqrt() } else { 0.0 };
                outcome = Outcome::BlowUp { x_blow: x + dir * dx };
                break;
            }
            if last {
                break;
            }
            if steps >= opts.max_steps {
                outcome = Outcome::ToleranceFailure { x };
                break;
            }
            let fac = if en == 0.0 { 10.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 10.0) };
            h *= fac;
        } else {
            let fac = if finite { (0.9 * en.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= fac;
        }
        if h < h_floor {
            outcome = Outcome::ToleranceFailure { x };
            break;
        }
    }
    Ok(Trajectory { samples, outcome, err_estimate, segments })
}

/// Integrates toward smaller x; `x_target` must lie below `p0.x`.
pub fn integrate_backward(
    p0: &PhasePoint,
    x_target: f64,
    phi: &PhiModel,
    opts: &IntegratorOpts,
) -> Result<Trajectory, IntegrateError> {
    if x_target >= p0.x {
        return Err(IntegrateError::NotBackward { x0: p0.x, target: x_target });
    }
    integrate_to(p0, x_target, phi, opts)
}

/// The plane `a f + b f' + c x = e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
}

impl Plane {
    pub fn f_equals(v: f64) -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, e: v }
    }

    pub fn fp_equals(v: f64) -> Self {
        Self { a: 0.0, b: 1.0, c: 0.0, e: v }
    }

    pub fn x_equals(v: f64) -> Self {
        Self { a: 0.0, b: 0.0, c: 1.0, e: v }
    }

    pub fn value(&self, p: &PhasePoint) -> f64 {
        self.a * p.f + self.b * p.fp + self.c * p.x - self.e
    }
}

/// Points where the trajectory crosses `plane`, located on the dense output to |g| < 1e-10.
pub fn crossing_events(traj: &Trajectory, plane: &Plane) -> Vec<PhasePoint> {
    let mut out = Vec::new();
    let g = |seg: &Segment, x: f64| {
        let y = seg.eval(x);
        plane.value(&PhasePoint::new(y[0], y[1], x))
    };
    for seg in &traj.segments {
        // Sub-sample each step so a double crossing inside one step is not missed.
        let n = 4;
        let mut xa = seg.x0;
        let mut ga = g(seg, xa);
        for i in 1..=n {
            let xb = seg.x0 + seg.h * i as f64 / n as f64;
            let gb = g(seg, xb);
            if ga == 0.0 && i == 1 && out.is_empty() {
                let y = seg.eval(xa);
                out.push(PhasePoint::new(y[0], y[1], xa));
            }
            if ga * gb < 0.0 || (gb == 0.0 && ga != 0.0) {
                let (mut lo, mut hi, mut glo) = (xa, xb, ga);
                let mut xm = xb;
                for _ in 0..200 {
                    xm = 0.5 * (lo + hi);
                    let gm = g(seg, xm);
                    if gm.abs() < 1e-10 * (1.0 + plane.e.abs()) && (hi - lo).abs() < 1e-12 * (1.0 + xm.abs()) {
                        break;
                    }
                    if gm == 0.0 {
                        break;
                    }
                    if (gm < 0.0) == (glo < 0.0) {
                        lo = xm;
                        glo = gm;
                    } else {
                        hi = xm;
                    }
                }
                let y = seg.eval(xm);
                out.push(PhasePoint::new(y[0], y[1], xm));
            }
            xa = xb;
            ga = gb;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phi_exact_solution_backward() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let p0 = PhasePoint::new(0.06, -0.012, 10.0);
        let t = integrate_backward(&p0, 1.0, &phi, &IntegratorOpts::default()).unwrap();
        assert!(t.reached());
        let e = t.end();
        assert!((e.f - 6.0).abs() < 6e-6);
        assert!((e.fp + 12.0).abs() < 12e-6);
    }

    #[test]
    fn blows_up_near_the_pole() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let p0 = PhasePoint::new(6.0, 12.0, 0.0);
        let t = integrate_to(&p0, 5.0, &phi, &IntegratorOpts::default()).unwrap();
        match t.outcome {
            Outcome::BlowUp { x_blow } => assert!((x_blow - 1.0).abs() < 1e-3, "{x_blow}"),
            o => panic!("unexpected {o:?}"),
        }
        let last = t.end();
        assert!(last.f.abs() > 1e6 || last.fp.abs() > 1e6);
    }

    #[test]
    fn empty_span_rejected() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let p0 = PhasePoint::new(0.0, 0.0, 1.0);
        assert!(matches!(
            integrate_to(&p0, 1.0, &phi, &IntegratorOpts::default()),
            Err(IntegrateError::EmptySpan(_))
        ));
        assert!(integrate_backward(&p0, 2.0, &phi, &IntegratorOpts::default()).is_err());
    }

    #[test]
    fn dense_output_matches_exact_solution() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        // Backward along 6/(x+2)^2 is the stable direction; forward, errors grow like x^4.
        let p0 = PhasePoint::new(6.0 / 484.0, -12.0 / 10648.0, 20.0);
        let t = integrate_to(&p0, 0.0, &phi, &IntegratorOpts::default()).unwrap();
        for i in 0..200 {
            let x = 0.1 * i as f64;
            let p = t.eval(x).unwrap();
            let exact = 6.0 / (x + 2.0).powi(2);
            assert!((p.f - exact).abs() < 1e-8 * exact, "x={x} {} {exact}", p.f);
        }
        assert!(t.eval(21.0).is_none() && t.eval(-0.1).is_none());
    }

    #[test]
    fn crossings_of_a_pendulum_like_orbit() {
        // phi = 1: periodic orbits around f = 1 cross f' = 0 twice per period.
        let phi = PhiModel::constant(1.0).unwrap();
        let p0 = PhasePoint::new(0.5, 0.0, 0.0);
        let t = integrate_to(&p0, 20.0, &phi, &IntegratorOpts::default()).unwrap();
        let ev = crossing_events(&t, &Plane::fp_equals(0.0));
        assert!(ev.len() >= 4);
        for p in &ev {
            assert!(p.fp.abs() < 1e-9);
        }
        let xs: Vec<f64> = ev.iter().map(|p| p.x).collect();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }
}
