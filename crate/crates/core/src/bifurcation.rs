//! Continuation of global solutions across a one-parameter family `phi(x; c)`.
//!
//! A global solution is a zero of the shooting mismatch
//! `F(c, a, b) = Z_c(a) - Z'_c(b)` at `x = 0`, where `a` and `b` are the seed amplitudes of
//! the forward and backward curves. Solution curves are traced by pseudo-arclength in
//! `(c, a, b)`. For even families the symmetric solutions satisfy `a = b`, and there the
//! system reduces to the single equation `f'(c, a) = 0` in `(c, a)`; a zero of `df/da` on
//! that reduced curve is where an antisymmetric mode appears, i.e. a pitchfork.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrate::{crossing_events, integrate_to, IntegratorOpts, Outcome, Plane, Tolerance};
use crate::problem::{PhasePoint, PhiModel, ProblemError};
use crate::spectrum::{linearized_spectrum, SolutionProfile, SpectralSummary, DEFAULT_L_HALF, DEFAULT_N};
use crate::zset::{
    build_zcurve, default_d_range, intersect, verify_global, Certainty, GlobalStatus, SeedFamily, ShootOpts, Side,
    ZsetError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BifurcationError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Zset(#[from] ZsetError),
    #[error("the family is not even in x, so the reflection is not a symmetry")]
    SymmetryUnavailable,
    #[error("invalid parameter range: {0}")]
    InvalidRange(String),
}

/// One-parameter forcing families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `c e^{-x^2/2}`
    Gaussian,
    /// `(x^2 - c) e^{-x^2/2}`
    HermiteGaussian,
    /// `c` times a tabulated profile.
    ScaledTable { rows: Vec<[f64; 3]> },
}

impl Family {
    pub fn model(&self, c: f64) -> Result<PhiModel, ProblemError> {
        match self {
            Family::Gaussian => PhiModel::gaussian(c),
            Family::HermiteGaussian => PhiModel::hermite_gaussian(c),
            Family::ScaledTable { rows } => {
                let scaled: Vec<[f64; 3]> = rows.iter().map(|r| [r[0], c * r[1], c * r[2]]).collect();
                PhiModel::tabulated(&scaled)
            }
        }
    }

    pub fn is_even(&self) -> bool {
        match self {
            Family::ScaledTable { .. } => self.model(1.0).map(|m| m.is_even()).unwrap_or(false),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOpts {
    pub shoot: ShootOpts,
    pub n_seeds: usize,
    pub curve_samples: usize,
    pub step_init: f64,
    pub step_min: f64,
    pub step_max: f64,
    pub max_points: usize,
    pub spectrum_n: usize,
    pub l_half: f64,
    pub f_esc: f64,
}

impl Default for SweepOpts {
    fn default() -> Self {
        Self {
            shoot: ShootOpts::default(),
            n_seeds: 60,
            curve_samples: 160,
            step_init: 0.01,
            step_min: 1e-5,
            step_max: 0.05,
            max_points: 4000,
            spectrum_n: DEFAULT_N,
            l_half: DEFAULT_L_HALF,
            f_esc: 1e3,
        }
    }
}

/// Threshold on `smallest_abs` for calling a lost branch end a zero-eigenvalue end.
pub const END_ZERO_EIG: f64 = 1e-2;
/// Successive failed step reductions before a branch is given up.
pub const MAX_REDUCTIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Fold { c: f64 },
    PitchforkJunction { c: f64 },
    EndZeroEig { c: f64 },
    DomainEdge { c: f64 },
    Lost { c: f64 },
}

impl Termination {
    pub fn c(&self) -> f64 {
        match *self {
            Termination::Fold { c }
            | Termination::PitchforkJunction { c }
            | Termination::EndZeroEig { c }
            | Termination::DomainEdge { c }
            | Termination::Lost { c } => c,
        }
    }
}

/// A branch that stops because a seed amplitude reached zero, i.e. the solution left
/// through the end of its Z-curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchEnd {
    pub c: f64,
    pub f0: f64,
    pub fp0: f64,
    pub smallest_abs: Option<f64>,
    /// Whether the end qualifies as a zero-eigenvalue end (`smallest_abs < END_ZERO_EIG`).
    pub zero_eig: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Global,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub c: f64,
    pub f0: f64,
    pub fp0: f64,
    pub amp_fwd: f64,
    pub amp_bwd: f64,
    /// Absent when the profile could not be resolved; such points are also flagged.
    pub spectral: Option<SpectralSummary>,
    pub exist_len: f64,
    pub status: PointStatus,
}

impl BranchPoint {
    pub fn flagged(&self) -> bool {
        self.status == PointStatus::Undetermined || self.spectral.is_none()
    }

    pub fn n_positive(&self) -> Option<usize> {
        self.spectral.as_ref().map(|s| s.n_positive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    /// How the first point's end of the branch terminates.
    pub origin: Termination,
    pub termination: Termination,
    pub symmetric: bool,
}

impl Branch {
    /// Most common spectral index along the branch (ties go to the smaller index).
    pub fn dominant_index(&self) -> Option<usize> {
        let mut counts = std::collections::BTreeMap::new();
        for p in &self.points {
            if let Some(n) = p.n_positive() {
                *counts.entry(n).or_insert(0usize) += 1;
            }
        }
        counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(n, _)| n)
    }

    pub fn c_range(&self) -> (f64, f64) {
        let lo = self.points.iter().map(|p| p.c).fold(f64::INFINITY, f64::min);
        let hi = self.points.iter().map(|p| p.c).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fold {
    pub c: f64,
    pub f0: f64,
    pub fp0: f64,
    /// Distance from the fitted vertex to the nearest sampled c.
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pitchfork {
    pub c: f64,
    pub f0: f64,
    /// Largest mismatch found between an arm point and its mirror on the sibling arm.
    pub mirror_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub family: Family,
    pub c_range: (f64, f64),
    pub branches: Vec<Branch>,
    pub folds: Vec<Fold>,
    pub pitchforks: Vec<Pitchfork>,
    pub ends: Vec<BranchEnd>,
}

// ---------------------------------------------------------------------------------------
// Shooting systems

/// Station states of both sides for given `(c, a, b)`.
#[derive(Debug, Clone, Copy)]
struct Sides {
    fwd: (f64, f64),
    bwd: (f64, f64),
}

struct Shooter<'a> {
    family: &'a Family,
    opts: ShootOpts,
}

impl<'a> Shooter<'a> {
    fn new(family: &'a Family, opts: &SweepOpts) -> Self {
        // Continuation differentiates shots numerically, so shoot at the refinement tolerance.
        let shoot = ShootOpts { tol: opts.shoot.tol.scaled(1e-2), ..opts.shoot };
        Self { family, opts: shoot }
    }

    fn seeds(&self, c: f64) -> Option<(SeedFamily, SeedFamily)> {
        let phi = self.family.model(c).ok()?;
        Some((SeedFamily::new(&phi, 0.0, Side::Forward, self.opts), SeedFamily::new(&phi, 0.0, Side::Backward, self.opts)))
    }

    fn shoot(fam: &SeedFamily, a: f64) -> Option<(f64, f64)> {
        if !(a >= 0.0) {
            return None;
        }
        let s = fam.shoot_amplitude(a).ok()?;
        (s.trajectory.outcome == Outcome::Reached).then_some((s.point.f, s.point.fp))
    }
}

/// A square-minus-one system `R^n -> R^{n-1}` whose first unknown is `c`.
trait System {
    fn dim(&self) -> usize;
    /// Residual, Jacobian, and the station states at `u`.
    fn jac(&self, u: &[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>, Sides, f64)>;
    /// Seed-amplitude coordinates, which must stay non-negative.
    fn amplitudes(&self, u: &[f64]) -> Vec<f64>;
}

fn fd_step(v: f64) -> f64 {
    1e-7 * (v.abs() + 1e-2)
}

/// Symmetric solutions of an even family: `u = (c, a)`, residual `f'(c, a)`.
struct Symmetric<'a>(&'a Shooter<'a>);

impl System for Symmetric<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn jac(&self, u: &[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>, Sides, f64)> {
        let (c, a) = (u[0], u[1]);
        let (fwd, _) = self.0.seeds(c)?;
        let (f, fp) = Shooter::shoot(&fwd, a)?;
        let hc = fd_step(c);
        let (fwd_c, _) = self.0.seeds(c + hc)?;
        let (_, fp_c) = Shooter::shoot(&fwd_c, a)?;
        let ha = fd_step(a);
        let (f_a, fp_a) = Shooter::shoot(&fwd, a + ha)?;
        let j = vec![vec![(fp_c - fp) / hc, (fp_a - fp) / ha]];
        let sides = Sides { fwd: (f, fp), bwd: (f, -fp) };
        Some((vec![fp], j, sides, (f_a - f) / ha))
    }

    fn amplitudes(&self, u: &[f64]) -> Vec<f64> {
        vec![u[1]]
    }
}

/// General solutions: `u = (c, a, b)`, residual `Z(a) - Z'(b)`.
struct Full<'a>(&'a Shooter<'a>);

impl System for Full<'_> {
    fn dim(&self) -> usize {
        3
    }

    fn jac(&self, u: &[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>, Sides, f64)> {
        let (c, a, b) = (u[0], u[1], u[2]);
        let (fwd, bwd) = self.0.seeds(c)?;
        let zf = Shooter::shoot(&fwd, a)?;
        let zb = Shooter::shoot(&bwd, b)?;
        let r = vec![zf.0 - zb.0, zf.1 - zb.1];
        let hc = fd_step(c);
        let (fwd_c, bwd_c) = self.0.seeds(c + hc)?;
        let zf_c = Shooter::shoot(&fwd_c, a)?;
        let zb_c = Shooter::shoot(&bwd_c, b)?;
        let ha = fd_step(a);
        let zf_a = Shooter::shoot(&fwd, a + ha)?;
        let hb = fd_step(b);
        let zb_b = Shooter::shoot(&bwd, b + hb)?;
        let j = vec![
            vec![((zf_c.0 - zb_c.0) - r[0]) / hc, (zf_a.0 - zf.0) / ha, -(zb_b.0 - zb.0) / hb],
            vec![((zf_c.1 - zb_c.1) - r[1]) / hc, (zf_a.1 - zf.1) / ha, -(zb_b.1 - zb.1) / hb],
        ];
        Some((r, j, Sides { fwd: zf, bwd: zb }, 0.0))
    }

    fn amplitudes(&self, u: &[f64]) -> Vec<f64> {
        vec![u[1], u[2]]
    }
}

/// Gaussian elimination with partial pivoting for the small systems here.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-300 || !a[p][k].is_finite() {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= m * a[k][j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unit null vector of the `(n-1) x n` Jacobian, oriented along `hint`.
fn tangent(j: &[Vec<f64>], hint: &[f64]) -> Option<Vec<f64>> {
    let n = hint.len();
    let mut a: Vec<Vec<f64>> = j.to_vec();
    a.push(hint.to_vec());
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;
    let t = solve(a, rhs)?;
    let s = norm(&t);
    let t: Vec<f64> = t.iter().map(|x| x / s).collect();
    Some(if dot(&t, hint) < 0.0 { t.iter().map(|x| -x).collect() } else { t })
}

const RESIDUAL_TOL: f64 = 1e-9;
const NEWTON_ITERS: usize = 8;

#[derive(Debug, Clone)]
struct RawPoint {
    u: Vec<f64>,
    t: Vec<f64>,
    sides: Sides,
    /// `df/da` on the symmetric reduction, zero otherwise.
    f_a: f64,
}

impl RawPoint {
    fn c(&self) -> f64 {
        self.u[0]
    }

    fn state(&self) -> (f64, f64) {
        (0.5 * (self.sides.fwd.0 + self.sides.bwd.0), 0.5 * (self.sides.fwd.1 + self.sides.bwd.1))
    }
}

/// Newton on `[F(u); t.(u - u_pred)] = 0`.
fn correct(sys: &dyn System, u_pred: &[f64], t: &[f64]) -> Option<(RawPoint, usize)> {
    let mut u = u_pred.to_vec();
    for it in 0..NEWTON_ITERS {
        if sys.amplitudes(&u).iter().any(|&a| a < 0.0) {
            return None;
        }
        let (r, j, sides, f_a) = sys.jac(&u)?;
        let mut a = j.clone();
        a.push(t.to_vec());
        let mut g: Vec<f64> = r.iter().map(|x| -x).collect();
        g.push(-dot(t, &u.iter().zip(u_pred).map(|(x, y)| x - y).collect::<Vec<_>>()));
        let du = solve(a, g)?;
        if norm(&r) < RESIDUAL_TOL && norm(&du) < 1e-8 {
            let t_new = tangent(&j, t)?;
            return Some((RawPoint { u, t: t_new, sides, f_a }, it));
        }
        for (x, d) in u.iter_mut().zip(&du) {
            *x += d;
        }
    }
    None
}

/// Newton on `F(u) = 0` with the coordinates in `fixed` held at their current values.
fn solve_pinned(sys: &dyn System, u0: &[f64], fixed: &[usize]) -> Option<RawPoint> {
    let n = sys.dim();
    let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    let mut u = u0.to_vec();
    for _ in 0..30 {
        let (r, j, sides, f_a) = sys.jac(&u)?;
        let jr: Vec<Vec<f64>> = j.iter().map(|row| free.iter().map(|&k| row[k]).collect()).collect();
        if norm(&r) < RESIDUAL_TOL {
            let hint: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
            let t = tangent(&j, &hint).unwrap_or(hint);
            return Some(RawPoint { u, t, sides, f_a });
        }
        let du = solve(jr, r.iter().map(|x| -x).collect())?;
        let mut lam = 1.0;
        let base = norm(&r);
        let mut moved = false;
        for _ in 0..10 {
            let mut trial = u.clone();
            for (k, d) in free.iter().zip(&du) {
                trial[*k] += lam * d;
            }
            for k in fixed {
                trial[*k] = u0[*k];
            }
            if sys.amplitudes(&trial).iter().all(|&a| a >= 0.0) {
                if let Some((r2, ..)) = sys.jac(&trial) {
                    if norm(&r2) < base {
                        u = trial;
                        moved = true;
                        break;
                    }
                }
            }
            lam *= 0.5;
        }
        if !moved {
            return None;
        }
    }
    None
}

#[derive(Debug, Clone)]
enum RawEnd {
    DomainEdge,
    /// A seed amplitude reached zero: the solution left through the end of its Z-curve.
    Boundary,
    Lost,
}

struct Trace {
    points: Vec<RawPoint>,
    end: RawEnd,
}

fn in_range(c: f64, range: (f64, f64)) -> bool {
    c >= range.0 && c <= range.1
}

/// The point where the curve through `last` crosses the nearer parameter bound, if the
/// corrector converges there.
fn land_on_edge(sys: &dyn System, last: &RawPoint, beyond: f64, range: (f64, f64)) -> Option<RawPoint> {
    let edge = if beyond > range.1 { range.1 } else { range.0 };
    if last.t[0].abs() < 1e-12 || (last.c() - edge).abs() < 1e-12 {
        return None;
    }
    let s = (edge - last.c()) / last.t[0];
    let mut u0: Vec<f64> = last.u.iter().zip(&last.t).map(|(u, t)| u + s * t).collect();
    u0[0] = edge;
    solve_pinned(sys, &u0, &[0]).filter(|p| sys.amplitudes(&p.u).iter().all(|&a| a >= 0.0))
}

/// Pseudo-arclength continuation from `start` along its tangent.
fn trace(sys: &dyn System, start: RawPoint, opts: &SweepOpts, range: (f64, f64), max_points: usize) -> Trace {
    let mut pts = vec![start];
    let h_max = opts.step_max.min((range.1 - range.0) / 40.0);
    let mut h = opts.step_init.min(h_max);
    let mut fails = 0;
    loop {
        if pts.len() >= max_points {
            return Trace { points: pts, end: RawEnd::Lost };
        }
        let last = pts.last().expect("trace starts with a point").clone();
        let pred: Vec<f64> = last.u.iter().zip(&last.t).map(|(u, t)| u + h * t).collect();
        let amps = sys.amplitudes(&pred);
        if amps.iter().any(|&a| a < 0.0) {
            // Pin the amplitude that would go negative and land exactly on the curve's end.
            let k = (0..amps.len()).min_by(|&i, &j| amps[i].total_cmp(&amps[j])).expect("has amplitudes") + 1;
            let mut u0 = last.u.clone();
            u0[k] = 0.0;
            if sys.dim() == 3 {
                // Project the other amplitude along the tangent to where the pinned one vanishes.
                let s = last.u[k] / -last.t[k];
                for i in 0..3 {
                    if i != k {
                        u0[i] = last.u[i] + s * last.t[i];
                    }
                }
            } else {
                let s = last.u[k] / -last.t[k];
                u0[0] = last.u[0] + s * last.t[0];
            }
            if let Some(p) = solve_pinned(sys, &u0, &[k]) {
                if in_range(p.c(), range) {
                    pts.push(p);
                    return Trace { points: pts, end: RawEnd::Boundary };
                }
                pts.extend(land_on_edge(sys, &last, p.c(), range));
                return Trace { points: pts, end: RawEnd::DomainEdge };
            }
            h *= 0.5;
            fails += 1;
            if fails > MAX_REDUCTIONS || h < opts.step_min {
                return Trace { points: pts, end: RawEnd::Lost };
            }
            continue;
        }
        match correct(sys, &pred, &last.t) {
            Some((p, iters)) if dot(&p.t, &last.t) > 0.5 => {
                if !in_range(p.c(), range) {
                    pts.extend(land_on_edge(sys, &last, p.c(), range));
                    return Trace { points: pts, end: RawEnd::DomainEdge };
                }
                pts.push(p);
                fails = 0;
                if iters <= 3 {
                    h = (h * 1.5).min(h_max);
                }
            }
            _ => {
                h *= 0.5;
                fails += 1;
                if fails > MAX_REDUCTIONS || h < opts.step_min {
                    return Trace { points: pts, end: RawEnd::Lost };
                }
            }
        }
    }
}

/// Traces both directions from a converged point and joins them.
fn trace_both(sys: &dyn System, p: RawPoint, opts: &SweepOpts, range: (f64, f64)) -> (Vec<RawPoint>, RawEnd, RawEnd) {
    let fwd = trace(sys, p.clone(), opts, range, opts.max_points);
    let flipped = RawPoint { t: p.t.iter().map(|x| -x).collect(), ..p };
    let bwd = trace(sys, flipped, opts, range, opts.max_points);
    let mut pts: Vec<RawPoint> = bwd.points.into_iter().rev().collect();
    for q in &mut pts {
        q.t = q.t.iter().map(|x| -x).collect();
    }
    pts.extend(fwd.points.into_iter().skip(1));
    (pts, bwd.end, fwd.end)
}

// ---------------------------------------------------------------------------------------
// Events along raw curves

/// Locates the zero of `g` on the curve between two consecutive points by bisection on
/// the arclength predictor from the first.
fn bisect_event(sys: &dyn System, a: &RawPoint, b: &RawPoint, g: impl Fn(&RawPoint) -> f64) -> Option<RawPoint> {
    let h = norm(&a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect::<Vec<_>>());
    let ga = g(a);
    let (mut lo, mut hi) = (0.0, h);
    let mut best = b.clone();
    for _ in 0..30 {
        let s = 0.5 * (lo + hi);
        let pred: Vec<f64> = a.u.iter().zip(&a.t).map(|(u, t)| u + s * t).collect();
        let (p, _) = correct(sys, &pred, &a.t)?;
        if g(&p).signum() == ga.signum() {
            lo = s;
        } else {
            hi = s;
        }
        best = p;
        if hi - lo < 1e-9 {
            break;
        }
    }
    Some(best)
}

fn pitchfork_indices(pts: &[RawPoint]) -> Vec<usize> {
    (0..pts.len().saturating_sub(1))
        .filter(|&i| pts[i].f_a != 0.0 && pts[i + 1].f_a != 0.0 && pts[i].f_a.signum() != pts[i + 1].f_a.signum())
        .collect()
}

/// Arm seed next to a pitchfork at `(c*, a*)`: fix `a - b = 2 eps` and solve for `(c, a + b)`.
fn arm_seed(full: &Full, c: f64, a: f64, eps: f64) -> Option<RawPoint> {
    // Unknowns (c, s) with a = s + eps, b = s - eps.
    let shooter = full.0;
    let resid = |c: f64, s: f64| -> Option<(f64, f64)> {
        let (fwd, bwd) = shooter.seeds(c)?;
        let zf = Shooter::shoot(&fwd, s + eps)?;
        let zb = Shooter::shoot(&bwd, s - eps)?;
        Some((zf.0 - zb.0, zf.1 - zb.1))
    };
    let (mut c, mut s) = (c, a);
    for _ in 0..30 {
        let r = resid(c, s)?;
        if r.0.hypot(r.1) < RESIDUAL_TOL {
            let u = vec![c, s + eps, s - eps];
            let (_, j, sides, _) = full.jac(&u)?;
            let hint = vec![0.0, eps.signum(), -eps.signum()];
            let t = tangent(&j, &hint)?;
            return Some(RawPoint { u, t, sides, f_a: 0.0 });
        }
        let (hc, hs) = (fd_step(c), fd_step(s));
        let rc = resid(c + hc, s)?;
        let rs = resid(c, s + hs)?;
        let j = vec![vec![(rc.0 - r.0) / hc, (rs.0 - r.0) / hs], vec![(rc.1 - r.1) / hc, (rs.1 - r.1) / hs]];
        let d = solve(j, vec![-r.0, -r.1])?;
        let mut lam = 1.0;
        let mut moved = false;
        for _ in 0..10 {
            let (nc, ns) = (c + lam * d[0], s + lam * d[1]);
            if ns - eps.abs() >= 0.0 {
                if let Some(nr) = resid(nc, ns) {
                    if nr.0.hypot(nr.1) < r.0.hypot(r.1) {
                        c = nc;
                        s = ns;
                        moved = true;
                        break;
                    }
                }
            }
            lam *= 0.5;
        }
        if !moved {
            return None;
        }
    }
    None
}

// ---------------------------------------------------------------------------------------
// Public analysis operations

/// Half-length of the existence interval: the first `|x|` on either side where
/// `|f| > f_esc`, or `x_verify` if neither side escapes.
pub fn existence_interval(phi: &PhiModel, f0: f64, fp0: f64, f_esc: f64, x_verify: f64, tol: Tolerance) -> f64 {
    let opts = IntegratorOpts { blowup: (f_esc * 1e3).max(1e6), ..IntegratorOpts::with_tol(tol) };
    let p = PhasePoint::new(f0, fp0, 0.0);
    let mirror = phi.reflected();
    let side = |start: &PhasePoint, m: &PhiModel| -> f64 {
        let Ok(t) = integrate_to(start, x_verify, m, &opts) else { return 0.0 };
        let mut first = x_verify;
        for plane in [Plane::f_equals(f_esc), Plane::f_equals(-f_esc)] {
            if let Some(e) = crossing_events(&t, &plane).first() {
                first = first.min(e.x);
            }
        }
        if let Outcome::BlowUp { x_blow } = t.outcome {
            first = first.min(x_blow.max(0.0));
        }
        if let Outcome::ToleranceFailure { x } = t.outcome {
            first = first.min(x);
        }
        first
    };
    side(&p, phi).min(side(&p.mirrored(), &mirror))
}

/// Fold points of a branch: sign changes of `dc/ds` along the `(c, f0, fp0)` polyline,
/// refined by a quadratic fit of `c(s)` through the three samples around the turn.
pub fn detect_fold(points: &[(f64, f64, f64)]) -> Vec<Fold> {
    if points.len() < 3 {
        return vec![];
    }
    let mut s = vec![0.0];
    for w in points.windows(2) {
        let d = ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2) + (w[1].2 - w[0].2).powi(2)).sqrt();
        s.push(s.last().expect("nonempty") + d);
    }
    let mut out = Vec::new();
    for i in 1..points.len() - 1 {
        let d1 = points[i].0 - points[i - 1].0;
        let d2 = points[i + 1].0 - points[i].0;
        if d1 * d2 < 0.0 || (d2 == 0.0 && i + 2 < points.len() && d1 * (points[i + 2].0 - points[i + 1].0) < 0.0) {
            let (s0, s1, s2) = (s[i - 1], s[i], s[i + 1]);
            let (c0, c1, c2) = (points[i - 1].0, points[i].0, points[i + 1].0);
            // Vertex of the interpolating parabola in s.
            let den = (s0 - s1) * (s0 - s2) * (s1 - s2);
            if den == 0.0 {
                continue;
            }
            let qa = (s2 * (c1 - c0) + s1 * (c0 - c2) + s0 * (c2 - c1)) / den;
            let qb = (s2 * s2 * (c0 - c1) + s1 * s1 * (c2 - c0) + s0 * s0 * (c1 - c2)) / den;
            let qc = c0 - qa * s0 * s0 - qb * s0;
            let sv = (-qb / (2.0 * qa)).clamp(s0, s2);
            let cv = qa * sv * sv + qb * sv + qc;
            let lerp = |k: usize| {
                let (j, w) = if sv <= s1 { (i - 1, (sv - s0) / (s1 - s0)) } else { (i, (sv - s1) / (s2 - s1)) };
                let (a, b) = (points[j], points[j + 1]);
                match k {
                    1 => a.1 + w * (b.1 - a.1),
                    _ => a.2 + w * (b.2 - a.2),
                }
            };
            out.push(Fold { c: cv, f0: lerp(1), fp0: lerp(2), tol: (cv - c1).abs() });
        }
    }
    out
}

/// Pitchforks among computed branches: a symmetric branch endpoint where a mirror pair of
/// asymmetric arms meets it. Each pair is checked point-by-point against reflection.
pub fn detect_pitchfork(branches: &[Branch], even: bool) -> Result<Vec<Pitchfork>, BifurcationError> {
    if !even {
        return Err(BifurcationError::SymmetryUnavailable);
    }
    let arms: Vec<&Branch> = branches.iter().filter(|b| !b.symmetric).collect();
    let mut out: Vec<Pitchfork> = Vec::new();
    let mut used = vec![false; arms.len()];
    for i in 0..arms.len() {
        if used[i] {
            continue;
        }
        let Termination::PitchforkJunction { c } = arms[i].origin else { continue };
        for j in i + 1..arms.len() {
            if used[j] || !matches!(arms[j].origin, Termination::PitchforkJunction { c: c2 } if (c2 - c).abs() < 1e-6) {
                continue;
            }
            let err = mirror_error(arms[i], arms[j]);
            if err < 1e-3 {
                used[i] = true;
                used[j] = true;
                let f0 = arms[i].points.first().map(|p| p.f0).unwrap_or(f64::NAN);
                out.push(Pitchfork { c, f0, mirror_error: err });
                break;
            }
        }
    }
    out.sort_by(|a, b| a.c.total_cmp(&b.c));
    Ok(out)
}

/// Largest distance from a point of `a`, reflected, to the polyline of `b`.
pub fn mirror_error(a: &Branch, b: &Branch) -> f64 {
    let poly: Vec<(f64, f64, f64)> = b.points.iter().map(|p| (p.c, p.f0, p.fp0)).collect();
    a.points
        .iter()
        .map(|p| polyline_distance(&poly, (p.c, p.f0, -p.fp0)))
        .fold(0.0, f64::max)
}

fn polyline_distance(poly: &[(f64, f64, f64)], q: (f64, f64, f64)) -> f64 {
    let d3 = |a: (f64, f64, f64), b: (f64, f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt();
    if poly.len() == 1 {
        return d3(poly[0], q);
    }
    let mut best = f64::INFINITY;
    for w in poly.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ab = (b.0 - a.0, b.1 - a.1, b.2 - a.2);
        let aq = (q.0 - a.0, q.1 - a.1, q.2 - a.2);
        let l2 = ab.0 * ab.0 + ab.1 * ab.1 + ab.2 * ab.2;
        let t = if l2 > 0.0 { ((aq.0 * ab.0 + aq.1 * ab.1 + aq.2 * ab.2) / l2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min(d3((a.0 + t * ab.0, a.1 + t * ab.1, a.2 + t * ab.2), q));
    }
    best
}

// ---------------------------------------------------------------------------------------
// Sweep

/// A refined intersection found while seeding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub c: f64,
    pub f0: f64,
    pub fp0: f64,
    pub amp_fwd: f64,
    pub amp_bwd: f64,
}

/// Refined intersections of the Z-curves at each of `n` uniformly spaced parameter values.
pub fn seed_solutions(family: &Family, c_range: (f64, f64), opts: &SweepOpts) -> Result<Vec<Seed>, BifurcationError> {
    let n = opts.n_seeds.max(1);
    let cs: Vec<f64> = (0..n)
        .map(|i| if n == 1 { c_range.0 } else { c_range.0 + (c_range.1 - c_range.0) * i as f64 / (n - 1) as f64 })
        .collect();
    let found: Vec<Vec<Seed>> = cs
        .par_iter()
        .map(|&c| seeds_at(family, c, opts).unwrap_or_default())
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn seeds_at(family: &Family, c: f64, opts: &SweepOpts) -> Result<Vec<Seed>, BifurcationError> {
    let phi = family.model(c)?;
    let range = default_d_range(0.0);
    let zf = build_zcurve(&phi, 0.0, range, opts.curve_samples, Side::Forward, &opts.shoot)?;
    let zb = match zf.mirrored(&phi) {
        Some(z) => z,
        None => build_zcurve(&phi, 0.0, range, opts.curve_samples, Side::Backward, &opts.shoot)?,
    };
    Ok(intersect(&zf, &zb)?
        .into_iter()
        .filter(|x| x.certainty == Certainty::Refined)
        .map(|x| Seed { c, f0: x.f, fp0: x.fp, amp_fwd: x.amp_fwd, amp_bwd: x.amp_bwd })
        .collect())
}

/// A traced curve before splitting: points plus what happened at each end.
struct RawCurve {
    points: Vec<RawPoint>,
    start: Termination,
    end: Termination,
    symmetric: bool,
}

fn raw_termination(end: &RawEnd, last: &RawPoint) -> Termination {
    match end {
        RawEnd::DomainEdge => Termination::DomainEdge { c: last.c() },
        // Classified against the spectrum once it is known.
        RawEnd::Boundary => Termination::EndZeroEig { c: last.c() },
        RawEnd::Lost => Termination::Lost { c: last.c() },
    }
}

fn on_curves(curves: &[RawCurve], q: (f64, f64, f64), tol: f64) -> bool {
    curves.iter().any(|cv| {
        let poly: Vec<(f64, f64, f64)> = cv.points.iter().map(|p| (p.c(), p.state().0, p.state().1)).collect();
        !poly.is_empty() && polyline_distance(&poly, q) < tol
    })
}

/// Whether the seed lies on a traced curve: the two traced points nearest to it are
/// corrected with `c` pinned to the seed's value, which also covers seeds past a fold tip.
fn on_curves_exact(sys: &dyn System, curves: &[RawCurve], s: &Seed) -> bool {
    let dist = |p: &RawPoint| {
        let (f, fp) = p.state();
        (p.c() - s.c).hypot(f - s.f0).hypot(fp - s.fp0)
    };
    curves.iter().any(|cv| {
        let mut near: Vec<&RawPoint> = cv.points.iter().filter(|p| dist(p) < 0.2).collect();
        near.sort_by(|a, b| dist(a).total_cmp(&dist(b)));
        near.iter().take(2).any(|p| {
            let mut u = p.u.clone();
            u[0] = s.c;
            solve_pinned(sys, &u, &[0]).is_some_and(|q| {
                let (f, fp) = q.state();
                (f - s.f0).abs() < 1e-6 && (fp - s.fp0).abs() < 1e-6
            })
        })
    })
}

fn mirror_raw(p: &RawPoint) -> RawPoint {
    RawPoint {
        u: vec![p.u[0], p.u[2], p.u[1]],
        t: vec![p.t[0], p.t[2], p.t[1]],
        sides: Sides { fwd: (p.sides.bwd.0, -p.sides.bwd.1), bwd: (p.sides.fwd.0, -p.sides.fwd.1) },
        f_a: 0.0,
    }
}

/// Embeds a symmetric-reduction point `(c, a)` as `(c, a, a)`.
fn lift(p: &RawPoint) -> RawPoint {
    RawPoint { u: vec![p.u[0], p.u[1], p.u[1]], t: vec![p.t[0], p.t[1], p.t[1]], ..p.clone() }
}

/// Tolerance for recognizing a seed as lying on an already traced curve.
const SAME_CURVE_TOL: f64 = 2e-3;

pub fn sweep(family: &Family, c_range: (f64, f64), opts: &SweepOpts) -> Result<Diagram, BifurcationError> {
    if !(c_range.0 < c_range.1) || !c_range.0.is_finite() || !c_range.1.is_finite() {
        return Err(BifurcationError::InvalidRange(format!("need c_min < c_max, got {c_range:?}")));
    }
    let mut seeds = seed_solutions(family, c_range, opts)?;
    let even = family.is_even();
    let is_sym = |s: &Seed| even && s.fp0.abs() < 1e-7 && (s.amp_fwd - s.amp_bwd).abs() < 1e-7;
    seeds.sort_by(|a, b| {
        is_sym(b).cmp(&is_sym(a)).then(a.c.total_cmp(&b.c)).then(a.f0.total_cmp(&b.f0)).then(a.fp0.total_cmp(&b.fp0))
    });
    let shooter = Shooter::new(family, opts);
    let sym = Symmetric(&shooter);
    let full = Full(&shooter);
    let mut curves: Vec<RawCurve> = Vec::new();
    let mut pitchfork_points: Vec<RawPoint> = Vec::new();
    for s in &seeds {
        if on_curves(&curves, (s.c, s.f0, s.fp0), SAME_CURVE_TOL) || on_curves_exact(&full, &curves, s) {
            continue;
        }
        if is_sym(s) {
            let Some(p) = solve_pinned(&sym, &[s.c, s.amp_fwd], &[0]) else { continue };
            let (mut pts, e0, e1) = trace_both(&sym, p, opts, c_range);
            let start = raw_termination(&e0, &pts[0]);
            let end = raw_termination(&e1, pts.last().expect("nonempty"));
            let found: Vec<(usize, RawPoint)> = pitchfork_indices(&pts)
                .into_iter()
                .filter_map(|i| bisect_event(&sym, &pts[i], &pts[i + 1], |p| p.f_a).map(|pf| (i, pf)))
                .collect();
            for (i, pf) in found.iter().rev() {
                pts.insert(i + 1, pf.clone());
            }
            pitchfork_points.extend(found.into_iter().map(|x| x.1));
            curves.push(RawCurve { points: pts.iter().map(lift).collect(), start, end, symmetric: true });
            for pf in pitchfork_points.drain(..) {
                let (c0, a0) = (pf.u[0], pf.u[1]);
                let eps = 0.01 * a0.max(0.05);
                let Some(seed) = arm_seed(&full, c0, a0, eps) else { continue };
                let tr = trace(&full, seed, opts, c_range, opts.max_points);
                let junction = Termination::PitchforkJunction { c: c0 };
                let end = raw_termination(&tr.end, tr.points.last().expect("nonempty"));
                let mut arm = vec![lift(&pf)];
                arm.extend(tr.points);
                let mirror: Vec<RawPoint> = arm.iter().map(mirror_raw).collect();
                curves.push(RawCurve { points: arm, start: junction, end, symmetric: false });
                curves.push(RawCurve { points: mirror, start: junction, end, symmetric: false });
            }
        } else {
            let Some(p) = solve_pinned(&full, &[s.c, s.amp_fwd, s.amp_bwd], &[0]) else { continue };
            let (pts, e0, e1) = trace_both(&full, p, opts, c_range);
            let start = raw_termination(&e0, &pts[0]);
            let end = raw_termination(&e1, pts.last().expect("nonempty"));
            curves.push(RawCurve { points: pts, start, end, symmetric: false });
        }
    }
    assemble(family, c_range, curves, even, opts)
}

fn branch_point(family: &Family, p: &RawPoint, opts: &SweepOpts) -> BranchPoint {
    let (f0, fp0) = p.state();
    let c = p.c();
    let tol = opts.shoot.tol;
    let (spectral, status, exist_len) = match family.model(c) {
        Ok(phi) => {
            let spectral = SolutionProfile::from_point(&phi, f0, fp0, opts.l_half, tol)
                .and_then(|prof| linearized_spectrum(&prof, opts.l_half, opts.spectrum_n))
                .ok();
            let status = match verify_global(&phi, &PhasePoint::new(f0, fp0, 0.0), opts.shoot.x_verify, tol) {
                Ok(GlobalStatus::Global) => PointStatus::Global,
                _ => PointStatus::Undetermined,
            };
            let len = existence_interval(&phi, f0, fp0, opts.f_esc, opts.shoot.x_verify, tol);
            (spectral, status, len)
        }
        Err(_) => (None, PointStatus::Undetermined, 0.0),
    };
    BranchPoint { c, f0, fp0, amp_fwd: p.u[1], amp_bwd: p.u[2], spectral, exist_len, status }
}

/// Splits raw curves at folds (and symmetric curves at pitchforks), evaluates every point,
/// and collects the diagram.
fn assemble(
    family: &Family,
    c_range: (f64, f64),
    curves: Vec<RawCurve>,
    even: bool,
    opts: &SweepOpts,
) -> Result<Diagram, BifurcationError> {
    let mut folds = Vec::new();
    let mut branches = Vec::new();
    let junctions: Vec<f64> = curves
        .iter()
        .filter_map(|c| match c.start {
            Termination::PitchforkJunction { c } => Some(c),
            _ => None,
        })
        .collect();
    for cv in curves {
        let pts: Vec<BranchPoint> = cv.points.par_iter().map(|p| branch_point(family, p, opts)).collect();
        let poly: Vec<(f64, f64, f64)> = pts.iter().map(|p| (p.c, p.f0, p.fp0)).collect();
        let cv_folds = detect_fold(&poly);
        // Cut indices: the sample nearest to each fold, and symmetric samples at a pitchfork.
        let mut cuts: Vec<(usize, Termination)> = Vec::new();
        for f in &cv_folds {
            let i = (1..pts.len() - 1)
                .min_by(|&i, &j| (pts[i].c - f.c).abs().total_cmp(&(pts[j].c - f.c).abs()))
                .filter(|&i| {
                    let (d1, d2) = (pts[i].c - pts[i - 1].c, pts[i + 1].c - pts[i].c);
                    d1 * d2 <= 0.0
                });
            if let Some(i) = i {
                cuts.push((i, Termination::Fold { c: f.c }));
            }
        }
        if cv.symmetric {
            for &cj in &junctions {
                if let Some(i) = (1..pts.len().saturating_sub(1)).find(|&i| {
                    (pts[i - 1].c - cj) * (pts[i + 1].c - cj) < 0.0 && (pts[i].c - cj).abs() < 1e-6
                }) {
                    cuts.push((i, Termination::PitchforkJunction { c: cj }));
                }
            }
        }
        folds.extend(cv_folds);
        cuts.sort_by_key(|x| x.0);
        cuts.dedup_by_key(|x| x.0);
        let mut start = 0;
        let mut origin = cv.start;
        for (i, term) in cuts {
            branches.push(Branch { points: pts[start..=i].to_vec(), origin, termination: term, symmetric: cv.symmetric });
            start = i;
            origin = term;
        }
        branches.push(Branch { points: pts[start..].to_vec(), origin, termination: cv.end, symmetric: cv.symmetric });
    }
    // Reclassify boundary ends against the spectrum at the end point.
    let mut ends = Vec::new();
    for b in &mut branches {
        for (term, p) in [(&mut b.termination, b.points.last()), (&mut b.origin, b.points.first())] {
            if let (Termination::EndZeroEig { c }, Some(p)) = (*term, p) {
                let smallest_abs = p.spectral.as_ref().map(|s| s.smallest_abs);
                let zero_eig = smallest_abs.map(|v| v < END_ZERO_EIG).unwrap_or(false);
                ends.push(BranchEnd { c, f0: p.f0, fp0: p.fp0, smallest_abs, zero_eig });
                if !zero_eig {
                    *term = Termination::Lost { c };
                }
            }
        }
    }
    merge_duplicates(&mut branches);
    ends.sort_by(|a, b| a.c.total_cmp(&b.c).then(a.fp0.total_cmp(&b.fp0)));
    folds.sort_by(|a, b| a.c.total_cmp(&b.c));
    folds.dedup_by(|a, b| (a.c - b.c).abs() < 1e-6 && (a.f0 - b.f0).abs() < 1e-6);
    let pitchforks = if even { detect_pitchfork(&branches, true)? } else { vec![] };
    Ok(Diagram { family: family.clone(), c_range, branches, folds, pitchforks, ends })
}

/// Drops branches whose every point lies on another, longer branch.
fn merge_duplicates(branches: &mut Vec<Branch>) {
    let mut keep = vec![true; branches.len()];
    for i in 0..branches.len() {
        for j in 0..branches.len() {
            if i == j || !keep[j] || branches[j].points.len() < branches[i].points.len() {
                continue;
            }
            if branches[j].points.len() == branches[i].points.len() && j > i {
                continue;
            }
            let poly: Vec<(f64, f64, f64)> = branches[j].points.iter().map(|p| (p.c, p.f0, p.fp0)).collect();
            if poly.len() >= 2
                && branches[i].points.iter().all(|p| polyline_distance(&poly, (p.c, p.f0, p.fp0)) < 1e-6)
            {
                keep[i] = false;
                break;
            }
        }
    }
    let mut k = 0;
    branches.retain(|_| {
        k += 1;
        keep[k - 1]
    });
}

/// Existence-interval estimates on a `(c, f0)` grid with `f0' = 0`.
pub fn exist_len_scan(
    family: &Family,
    cs: &[f64],
    f0s: &[f64],
    f_esc: f64,
    x_verify: f64,
    tol: Tolerance,
) -> Result<Vec<(f64, f64, f64)>, BifurcationError> {
    let models: Vec<PhiModel> = cs.iter().map(|&c| family.model(c)).collect::<Result<_, _>>()?;
    let rows: Vec<Vec<(f64, f64, f64)>> = cs
        .par_iter()
        .zip(models.par_iter())
        .map(|(&c, phi)| f0s.iter().map(|&f0| (c, f0, existence_interval(phi, f0, 0.0, f_esc, x_verify, tol))).collect())
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Longest existence interval over `f0` in `[lo, hi]` with `f0' = 0`, by a grid search
/// polished with golden section: the continuation of a branch past its end.
pub fn longest_existence(phi: &PhiModel, lo: f64, hi: f64, f_esc: f64, x_verify: f64, tol: Tolerance) -> (f64, f64) {
    let n = 200;
    let g = |f0: f64| existence_interval(phi, f0, 0.0, f_esc, x_verify, tol);
    let (mut best_f, mut best) = (lo, f64::NEG_INFINITY);
    for i in 0..=n {
        let f0 = lo + (hi - lo) * i as f64 / n as f64;
        let v = g(f0);
        if v > best {
            best = v;
            best_f = f0;
        }
    }
    let h = (hi - lo) / n as f64;
    let (x, v) = crate::problem::golden_max(g, (best_f - h).max(lo), (best_f + h).min(hi), 1e-12);
    if v > best {
        (x, v)
    } else {
        (best_f, best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_on_parabola() {
        // c = 1 - (f0 - 1)^2, sampled unevenly in f0.
        let pts: Vec<(f64, f64, f64)> = (0..40)
            .map(|i| {
                let f0 = 0.1 + 1.8 * (i as f64 / 39.0).powf(1.1);
                (1.0 - (f0 - 1.0).powi(2), f0, 0.0)
            })
            .collect();
        let folds = detect_fold(&pts);
        assert_eq!(folds.len(), 1);
        assert!((folds[0].c - 1.0).abs() < 1e-4, "{:?}", folds[0]);
        assert!((folds[0].f0 - 1.0).abs() < 5e-2);
    }

    #[test]
    fn monotone_branch_has_no_fold() {
        let pts: Vec<(f64, f64, f64)> = (0..20).map(|i| (i as f64 * 0.1, (i as f64).sin(), 0.0)).collect();
        assert!(detect_fold(&pts).is_empty());
        assert!(detect_fold(&pts[..2]).is_empty());
    }

    #[test]
    fn pitchfork_needs_symmetry() {
        assert_eq!(detect_pitchfork(&[], false), Err(BifurcationError::SymmetryUnavailable));
        assert!(detect_pitchfork(&[], true).unwrap().is_empty());
    }

    #[test]
    fn linear_solver() {
        let x = solve(vec![vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]], vec![7.0, 3.0, 6.0]).unwrap();
        for (v, w) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - w).abs() < 1e-12);
        }
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn existence_of_zero_solution_and_blowup() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let tol = Tolerance::default();
        assert_eq!(existence_interval(&phi, 0.0, 0.0, 1e3, 40.0, tol), 40.0);
        // f'' = f^2 from f(0) = 2, f'(0) = 0 escapes; compare with the pole estimate.
        let len = existence_interval(&phi, 2.0, 0.0, 1e3, 40.0, tol);
        let t = integrate_to(&PhasePoint::new(2.0, 0.0, 0.0), 40.0, &phi, &IntegratorOpts::with_tol(tol)).unwrap();
        let Outcome::BlowUp { x_blow } = t.outcome else { panic!("expected blow-up") };
        assert!(len < x_blow && x_blow - len < 0.1, "{len} vs {x_blow}");
    }

    #[test]
    fn family_models() {
        assert!(Family::Gaussian.is_even());
        let odd = Family::ScaledTable { rows: vec![[0.0, 1.0, 0.0], [1.0, 0.5, 0.0], [2.0, 0.0, 0.0]] };
        assert!(!odd.is_even());
        let m = odd.model(2.0).unwrap();
        assert_eq!(m.eval(1.0), 1.0);
    }
}
