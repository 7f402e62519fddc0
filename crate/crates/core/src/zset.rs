//! Z-sets: the points at a station `x0` whose solutions exist on all of `[x0, inf)`
//! (forward side) or `(-inf, x0]` (backward side), sampled by shooting from series
//! boundary data, and their intersections.
//!
//! Seeds are parameterized by the pole `d` of `f_0 = 6/(x-d)^2` or, equivalently, by the
//! amplitude `a = 6/(x0 + 2 - d)^2`; `a = 0` is the limit `d -> -inf`, where the curve ends
//! at the solution that decays faster than any `6/(x-d)^2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrate::{integrate_to, IntegrateError, IntegratorOpts, Outcome, Tolerance, Trajectory};
use crate::problem::{classify_region_slack, cubic_part, PhasePoint, PhiModel, ProblemError, RegionTag};
use crate::quad::{integrate_to_infinity, QuadTol};
use crate::series::{build_expansion, certified_params, SeriesError, DEFAULT_ALPHA, DEFAULT_ORDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZsetError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("every seed in the requested range blew up or failed")]
    EmptyCurve,
    #[error("invalid seed range: {0}")]
    InvalidRange(String),
    #[error("the two curves belong to different stations or to the same side")]
    Mismatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Forward,
    Backward,
}

/// Defaults: boundary offset `X_bc = 8`, verification span `X_verify = 40`,
/// envelope exponent 6, four correction terms, `K = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootOpts {
    pub tol: Tolerance,
    pub x_bc: f64,
    pub x_verify: f64,
    pub alpha: f64,
    pub order: usize,
    pub k: f64,
}

impl Default for ShootOpts {
    fn default() -> Self {
        Self { tol: Tolerance::default(), x_bc: 8.0, x_verify: 40.0, alpha: DEFAULT_ALPHA, order: DEFAULT_ORDER, k: 0.0 }
    }
}

/// Amplitude reference offset: `a = 6/(station + AMP_REF - d)^2`.
pub const AMP_REF: f64 = 2.0;

/// Result of one shot from series data back to the station.
#[derive(Debug, Clone)]
pub struct Shot {
    /// State at the station, in the caller's coordinates.
    pub point: PhasePoint,
    /// Pole offset in the side's own frame; `-inf` for the end of the curve.
    pub d: f64,
    pub amplitude: f64,
    pub x_bc: f64,
    pub trunc_err: f64,
    /// Trajectory in the side's own frame (reflected for the backward side).
    pub trajectory: Trajectory,
}

/// The shooting map from a seed to the state at the station.
#[derive(Debug, Clone)]
pub struct SeedFamily {
    side: Side,
    station: f64,
    /// phi in the side's own frame.
    phi: PhiModel,
    opts: ShootOpts,
}

impl SeedFamily {
    pub fn new(phi: &PhiModel, station: f64, side: Side, opts: ShootOpts) -> Self {
        let phi = match side {
            Side::Forward => phi.clone(),
            Side::Backward => phi.reflected(),
        };
        Self { side, station, phi, opts }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn station(&self) -> f64 {
        self.station
    }

    pub fn opts(&self) -> &ShootOpts {
        &self.opts
    }

    pub fn with_tol(&self, tol: Tolerance) -> Self {
        Self { opts: ShootOpts { tol, ..self.opts }, ..self.clone() }
    }

    /// Station in the side's own frame.
    fn local_station(&self) -> f64 {
        match self.side {
            Side::Forward => self.station,
            Side::Backward => -self.station,
        }
    }

    fn to_caller(&self, p: PhasePoint) -> PhasePoint {
        match self.side {
            Side::Forward => p,
            Side::Backward => p.mirrored(),
        }
    }

    pub fn d_max(&self) -> f64 {
        self.local_station() + AMP_REF
    }

    pub fn amplitude_of(&self, d: f64) -> f64 {
        let y = self.d_max() - d;
        6.0 / (y * y)
    }

    pub fn d_of(&self, a: f64) -> f64 {
        if a <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.d_max() - (6.0 / a).sqrt()
        }
    }

    fn integrator(&self) -> IntegratorOpts {
        IntegratorOpts::with_tol(self.opts.tol)
    }

    /// Shoots from the series data of pole `d` back to the station.
    pub fn shoot_d(&self, d: f64) -> Result<Shot, ZsetError> {
        if !(d < self.d_max()) {
            return Err(ZsetError::InvalidRange(format!("d = {d} must lie below {}", self.d_max())));
        }
        if d == f64::NEG_INFINITY {
            return self.shoot_end();
        }
        let x0 = self.local_station();
        let params = certified_params(&self.phi, d, self.opts.k, self.opts.alpha, self.opts.order)?;
        let exp = build_expansion(&self.phi, &params)?;
        let x_bc = (d + (1.5 * params.r).max(self.opts.x_bc)).max(x0 + 1.0);
        let v = exp.eval(x_bc)?;
        let traj = integrate_to(&PhasePoint::new(v.f, v.fp, x_bc), x0, &self.phi, &self.integrator())?;
        Ok(Shot {
            point: self.to_caller(traj.end()),
            d,
            amplitude: self.amplitude_of(d),
            x_bc,
            trunc_err: v.trunc_err,
            trajectory: traj,
        })
    }

    pub fn shoot_amplitude(&self, a: f64) -> Result<Shot, ZsetError> {
        if a <= 0.0 {
            self.shoot_end()
        } else {
            self.shoot_d(self.d_of(a))
        }
    }

    /// The fast-decaying solution, from its linearized tail far beyond the support of phi.
    pub fn shoot_end(&self) -> Result<Shot, ZsetError> {
        let x0 = self.local_station();
        let x_e = x0.max(self.phi.tail_extent(1e-18)).max(0.0) + self.opts.x_bc;
        let phi = &self.phi;
        let tol = QuadTol { abs: 1e-300, rel: 1e-12, max_intervals: 2000 };
        let dphi = integrate_to_infinity(|s| phi.eval(s), x_e, 1.0, tol).map_err(|e| {
            ZsetError::Series(SeriesError::DivergentCoefficient { k: 0, source: e })
        })?;
        let w = integrate_to_infinity(|s| (s - x_e) * phi.eval(s), x_e, 1.0, tol).map_err(|e| {
            ZsetError::Series(SeriesError::DivergentCoefficient { k: 0, source: e })
        })?;
        let start = PhasePoint::new(-w, dphi, x_e);
        let traj = integrate_to(&start, x0, phi, &self.integrator())?;
        Ok(Shot {
            point: self.to_caller(traj.end()),
            d: f64::NEG_INFINITY,
            amplitude: 0.0,
            x_bc: x_e,
            trunc_err: 0.0,
            trajectory: traj,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZPoint {
    pub f: f64,
    pub fp: f64,
    pub seed_d: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Refined,
    /// Residual between 1e-8 and 1e-4: a near-tangency the solver could not resolve.
    Tangential,
    Undetermined,
}

/// End of the curve reached as the pole recedes to `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub f: f64,
    pub fp: f64,
    pub certainty: Certainty,
}

#[derive(Debug, Clone)]
pub struct ZCurve {
    pub side: Side,
    pub station: f64,
    /// Ordered by `seed_d` (the pole offset in the side's own frame), increasing.
    pub points: Vec<ZPoint>,
    pub boundary: Option<BoundaryPoint>,
    family: SeedFamily,
}

impl ZCurve {
    pub fn family(&self) -> &SeedFamily {
        &self.family
    }

    /// For even phi and station 0, the backward curve is the reflection `f' -> -f'` of the
    /// forward one; this builds it without shooting.
    pub fn mirrored(&self, phi: &PhiModel) -> Option<ZCurve> {
        if self.station != 0.0 || !phi.is_even() {
            return None;
        }
        let side = match self.side {
            Side::Forward => Side::Backward,
            Side::Backward => Side::Forward,
        };
        let points = self.points.iter().map(|p| ZPoint { fp: -p.fp, ..*p }).collect();
        let boundary = self.boundary.map(|b| BoundaryPoint { fp: -b.fp, ..b });
        let family = SeedFamily::new(phi, 0.0, side, self.family.opts);
        Some(ZCurve { side, station: 0.0, points, boundary, family })
    }

    /// Polyline vertices `(f, f', amplitude)` starting at the boundary point when it is usable.
    fn vertices(&self) -> Vec<(f64, f64, f64)> {
        let mut v = Vec::with_capacity(self.points.len() + 1);
        if let Some(b) = self.boundary {
            // The degenerate point f = f' = 0 (phi = 0) is not part of the curve.
            if b.f.abs() + b.fp.abs() > 1e-12 {
                v.push((b.f, b.fp, 0.0));
            }
        }
        v.extend(self.points.iter().map(|p| (p.f, p.fp, p.amplitude)));
        v
    }
}

fn shot_ok(s: &Result<Shot, ZsetError>) -> bool {
    matches!(s, Ok(s) if s.trajectory.outcome == Outcome::Reached)
}

fn turning_angle(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let u = (b.0 - a.0, b.1 - a.1);
    let v = (c.0 - b.0, c.1 - b.1);
    let cross = u.0 * v.1 - u.1 * v.0;
    let dot = u.0 * v.0 + u.1 * v.1;
    cross.atan2(dot).abs()
}

/// Samples the curve for seeds `d` in `d_range`, uniformly in amplitude, then refines
/// where consecutive segments turn by more than 5 degrees. Seeds that blow up are dropped.
pub fn build_zcurve(
    phi: &PhiModel,
    station: f64,
    d_range: (f64, f64),
    n_samples: usize,
    side: Side,
    opts: &ShootOpts,
) -> Result<ZCurve, ZsetError> {
    let family = SeedFamily::new(phi, station, side, *opts);
    let (d_lo, d_hi) = d_range;
    if !(d_lo < d_hi) || !(d_hi < family.d_max()) || n_samples < 2 {
        return Err(ZsetError::InvalidRange(format!(
            "need d_min < d_max < {} and at least two samples, got {d_range:?}, n = {n_samples}",
            family.d_max()
        )));
    }
    let a_lo = family.amplitude_of(d_lo);
    let mut a_hi = family.amplitude_of(d_hi);
    let survives = |a: f64| shot_ok(&family.shoot_amplitude(a));
    if !survives(a_hi) {
        // Shrink the range to the edge where the backward shots start meeting the pole.
        if !survives(a_lo) {
            return Err(ZsetError::EmptyCurve);
        }
        let mut lo = a_lo;
        for _ in 0..40 {
            let m = 0.5 * (lo + a_hi);
            if survives(m) {
                lo = m;
            } else {
                a_hi = m;
            }
            if a_hi - lo < 1e-9 * a_hi {
                break;
            }
        }
        a_hi = lo;
    }
    let amps: Vec<f64> = (0..n_samples).map(|i| a_lo + (a_hi - a_lo) * i as f64 / (n_samples - 1) as f64).collect();
    let shoot = |a: &f64| family.shoot_amplitude(*a);
    let mut pts: Vec<ZPoint> = amps
        .par_iter()
        .map(shoot)
        .collect::<Vec<_>>()
        .into_iter()
        .filter(shot_ok)
        .map(|s| {
            let s = s.expect("filtered");
            ZPoint { f: s.point.f, fp: s.point.fp, seed_d: s.d, amplitude: s.amplitude }
        })
        .collect();
    if pts.is_empty() {
        return Err(ZsetError::EmptyCurve);
    }
    let max_angle = 5f64.to_radians();
    for _ in 0..8 {
        let mut insert = vec![false; pts.len().saturating_sub(1)];
        for i in 1..pts.len().saturating_sub(1) {
            let t = turning_angle((pts[i - 1].f, pts[i - 1].fp), (pts[i].f, pts[i].fp), (pts[i + 1].f, pts[i + 1].fp));
            if t > max_angle {
                insert[i - 1] = true;
                insert[i] = true;
            }
        }
        let mids: Vec<f64> = insert
            .iter()
            .enumerate()
            .filter(|(i, &b)| b && (pts[*i + 1].amplitude - pts[*i].amplitude) > 1e-12 * a_hi)
            .map(|(i, _)| 0.5 * (pts[i].amplitude + pts[i + 1].amplitude))
            .collect();
        if mids.is_empty() || pts.len() > 20 * n_samples {
            break;
        }
        let new: Vec<ZPoint> = mids
            .par_iter()
            .map(shoot)
            .collect::<Vec<_>>()
            .into_iter()
            .filter(shot_ok)
            .map(|s| {
                let s = s.expect("filtered");
                ZPoint { f: s.point.f, fp: s.point.fp, seed_d: s.d, amplitude: s.amplitude }
            })
            .collect();
        pts.extend(new);
        pts.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
    }
    let boundary = match family.shoot_end() {
        Ok(s) if s.trajectory.reached() => {
            Some(BoundaryPoint { f: s.point.f, fp: s.point.fp, certainty: Certainty::Undetermined })
        }
        _ => None,
    };
    Ok(ZCurve { side, station, points: pts, boundary, family })
}

/// Default seed range for a station: poles from `station - 1000` up to just below the
/// amplitude reference.
pub fn default_d_range(station: f64) -> (f64, f64) {
    (station - 1000.0, station + 1.5)
}

/// A refined crossing of the forward and backward curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub f: f64,
    pub fp: f64,
    pub residual: f64,
    pub refined: bool,
    pub certainty: Certainty,
    pub amp_fwd: f64,
    pub amp_bwd: f64,
    pub d_fwd: Option<f64>,
    pub d_bwd: Option<f64>,
}

/// Converged residual bound for refined intersections.
pub const REFINED_RESIDUAL: f64 = 1e-8;
/// Residuals up to this bound are reported as tangential; larger ones are discarded.
pub const TANGENTIAL_RESIDUAL: f64 = 1e-4;

fn seg_cross(p: (f64, f64), p2: (f64, f64), q: (f64, f64), q2: (f64, f64)) -> Option<(f64, f64)> {
    let r = (p2.0 - p.0, p2.1 - p.1);
    let s = (q2.0 - q.0, q2.1 - q.1);
    let den = r.0 * s.1 - r.1 * s.0;
    if den == 0.0 {
        return None;
    }
    let w = (q.0 - p.0, q.1 - p.1);
    let t = (w.0 * s.1 - w.1 * s.0) / den;
    let u = (w.0 * r.1 - w.1 * r.0) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// Refines `Z_fwd(a) = Z_bwd(b)` from a starting guess by damped Newton in the amplitudes.
pub fn refine_pair(fwd: &SeedFamily, bwd: &SeedFamily, a0: f64, b0: f64) -> Option<Intersection> {
    let tight = fwd.opts.tol.scaled(1e-2);
    let (zf, zb) = (fwd.with_tol(tight), bwd.with_tol(tight));
    let eval = |a: f64, b: f64| -> Option<((f64, f64), (f64, f64))> {
        let s = zf.shoot_amplitude(a).ok().filter(|s| s.trajectory.reached())?;
        let t = zb.shoot_amplitude(b).ok().filter(|s| s.trajectory.reached())?;
        Some(((s.point.f, s.point.fp), (t.point.f, t.point.fp)))
    };
    let res = |p: &((f64, f64), (f64, f64))| (p.0 .0 - p.1 .0, p.0 .1 - p.1 .1);
    let norm = |r: (f64, f64)| r.0.hypot(r.1);
    let (mut a, mut b) = (a0.max(0.0), b0.max(0.0));
    let mut cur = eval(a, b)?;
    let mut r = res(&cur);
    for _ in 0..40 {
        if norm(r) < 1e-11 {
            break;
        }
        let ha = 1e-7 * (a + 1e-3);
        let hb = 1e-7 * (b + 1e-3);
        let pa = eval(a + ha, b)?;
        let pb = eval(a, b + hb)?;
        let ra = res(&pa);
        let rb = res(&pb);
        let j = [[(ra.0 - r.0) / ha, (rb.0 - r.0) / hb], [(ra.1 - r.1) / ha, (rb.1 - r.1) / hb]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let da = -(j[1][1] * r.0 - j[0][1] * r.1) / det;
        let db = -(-j[1][0] * r.0 + j[0][0] * r.1) / det;
        let mut lam = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let (na, nb) = ((a + lam * da).max(0.0), (b + lam * db).max(0.0));
            if let Some(c) = eval(na, nb) {
                let nr = res(&c);
                if norm(nr) < norm(r) {
                    a = na;
                    b = nb;
                    cur = c;
                    r = nr;
                    improved = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let resid = norm(r);
    if resid > TANGENTIAL_RESIDUAL {
        return None;
    }
    let refined = resid < REFINED_RESIDUAL;
    let f = 0.5 * (cur.0 .0 + cur.1 .0);
    let fp = 0.5 * (cur.0 .1 + cur.1 .1);
    Some(Intersection {
        f,
        fp,
        residual: resid,
        refined,
        certainty: if refined { Certainty::Refined } else { Certainty::Tangential },
        amp_fwd: a,
        amp_bwd: b,
        d_fwd: (a > 0.0).then(|| zf.d_of(a)),
        d_bwd: (b > 0.0).then(|| zb.d_of(b)),
    })
}

/// All crossings of a forward and a backward curve at the same station, refined.
pub fn intersect(zf: &ZCurve, zb: &ZCurve) -> Result<Vec<Intersection>, ZsetError> {
    if zf.side != Side::Forward || zb.side != Side::Backward || zf.station != zb.station {
        return Err(ZsetError::Mismatched);
    }
    let vf = zf.vertices();
    let vb = zb.vertices();
    let mut guesses = Vec::new();
    for i in 0..vf.len().saturating_sub(1) {
        for j in 0..vb.len().saturating_sub(1) {
            let (p, p2) = ((vf[i].0, vf[i].1), (vf[i + 1].0, vf[i + 1].1));
            let (q, q2) = ((vb[j].0, vb[j].1), (vb[j + 1].0, vb[j + 1].1));
            if let Some((t, u)) = seg_cross(p, p2, q, q2) {
                let a = vf[i].2 + t * (vf[i + 1].2 - vf[i].2);
                let b = vb[j].2 + u * (vb[j + 1].2 - vb[j].2);
                guesses.push((a, b));
            }
        }
    }
    let found: Vec<Option<Intersection>> =
        guesses.par_iter().map(|&(a, b)| refine_pair(&zf.family, &zb.family, a, b)).collect();
    let mut out: Vec<Intersection> = Vec::new();
    for x in found.into_iter().flatten() {
        let dup = out.iter_mut().find(|y| (y.f - x.f).hypot(y.fp - x.fp) < 1e-6 * (1.0 + x.f.abs()));
        match dup {
            Some(y) => {
                if x.residual < y.residual {
                    *y = x;
                }
            }
            None => out.push(x),
        }
    }
    out.sort_by(|a, b| a.f.total_cmp(&b.f).then(a.fp.total_cmp(&b.fp)));
    Ok(out)
}

/// Which way a trajectory leaves the neighbourhood of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscapeSide {
    /// Turns upward while still positive.
    Above,
    /// Dips below zero before escaping.
    Below,
}

/// Classifies the forward escape of a state at `x0` on the forward side: the sign of `f`
/// at the last local minimum (upward zero of `f'`), or, when `f'` never turns upward,
/// the position relative to the `phi = 0` separatrix at the end of the span.
pub fn escape_side(phi: &PhiModel, p: &PhasePoint, x_end: f64, tol: Tolerance) -> Result<EscapeSide, ZsetError> {
    let traj = integrate_to(p, x_end, phi, &IntegratorOpts::with_tol(tol))?;
    let s = &traj.samples;
    let last_min = (1..s.len()).rev().find(|&i| s[i - 1].fp <= 0.0 && s[i].fp > 0.0);
    let below = match last_min {
        Some(i) => s[i - 1].f.min(s[i].f) < 0.0,
        None => match traj.outcome {
            Outcome::Reached => {
                let e = traj.end();
                e.f < 0.0 || (e.fp < 0.0 && cubic_part(&e) < 0.0)
            }
            _ => s[0].f < 0.0,
        },
    };
    Ok(if below { EscapeSide::Below } else { EscapeSide::Above })
}

/// Bisects along `origin + t * dir`, `t` in `[0, 1]`, for the point where the escape side
/// flips, to width 1e-10. This is an estimate of a curve point that uses no series data.
pub fn refine_z_bisection(
    phi: &PhiModel,
    origin: PhasePoint,
    dir: (f64, f64),
    x_verify: f64,
    tol: Tolerance,
) -> Result<Option<PhasePoint>, ZsetError> {
    let at = |t: f64| PhasePoint::new(origin.f + t * dir.0, origin.fp + t * dir.1, origin.x);
    let x_end = origin.x + x_verify;
    let side = |t: f64| escape_side(phi, &at(t), x_end, tol);
    let (s0, s1) = (side(0.0)?, side(1.0)?);
    if s0 == s1 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let scale = dir.0.hypot(dir.1);
    while (hi - lo) * scale > 1e-10 {
        let m = 0.5 * (lo + hi);
        if side(m)? == s0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(Some(at(0.5 * (lo + hi))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GlobalStatus {
    Global,
    BlowUp { x: f64 },
    Undetermined,
}

/// Relative slack allowed in region tests on integrated trajectories.
pub const REGION_SLACK: f64 = 1e-2;

/// Integrates both ways to `x0 +/- x_verify`. Global when neither side escapes, both ends
/// decay below ten times the `6/x^2` tail, and every sample past the monotone tail of phi
/// (where phi >= 0) stays in R1 or R2.
pub fn verify_global(phi: &PhiModel, p: &PhasePoint, x_verify: f64, tol: Tolerance) -> Result<GlobalStatus, ZsetError> {
    let opts = IntegratorOpts::with_tol(tol);
    let fwd = integrate_to(p, p.x + x_verify, phi, &opts)?;
    let mirror = phi.reflected();
    let bwd = integrate_to(&p.mirrored(), -p.x + x_verify, &mirror, &opts)?;
    for (t, sign) in [(&fwd, 1.0), (&bwd, -1.0)] {
        match t.outcome {
            Outcome::BlowUp { x_blow } => return Ok(GlobalStatus::BlowUp { x: sign * x_blow }),
            Outcome::ToleranceFailure { .. } => return Ok(GlobalStatus::Undetermined),
            Outcome::Reached => {}
        }
    }
    let x_tail = phi.monotone_tail_x0().unwrap_or(f64::INFINITY);
    // Once phi is negligible H is conserved, and integrator drift of order atol would
    // otherwise push separatrix-hugging solutions just outside both regions.
    let phi_floor = 1e-10 * phi.sup_norm();
    for (t, m) in [(&fwd, phi), (&bwd, &mirror)] {
        let e = t.end();
        let tail = 6.0 / (e.x * e.x).max(1.0);
        if e.f.abs() > 10.0 * tail {
            return Ok(GlobalStatus::Undetermined);
        }
        for s in &t.samples {
            if s.x < x_tail || s.x < 0.0 || m.eval(s.x) < phi_floor {
                continue;
            }
            if classify_region_slack(s, m, REGION_SLACK)? == RegionTag::Complement {
                return Ok(GlobalStatus::Undetermined);
            }
        }
    }
    Ok(GlobalStatus::Global)
}

/// Whether a curve point lies in R1 or R2 at its station (`x >= 0`), within [`REGION_SLACK`].
pub fn in_antifunnel_regions(phi: &PhiModel, p: &PhasePoint) -> Result<bool, ZsetError> {
    Ok(classify_region_slack(p, phi, REGION_SLACK)? != RegionTag::Complement)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phi_curve_is_the_separatrix() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let z = build_zcurve(&phi, 1.0, (-3.0, 0.5), 40, Side::Forward, &ShootOpts::default()).unwrap();
        assert!(z.points.len() >= 40);
        for p in &z.points {
            let y = 1.0 - p.seed_d;
            assert!((p.f - 6.0 / (y * y)).abs() < 1e-8 * p.f, "{p:?}");
            assert!((p.fp + 12.0 / (y * y * y)).abs() < 1e-8 * p.fp.abs());
        }
        assert!(z.points.windows(2).all(|w| w[1].seed_d > w[0].seed_d));
    }

    #[test]
    fn zero_phi_has_no_intersections() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let o = ShootOpts::default();
        let zf = build_zcurve(&phi, 0.0, (-50.0, 0.5), 60, Side::Forward, &o).unwrap();
        let zb = build_zcurve(&phi, 0.0, (-50.0, 0.5), 60, Side::Backward, &o).unwrap();
        assert!(intersect(&zf, &zb).unwrap().is_empty());
    }

    #[test]
    fn invalid_ranges() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let o = ShootOpts::default();
        assert!(matches!(build_zcurve(&phi, 0.0, (1.0, -1.0), 10, Side::Forward, &o), Err(ZsetError::InvalidRange(_))));
        assert!(matches!(build_zcurve(&phi, 0.0, (-1.0, 3.0), 10, Side::Forward, &o), Err(ZsetError::InvalidRange(_))));
    }

    #[test]
    fn seeds_beyond_the_station_blow_up() {
        // Every pole lies to the right of the station, so every shot meets it.
        let phi = PhiModel::gaussian(0.0).unwrap();
        let r = build_zcurve(&phi, 0.0, (0.2, 1.9), 10, Side::Forward, &ShootOpts::default());
        assert!(matches!(r, Err(ZsetError::EmptyCurve)));
    }

    #[test]
    fn bisection_finds_separatrix_point() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        // Ray f = 1.5 across f' in [-3, 0]; the curve is at f' = -sqrt(2/3) 1.5^{3/2} = -1.5.
        let p = refine_z_bisection(&phi, PhasePoint::new(1.5, -3.0, 0.0), (0.0, 3.0), 40.0, Tolerance::new(1e-11, 1e-14))
            .unwrap()
            .unwrap();
        assert!((p.fp + 1.5).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn mirrored_curve_matches_direct_shooting() {
        let phi = PhiModel::gaussian(0.05).unwrap();
        let o = ShootOpts::default();
        let zf = build_zcurve(&phi, 0.0, (-20.0, 1.0), 12, Side::Forward, &o).unwrap();
        let zb = build_zcurve(&phi, 0.0, (-20.0, 1.0), 12, Side::Backward, &o).unwrap();
        let m = zf.mirrored(&phi).unwrap();
        assert_eq!(m.side, Side::Backward);
        assert_eq!(m.points.len(), zb.points.len());
        for (p, q) in m.points.iter().zip(&zb.points) {
            assert_eq!((p.f, p.fp), (q.f, q.fp));
        }
        assert!(zf.mirrored(&PhiModel::tabulated(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]).unwrap()).is_none());
    }

    #[test]
    fn verify_global_zero_solution_and_blowup() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let g = verify_global(&phi, &PhasePoint::new(0.0, 0.0, 0.0), 40.0, Tolerance::default()).unwrap();
        assert_eq!(g, GlobalStatus::Global);
        let b = verify_global(&phi, &PhasePoint::new(1.0, 1.0, 0.0), 40.0, Tolerance::default()).unwrap();
        assert!(matches!(b, GlobalStatus::BlowUp { .. }));
    }
}
