//! Closed-form existence and uniqueness criteria: M-shape classification, the integral and
//! window necessary conditions, the decay-rate sufficient condition, and their combination
//! into a verdict.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::{golden_max, PhiKind, PhiModel};
use crate::quad::{integrate, integrate_line, QuadError, QuadTol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("phi is not integrable over the real line (constant model)")]
    NotIntegrable,
    #[error("invalid decay parameters: {0}")]
    InvalidParams(String),
    #[error("invalid window [{a}, {b}]")]
    InvalidWindow { a: f64, b: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// sqrt(8/3), the speed constant of the funnel estimates.
const SPEED: f64 = 1.632_993_161_855_452_1;
/// 4 sqrt(2) / sqrt(3), the decay-rate constant.
const DECAY_C: f64 = 3.265_986_323_710_904;

pub const DEFAULT_D: f64 = 1.01;
pub const DEFAULT_K: f64 = 0.5;
/// Grid for the window scan: `WINDOW_N` points per axis on `[-WINDOW_REACH, WINDOW_REACH]`.
pub const WINDOW_N: usize = 50;
pub const WINDOW_REACH: f64 = 10.0;
const GRID_POINTS: usize = 10_000;
const GRID_SPAN: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MShape {
    pub m_shaped: bool,
    pub x0: f64,
    /// Monotone only in the non-strict sense (constant phi).
    pub degenerate: bool,
    /// phi > 0 on the whole line.
    pub positive: bool,
}

/// Smallest `x0` beyond which phi is positive on both tails, for the families where this
/// is known in closed form. Tabulated phi vanishes outside its table, so it never qualifies.
fn positivity_x0(phi: &PhiModel) -> Option<f64> {
    let c = phi.param();
    match phi.kind() {
        PhiKind::Constant | PhiKind::Gaussian => (c > 0.0).then_some(0.0),
        PhiKind::HermiteGaussian => Some(c.max(0.0).sqrt()),
        PhiKind::Tabulated => None,
    }
}

fn is_positive(phi: &PhiModel) -> bool {
    let c = phi.param();
    match phi.kind() {
        PhiKind::Constant | PhiKind::Gaussian => c > 0.0,
        PhiKind::HermiteGaussian => c < 0.0,
        PhiKind::Tabulated => false,
    }
}

pub fn is_m_shaped(phi: &PhiModel) -> MShape {
    let degenerate = phi.kind() == PhiKind::Constant;
    let positive = is_positive(phi);
    match (positivity_x0(phi), phi.monotone_tail_x0()) {
        (Some(p), Some(m)) => MShape { m_shaped: true, x0: p.max(m), degenerate, positive },
        _ => MShape { m_shaped: false, x0: f64::NAN, degenerate, positive },
    }
}

/// `(integral > 0, integral)` over the real line.
pub fn integral_necessary(phi: &PhiModel) -> Result<(bool, f64), CheckError> {
    if !phi.decays() {
        return Err(CheckError::NotIntegrable);
    }
    let tol = QuadTol { abs: 1e-10, rel: 1e-10, ..QuadTol::default() };
    let value = match phi.table() {
        Some(t) => {
            let rows = t.rows();
            let mut s = 0.0;
            for w in rows.windows(2) {
                s += integrate(|x| phi.eval(x), w[0][0], w[1][0], tol)?;
            }
            s
        }
        None if phi.kind() == PhiKind::Constant => 0.0,
        None => integrate_line(|x| phi.eval(x), 0.0, 1.0, tol)?,
    };
    Ok((value > 0.0, value))
}

/// Sup of `|phi|` on `[a, b]`, sampled and polished by golden section.
fn sup_abs(phi: &PhiModel, a: f64, b: f64) -> f64 {
    if b <= a {
        return phi.eval(a).abs();
    }
    let n = 400;
    let h = (b - a) / n as f64;
    let g = |x: f64| phi.eval(x).abs();
    let (mut best, mut at) = (f64::NEG_INFINITY, 0);
    for i in 0..=n {
        let v = g(a + h * i as f64);
        if v > best {
            best = v;
            at = i;
        }
    }
    let lo = (a + h * at as f64 - h).max(a);
    let hi = (a + h * at as f64 + h).min(b);
    best.max(golden_max(g, lo, hi, 1e-10).1)
}

/// Far edge used for half-line sups: beyond it phi is constant or negligible.
fn far_reach(phi: &PhiModel) -> f64 {
    let (lo, hi) = phi.support_hint();
    lo.abs().max(hi.abs()) + 20.0
}

/// `(no bounded solutions, lhs, rhs)` for the window `[a, b]`.
pub fn window_necessary(phi: &PhiModel, a: f64, b: f64) -> Result<(bool, f64, f64), CheckError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(CheckError::InvalidWindow { a, b });
    }
    let tol = QuadTol { abs: 1e-12, rel: 1e-10, ..QuadTol::default() };
    let lhs = -integrate(|x| phi.eval(x), a, b, tol)?;
    let reach = far_reach(phi);
    let left = sup_abs(phi, -reach.max(-a), a);
    let right = sup_abs(phi, b, reach.max(b));
    let rhs = SPEED * (left.powf(0.75) + right.powf(0.75));
    Ok((lhs > rhs, lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowScan {
    pub a: f64,
    pub b: f64,
    /// `lhs - rhs`; positive means no bounded solutions.
    pub margin: f64,
}

/// Strongest window over the `WINDOW_N x WINDOW_N` grid. Integrals and sups are assembled
/// from per-cell pieces so each window costs O(1).
pub fn scan_windows(phi: &PhiModel) -> Result<WindowScan, CheckError> {
    let n = WINDOW_N;
    let nodes: Vec<f64> = (0..n).map(|i| -WINDOW_REACH + 2.0 * WINDOW_REACH * i as f64 / (n - 1) as f64).collect();
    let tol = QuadTol { abs: 1e-12, rel: 1e-10, ..QuadTol::default() };
    let mut cum = vec![0.0; n];
    let mut cell_sup = vec![0.0; n - 1];
    for i in 0..n - 1 {
        cum[i + 1] = cum[i] + integrate(|x| phi.eval(x), nodes[i], nodes[i + 1], tol)?;
        cell_sup[i] = sup_abs(phi, nodes[i], nodes[i + 1]);
    }
    let reach = far_reach(phi).max(WINDOW_REACH);
    // prefix[i] = sup over (-inf, nodes[i]], suffix[i] = sup over [nodes[i], inf).
    let mut prefix = vec![sup_abs(phi, -reach, nodes[0]); n];
    for i in 1..n {
        prefix[i] = prefix[i - 1].max(cell_sup[i - 1]);
    }
    let mut suffix = vec![sup_abs(phi, nodes[n - 1], reach); n];
    for i in (0..n - 1).rev() {
        suffix[i] = suffix[i + 1].max(cell_sup[i]);
    }
    let mut best = WindowScan { a: nodes[0], b: nodes[1], margin: f64::NEG_INFINITY };
    for i in 0..n {
        for j in i + 1..n {
            let lhs = -(cum[j] - cum[i]);
            let rhs = SPEED * (prefix[i].powf(0.75) + suffix[j].powf(0.75));
            if lhs - rhs > best.margin {
                best = WindowScan { a: nodes[i], b: nodes[j], margin: lhs - rhs };
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCheckParams {
    pub d: f64,
    pub k: f64,
    pub x0: f64,
}

impl DecayCheckParams {
    pub fn new(d: f64, k: f64, x0: f64) -> Result<Self, CheckError> {
        let p = Self { d, k, x0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CheckError> {
        if !(self.d > 1.0 && self.d.is_finite()) {
            return Err(CheckError::InvalidParams(format!("need D > 1, got {}", self.d)));
        }
        if !(self.k > 0.0 && self.k < 1.0) {
            return Err(CheckError::InvalidParams(format!("need 0 < k < 1, got {}", self.k)));
        }
        if !(self.x0 >= 0.0 && self.x0.is_finite()) {
            return Err(CheckError::InvalidParams(format!("need x0 >= 0, got {}", self.x0)));
        }
        Ok(())
    }

    /// Tail threshold on `-phi'/phi^{5/4}`.
    fn threshold(&self) -> f64 {
        self.d * DECAY_C / self.k
    }
}

/// `-phi'(x) / phi(x)^{5/4}`, in closed form for the analytic families so far tails do not
/// underflow. Non-positive phi gives `-inf`.
fn decay_ratio(phi: &PhiModel, x: f64) -> f64 {
    let c = phi.param();
    match phi.kind() {
        PhiKind::Constant => {
            if c > 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        PhiKind::Gaussian => {
            if c > 0.0 {
                x * (x * x / 8.0).exp() / c.powf(0.25)
            } else {
                f64::NEG_INFINITY
            }
        }
        PhiKind::HermiteGaussian => {
            let q = x * x - c;
            if q > 0.0 {
                x * (x * x - 2.0 - c) * (x * x / 8.0).exp() / q.powf(1.25)
            } else {
                f64::NEG_INFINITY
            }
        }
        PhiKind::Tabulated => {
            let (v, dv) = phi.eval_with_deriv(x);
            if v > 0.0 {
                -dv / v.powf(1.25)
            } else {
                f64::NEG_INFINITY
            }
        }
    }
}

/// Whether the ratio grows without bound past the dense grid, so the grid check settles
/// the whole tail.
fn tail_ratio_increasing(phi: &PhiModel) -> bool {
    matches!(phi.kind(), PhiKind::Gaussian | PhiKind::HermiteGaussian)
}

/// The decay-rate sufficient condition on `[0, inf)` for the given model (use
/// [`PhiModel::reflected`] for the left side).
pub fn decay_sufficient(phi: &PhiModel, params: &DecayCheckParams) -> Result<bool, CheckError> {
    params.validate()?;
    Ok(tail_condition(phi, params) && near_condition(phi, params))
}

fn tail_condition(phi: &PhiModel, params: &DecayCheckParams) -> bool {
    let thr = params.threshold();
    let h = GRID_SPAN / GRID_POINTS as f64;
    for i in 1..=GRID_POINTS {
        let x = params.x0 + h * i as f64;
        if !(decay_ratio(phi, x) > thr) {
            return false;
        }
    }
    tail_ratio_increasing(phi)
}

fn near_condition(phi: &PhiModel, params: &DecayCheckParams) -> bool {
    let x0 = params.x0;
    if x0 == 0.0 {
        return phi.eval(0.0) > 0.0;
    }
    let p = golden_max(|x| phi.eval(x), 0.0, x0, 1e-12).1.max(phi.eval(0.0)).max(phi.eval(x0));
    let n = GRID_POINTS;
    let mut sample_max: f64 = 0.0;
    for i in 0..=n {
        sample_max = sample_max.max(phi.eval(x0 * i as f64 / n as f64));
    }
    let p = p.max(sample_max);
    if !(p > 0.0) {
        return false;
    }
    let denom = SPEED * p.powf(0.75);
    let anchor = params.k * phi.eval(x0).max(0.0).sqrt();
    (0..n).all(|i| {
        let x = x0 * i as f64 / n as f64;
        let v = phi.eval(x);
        v > 0.0 && x0 - x < (v.sqrt() - anchor) / denom
    })
}

/// Smallest `x0` (to 1e-10) beyond which the tail condition with this `d`, `k` holds.
pub fn minimal_tail_x0(phi: &PhiModel, d: f64, k: f64) -> Result<Option<f64>, CheckError> {
    let probe = DecayCheckParams::new(d, k, 0.0)?;
    if tail_condition(phi, &probe) {
        return Ok(Some(0.0));
    }
    let thr = probe.threshold();
    let h = GRID_SPAN / GRID_POINTS as f64;
    let Some(last_bad) = (1..=GRID_POINTS).rev().find(|&i| !(decay_ratio(phi, h * i as f64) > thr)) else {
        return Ok(Some(0.0));
    };
    if last_bad == GRID_POINTS || !tail_ratio_increasing(phi) {
        return Ok(None);
    }
    let (mut a, mut b) = (h * last_bad as f64, h * (last_bad + 1) as f64);
    while b - a > 1e-10 {
        let m = 0.5 * (a + b);
        if decay_ratio(phi, m) > thr {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(Some(b))
}

/// Parameters from the worked Gaussian example, when they are valid: `x0 = 4/3` and
/// `k = sqrt(6) c^{1/4}`; otherwise `k = 0.5` with the minimal tail `x0`.
pub fn default_decay_params(phi: &PhiModel) -> Result<Option<DecayCheckParams>, CheckError> {
    if phi.kind() == PhiKind::Gaussian && phi.param() > 0.0 {
        let k = 6f64.sqrt() * phi.param().powf(0.25);
        if k < 1.0 {
            return Ok(Some(DecayCheckParams::new(DEFAULT_D, k, 4.0 / 3.0)?));
        }
    }
    Ok(minimal_tail_x0(phi, DEFAULT_D, DEFAULT_K)?.map(|x0| DecayCheckParams { d: DEFAULT_D, k: DEFAULT_K, x0 }))
}

/// First passing parameter set: the defaults, then `k` on a grid with minimal `x0`.
pub fn find_decay_params(phi: &PhiModel) -> Result<Option<DecayCheckParams>, CheckError> {
    if let Some(p) = default_decay_params(phi)? {
        if decay_sufficient(phi, &p)? {
            return Ok(Some(p));
        }
    }
    for i in 1..20 {
        let k = i as f64 / 20.0;
        if let Some(x0) = minimal_tail_x0(phi, DEFAULT_D, k)? {
            let p = DecayCheckParams { d: DEFAULT_D, k, x0 };
            if decay_sufficient(phi, &p)? {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// Largest `D` (to relative 1e-9) for which the condition still holds with this `k`, `x0`.
pub fn max_passing_d(phi: &PhiModel, k: f64, x0: f64) -> Result<Option<f64>, CheckError> {
    let pass = |d: f64| decay_sufficient(phi, &DecayCheckParams { d, k, x0 });
    let lo0 = 1.0 + 1e-12;
    if !pass(lo0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (lo0, 2.0);
    while pass(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Ok(Some(hi));
        }
    }
    while hi - lo > 1e-9 * hi {
        let m = 0.5 * (lo + hi);
        if pass(m)? {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(Some(lo))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    NoSolutions,
    ExistsAtLeastOne,
    UniquePositive,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub criterion: String,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

fn witness(criterion: impl Into<String>, margin: f64) -> Witness {
    Witness { criterion: criterion.into(), margin }
}

/// Passing decay parameters for one side, with the margin `D_max - 1`.
fn side_decay(phi: &PhiModel) -> Result<Option<(DecayCheckParams, f64)>, CheckError> {
    let Some(p) = find_decay_params(phi)? else { return Ok(None) };
    let d_max = max_passing_d(phi, p.k, p.x0)?.unwrap_or(p.d);
    Ok(Some((p, d_max - 1.0)))
}

pub fn verdict(phi: &PhiModel) -> Result<Verdict, CheckError> {
    let mut notes = Vec::new();
    if !phi.decays() {
        notes.push("phi does not decay: the integral and window tests do not apply".to_string());
        return Ok(Verdict { kind: VerdictKind::Inconclusive, witnesses: vec![], notes });
    }
    let (_, integral) = integral_necessary(phi)?;
    let has_negative_part = !is_positive(phi) && phi.sup_norm() > 0.0 && {
        let (lo, hi) = phi.support_hint();
        let n = 4000;
        (0..=n).any(|i| phi.eval(lo + (hi - lo) * i as f64 / n as f64) < 0.0)
    };
    if has_negative_part && integral < 0.0 {
        return Ok(Verdict { kind: VerdictKind::NoSolutions, witnesses: vec![witness("integral", -integral)], notes });
    }
    let scan = scan_windows(phi)?;
    if scan.margin > 0.0 {
        let w = witness(format!("window[{},{}]", scan.a, scan.b), scan.margin);
        return Ok(Verdict { kind: VerdictKind::NoSolutions, witnesses: vec![w], notes });
    }
    let shape = is_m_shaped(phi);
    if !(shape.m_shaped && shape.positive) {
        if integral <= 0.0 && !has_negative_part {
            notes.push("phi vanishes identically: only the zero solution".to_string());
        }
        notes.push("phi is not a positive M-shaped function".to_string());
        return Ok(Verdict { kind: VerdictKind::Inconclusive, witnesses: vec![], notes });
    }
    if !phi.is_even() {
        notes.push("left-side decay constants are the mirrored form of the right-side ones".to_string());
    }
    let reach = shape.x0.max(1.0);
    let floor = (0..=200).map(|i| phi.eval(-reach + 2.0 * reach * i as f64 / 200.0)).fold(f64::INFINITY, f64::min);
    let mut witnesses = vec![witness("positive_m_shaped", floor)];
    let right = side_decay(phi)?;
    let left = if phi.is_even() { right } else { side_decay(&phi.reflected())? };
    match (right, left) {
        (Some((pr, mr)), Some((pl, ml))) => {
            witnesses.push(witness(format!("decay_right(k={},x0={})", pr.k, pr.x0), mr));
            witnesses.push(witness(format!("decay_left(k={},x0={})", pl.k, pl.x0), ml));
            Ok(Verdict { kind: VerdictKind::UniquePositive, witnesses, notes })
        }
        _ => {
            notes.push("no (k, x0, D) satisfies the decay-rate condition on both sides".to_string());
            Ok(Verdict { kind: VerdictKind::ExistsAtLeastOne, witnesses, notes })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn m_shapes() {
        let g = is_m_shaped(&PhiModel::gaussian(0.3).unwrap());
        assert!(g.m_shaped && g.positive && g.x0 == 0.0);
        let h = is_m_shaped(&PhiModel::hermite_gaussian(0.5).unwrap());
        assert!(h.m_shaped && !h.positive);
        assert!((h.x0 - 2.5f64.sqrt()).abs() < 1e-9);
        let c = is_m_shaped(&PhiModel::constant(2.0).unwrap());
        assert!(c.m_shaped && c.degenerate && c.x0 == 0.0);
        assert!(!is_m_shaped(&PhiModel::gaussian(-1.0).unwrap()).m_shaped);
    }

    #[test]
    fn integrals() {
        let root = (2.0 * PI).sqrt();
        for c in [-0.5, 0.0, 0.5, 2.0] {
            let (_, v) = integral_necessary(&PhiModel::hermite_gaussian(c).unwrap()).unwrap();
            assert!((v - root * (1.0 - c)).abs() < 1e-9, "c = {c}: {v}");
        }
        let (ok, v) = integral_necessary(&PhiModel::hermite_gaussian(1.0).unwrap()).unwrap();
        assert!(!ok || v.abs() < 1e-12);
        let (ok, v) = integral_necessary(&PhiModel::gaussian(2.0).unwrap()).unwrap();
        assert!(ok && (v - 2.0 * root).abs() < 1e-9);
        let zero = PhiModel::tabulated(&[[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(integral_necessary(&zero).unwrap(), (false, 0.0));
        assert_eq!(integral_necessary(&PhiModel::constant(1.0).unwrap()), Err(CheckError::NotIntegrable));
    }

    #[test]
    fn windows() {
        let (no, lhs, rhs) = window_necessary(&PhiModel::gaussian(1.0).unwrap(), -1.0, 1.0).unwrap();
        assert!(!no && lhs < 0.0 && rhs > 0.0);
        let (no, lhs, rhs) = window_necessary(&PhiModel::hermite_gaussian(3.0).unwrap(), -1.0, 1.0).unwrap();
        // Oracle: -int (x^2 - 3) e^{-x^2/2} on [-1, 1], sup|phi| on the tails at x = -1, 1.
        let erf_part = 1.711_248_783_784_297_6;
        let want_lhs = 3.0 * erf_part - (erf_part - 2.0 * (-0.5f64).exp());
        let want_rhs = SPEED * 2.0 * (2.0 * (-0.5f64).exp()).powf(0.75);
        assert!(no);
        assert!((lhs - want_lhs).abs() < 1e-9, "{lhs} vs {want_lhs}");
        assert!((rhs - want_rhs).abs() < 1e-8, "{rhs} vs {want_rhs}");
        assert!(window_necessary(&PhiModel::gaussian(1.0).unwrap(), 1.0, 1.0).is_err());
    }

    #[test]
    fn wide_window_matches_integral_sign() {
        for c in [0.5, 1.5, 3.0] {
            let phi = PhiModel::hermite_gaussian(c).unwrap();
            let (_, lhs, rhs) = window_necessary(&phi, -30.0, 30.0).unwrap();
            let (_, v) = integral_necessary(&phi).unwrap();
            assert!(rhs < 1e-50);
            assert!((lhs + v).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_tail_x0_matches_closed_form() {
        // x e^{x^2/8} = D C c^{1/4} / k has no elementary root; compare against bisection on it.
        let c: f64 = 0.05;
        let phi = PhiModel::gaussian(c).unwrap();
        let (d, k) = (1.01, 0.9);
        let x0 = minimal_tail_x0(&phi, d, k).unwrap().unwrap();
        let target = d * DECAY_C * c.powf(0.25) / k;
        assert!((x0 * (x0 * x0 / 8.0).exp() - target).abs() < 1e-8);
        // The example's simpler bound x0 = C c^{1/4} / k is sufficient.
        assert!(x0 <= d * DECAY_C * c.powf(0.25) / k);
    }

    #[test]
    fn example_rule_for_small_c() {
        let c: f64 = 1e-4;
        let phi = PhiModel::gaussian(c).unwrap();
        let p = default_decay_params(&phi).unwrap().unwrap();
        assert_eq!(p.x0, 4.0 / 3.0);
        assert!((p.k - 6f64.sqrt() * c.powf(0.25)).abs() < 1e-15);
        assert!(decay_sufficient(&phi, &p).unwrap());
        assert_eq!(verdict(&phi).unwrap().kind, VerdictKind::UniquePositive);
    }

    #[test]
    fn constant_never_decays_fast_enough() {
        let phi = PhiModel::constant(4.0).unwrap();
        let p = DecayCheckParams::new(1.01, 0.5, 0.0).unwrap();
        assert!(!decay_sufficient(&phi, &p).unwrap());
        let v = verdict(&phi).unwrap();
        assert_eq!(v.kind, VerdictKind::Inconclusive);
        assert!(!v.notes.is_empty());
    }

    #[test]
    fn verdicts() {
        assert_eq!(verdict(&PhiModel::gaussian(-1.0).unwrap()).unwrap().kind, VerdictKind::NoSolutions);
        assert_eq!(verdict(&PhiModel::hermite_gaussian(2.0).unwrap()).unwrap().kind, VerdictKind::NoSolutions);
        assert_eq!(verdict(&PhiModel::hermite_gaussian(0.5).unwrap()).unwrap().kind, VerdictKind::Inconclusive);
        assert_eq!(verdict(&PhiModel::hermite_gaussian(-0.5).unwrap()).unwrap().kind, VerdictKind::ExistsAtLeastOne);
        for v in [verdict(&PhiModel::gaussian(-1.0).unwrap()).unwrap(), verdict(&PhiModel::gaussian(1e-4).unwrap()).unwrap()] {
            assert!(v.witnesses.iter().any(|w| w.margin > 0.0));
        }
    }

    #[test]
    fn max_d_is_monotone_boundary() {
        let phi = PhiModel::gaussian(1e-4).unwrap();
        let (k, x0) = (6f64.sqrt() * 0.1, 4.0 / 3.0);
        let d = max_passing_d(&phi, k, x0).unwrap().unwrap();
        assert!(decay_sufficient(&phi, &DecayCheckParams { d, k, x0 }).unwrap());
        assert!(!decay_sufficient(&phi, &DecayCheckParams { d: d * 1.001, k, x0 }).unwrap());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(DecayCheckParams::new(1.0, 0.5, 0.0).is_err());
        assert!(DecayCheckParams::new(2.0, 1.0, 0.0).is_err());
        assert!(DecayCheckParams::new(2.0, 0.5, -1.0).is_err());
    }
}
