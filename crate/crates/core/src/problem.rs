//! The forcing term phi, the phase-plane vector field of `f'' = f^2 - phi(x)`,
//! the conserved-energy function for constant phi and the region tags used
//! by the funnel and antifunnel arguments.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("phi = {phi} < 0 at x = {x}; the energy function needs phi >= 0")]
    NegativePhi { x: f64, phi: f64 },
    #[error("region tags are defined for x >= 0, got x = {0}")]
    NegativeX(f64),
}

/// A point `(f, f', x)` of the extended phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub f: f64,
    pub fp: f64,
    pub x: f64,
}

impl PhasePoint {
    pub fn new(f: f64, fp: f64, x: f64) -> Self {
        Self { f, fp, x }
    }

    /// Image under `x -> -x`, which maps solutions for `phi(x)` to solutions for `phi(-x)`.
    pub fn mirrored(&self) -> Self {
        Self { f: self.f, fp: -self.fp, x: -self.x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiKind {
    Constant,
    Gaussian,
    HermiteGaussian,
    Tabulated,
}

/// Rows `(x, phi, phi')` with strictly increasing `x`; cubic Hermite in between, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    x: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
}

impl Table {
    pub fn new(rows: &[[f64; 3]]) -> Result<Self, ProblemError> {
        if rows.len() < 2 {
            return Err(ProblemError::InvalidTable("need at least two rows".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ProblemError::InvalidTable("non-finite entry".into()));
        }
        if rows.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(ProblemError::InvalidTable("x must be strictly increasing".into()));
        }
        Ok(Self {
            x: rows.iter().map(|r| r[0]).collect(),
            phi: rows.iter().map(|r| r[1]).collect(),
            dphi: rows.iter().map(|r| r[2]).collect(),
        })
    }

    pub fn rows(&self) -> Vec<[f64; 3]> {
        (0..self.x.len()).map(|i| [self.x[i], self.phi[i], self.dphi[i]]).collect()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let (a, b) = self.range();
        if x < a || x > b {
            return None;
        }
        let i = self.x.partition_point(|&t| t <= x);
        Some(i.clamp(1, self.x.len() - 1) - 1)
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let Some(i) = self.locate(x) else { return (0.0, 0.0) };
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (p0, p1) = (self.phi[i], self.phi[i + 1]);
        let (m0, m1) = (self.dphi[i] * h, self.dphi[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        let dv = (6.0 * t2 - 6.0 * t) * p0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * p1
            + (3.0 * t2 - 2.0 * t) * m1;
        (v, dv / h)
    }

    fn reflected(&self) -> Self {
        let n = self.x.len();
        Self {
            x: (0..n).map(|i| -self.x[n - 1 - i]).collect(),
            phi: (0..n).map(|i| self.phi[n - 1 - i]).collect(),
            dphi: (0..n).map(|i| -self.dphi[n - 1 - i]).collect(),
        }
    }
}

/// Serialized form of a [`PhiModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    pub kind: PhiKind,
    #[serde(default)]
    pub param: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 3]>>,
}

/// The forcing term together with the metadata the checks need.
///
/// `Constant(P)`: phi = P. `Gaussian(c)`: c e^{-x^2/2}.
/// `HermiteGaussian(c)`: (x^2 - c) e^{-x^2/2}. `Tabulated`: interpolated rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhiSpec", into = "PhiSpec")]
pub struct PhiModel {
    kind: PhiKind,
    param: f64,
    table: Option<Table>,
    sup_norm: f64,
    monotone_tail_x0: Option<f64>,
}

impl TryFrom<PhiSpec> for PhiModel {
    type Error = ProblemError;
    fn try_from(s: PhiSpec) -> Result<Self, ProblemError> {
        match s.kind {
            PhiKind::Tabulated => {
                let rows = s
                    .table
                    .ok_or_else(|| ProblemError::InvalidTable("tabulated phi needs a table".into()))?;
                Ok(Self::tabulated(&rows)?)
            }
            kind => {
                if s.table.is_some() {
                    return Err(ProblemError::InvalidParam("table given for an analytic phi".into()));
                }
                Self::analytic(kind, s.param)
            }
        }
    }
}

impl From<PhiModel> for PhiSpec {
    fn from(m: PhiModel) -> Self {
        PhiSpec { kind: m.kind, param: m.param, table: m.table.map(|t| t.rows()) }
    }
}

const SUP_SAMPLES: usize = 1 << 14;
const SUP_HALF_WIDTH: f64 = 20.0;

impl PhiModel {
    pub fn constant(p: f64) -> Result<Self, ProblemError> {
        Self::analytic(PhiKind::Constant, p)
    }

    pub fn gaussian(c: f64) -> Result<Self, ProblemError> {
        Self::analytic(PhiKind::Gaussian, c)
    }

    pub fn hermite_gaussian(c: f64) -> Result<Self, ProblemError> {
        Self::analytic(PhiKind::HermiteGaussian, c)
    }

    pub fn tabulated(rows: &[[f64; 3]]) -> Result<Self, ProblemError> {
        let table = Table::new(rows)?;
        Ok(Self::finish(PhiKind::Tabulated, 0.0, Some(table)))
    }

    fn analytic(kind: PhiKind, param: f64) -> Result<Self, ProblemError> {
        if !param.is_finite() {
            return Err(ProblemError::InvalidParam(format!("param must be finite, got {param}")));
        }
        if kind == PhiKind::Tabulated {
            return Err(ProblemError::InvalidTable("tabulated phi needs a table".into()));
        }
        Ok(Self::finish(kind, param, None))
    }

    fn finish(kind: PhiKind, param: f64, table: Option<Table>) -> Self {
        let mut m = Self { kind, param, table, sup_norm: 0.0, monotone_tail_x0: None };
        m.sup_norm = m.compute_sup_norm();
        m.monotone_tail_x0 = m.compute_monotone_tail_x0();
        m
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    pub fn table(&self) -> Option<&Table> {
        self.table.as_ref()
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn monotone_tail_x0(&self) -> Option<f64> {
        self.monotone_tail_x0
    }

    pub fn spec(&self) -> PhiSpec {
        self.clone().into()
    }

    /// phi(x) and phi'(x) together.
    pub fn eval_with_deriv(&self, x: f64) -> (f64, f64) {
        let c = self.param;
        match self.kind {
            PhiKind::Constant => (c, 0.0),
            PhiKind::Gaussian => {
                let g = (-0.5 * x * x).exp();
                (c * g, -c * x * g)
            }
            PhiKind::HermiteGaussian => {
                let g = (-0.5 * x * x).exp();
                ((x * x - c) * g, x * (2.0 + c - x * x) * g)
            }
            PhiKind::Tabulated => self.table.as_ref().expect("tabulated phi has a table").eval(x),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            PhiKind::Constant => self.param,
            PhiKind::Gaussian => self.param * (-0.5 * x * x).exp(),
            PhiKind::HermiteGaussian => (x * x - self.param) * (-0.5 * x * x).exp(),
            PhiKind::Tabulated => self.eval_with_deriv(x).0,
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.eval_with_deriv(x).1
    }

    /// True when phi(-x) = phi(x) exactly.
    pub fn is_even(&self) -> bool {
        match &self.table {
            None => true,
            Some(t) => t == &t.reflected(),
        }
    }

    /// False only for the constant model, which is not in C_0.
    pub fn decays(&self) -> bool {
        self.kind != PhiKind::Constant || self.param == 0.0
    }

    /// The model for phi(-x).
    pub fn reflected(&self) -> Self {
        match &self.table {
            None => self.clone(),
            Some(t) => Self::finish(PhiKind::Tabulated, 0.0, Some(t.reflected())),
        }
    }

    /// Interval outside of which phi is zero or negligible, used to bound scans.
    pub fn support_hint(&self) -> (f64, f64) {
        match &self.table {
            Some(t) => t.range(),
            None => (-SUP_HALF_WIDTH, SUP_HALF_WIDTH),
        }
    }

    /// Largest x at which |phi| still exceeds `frac` times the sup norm (0 if phi vanishes).
    pub fn tail_extent(&self, frac: f64) -> f64 {
        if self.sup_norm == 0.0 {
            return 0.0;
        }
        let thr = frac * self.sup_norm;
        let (lo, hi) = self.support_hint();
        let reach = lo.abs().max(hi.abs());
        let n = 4000;
        let mut last = 0.0;
        for i in 0..=n {
            let x = reach * i as f64 / n as f64;
            if self.eval(x).abs() > thr || self.eval(-x).abs() > thr {
                last = x;
            }
        }
        (last + reach / n as f64).min(reach)
    }

    fn compute_sup_norm(&self) -> f64 {
        let (mut lo, mut hi) = (-SUP_HALF_WIDTH, SUP_HALF_WIDTH);
        if let Some(t) = &self.table {
            let (a, b) = t.range();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        let n = SUP_SAMPLES;
        let h = (hi - lo) / (n - 1) as f64;
        let abs = |x: f64| self.eval(x).abs();
        let mut best_i = 0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            let v = abs(lo + h * i as f64);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let a = (lo + h * best_i as f64 - h).max(lo);
        let b = (lo + h * best_i as f64 + h).min(hi);
        let (_, v) = golden_max(abs, a, b, 1e-12);
        best.max(v)
    }

    fn compute_monotone_tail_x0(&self) -> Option<f64> {
        let tol = 1e-12 * self.sup_norm;
        let (lo, hi) = self.support_hint();
        let reach = lo.abs().max(hi.abs()) * 3.0;
        let right = |x: f64| self.deriv(x) > tol;
        let left = |x: f64| -self.deriv(-x) > tol;
        let a = last_violation(right, reach)?;
        let b = last_violation(left, reach)?;
        Some(a.max(b))
    }
}

/// Smallest grid-resolved x0 with `bad(x)` false on [x0, reach]; `None` if bad at `reach`.
fn last_violation(bad: impl Fn(f64) -> bool, reach: f64) -> Option<f64> {
    if bad(reach) {
        return None;
    }
    let n = 2400;
    let x_min = 1e-6;
    let q = (reach / x_min).powf(1.0 / n as f64);
    let mut grid = Vec::with_capacity(n + 2);
    grid.push(0.0);
    let mut x = x_min;
    for _ in 0..=n {
        grid.push(x.min(reach));
        x *= q;
    }
    let Some(i) = grid.iter().rposition(|&x| bad(x)) else { return Some(0.0) };
    let (mut a, mut b) = (grid[i], grid[i + 1]);
    while b - a > 1e-13 * b.max(1.0) {
        let m = 0.5 * (a + b);
        if bad(m) {
            a = m;
        } else {
            b = m;
        }
    }
    Some(b)
}

/// Golden-section search for a maximum of a unimodal function on [a, b].
pub fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while (b - a).abs() > xtol * (1.0 + a.abs().max(b.abs())) {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Right-hand side of the first-order system: `(f', f^2 - phi(x), 1)`.
pub fn vector_field(p: &PhasePoint, phi: &PhiModel) -> (f64, f64, f64) {
    (p.fp, p.f * p.f - phi.eval(p.x), 1.0)
}

/// `H = f^3/3 - f'^2/2 - f phi + (2/3) phi^{3/2}`; conserved when phi is constant.
pub fn hamiltonian(p: &PhasePoint, phi_val: f64) -> Result<f64, ProblemError> {
    if phi_val < 0.0 {
        return Err(ProblemError::NegativePhi { x: p.x, phi: phi_val });
    }
    Ok(p.f.powi(3) / 3.0 - 0.5 * p.fp * p.fp - p.f * phi_val + (2.0 / 3.0) * phi_val.powf(1.5))
}

/// The cubic part `f^3/3 - f'^2/2` of the energy, whose zero set is the phi = 0 separatrix.
pub fn cubic_part(p: &PhasePoint) -> f64 {
    p.f.powi(3) / 3.0 - 0.5 * p.fp * p.fp
}

/// Bounds of the funnel `{H >= 0, f <= sqrt(P)}` for constant phi = P:
/// `(-sqrt(3P), sqrt(P), sqrt(8/3) P^{3/4})`.
///
/// The lower value is the root of `f^3/3 - P f`, not of `H(f, 0)`. Since
/// `H(f, 0) = (f - sqrt(P))^2 (f + 2 sqrt(P)) / 3`, the funnel itself reaches down to
/// `f = -2 sqrt(P)`; [`funnel_extent`] gives the exact range.
pub fn funnel_bounds(p: f64) -> Result<(f64, f64, f64), ProblemError> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(ProblemError::InvalidParam(format!("funnel needs P > 0, got {p}")));
    }
    Ok((-(3.0 * p).sqrt(), p.sqrt(), (8.0f64 / 3.0).sqrt() * p.powf(0.75)))
}

/// Exact extent of the funnel: `(-2 sqrt(P), sqrt(P), sqrt(8/3) P^{3/4})`.
pub fn funnel_extent(p: f64) -> Result<(f64, f64, f64), ProblemError> {
    let (_, hi, sp) = funnel_bounds(p)?;
    Ok((-2.0 * p.sqrt(), hi, sp))
}

/// Largest |f'| inside the energy well and the largest |f''| on the slice phi = `phi_val`.
pub fn max_speeds(phi_val: f64) -> Result<(f64, f64), ProblemError> {
    if phi_val < 0.0 {
        return Err(ProblemError::NegativePhi { x: f64::NAN, phi: phi_val });
    }
    Ok(((8.0f64 / 3.0).sqrt() * phi_val.powf(0.75), 3.0 * phi_val))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    R1,
    R2,
    Complement,
    FunnelM,
    OutsideM,
}

/// Classifies a point with `x >= 0` as R1, R2 or the complement; ties go to R1, then R2.
pub fn classify_region(p: &PhasePoint, phi: &PhiModel) -> Result<RegionTag, ProblemError> {
    classify_region_slack(p, phi, 0.0)
}

/// Like [`classify_region`], but each inequality may fail by `slack` times the natural
/// energy scale of the point. Used on numerically integrated trajectories.
pub fn classify_region_slack(p: &PhasePoint, phi: &PhiModel, slack: f64) -> Result<RegionTag, ProblemError> {
    if p.x < 0.0 {
        return Err(ProblemError::NegativeX(p.x));
    }
    let v = phi.eval(p.x);
    let h = hamiltonian(p, v)?;
    let s = cubic_part(p);
    let scale = p.f.abs().powi(3) / 3.0 + 0.5 * p.fp * p.fp + p.f.abs() * v + v.powf(1.5);
    let tol = slack * scale;
    if h >= -tol && p.f <= v.sqrt() + slack * (p.f.abs() + v.sqrt()) {
        return Ok(RegionTag::R1);
    }
    if h <= tol && s >= -tol && p.fp <= slack * p.fp.abs().max(p.f.abs().powf(1.5)) {
        return Ok(RegionTag::R2);
    }
    Ok(RegionTag::Complement)
}

/// Funnel membership for constant phi = P.
pub fn classify_funnel(p: &PhasePoint, pval: f64) -> Result<RegionTag, ProblemError> {
    let h = hamiltonian(p, pval)?;
    Ok(if h >= 0.0 && p.f <= pval.sqrt() { RegionTag::FunnelM } else { RegionTag::OutsideM })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn funnel_bounds_p1() {
        let (lo, hi, sp) = funnel_bounds(1.0).unwrap();
        assert!((lo + 1.732050808).abs() < 1e-9);
        assert_eq!(hi, 1.0);
        assert!((sp - 1.632993162).abs() < 1e-9);
    }

    #[test]
    fn funnel_extent_is_where_h_vanishes_on_the_axis() {
        for p in [0.5, 1.0, 9.0] {
            let (lo, hi, sp) = funnel_extent(p).unwrap();
            assert!(hamiltonian(&PhasePoint::new(lo, 0.0, 0.0), p).unwrap().abs() < 1e-12 * p.powf(1.5));
            assert!(hamiltonian(&PhasePoint::new(hi, 0.0, 0.0), p).unwrap().abs() < 1e-12 * p.powf(1.5));
            // |f'| peaks at the center f = -sqrt(P), where H = 0 on the boundary.
            assert!(hamiltonian(&PhasePoint::new(-p.sqrt(), sp, 0.0), p).unwrap().abs() < 1e-12 * p.powf(1.5));
        }
    }

    #[test]
    fn funnel_bounds_rejects_nonpositive() {
        assert!(matches!(funnel_bounds(0.0), Err(ProblemError::InvalidParam(_))));
        assert!(funnel_bounds(-1.0).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let h = hamiltonian(&PhasePoint::new(1.0, 0.0, 0.0), 1.0).unwrap();
        assert!(h.abs() < 1e-15);
        let h = hamiltonian(&PhasePoint::new(-2.0, 0.0, 0.0), 1.0).unwrap();
        assert!((h - 0.0).abs() < 1e-15);
        assert!(matches!(
            hamiltonian(&PhasePoint::new(0.0, 0.0, 0.0), -0.1),
            Err(ProblemError::NegativePhi { .. })
        ));
    }

    #[test]
    fn max_speeds_for_nine() {
        let (v, a) = max_speeds(9.0).unwrap();
        assert!((v - (8.0f64 / 3.0).sqrt() * 27f64.sqrt()).abs() < 1e-12);
        assert_eq!(a, 27.0);
    }

    #[test]
    fn region_examples() {
        let phi = PhiModel::constant(1.0).unwrap();
        let p = PhasePoint::new(0.5, 0.0, 0.0);
        assert_eq!(classify_region(&p, &phi).unwrap(), RegionTag::R1);
        let zero = PhiModel::gaussian(0.0).unwrap();
        let p = PhasePoint::new(6.0, -12.0, 1.0);
        assert_eq!(classify_region(&p, &zero).unwrap(), RegionTag::R2);
        let neg = PhiModel::hermite_gaussian(1.0).unwrap();
        assert!(classify_region(&PhasePoint::new(0.0, 0.0, 0.0), &neg).is_err());
        assert!(classify_region(&PhasePoint::new(0.0, 0.0, -1.0), &phi).is_err());
    }

    #[test]
    fn funnel_membership() {
        assert_eq!(classify_funnel(&PhasePoint::new(0.0, 0.0, 0.0), 1.0).unwrap(), RegionTag::FunnelM);
        assert_eq!(classify_funnel(&PhasePoint::new(2.0, 0.0, 0.0), 1.0).unwrap(), RegionTag::OutsideM);
    }

    #[test]
    fn vector_field_matches_equation() {
        let phi = PhiModel::gaussian(2.0).unwrap();
        let p = PhasePoint::new(1.5, -0.25, 0.0);
        assert_eq!(vector_field(&p, &phi), (-0.25, 0.25, 1.0));
    }

    #[test]
    fn sup_norms() {
        assert!((PhiModel::gaussian(0.05).unwrap().sup_norm() - 0.05).abs() < 1e-12);
        // (x^2 - c) e^{-x^2/2} peaks at x^2 = 2 + c when c > -2, unless |phi(0)| = |c| wins.
        let hg = PhiModel::hermite_gaussian(0.5).unwrap();
        let expected = 2.0 * (-1.25f64).exp();
        assert!((hg.sup_norm() - expected).abs() < 1e-10, "{}", hg.sup_norm());
        assert!((PhiModel::hermite_gaussian(2.0).unwrap().sup_norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_tails() {
        let hg = PhiModel::hermite_gaussian(0.5).unwrap();
        assert!((hg.monotone_tail_x0().unwrap() - 2.5f64.sqrt()).abs() < 1e-9);
        assert_eq!(PhiModel::gaussian(0.3).unwrap().monotone_tail_x0(), Some(0.0));
        assert_eq!(PhiModel::constant(2.0).unwrap().monotone_tail_x0(), Some(0.0));
    }

    #[test]
    fn table_interpolation_and_reflection() {
        let rows: Vec<[f64; 3]> = (-40..=40)
            .map(|i| {
                let x = i as f64 * 0.1;
                [x, (x + 1.0).powi(2), 2.0 * (x + 1.0)]
            })
            .collect();
        let t = PhiModel::tabulated(&rows).unwrap();
        // A quadratic is reproduced exactly by cubic Hermite interpolation.
        assert!((t.eval(0.333) - 1.333f64.powi(2)).abs() < 1e-12);
        assert_eq!(t.eval(5.0), 0.0);
        assert!(!t.is_even());
        let r = t.reflected();
        assert!((r.eval(-0.333) - t.eval(0.333)).abs() < 1e-12);
        assert!((r.deriv(-0.333) + t.deriv(0.333)).abs() < 1e-12);
    }

    #[test]
    fn bad_tables_rejected() {
        assert!(PhiModel::tabulated(&[[0.0, 1.0, 0.0]]).is_err());
        assert!(PhiModel::tabulated(&[[0.0, 1.0, 0.0], [0.0, 1.0, 0.0]]).is_err());
        assert!(PhiModel::tabulated(&[[0.0, f64::NAN, 0.0], [1.0, 1.0, 0.0]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = PhiModel::hermite_gaussian(0.25).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"kind":"hermite_gaussian","param":0.25}"#);
        let back: PhiModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = serde_json::from_str::<PhiModel>(r#"{"kind":"gaussian","param":1,"extra":2}"#);
        assert!(bad.is_err());
        let t = serde_json::from_str::<PhiModel>(r#"{"kind":"tabulated","table":[[0,1,0],[1,0,0]]}"#).unwrap();
        assert_eq!(t.kind(), PhiKind::Tabulated);
    }
}
