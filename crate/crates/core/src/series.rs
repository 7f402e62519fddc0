//! Convergent expansion `f = sum_k f_k` around the decaying end of a solution,
//! `f_0 = 6/(x-d)^2`, with the majorant sequence `A_k` that certifies convergence
//! and the boundary data it yields far out on the line.
//!
//! Each coefficient is stored through two auxiliary functions of `y = x - d`:
//! `J_k(y) = int_y^inf src_k(s)/s^3 ds` and `G_k = y^3 f_k`, where `src_1 = phi`
//! and `src_k = sum_{m=1}^{k-1} f_m f_{k-m}`. Then
//! `G_1 = K - int_y^inf t^6 J_1`, `G_k = int_y^inf t^6 J_k` for `k >= 2`,
//! and `f_k' = -3 G_k / y^4 +/- y^3 J_k` (plus for `k = 1`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::{golden_max, PhiKind, PhiModel};
use crate::quad::{integrate, integrate_to_infinity, QuadError, QuadTol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("convergence certificate fails: M = {m}, threshold = {threshold}, A1 = {a1}, 8R = {eight_r}")]
    NotCertified { m: f64, threshold: f64, a1: f64, eight_r: f64 },
    #[error("phi has no finite polynomial envelope with alpha = {alpha}")]
    NoFiniteEnvelope { alpha: f64 },
    #[error("x = {x} is outside the validity region |x - d| > R (d = {d}, R = {r})")]
    OutsideValidity { x: f64, d: f64, r: f64 },
    #[error("coefficient f_{k} did not converge: {source}")]
    DivergentCoefficient { k: usize, source: QuadError },
    #[error("invalid series parameters: {0}")]
    InvalidParams(String),
}

/// Parameters of one expansion: pole `d`, free constant `K`, envelope `(M, alpha)`,
/// validity radius `R` and the number of correction terms kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub d: f64,
    pub k: f64,
    pub m: f64,
    pub alpha: f64,
    pub r: f64,
    pub order: usize,
}

impl SeriesParams {
    pub fn validate(&self) -> Result<(), SeriesError> {
        let ok = self.d.is_finite()
            && self.k.is_finite()
            && self.m.is_finite()
            && self.m >= 0.0
            && self.alpha > 5.0
            && self.alpha.is_finite()
            && self.r > 0.0
            && self.r.is_finite()
            && self.order >= 1
            && self.order <= 60;
        if ok {
            Ok(())
        } else {
            Err(SeriesError::InvalidParams(format!("{self:?}")))
        }
    }

    /// `(2 + alpha)(alpha - 5) R^(alpha - 5)`.
    fn denom(&self) -> f64 {
        (2.0 + self.alpha) * (self.alpha - 5.0) * self.r.powf(self.alpha - 5.0)
    }

    /// `8(alpha + 2)(alpha - 5) R^(alpha - 4)`, the bound on `M`.
    pub fn m_threshold(&self) -> f64 {
        8.0 * self.r * self.denom()
    }

    pub fn a1(&self) -> f64 {
        self.k.abs() + self.m / self.denom()
    }
}

/// `A_0 = 6`, `A_1 = |K| + M / ((2+alpha)(alpha-5) R^(alpha-5))`,
/// `A_k = sum_{m=1}^{k-1} A_m A_{k-m} / (k^2 + 5k - 6)`; index `k` holds `A_k`.
pub fn bound_sequence(params: &SeriesParams, n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n + 1];
    a[0] = 6.0;
    if n == 0 {
        return a;
    }
    a[1] = params.a1();
    for k in 2..=n {
        let s: f64 = (1..k).map(|m| a[m] * a[k - m]).sum();
        let kf = k as f64;
        a[k] = s / (kf * kf + 5.0 * kf - 6.0);
    }
    a
}

/// `M < 8 (alpha + 2)(alpha - 5) R^(alpha - 4)`.
pub fn series_conv_cond(params: &SeriesParams) -> bool {
    params.m < params.m_threshold()
}

/// The envelope condition together with `A_1 <= 8R`.
pub fn certify_convergence(params: &SeriesParams) -> bool {
    if params.validate().is_err() {
        return false;
    }
    let denom = params.denom();
    let t = 8.0 * params.r * denom;
    // Compare `|K| denom + M` with `8 R denom` so that K = 0 reduces exactly to `M <= t`.
    series_conv_cond(params) && params.k.abs() * denom + params.m <= t
}

/// `sup |phi(x)| |x - d|^alpha` over `|x - d| > R`.
pub fn envelope_m(phi: &PhiModel, d: f64, alpha: f64, r: f64) -> Result<f64, SeriesError> {
    if !(alpha > 5.0 && r > 0.0 && d.is_finite()) {
        return Err(SeriesError::InvalidParams(format!("alpha = {alpha}, R = {r}, d = {d}")));
    }
    if phi.kind() == PhiKind::Constant {
        return if phi.param() == 0.0 { Ok(0.0) } else { Err(SeriesError::NoFiniteEnvelope { alpha }) };
    }
    let (lo, hi) = phi.support_hint();
    // Analytic families are super-exponentially small beyond |x| = 40.
    let (lo, hi) = if phi.kind() == PhiKind::Tabulated { (lo, hi) } else { (-40.0, 40.0) };
    let mut best = 0.0f64;
    for side in [1.0, -1.0] {
        let far = if side > 0.0 { hi - d } else { d - lo };
        if far <= r {
            continue;
        }
        let g = |y: f64| phi.eval(d + side * y).abs() * y.powf(alpha);
        let n = 800;
        let q = (far / r).powf(1.0 / n as f64);
        let mut y = r;
        let (mut bi, mut bv) = (0usize, g(r));
        for i in 1..=n {
            y *= q;
            let v = g(y);
            if v > bv {
                bv = v;
                bi = i;
            }
        }
        let y0 = r * q.powi(bi as i32);
        let a = (y0 / q).max(r);
        let b = (y0 * q).min(far);
        let (_, v) = golden_max(g, a, b, 1e-10);
        best = best.max(bv).max(v);
    }
    if !best.is_finite() {
        return Err(SeriesError::NoFiniteEnvelope { alpha });
    }
    Ok(best)
}

/// Default envelope exponent for rapidly decaying phi.
pub const DEFAULT_ALPHA: f64 = 6.0;
/// Default number of correction terms.
pub const DEFAULT_ORDER: usize = 4;
const NODES: usize = 256;
const Y_MAX: f64 = 1e4;

/// Smallest certified `R` (up to a 10% margin) for pole `d`, with `K`, `alpha` and `order` fixed.
pub fn certified_params(phi: &PhiModel, d: f64, k: f64, alpha: f64, order: usize) -> Result<SeriesParams, SeriesError> {
    let make = |r: f64| -> Result<SeriesParams, SeriesError> {
        let m = envelope_m(phi, d, alpha, r)?;
        Ok(SeriesParams { d, k, m, alpha, r, order })
    };
    let mut hi = 1.0;
    let mut p = make(hi)?;
    let mut tries = 0;
    while !certify_convergence(&p) {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(SeriesError::NotCertified { m: p.m, threshold: p.m_threshold(), a1: p.a1(), eight_r: 8.0 * p.r });
        }
        p = make(hi)?;
    }
    let mut lo = if tries == 0 { 0.0 } else { hi / 2.0 };
    if tries == 0 {
        // R = 1 already works; look below it down to 1/64.
        lo = 1.0 / 64.0;
        if certify_convergence(&make(lo)?) {
            return make(lo * 1.1);
        }
    }
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        if certify_convergence(&make(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 2e-2 * hi {
            break;
        }
    }
    let p = make(hi * 1.1)?;
    debug_assert!(certify_convergence(&p));
    Ok(p)
}

/// Cubic Hermite data for `u = v y^p` on the shared log grid; `p` is the expected
/// power-law decay of `v`, so pure power laws are reproduced exactly.
#[derive(Debug, Clone)]
struct Nodal {
    u: Vec<f64>,
    du: Vec<f64>,
    p: f64,
}

/// `y^p`, using integer powers when `p` is integral (the usual case).
#[inline]
fn pow(y: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p.fract() == 0.0 && p.abs() < 64.0 {
        y.powi(p as i32)
    } else {
        y.powf(p)
    }
}

impl Nodal {
    fn new(y: &[f64], v: &[f64], dv: &[f64], p: f64) -> Self {
        let u = y.iter().zip(v).map(|(&t, &vi)| vi * pow(t, p)).collect();
        let du = y.iter().zip(v).zip(dv).map(|((&t, &vi), &di)| di * pow(t, p) + p * vi * pow(t, p - 1.0)).collect();
        Self { u, du, p }
    }
}

#[derive(Debug, Clone)]
struct Coefficient {
    g: Nodal,
    j: Nodal,
}

/// A certified expansion with coefficients `f_1 .. f_order` realized on a log grid.
#[derive(Debug, Clone)]
pub struct Expansion {
    params: SeriesParams,
    phi: PhiModel,
    y: Vec<f64>,
    log_q: f64,
    coeffs: Vec<Coefficient>,
    bounds: Vec<f64>,
}

/// Value of the truncated series with the majorant-based truncation error for `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub f: f64,
    pub fp: f64,
    pub trunc_err: f64,
}

fn hermite(y0: f64, y1: f64, v0: f64, v1: f64, d0: f64, d1: f64, y: f64) -> f64 {
    let h = y1 - y0;
    let t = (y - y0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * h * d0 + (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * h * d1
}

impl Expansion {
    pub fn params(&self) -> &SeriesParams {
        &self.params
    }

    pub fn order(&self) -> usize {
        self.params.order
    }

    /// `A_0 .. A_{order + 60}`.
    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn grid(&self) -> &[f64] {
        &self.y
    }

    /// Grid cell containing `y`, or `None` beyond the last node.
    fn cell(&self, y: f64) -> Option<usize> {
        let last = self.y.len() - 1;
        if y >= self.y[last] {
            return None;
        }
        let mut i = (((y / self.y[0]).ln() / self.log_q).floor().max(0.0) as usize).min(last - 1);
        // Rounding in the log can put y one cell off.
        while i > 0 && y < self.y[i] {
            i -= 1;
        }
        while i + 1 < last && y > self.y[i + 1] {
            i += 1;
        }
        Some(i)
    }

    fn interp(&self, n: &Nodal, y: f64, cell: Option<usize>) -> f64 {
        match cell {
            None => n.u[self.y.len() - 1] / pow(y, n.p),
            Some(i) => hermite(self.y[i], self.y[i + 1], n.u[i], n.u[i + 1], n.du[i], n.du[i + 1], y) / pow(y, n.p),
        }
    }

    /// `f_k` alone at `y` in a known cell.
    fn value_in(&self, k: usize, y: f64, cell: Option<usize>) -> f64 {
        self.interp(&self.coeffs[k - 1].g, y, cell) / (y * y * y)
    }

    /// `(f_k, f_k')` at `y = x - d`, `1 <= k <= built coefficients`; `k = 0` gives `f_0`.
    fn coeff_y(&self, k: usize, y: f64) -> (f64, f64) {
        if k == 0 {
            return (6.0 / (y * y), -12.0 / (y * y * y));
        }
        let c = &self.coeffs[k - 1];
        let cell = self.cell(y);
        let g = self.interp(&c.g, y, cell);
        let j = self.interp(&c.j, y, cell);
        let y3 = y * y * y;
        let sign = if k == 1 { 1.0 } else { -1.0 };
        (g / y3, -3.0 * g / (y3 * y) + sign * y3 * j)
    }

    fn check(&self, x: f64) -> Result<f64, SeriesError> {
        let y = x - self.params.d;
        if !(y > self.params.r) {
            return Err(SeriesError::OutsideValidity { x, d: self.params.d, r: self.params.r });
        }
        Ok(y)
    }

    /// `(f_k(x), f_k'(x))` for `0 <= k <= order`.
    pub fn coefficient(&self, k: usize, x: f64) -> Result<(f64, f64), SeriesError> {
        if k > self.coeffs.len() {
            return Err(SeriesError::InvalidParams(format!("coefficient {k} not built")));
        }
        Ok(self.coeff_y(k, self.check(x)?))
    }

    /// Truncated sum and `sum_{k > order} A_k / |x - d|^(k+2)`.
    pub fn eval(&self, x: f64) -> Result<SeriesValue, SeriesError> {
        let y = self.check(x)?;
        let (mut f, mut fp) = (0.0, 0.0);
        for k in 0..=self.coeffs.len() {
            let (a, b) = self.coeff_y(k, y);
            f += a;
            fp += b;
        }
        Ok(SeriesValue { f, fp, trunc_err: self.trunc_err(y) })
    }

    fn trunc_err(&self, y: f64) -> f64 {
        let n = self.coeffs.len();
        let mut s = 0.0;
        for k in n + 1..self.bounds.len() {
            s += self.bounds[k] / y.powi(k as i32 + 2);
        }
        // Geometric remainder: A_{k+1} <= R A_k once certified.
        let last = self.bounds.len() - 1;
        let ratio = self.params.r / y;
        s + self.bounds[last] / y.powi(last as i32 + 2) * ratio / (1.0 - ratio)
    }

    /// `f'' - f^2 + phi` for the truncated sum, which equals `-sum f_i f_j` over
    /// `i, j <= order` with `i + j > order` given the coefficient equations.
    pub fn residual(&self, x: f64) -> Result<f64, SeriesError> {
        let y = self.check(x)?;
        let n = self.coeffs.len();
        let fk: Vec<f64> = (1..=n).map(|k| self.coeff_y(k, y).0).collect();
        let mut r = 0.0;
        for i in 1..=n {
            for j in 1..=n {
                if i + j > n {
                    r -= fk[i - 1] * fk[j - 1];
                }
            }
        }
        Ok(r)
    }

    pub fn table(&self) -> ExpansionTable {
        let mut columns = vec!["x".to_string()];
        columns.extend((1..=self.coeffs.len()).map(|k| format!("f{k}")));
        ExpansionTable { params: self.params, columns, rows: self.sample_table() }
    }

    /// Sampled `f_k` for export: rows `(x, f_1 .. f_order)` at the grid nodes.
    pub fn sample_table(&self) -> Vec<Vec<f64>> {
        self.y
            .iter()
            .map(|&y| {
                let mut row = vec![self.params.d + y];
                row.extend((1..=self.coeffs.len()).map(|k| self.coeff_y(k, y).0));
                row
            })
            .collect()
    }
}

/// Parameters plus the sampled coefficients of an expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTable {
    pub params: SeriesParams,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Builds `f_1 .. f_order` for a certified parameter set.
pub fn build_expansion(phi: &PhiModel, params: &SeriesParams) -> Result<Expansion, SeriesError> {
    params.validate()?;
    if !certify_convergence(params) {
        return Err(SeriesError::NotCertified {
            m: params.m,
            threshold: params.m_threshold(),
            a1: params.a1(),
            eight_r: 8.0 * params.r,
        });
    }
    let r = params.r;
    let y_max = Y_MAX.max(100.0 * r);
    let log_q = (y_max / r).ln() / (NODES - 1) as f64;
    let y: Vec<f64> = (0..NODES).map(|i| r * (log_q * i as f64).exp()).collect();
    let mut exp = Expansion {
        params: *params,
        phi: phi.clone(),
        y,
        log_q,
        coeffs: Vec::with_capacity(params.order),
        bounds: bound_sequence(params, params.order + 60),
    };
    for k in 1..=params.order {
        let c = build_coefficient(&exp, k).map_err(|source| SeriesError::DivergentCoefficient { k, source })?;
        exp.coeffs.push(c);
    }
    Ok(exp)
}

/// Rough L1 norm of nodal integrand values, used as the absolute tolerance scale.
fn l1_scale(y: &[f64], v: &[f64]) -> f64 {
    (0..y.len() - 1).map(|i| 0.5 * (v[i].abs() + v[i + 1].abs()) * (y[i + 1] - y[i])).sum()
}

/// Panel integral with absolute tolerance relative to the size of the whole integral.
fn panel(f: impl FnMut(f64) -> f64, a: f64, b: f64, scale: f64) -> Result<f64, QuadError> {
    let tol = QuadTol { abs: 1e-14 * scale.abs() + 1e-300, rel: 1e-10, max_intervals: 400 };
    integrate(f, a, b, tol)
}

fn build_coefficient(exp: &Expansion, k: usize) -> Result<Coefficient, QuadError> {
    let d = exp.params.d;
    let alpha = exp.params.alpha;
    let y = &exp.y;
    let n = y.len();
    let phi = &exp.phi;
    // src_k at s, with s known to lie in `cell`.
    let src_in = |s: f64, cell: Option<usize>| -> f64 {
        if k == 1 {
            return phi.eval(d + s);
        }
        let mut fm = [0.0; 64];
        for (m, v) in fm.iter_mut().enumerate().take(k).skip(1) {
            *v = exp.value_in(m, s, cell);
        }
        (1..k).map(|m| fm[m] * fm[k - m]).sum()
    };
    let src = |s: f64| src_in(s, exp.cell(s));
    let last = y[n - 1];
    let kf = k as f64;
    // Decay exponents of J and G when src is a pure power law.
    let j_pow = if k == 1 { alpha + 2.0 } else { kf + 6.0 };
    let g_pow = if k == 1 { 0.0 } else { kf - 1.0 };
    let j_tail = if k == 1 {
        integrate_to_infinity(|s| phi.eval(d + s) / (s * s * s), last, last, QuadTol::default())?
    } else {
        src(last) / ((kf + 6.0) * last * last)
    };
    let dj: Vec<f64> = y.iter().map(|&s| -src(s) / (s * s * s)).collect();
    let j_scale = l1_scale(y, &dj) + j_tail.abs();
    let mut j = vec![0.0; n];
    j[n - 1] = j_tail;
    for i in (0..n - 1).rev() {
        let p = panel(|s| src_in(s, Some(i)) / (s * s * s), y[i], y[i + 1], j_scale)?;
        j[i] = j[i + 1] + p;
    }
    let jn = Nodal::new(y, &j, &dj, j_pow);

    // W(y) = int_y^inf t^6 J(t) dt, with J taken from its interpolant.
    let j_at = |t: f64, i: usize| {
        hermite(y[i], y[i + 1], jn.u[i], jn.u[i + 1], jn.du[i], jn.du[i + 1], t) / pow(t, j_pow)
    };
    let mut w = vec![0.0; n];
    w[n - 1] = j[n - 1] * last.powi(7) / (j_pow - 7.0);
    let w_int: Vec<f64> = y.iter().zip(&j).map(|(&t, &jv)| t.powi(6) * jv).collect();
    let w_scale = l1_scale(y, &w_int) + w[n - 1].abs();
    for i in (0..n - 1).rev() {
        let p = panel(|t| t.powi(6) * j_at(t, i), y[i], y[i + 1], w_scale)?;
        w[i] = w[i + 1] + p;
    }
    let sign = if k == 1 { 1.0 } else { -1.0 };
    let g: Vec<f64> = if k == 1 { w.iter().map(|wi| exp.params.k - wi).collect() } else { w };
    let dg: Vec<f64> = y.iter().zip(&j).map(|(&t, &jv)| sign * t.powi(6) * jv).collect();
    Ok(Coefficient { g: Nodal::new(y, &g, &dg, g_pow), j: jn })
}

/// Boundary data `(f, f', trunc_err)` at `x0` from an expansion with pole `d`.
pub fn asymptotic_bc(phi: &PhiModel, params: &SeriesParams, x0: f64) -> Result<SeriesValue, SeriesError> {
    if !(x0 - params.d > params.r) {
        return Err(SeriesError::OutsideValidity { x: x0, d: params.d, r: params.r });
    }
    build_expansion(phi, params)?.eval(x0)
}
