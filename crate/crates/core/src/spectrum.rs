//! Spectrum of the linearization `L = d^2/dx^2 - 2 f(x)` about a solution, discretized by
//! central differences on `[-L_half, L_half]` with Dirichlet ends.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrate::{integrate_to, IntegrateError, IntegratorOpts, Tolerance, Trajectory};
use crate::problem::{PhasePoint, PhiModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("need at least {min} interior grid points, got {n}")]
    TooFewPoints { n: usize, min: usize },
    #[error("half-length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("grid too coarse: doubling N moved eigenvalue {index} from {coarse} to {fine}")]
    GridTooCoarse { index: usize, coarse: f64, fine: f64 },
    #[error("profile is not finite at x = {0}")]
    NonFiniteProfile(f64),
    #[error("the solution does not cover [-{l_half}, {l_half}]: it stops at x = {x}")]
    ProfileIncomplete { l_half: f64, x: f64 },
    #[error("tridiagonal QL iteration did not converge")]
    NoConvergence,
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

pub const MIN_POINTS: usize = 200;
pub const HEAD_LEN: usize = 10;
pub const DEFAULT_L_HALF: f64 = 20.0;
pub const DEFAULT_N: usize = 800;

/// Relative change allowed under grid doubling. Eigenvalues this close to zero are compared
/// absolutely against `GRID_ABS_FLOOR` instead.
pub const GRID_REL_TOL: f64 = 1e-2;
pub const GRID_ABS_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub n_positive: usize,
    pub smallest_abs: f64,
    /// The largest eigenvalues, descending.
    pub eigenvalues_head: Vec<f64>,
    pub l_half: f64,
    pub n: usize,
}

/// A solution stored as two trajectories leaving `x = 0`; the left one lives in the
/// mirrored frame `x -> -x`.
#[derive(Debug, Clone)]
pub struct SolutionProfile {
    right: Trajectory,
    left: Trajectory,
}

impl SolutionProfile {
    /// Integrates from `(f0, fp0)` at `x = 0` out to `|x| = l_half` on both sides.
    pub fn from_point(phi: &PhiModel, f0: f64, fp0: f64, l_half: f64, tol: Tolerance) -> Result<Self, SpectrumError> {
        if !(l_half > 0.0 && l_half.is_finite()) {
            return Err(SpectrumError::InvalidLength(l_half));
        }
        let opts = IntegratorOpts::with_tol(tol);
        let p = PhasePoint::new(f0, fp0, 0.0);
        let right = integrate_to(&p, l_half, phi, &opts)?;
        let left = integrate_to(&p.mirrored(), l_half, &phi.reflected(), &opts)?;
        for (t, sign) in [(&right, 1.0), (&left, -1.0)] {
            if !t.reached() {
                return Err(SpectrumError::ProfileIncomplete { l_half, x: sign * t.end().x });
            }
        }
        Ok(Self { right, left })
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        if x >= 0.0 {
            self.right.eval(x).map(|p| p.f)
        } else {
            self.left.eval(-x).map(|p| p.f)
        }
    }

    pub fn half_length(&self) -> f64 {
        self.right.end().x.min(self.left.end().x)
    }
}

/// Every eigenvalue of the discretized operator, descending.
pub fn discrete_spectrum(f: impl Fn(f64) -> f64, l_half: f64, n: usize) -> Result<Vec<f64>, SpectrumError> {
    if !(l_half > 0.0 && l_half.is_finite()) {
        return Err(SpectrumError::InvalidLength(l_half));
    }
    if n < MIN_POINTS {
        return Err(SpectrumError::TooFewPoints { n, min: MIN_POINTS });
    }
    let (diag, off, base) = operator(f, l_half, n)?;
    let mut ev = tridiagonal_eigenvalues(diag, off)?;
    for v in &mut ev {
        *v += base;
    }
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Diagonal, off-diagonal and a constant split off the diagonal.
///
/// The constant `-2 min f` is removed before the eigen-solve and added back afterwards, so a
/// constant shift of `f` changes the matrix handed to QL not at all.
fn operator(f: impl Fn(f64) -> f64, l_half: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>, f64), SpectrumError> {
    let h = 2.0 * l_half / (n + 1) as f64;
    let mut vals = Vec::with_capacity(n);
    for i in 1..=n {
        let x = -l_half + i as f64 * h;
        let v = f(x);
        if !v.is_finite() {
            return Err(SpectrumError::NonFiniteProfile(x));
        }
        vals.push(v);
    }
    let fmin = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let ih2 = 1.0 / (h * h);
    let diag = vals.iter().map(|v| -2.0 * ih2 - 2.0 * (v - fmin)).collect();
    let off = vec![ih2; n - 1];
    Ok((diag, off, -2.0 * fmin))
}

/// Number of eigenvalues strictly above `sigma`, by the Sturm sequence of `T - sigma I`.
pub fn sturm_count_above(f: impl Fn(f64) -> f64, l_half: f64, n: usize, sigma: f64) -> Result<usize, SpectrumError> {
    let (diag, off, base) = operator(f, l_half, n)?;
    let s = sigma - base;
    let mut below = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - s - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + off.first().copied().unwrap_or(0.0));
        }
        if q < 0.0 {
            below += 1;
        }
    }
    Ok(diag.len() - below)
}

/// Implicit QL with Wilkinson shifts, eigenvalues only. Consumes the matrix.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: Vec<f64>) -> Result<Vec<f64>, SpectrumError> {
    let n = d.len();
    let mut e = off;
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(SpectrumError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Summary at one resolution, without the doubling check.
pub fn summarize(f: impl Fn(f64) -> f64, l_half: f64, n: usize) -> Result<SpectralSummary, SpectrumError> {
    let ev = discrete_spectrum(&f, l_half, n)?;
    let n_positive = ev.iter().filter(|&&v| v > 0.0).count();
    let smallest_abs = ev.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let eigenvalues_head = ev.iter().take(HEAD_LEN).copied().collect();
    Ok(SpectralSummary { n_positive, smallest_abs, eigenvalues_head, l_half, n })
}

/// Full summary at `n` interior points, checked against the same solve at `2n`.
pub fn spectrum_of(f: impl Fn(f64) -> f64, l_half: f64, n: usize) -> Result<SpectralSummary, SpectrumError> {
    let coarse = summarize(&f, l_half, n)?;
    let fine = summarize(&f, l_half, 2 * n)?;
    for (i, (a, b)) in coarse.eigenvalues_head.iter().zip(&fine.eigenvalues_head).enumerate() {
        if (a - b).abs() > GRID_REL_TOL * a.abs().max(GRID_ABS_FLOOR / GRID_REL_TOL) {
            return Err(SpectrumError::GridTooCoarse { index: i, coarse: *a, fine: *b });
        }
    }
    Ok(coarse)
}

/// Spectrum of the linearization about a computed solution.
pub fn linearized_spectrum(solution: &SolutionProfile, l_half: f64, n: usize) -> Result<SpectralSummary, SpectrumError> {
    let cover = solution.half_length();
    if cover < l_half * (1.0 - 1e-12) {
        return Err(SpectrumError::ProfileIncomplete { l_half, x: cover });
    }
    spectrum_of(|x| solution.eval(x.clamp(-cover, cover)).unwrap_or(f64::NAN), l_half, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_laplacian() {
        let ev = discrete_spectrum(|_| 0.0, PI / 2.0, 2000).unwrap();
        for k in 1..=3 {
            let want = -((k * k) as f64);
            assert!((ev[k - 1] - want).abs() < 1e-2 * want.abs(), "{} vs {want}", ev[k - 1]);
        }
        // Exact discrete eigenvalues of tridiag(1, -2, 1) / h^2.
        let n = 2000;
        let h = PI / (n + 1) as f64;
        for k in 1..=5 {
            let exact = 2.0 / (h * h) * ((k as f64 * PI / (n + 1) as f64).cos() - 1.0);
            assert!((ev[k - 1] - exact).abs() < 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn constant_shift_is_exact() {
        let a = summarize(|_| 0.0, PI / 2.0, 2000).unwrap();
        let b = summarize(|_| 0.75, PI / 2.0, 2000).unwrap();
        for (x, y) in a.eigenvalues_head.iter().zip(&b.eigenvalues_head) {
            assert!((y - (x - 1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn sturm_count_matches_solver() {
        let f = |x: f64| -3.0 * (-x * x).exp();
        let ev = discrete_spectrum(f, 10.0, 400).unwrap();
        for sigma in [-1.0, 0.0, 0.5, 2.0] {
            let direct = ev.iter().filter(|&&v| v > sigma).count();
            assert_eq!(sturm_count_above(f, 10.0, 400, sigma).unwrap(), direct);
        }
    }

    #[test]
    fn well_has_bound_states() {
        // L = d^2 - 2f with f = -3 e^{-x^2}: potential well of depth 6 gives positive eigenvalues.
        let s = spectrum_of(|x| -3.0 * (-x * x).exp(), 20.0, 800).unwrap();
        assert!(s.n_positive >= 1);
        assert!(s.eigenvalues_head.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        // Narrow spike: h = 0.1 cannot resolve a width-0.02 well.
        let r = spectrum_of(|x| -2000.0 * (-(x / 0.02).powi(2)).exp(), 10.0, 200);
        assert!(matches!(r, Err(SpectrumError::GridTooCoarse { .. })), "{r:?}");
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(discrete_spectrum(|_| 0.0, 1.0, 10), Err(SpectrumError::TooFewPoints { .. })));
        assert!(matches!(discrete_spectrum(|_| 0.0, -1.0, 400), Err(SpectrumError::InvalidLength(_))));
    }

    #[test]
    fn zero_solution_profile() {
        let phi = PhiModel::gaussian(0.0).unwrap();
        let prof = SolutionProfile::from_point(&phi, 0.0, 0.0, 20.0, Tolerance::default()).unwrap();
        let s = linearized_spectrum(&prof, 20.0, 400).unwrap();
        assert_eq!(s.n_positive, 0);
        let blow = SolutionProfile::from_point(&phi, 1.0, 1.0, 20.0, Tolerance::default());
        assert!(matches!(blow, Err(SpectrumError::ProfileIncomplete { .. })));
    }
}
