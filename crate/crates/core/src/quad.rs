//! Adaptive Gauss-Kronrod (7, 15) quadrature on finite and semi-infinite intervals.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge on [{a}, {b}]: estimate {value}, error {error}")]
    NotConverged { a: f64, b: f64, value: f64, error: f64 },
    #[error("non-finite integrand value on [{a}, {b}]")]
    NonFinite { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10, max_intervals: 2000 }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel: (kronrod estimate, |kronrod - gauss|).
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let (k, g) = (k * h, g * h);
    if !k.is_finite() {
        return Err(QuadError::NonFinite { a, b });
    }
    Ok((k, (k - g).abs()))
}

/// Integral of `f` over [a, b] by bisecting the panel with the largest error estimate.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: QuadTol) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&mut f, a, b)?;
    let mut panels = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    loop {
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= tol.max_intervals {
            return Err(QuadError::NotConverged { a, b, value: total, error: err });
        }
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("at least one panel");
        let (pa, pb, pv, pe) = panels.swap_remove(i);
        let m = 0.5 * (pa + pb);
        if m <= pa || m >= pb {
            // Panel can no longer be split in floating point; accept what we have.
            return if err <= 1e3 * tol.abs.max(tol.rel * total.abs()) {
                Ok(total)
            } else {
                Err(QuadError::NotConverged { a, b, value: total, error: err })
            };
        }
        let (lv, le) = gk15(&mut f, pa, m)?;
        let (rv, re) = gk15(&mut f, m, pb)?;
        total += lv + rv - pv;
        err += le + re - pe;
        panels.push((pa, m, lv, le));
        panels.push((m, pb, rv, re));
        // Resum occasionally so cancellation in the running totals cannot drift.
        if panels.len() % 64 == 0 {
            total = panels.iter().map(|p| p.2).sum();
            err = panels.iter().map(|p| p.3).sum();
        }
    }
}

/// Integral of `f` over [a, inf) using `s = a + scale * u / (1 - u)`, u in [0, 1).
pub fn integrate_to_infinity(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    scale: f64,
    tol: QuadTol,
) -> Result<f64, QuadError> {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - u;
        let s = a + scale * u / w;
        let v = f(s) * scale / (w * w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Integral over the whole line, split at `center`.
pub fn integrate_line(mut f: impl FnMut(f64) -> f64, center: f64, scale: f64, tol: QuadTol) -> Result<f64, QuadError> {
    let right = integrate_to_infinity(&mut f, center, scale, tol)?;
    let left = integrate_to_infinity(|s| f(2.0 * center - s), center, scale, tol)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, QuadTol::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_line() {
        let v = integrate_line(|x| (-0.5 * x * x).exp(), 0.0, 1.0, QuadTol::default()).unwrap();
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn power_tail() {
        // int_2^inf s^-3 ds = 1/8
        let v = integrate_to_infinity(|s| s.powi(-3), 2.0, 2.0, QuadTol::default()).unwrap();
        assert!((v - 0.125).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand() {
        let v = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, QuadTol::default()).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-8 * exact);
    }
}
