//! Large-order behaviour of the modified-Bessel cross product
//!
//! ```text
//! f_ν(z, λ) = I_ν(z) K_ν(zλ) − I_ν(zλ) K_ν(z),    0 < λ < 1,
//! ```
//!
//! evaluated at `z = νy`. This module provides its logarithmic derivative,
//! the small-gap series of that derivative in powers of `1 − λ²`, the
//! closed form of the cutoff integrals those powers produce, and a numerical
//! check that the high-ℓ contribution to the energy has no real part.
//!
//! The overall `−2/π` normalisation commonly attached to `f` cancels in the
//! log-derivative and is not applied here.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::quadrature::integrate;
use crate::special_fn::eval_modified_scaled;
use crate::spectrum::Geometry;

/// Grids with fewer points than this are reported as insufficient.
pub const MIN_FIT_POINTS: usize = 8;
/// Smallest accepted ratio `y_max / y_min` for the parity fit.
pub const MIN_FIT_SPREAD: f64 = 1.5;
/// Odd coefficients count as zero when below this many standard errors.
pub const ODD_SIGNIFICANCE_LIMIT: f64 = 1e3;
/// Even-only fits must reach this RMS residual, in units of the point noise.
pub const EVEN_FIT_RMS_TARGET: f64 = 10.0;
const MAX_EVEN_TERMS: usize = 8;

/// The cross product at `z = νy` and its log-derivative `y d/dy ln f(νy)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossProduct {
    pub nu: f64,
    pub y: f64,
    pub lambda: f64,
    pub value: f64,
    pub log_deriv: f64,
    /// Rounding-error estimate for `log_deriv`.
    pub log_deriv_noise: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "lambda",
            value: lambda,
            reason: "radius ratio must lie in (0, 1)",
        })
    }
}

/// Evaluates `I_ν(νy)K_ν(νyλ) − I_ν(νyλ)K_ν(νy)` and its log-derivative.
///
/// The exponential scalings of the two factors are combined as
/// `I(p)K(q) = [e^{−p}I(p)]·[e^{q}K(q)]·e^{p−q}`, so only the final
/// `e^{νy(1−λ)}` can overflow. The log-derivative comes from
/// `I'_ν = I_{ν−1} − (ν/z)I_ν` and `K'_ν = −K_{ν−1} − (ν/z)K_ν`:
///
/// ```text
/// z f'/f = −2ν + [z I_{ν−1}(z)K(zλ) − zλ I(z)K_{ν−1}(zλ)
///                 − zλ I_{ν−1}(zλ)K(z) + z I(zλ)K_{ν−1}(z)] / f
/// ```
pub fn cross_product(ell: u32, y: f64, lambda: f64) -> Result<CrossProduct> {
    require_positive("y", y)?;
    check_lambda(lambda)?;
    let nu = f64::from(ell) + 0.5;
    let z = nu * y;
    let zl = z * lambda;
    let outer = eval_modified_scaled(ell, z)?;
    let inner = eval_modified_scaled(ell, zl)?;

    let delta = z - zl;
    let damp = (-2.0 * delta).exp();

    let direct = outer.i_scaled * inner.k_scaled;
    let swapped = inner.i_scaled * outer.k_scaled * damp;
    let scaled_value = direct - swapped;

    let terms = [
        z * outer.i_scaled_prev * inner.k_scaled,
        -zl * outer.i_scaled * inner.k_scaled_prev,
        -zl * inner.i_scaled_prev * outer.k_scaled * damp,
        z * inner.i_scaled * outer.k_scaled_prev * damp,
    ];
    let bracket: f64 = terms.iter().sum();
    let log_deriv = bracket / scaled_value - 2.0 * nu;

    let magnitude: f64 = terms.iter().map(|t| t.abs()).sum();
    let value_conditioning = (direct.abs() + swapped.abs()) / scaled_value.abs();
    let log_deriv_noise =
        16.0 * f64::EPSILON * (magnitude / scaled_value.abs() * value_conditioning + 2.0 * nu);

    let value = scaled_value * delta.exp();
    if !value.is_finite() {
        return Err(Error::Range(format!(
            "cross product overflows at nu = {nu}, y = {y}, lambda = {lambda}"
        )));
    }
    Ok(CrossProduct {
        nu,
        y,
        lambda,
        value,
        log_deriv,
        log_deriv_noise,
    })
}

/// One term `(1 − λ²)^k · P_k(νy, ν)` of the small-gap series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub order: u32,
    pub value: f64,
}

/// Truncated small-gap series of the log-derivative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LommelSeries {
    pub lambda: f64,
    pub nu: f64,
    pub y: f64,
    pub max_order: u32,
    pub terms: Vec<SeriesTerm>,
}

impl LommelSeries {
    pub fn new(ell: u32, y: f64, lambda: f64, max_order: u32) -> Result<Self> {
        require_positive("y", y)?;
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Domain {
                what: "lambda",
                value: lambda,
                reason: "radius ratio must lie in (0, 1]",
            });
        }
        if !(2..=6).contains(&max_order) {
            return Err(Error::Argument(format!(
                "series order must lie in 2..=6, got {max_order}"
            )));
        }
        let nu = f64::from(ell) + 0.5;
        let s = 1.0 - lambda * lambda;
        let x = (nu * y).powi(2);
        let nu2 = nu * nu;
        let polys = [
            x / 12.0,
            x / 24.0,
            (x * (19.0 - nu2) - x * x) / 720.0,
            -(3.0 * x * (nu2 - 9.0) + 2.0 * x * x) / 1440.0,
            (x * (4.0 * nu2 * nu2 - 290.0 * nu2 + 1726.0)
                + x * x * (8.0 * nu2 - 149.0)
                + 4.0 * x * x * x)
                / 120_960.0,
        ];
        let terms = (2..=max_order)
            .zip(polys)
            .map(|(order, poly)| SeriesTerm {
                order,
                value: s.powi(order as i32) * poly,
            })
            .collect();
        Ok(Self {
            lambda,
            nu,
            y,
            max_order,
            terms,
        })
    }

    pub fn sum(&self) -> f64 {
        self.terms.iter().map(|t| t.value).sum()
    }
}

/// The small-gap series of `y d/dy ln f(νy)` through order `max_k` in `1 − λ²`.
pub fn lommel_log_deriv(ell: u32, y: f64, lambda: f64, max_k: u32) -> Result<f64> {
    Ok(LommelSeries::new(ell, y, lambda, max_k)?.sum())
}

fn check_cutoff_args(nu: f64, b: f64, alpha: f64, phi: f64) -> Result<()> {
    require_positive("nu", nu)?;
    require_positive("b", b)?;
    require_positive("alpha", alpha)?;
    if !(phi > 0.0 && phi < 0.5 * PI) {
        return Err(Error::Domain {
            what: "phi",
            value: phi,
            reason: "contour angle must lie in (0, pi/2)",
        });
    }
    Ok(())
}

/// `i (−1)^{n+1} (2n)! ν^{2n} (b/α)^{2n+1}`, the value of the rotated-ray
/// integral of `(νy e^{−iφ})^{2n}` against the exponential cutoff.
/// It does not depend on `φ` and is purely imaginary.
pub fn cutoff_integral(n: u32, nu: f64, b: f64, alpha: f64, phi: f64) -> Result<Complex64> {
    check_cutoff_args(nu, b, alpha, phi)?;
    if n > 80 {
        return Err(Error::Argument(format!(
            "cutoff power n = {n} is too large"
        )));
    }
    let factorial: f64 = (1..=2 * n).map(f64::from).product();
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    let ratio = b / alpha;
    let magnitude = factorial * nu.powi(2 * n as i32) * ratio.powi(2 * n as i32 + 1);
    if !magnitude.is_finite() {
        return Err(Error::Range(format!(
            "cutoff integral overflows at n = {n}"
        )));
    }
    Ok(Complex64::new(0.0, sign * magnitude))
}

/// Direct quadrature of `e^{−iφ} ∫₀^∞ exp(−iαy e^{−iφ}/b) (νy e^{−iφ})^{2n} dy`.
///
/// The integrand decays like `y^{2n} e^{−αy sinφ/b}`; the range ends where
/// that envelope drops below `1e−18` of its peak.
pub fn cutoff_integral_quadrature(
    n: u32,
    nu: f64,
    b: f64,
    alpha: f64,
    phi: f64,
) -> Result<Complex64> {
    check_cutoff_args(nu, b, alpha, phi)?;
    let rotation = Complex64::from_polar(1.0, -phi);
    let rate = alpha * phi.sin() / b;
    let power = 2 * n as i32;

    let log_envelope = |y: f64| f64::from(power) * y.ln() - rate * y;
    let peak_y = f64::from(power) / rate;
    let log_peak = if n == 0 { 0.0 } else { log_envelope(peak_y) };
    let cutoff = 18.0 * std::f64::consts::LN_10;
    let mut upper = peak_y + 1.0 / rate;
    while log_envelope(upper) > log_peak - cutoff {
        upper += 1.0 / rate;
    }

    let exponent = Complex64::new(0.0, -alpha / b) * rotation;
    let scale = (nu * rotation).powi(power);
    let integrand = |y: f64| (exponent * y).exp() * scale * y.powi(power);

    // Unit-rate panels keep each piece to a handful of oscillations.
    let panels = (upper * rate).ceil().max(1.0) as usize;
    let width = upper / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let lo = width * k as f64;
        let part = integrate(integrand, lo, lo + width, 1e-12, 0.0)?;
        total += part.value;
    }
    Ok(rotation * total)
}

/// Weighted least-squares comparison of an even-power fit with one that also
/// allows odd powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityFit {
    /// Number of even monomials `u², u⁴, …` in the accepted basis.
    pub even_terms: usize,
    /// Fit variable is `u = y / y_scale`.
    pub y_scale: f64,
    pub even_coefficients: Vec<f64>,
    /// RMS residual of the even-only fit, in units of the point noise.
    pub even_rms: f64,
    /// RMS residual once `u³, u⁵, …` are added, in noise units.
    pub odd_allowed_rms: f64,
    pub odd_coefficients: Vec<f64>,
    pub odd_std_errors: Vec<f64>,
    /// Largest `|coefficient| / std error` among the odd terms.
    pub max_odd_significance: f64,
    pub even_fit_at_noise: bool,
    pub odd_consistent_with_zero: bool,
}

struct LsqFit {
    coefficients: Vec<f64>,
    std_errors: Vec<f64>,
    rms: f64,
}

fn weighted_lsq(u: &[f64], values: &[f64], noise: &[f64], powers: &[i32]) -> Result<LsqFit> {
    let rows = u.len();
    let cols = powers.len();
    if cols >= rows {
        return Err(Error::Fit(format!(
            "{cols} basis functions need more than {rows} grid points; add points"
        )));
    }
    let mut design = DMatrix::from_fn(rows, cols, |i, j| u[i].powi(powers[j]) / noise[i]);
    // Unit-norm columns; the scales are undone on the solution.
    let scales: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    for (mut column, scale) in design.column_iter_mut().zip(&scales) {
        column /= *scale;
    }
    let rhs = DVector::from_fn(rows, |i, _| values[i] / noise[i]);
    let svd = design.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let smallest = svd.singular_values.min();
    if smallest.is_nan() || smallest <= largest * 1e-14 {
        return Err(Error::Fit(
            "design matrix is numerically singular; widen the y grid spread".into(),
        ));
    }
    let coef = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let residual = &design * &coef - &rhs;
    let chi2 = residual.norm_squared();
    let rms = (chi2 / rows as f64).sqrt();
    let reduced = (chi2 / (rows - cols) as f64).max(1.0);

    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let std_errors = (0..cols)
        .map(|j| {
            let var: f64 = (0..cols)
                .map(|k| (v_t[(k, j)] / svd.singular_values[k]).powi(2))
                .sum();
            (var * reduced).sqrt() / scales[j]
        })
        .collect();
    Ok(LsqFit {
        coefficients: coef.iter().zip(&scales).map(|(c, s)| c / s).collect(),
        std_errors,
        rms,
    })
}

/// Fits `values(y)` with `u², u⁴, …, u^{2m}` (`u = y / max y`), raising `m`
/// until the weighted RMS residual reaches [`EVEN_FIT_RMS_TARGET`] noise units,
/// then refits with `u³, u⁵, …, u^{2m−1}` added and tests whether the odd
/// coefficients are distinguishable from zero.
pub fn parity_fit(y: &[f64], values: &[f64], noise: &[f64]) -> Result<ParityFit> {
    if y.len() != values.len() || y.len() != noise.len() {
        return Err(Error::Argument(
            "grid, values and noise differ in length".into(),
        ));
    }
    if y.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "{} points are too few; use at least {MIN_FIT_POINTS}",
            y.len()
        )));
    }
    if y.iter().chain(noise).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Argument(
            "grid points and noise must be positive".into(),
        ));
    }
    let y_max = y.iter().copied().fold(f64::MIN, f64::max);
    let y_min = y.iter().copied().fold(f64::MAX, f64::min);
    if y_max / y_min < MIN_FIT_SPREAD {
        return Err(Error::Fit(format!(
            "grid spread y_max/y_min = {:.3} is below {MIN_FIT_SPREAD}; widen the grid",
            y_max / y_min
        )));
    }
    let u: Vec<f64> = y.iter().map(|v| v / y_max).collect();

    // Smallest even basis that reaches the noise; otherwise the largest tried.
    let mut chosen = None;
    for m in 1..=MAX_EVEN_TERMS {
        if 2 * m >= y.len() {
            break;
        }
        let even: Vec<i32> = (1..=m as i32).map(|k| 2 * k).collect();
        let fit = weighted_lsq(&u, values, noise, &even)?;
        let done = fit.rms <= EVEN_FIT_RMS_TARGET;
        chosen = Some((m, even, fit));
        if done {
            break;
        }
    }
    let Some((m, even, even_fit)) = chosen else {
        return Err(Error::Fit("grid too small for any even basis".into()));
    };

    let odd: Vec<i32> = (1..m as i32).map(|k| 2 * k + 1).collect();
    let mut powers = even.clone();
    powers.extend(&odd);
    let (odd_coefficients, odd_std_errors, odd_allowed_rms) = if odd.is_empty() {
        (Vec::new(), Vec::new(), even_fit.rms)
    } else {
        let full = weighted_lsq(&u, values, noise, &powers)?;
        (
            full.coefficients[m..].to_vec(),
            full.std_errors[m..].to_vec(),
            full.rms,
        )
    };
    let max_odd_significance = odd_coefficients
        .iter()
        .zip(&odd_std_errors)
        .map(|(c, s)| c.abs() / s)
        .fold(0.0, f64::max);
    Ok(ParityFit {
        even_terms: m,
        y_scale: y_max,
        even_coefficients: even_fit.coefficients,
        even_rms: even_fit.rms,
        odd_allowed_rms,
        odd_coefficients,
        odd_std_errors,
        max_odd_significance,
        even_fit_at_noise: even_fit.rms <= EVEN_FIT_RMS_TARGET,
        odd_consistent_with_zero: max_odd_significance < ODD_SIGNIFICANCE_LIMIT,
    })
}

/// Parity result for one angular index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityEntry {
    pub ell: u32,
    pub nu: f64,
    pub fit: ParityFit,
}

/// Closed form against quadrature for one cutoff integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffCheck {
    pub n: u32,
    pub nu: f64,
    pub phi: f64,
    pub closed_re: f64,
    pub closed_im: f64,
    pub quadrature_re: f64,
    pub quadrature_im: f64,
    /// `|closed − quadrature| / |closed|`.
    pub rel_difference: f64,
    /// `|Re quadrature| / |quadrature|`.
    pub real_part_rel: f64,
}

/// Evidence that the high-ℓ part of the energy has no real part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EbarReport {
    pub lambda: f64,
    pub alpha: f64,
    pub insufficient_grid: bool,
    pub parity: Vec<ParityEntry>,
    pub cutoff: Vec<CutoffCheck>,
    pub odd_terms_vanish: bool,
    pub cutoff_purely_imaginary: bool,
    pub passed: bool,
}

/// Angles at which the cutoff integrals are checked.
pub const CHECK_ANGLES: [f64; 3] = [PI / 6.0, PI / 4.0, PI / 3.0];
/// Largest power `2n` checked.
pub const CHECK_MAX_N: u32 = 3;
/// Tolerance for the closed-form/quadrature comparison and the real part.
pub const CUTOFF_TOL: f64 = 1e-8;

/// Builds the parity report for `ℓ ∈ ell_list` on the given `y` grid, plus
/// cutoff-integral checks for `n = 0..=3` at three contour angles with the
/// cutoff `α` set to the gap width.
///
/// A grid with fewer than [`MIN_FIT_POINTS`] points yields a report with
/// `insufficient_grid` set and no parity fits.
pub fn verify_ebar_vanishes(
    geometry: &Geometry,
    ell_list: &[u32],
    y_grid: &[f64],
) -> Result<EbarReport> {
    if ell_list.is_empty() || y_grid.is_empty() {
        return Err(Error::Argument(
            "ell list and y grid must be non-empty".into(),
        ));
    }
    let insufficient_grid = y_grid.len() < MIN_FIT_POINTS;
    let mut parity = Vec::new();
    if !insufficient_grid {
        for &ell in ell_list {
            let points: Vec<CrossProduct> = y_grid
                .par_iter()
                .map(|&y| cross_product(ell, y, geometry.lambda))
                .collect::<Result<_>>()?;
            let values: Vec<f64> = points.iter().map(|p| p.log_deriv).collect();
            let noise: Vec<f64> = points.iter().map(|p| p.log_deriv_noise).collect();
            let fit = parity_fit(y_grid, &values, &noise)?;
            parity.push(ParityEntry {
                ell,
                nu: f64::from(ell) + 0.5,
                fit,
            });
        }
    }

    let alpha = geometry.d;
    let nu = f64::from(ell_list[0]) + 0.5;
    let mut cutoff = Vec::new();
    for n in 0..=CHECK_MAX_N {
        for phi in CHECK_ANGLES {
            let closed = cutoff_integral(n, nu, geometry.b, alpha, phi)?;
            let quad = cutoff_integral_quadrature(n, nu, geometry.b, alpha, phi)?;
            cutoff.push(CutoffCheck {
                n,
                nu,
                phi,
                closed_re: closed.re,
                closed_im: closed.im,
                quadrature_re: quad.re,
                quadrature_im: quad.im,
                rel_difference: (closed - quad).norm() / closed.norm(),
                real_part_rel: quad.re.abs() / quad.norm(),
            });
        }
    }

    let odd_terms_vanish = !insufficient_grid
        && parity
            .iter()
            .all(|e| e.fit.even_fit_at_noise && e.fit.odd_consistent_with_zero);
    let cutoff_purely_imaginary = cutoff.iter().all(|c| {
        c.closed_re == 0.0 && c.rel_difference < CUTOFF_TOL && c.real_part_rel < CUTOFF_TOL
    });
    Ok(EbarReport {
        lambda: geometry.lambda,
        alpha,
        insufficient_grid,
        parity,
        cutoff,
        odd_terms_vanish,
        cutoff_purely_imaginary,
        passed: odd_terms_vanish && cutoff_purely_imaginary,
    })
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (step * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell_zero_matches_hyperbolic_form() {
        for (y, lambda) in [(1.0, 0.5), (0.3, 0.9), (20.0, 0.2), (1e-3, 0.7)] {
            let c = cross_product(0, y, lambda).unwrap();
            let x: f64 = 0.5 * y;
            let exact = (x * (1.0 - lambda)).sinh() / (x * lambda.sqrt());
            assert!(
                ((c.value - exact) / exact).abs() < 1e-13,
                "y={y} λ={lambda}"
            );
            // y d/dy ln[sinh(x(1−λ))/x] = x(1−λ)coth(x(1−λ)) − 1
            let w = x * (1.0 - lambda);
            let t = w / w.tanh() - 1.0;
            assert!((c.log_deriv - t).abs() < 1e-12 * t.abs().max(1.0) + 10.0 * c.log_deriv_noise);
        }
        // Hand value: x = 1/2, λ = 1/2.
        let c = cross_product(0, 1.0, 0.5).unwrap();
        assert!((c.value - 0.714_495_53).abs() < 1e-8);
    }

    #[test]
    fn positive_and_vanishing_at_equal_radii() {
        let c = cross_product(20, 2.0, 0.9).unwrap();
        assert!(c.value > 0.0 && c.value.is_finite());
        let near = cross_product(5, 1.0, 1.0 - 1e-9).unwrap();
        assert!(near.value.abs() < 1e-8);
        assert!(cross_product(5, 1.0, 1.0).is_err());
        assert!(cross_product(5, 1.0, 0.0).is_err());
    }

    #[test]
    fn log_deriv_against_finite_difference() {
        // Independent oracle: central difference of ln f in y.
        for (ell, y, lambda) in [(3, 0.4, 0.8), (10, 0.2, 0.95), (30, 1.5, 0.6)] {
            let c = cross_product(ell, y, lambda).unwrap();
            let h = 1e-5 * y;
            let up = cross_product(ell, y + h, lambda).unwrap().value.ln();
            let down = cross_product(ell, y - h, lambda).unwrap().value.ln();
            let fd = y * (up - down) / (2.0 * h);
            assert!(
                (c.log_deriv - fd).abs() < 1e-7 * fd.abs().max(1e-3),
                "ell={ell}"
            );
        }
    }

    #[test]
    fn log_deriv_against_high_precision_reference() {
        // y d/dy ln f at ν = 50.5, λ = 0.95 from 40-digit mpmath Bessel
        // functions and numerical differentiation.
        for (y, reference) in [
            (0.01, 1.539_043_918_847_040_4e-4),
            (0.02, 6.155_757_271_434_919_2e-4),
            (0.05, 3.845_519_285_244_397_5e-3),
        ] {
            let c = cross_product(50, y, 0.95).unwrap();
            assert!(
                ((c.log_deriv - reference) / reference).abs() < 1e-9,
                "y={y}: {}",
                c.log_deriv
            );
        }
    }

    #[test]
    fn log_deriv_is_even_in_argument() {
        // Series in (νy)² only: T(y) at y and its reflection agree through
        // the finite-difference of T against y².
        let a = cross_product(10, 0.05, 0.9).unwrap().log_deriv;
        let b = cross_product(10, 0.1, 0.9).unwrap().log_deriv;
        // Leading behaviour ~ y², so the ratio is close to 4.
        assert!((b / a - 4.0).abs() < 0.05);
    }

    #[test]
    fn series_leading_terms() {
        let ell = 20;
        let (y, lambda) = (0.05, 0.9);
        let s: f64 = 1.0 - lambda * lambda;
        let z2 = (20.5_f64 * y).powi(2);
        let k2 = lommel_log_deriv(ell, y, lambda, 2).unwrap();
        assert!((k2 - 0.19_f64.powi(2) / 12.0 * z2).abs() < 1e-16);
        let k3 = lommel_log_deriv(ell, y, lambda, 3).unwrap();
        assert!((k3 - k2 - s.powi(3) / 24.0 * z2).abs() < 1e-16);
    }

    #[test]
    fn series_vanishes_at_unit_ratio() {
        for k in 2..=6 {
            assert_eq!(lommel_log_deriv(7, 0.3, 1.0, k).unwrap(), 0.0);
        }
        assert!(lommel_log_deriv(7, 0.3, 0.9, 7).is_err());
        assert!(lommel_log_deriv(7, 0.3, 0.9, 1).is_err());
    }

    #[test]
    fn series_converges_for_small_gap_and_order() {
        // ν(1 − λ²) well below 1: residuals against the direct value fall
        // with every added order. The points keep the order-6 residual far
        // above the rounding noise of the direct value.
        for (ell, y, lambda) in [(0, 2.0, 0.95), (1, 1.0, 0.95), (1, 0.5, 0.9), (0, 4.0, 0.9)] {
            let direct = cross_product(ell, y, lambda).unwrap().log_deriv;
            let residuals: Vec<f64> = (2..=6)
                .map(|k| (lommel_log_deriv(ell, y, lambda, k).unwrap() - direct).abs())
                .collect();
            assert!(
                residuals.windows(2).all(|w| w[1] < w[0]),
                "ell={ell}: {residuals:?}"
            );
        }
    }

    #[test]
    fn cutoff_closed_form_values() {
        let v = cutoff_integral(0, 3.5, 2.0, 0.5, 0.3).unwrap();
        assert_eq!(v, Complex64::new(0.0, -4.0));
        let v = cutoff_integral(1, 1.5, 2.0, 0.5, PI / 4.0).unwrap();
        assert!((v - Complex64::new(0.0, 288.0)).norm() < 1e-12);
        let v = cutoff_integral(2, 0.5, 1.0, 1.0, PI / 4.0).unwrap();
        assert!((v - Complex64::new(0.0, -1.5)).norm() < 1e-15);
        assert!(cutoff_integral(0, 0.5, 1.0, 0.0, 0.5).is_err());
        assert!(cutoff_integral(0, 0.5, 1.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn cutoff_quadrature_matches_closed_form() {
        for n in 0..=3 {
            for phi in CHECK_ANGLES {
                for (nu, b, alpha) in [(1.5, 2.0, 0.5), (0.5, 1.0, 1.0), (10.5, 1.1, 0.1)] {
                    let c = cutoff_integral(n, nu, b, alpha, phi).unwrap();
                    let q = cutoff_integral_quadrature(n, nu, b, alpha, phi).unwrap();
                    assert!((c - q).norm() / c.norm() < 1e-8, "n={n} φ={phi}");
                    assert!(q.re.abs() / q.norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn parity_fit_accepts_even_data() {
        let y = log_grid(0.01, 0.1, 24);
        let values: Vec<f64> = y.iter().map(|v| 3.0 * v * v - 40.0 * v.powi(4)).collect();
        let noise = vec![1e-15; y.len()];
        let fit = parity_fit(&y, &values, &noise).unwrap();
        assert!(fit.even_fit_at_noise);
        assert!(fit.odd_consistent_with_zero);
    }

    #[test]
    fn parity_fit_detects_odd_term() {
        let y = log_grid(0.01, 0.1, 24);
        let values: Vec<f64> = y.iter().map(|v| 3.0 * v * v + 0.5 * v.powi(3)).collect();
        let noise = vec![1e-15; y.len()];
        let fit = parity_fit(&y, &values, &noise).unwrap();
        assert!(!fit.odd_consistent_with_zero, "{fit:?}");
    }

    #[test]
    fn parity_fit_rejects_bad_grids() {
        let y = vec![0.05; 10];
        let values = vec![1.0; 10];
        let noise = vec![1e-15; 10];
        assert!(matches!(
            parity_fit(&y, &values, &noise),
            Err(Error::Fit(_))
        ));
        let y = log_grid(0.01, 0.1, 4);
        assert!(matches!(
            parity_fit(&y, &values[..4], &noise[..4]),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn ebar_report_for_thin_shell() {
        let g = Geometry::new(1.0, 1.1).unwrap();
        let report = verify_ebar_vanishes(&g, &[10, 30], &log_grid(0.01, 0.1, 24)).unwrap();
        assert!(!report.insufficient_grid);
        assert!(report.passed, "{report:#?}");
        for entry in &report.parity {
            assert!(entry.fit.even_rms <= EVEN_FIT_RMS_TARGET);
        }
    }

    #[test]
    fn ebar_report_single_point_flags_grid() {
        let g = Geometry::new(1.0, 1.1).unwrap();
        let report = verify_ebar_vanishes(&g, &[10], &[0.05]).unwrap();
        assert!(report.insufficient_grid);
        assert!(!report.passed);
        assert!(report.parity.is_empty());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.01, 0.1, 5);
        assert_eq!(g.len(), 5);
        assert!((g[0] - 0.01).abs() < 1e-18);
        assert!((g[4] - 0.1).abs() < 1e-15);
    }
}
