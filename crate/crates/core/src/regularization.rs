//! Abel-Plana regularization of mode sums and the branch-cut integral that
//! remains once the evenly spaced spectrum is summed over the radial index.
//!
//! For a summand `f` analytic in the right half plane the engines need the
//! discontinuity across the imaginary axis,
//!
//! ```text
//! g(t) = −i [f(it) − f(−it)],
//! ```
//!
//! supplied by the caller as a real function. Conventions, fixed by the
//! calibration cases in [`CalibrationCase`]:
//!
//! ```text
//! Reg Σ_{n≥1} f(n)           = −f(0)/2 − ∫₀^∞ g(t) / (e^{2πt} − 1) dt
//! Σ_{n≥0} f(n+½) − ∫₀^∞ f dx =          ∫₀^∞ g(t) / (e^{2πt} + 1) dt
//! ```

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, Estimate};
use crate::spectrum::{Geometry, Mode, Variant};

// Panels beyond the one contributing this fraction of the total are dropped;
// this matches e^{−2πt} < 1e−18 relative to the accumulated value.
const TAIL_REL: f64 = 1e-18;
const ELL_BLOCK: u32 = 32;
const MAX_ELL_SUM: u32 = 2_000_000;

/// Result of a regularized sum. `value = boundary_term + cut_integral`;
/// `pieces`, when present, are the per-ℓ parts of `cut_integral` in
/// ascending ℓ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedSum {
    pub value: f64,
    pub boundary_term: f64,
    pub cut_integral: f64,
    pub truncation_error_estimate: f64,
    pub pieces: Vec<f64>,
}

/// A summand together with its analytic continuation across the imaginary axis.
pub trait PlanaSummand: Sync {
    /// `f(x)` on the non-negative real axis.
    fn value(&self, x: f64) -> f64;
    /// `g(t) = −i [f(it) − f(−it)]` for `t > 0`.
    fn discontinuity(&self, t: f64) -> f64;
    /// If `g` vanishes below some `t₀` and rises like `sqrt(t − t₀)`, its
    /// location. The engines then integrate in `u` with `t = t₀ + u²`.
    fn branch_point(&self) -> Option<f64> {
        None
    }
}

/// A [`PlanaSummand`] built from two closures.
pub struct FnSummand<F, G> {
    pub value: F,
    pub discontinuity: G,
    pub branch_point: Option<f64>,
}

/// Summand built from plain function pointers.
pub type PlainSummand = FnSummand<fn(f64) -> f64, fn(f64) -> f64>;

impl<F, G> PlanaSummand for FnSummand<F, G>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
    fn discontinuity(&self, t: f64) -> f64 {
        (self.discontinuity)(t)
    }
    fn branch_point(&self) -> Option<f64> {
        self.branch_point
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    /// `1 / (e^{2πt} − 1)`
    Bose,
    /// `1 / (e^{2πt} + 1)`
    Fermi,
}

impl Kernel {
    fn eval(self, t: f64) -> f64 {
        match self {
            Kernel::Bose => 1.0 / (2.0 * PI * t).exp_m1(),
            Kernel::Fermi => 1.0 / ((2.0 * PI * t).exp() + 1.0),
        }
    }
}

fn cut_integral(f: &impl PlanaSummand, kernel: Kernel, quad_tol: f64) -> Result<Estimate<f64>> {
    check_tol(quad_tol)?;
    match f.branch_point() {
        Some(t0) if t0 > 0.0 => integrate_to_infinity(
            |u: f64| {
                let t = t0 + u * u;
                2.0 * u * f.discontinuity(t) * kernel.eval(t)
            },
            0.0,
            0.5,
            quad_tol,
            TAIL_REL,
        ),
        _ => integrate_to_infinity(
            |t: f64| f.discontinuity(t) * kernel.eval(t),
            0.0,
            1.0,
            quad_tol,
            TAIL_REL,
        ),
    }
}

fn check_tol(quad_tol: f64) -> Result<()> {
    if quad_tol > 0.0 && quad_tol < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "quad_tol",
            value: quad_tol,
            reason: "tolerance must lie in (0, 1)",
        })
    }
}

/// `Reg Σ_{n≥1} f(n) = −f(0)/2 − ∫₀^∞ g(t)/(e^{2πt} − 1) dt`.
pub fn abel_plana_integer(f: &impl PlanaSummand, quad_tol: f64) -> Result<RegularizedSum> {
    // Adding zero turns a −0 boundary term into +0.
    let boundary_term = -0.5 * f.value(0.0) + 0.0;
    let cut = cut_integral(f, Kernel::Bose, quad_tol)?;
    Ok(RegularizedSum {
        value: boundary_term - cut.value,
        boundary_term,
        cut_integral: -cut.value,
        truncation_error_estimate: cut.error,
        pieces: Vec::new(),
    })
}

/// `Σ_{n≥0} f(n+½) − ∫₀^∞ f dx = ∫₀^∞ g(t)/(e^{2πt} + 1) dt`.
pub fn abel_plana_half_integer(f: &impl PlanaSummand, quad_tol: f64) -> Result<RegularizedSum> {
    let cut = cut_integral(f, Kernel::Fermi, quad_tol)?;
    Ok(RegularizedSum {
        value: cut.value,
        boundary_term: 0.0,
        cut_integral: cut.value,
        truncation_error_estimate: cut.error,
        pieces: Vec::new(),
    })
}

/// Polynomial summands with known regularized sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationCase {
    Constant,
    Linear,
    Cubic,
}

impl CalibrationCase {
    pub const ALL: [CalibrationCase; 3] = [Self::Constant, Self::Linear, Self::Cubic];

    pub fn name(self) -> &'static str {
        match self {
            Self::Constant => "const",
            Self::Linear => "linear",
            Self::Cubic => "cubic",
        }
    }

    pub fn summand(self) -> PlainSummand {
        match self {
            Self::Constant => FnSummand {
                value: |_| 1.0,
                discontinuity: |_| 0.0,
                branch_point: None,
            },
            Self::Linear => FnSummand {
                value: |x| x,
                discontinuity: |t| 2.0 * t,
                branch_point: None,
            },
            Self::Cubic => FnSummand {
                value: |x| x * x * x,
                discontinuity: |t| -2.0 * t * t * t,
                branch_point: None,
            },
        }
    }

    /// `ζ(−m)`: −1/2, −1/12, 1/120.
    pub fn expected_integer(self) -> f64 {
        match self {
            Self::Constant => -0.5,
            Self::Linear => -1.0 / 12.0,
            Self::Cubic => 1.0 / 120.0,
        }
    }

    /// `ζ(−m, ½)`: 0, 1/24, −7/960.
    pub fn expected_half_integer(self) -> f64 {
        match self {
            Self::Constant => 0.0,
            Self::Linear => 1.0 / 24.0,
            Self::Cubic => -7.0 / 960.0,
        }
    }
}

/// Lower end `t₀ = νξ/(2π)` of the branch-cut integral.
pub fn branch_threshold(nu: f64, geometry: &Geometry) -> f64 {
    nu * geometry.xi / (2.0 * PI)
}

/// `∫_{t₀}^∞ sqrt((tπ/d)² − ν²/(ab)) / (e^{2πt} − 1) dt` for real `ν ≥ 0`,
/// integrated in `u` with `t = t₀ + u²`.
pub(crate) fn branch_cut_per_nu_real(
    nu: f64,
    geometry: &Geometry,
    quad_tol: f64,
) -> Result<Estimate<f64>> {
    check_tol(quad_tol)?;
    let t0 = branch_threshold(nu, geometry);
    let scale = PI / geometry.d;
    // sqrt(t² − t₀²) = u sqrt(u² + 2t₀)
    let est = integrate_to_infinity(
        |u: f64| {
            let u2 = u * u;
            2.0 * u2 * (u2 + 2.0 * t0).sqrt() * Kernel::Bose.eval(t0 + u2)
        },
        0.0,
        0.5,
        quad_tol,
        TAIL_REL,
    )?;
    Ok(Estimate {
        value: scale * est.value,
        error: scale * est.error,
        evaluations: est.evaluations,
    })
}

/// The branch-cut integral divided by `ν`:
/// `∫_{νξ/2π}^∞ sqrt((tπ/d)² − ν²/(ab)) / (e^{2πt} − 1) dt`.
pub fn branch_cut_per_nu(ell: u32, geometry: &Geometry, quad_tol: f64) -> Result<f64> {
    Ok(branch_cut_per_nu_real(f64::from(ell) + 0.5, geometry, quad_tol)?.value)
}

/// `F(ν) = ν ∫_{νξ/2π}^∞ sqrt((tπ/d)² − ν²/(ab)) / (e^{2πt} − 1) dt`.
pub fn branch_cut_f(ell: u32, geometry: &Geometry, quad_tol: f64) -> Result<f64> {
    Ok((f64::from(ell) + 0.5) * branch_cut_per_nu(ell, geometry, quad_tol)?)
}

/// `−2 Σ_ℓ w_ℓ G(ν)` over the modes of `variant`, where `w_ℓ` is the mode
/// energy weight (`ν` for full spheres, `ℓ/2` for half spheres) and `G` the
/// per-`ν` branch-cut integral.
///
/// Terms are evaluated in parallel blocks and accumulated in ascending ℓ.
/// The sum stops once a term falls below `quad_tol` of the running total.
/// Terms that grow again after having started to fall are reported as an
/// error.
pub fn weighted_branch_sum(
    geometry: &Geometry,
    variant: Variant,
    quad_tol: f64,
) -> Result<RegularizedSum> {
    check_tol(quad_tol)?;
    let first = match variant {
        Variant::FullSphere => 0,
        Variant::HalfSphere => 1,
    };
    let term = |ell: u32| -> Result<(f64, f64)> {
        let weight = Mode::new(variant, ell, 1)?.energy_weight();
        let g = branch_cut_per_nu_real(f64::from(ell) + 0.5, geometry, quad_tol)?;
        Ok((-2.0 * weight * g.value, 2.0 * weight * g.error))
    };

    let mut pieces = Vec::new();
    let mut total = 0.0;
    let mut quad_error = 0.0;
    let mut falling = false;
    let mut previous = f64::INFINITY;
    let mut start = first;
    while start < MAX_ELL_SUM {
        let block: Vec<(f64, f64)> = (start..start + ELL_BLOCK)
            .into_par_iter()
            .map(term)
            .collect::<Result<_>>()?;
        for (offset, (value, error)) in block.into_iter().enumerate() {
            let ell = start + offset as u32;
            let magnitude = value.abs();
            if falling && magnitude > previous {
                return Err(Error::NonDecreasing {
                    ell,
                    term: magnitude,
                    previous,
                });
            }
            if previous.is_finite() && magnitude < previous {
                falling = true;
            }
            pieces.push(value);
            total += value;
            quad_error += error;
            if magnitude > 0.0 && magnitude <= quad_tol * total.abs() {
                let ratio = magnitude / previous;
                let tail = if ratio < 1.0 {
                    magnitude * ratio / (1.0 - ratio)
                } else {
                    magnitude
                };
                return Ok(RegularizedSum {
                    value: total,
                    boundary_term: 0.0,
                    cut_integral: total,
                    truncation_error_estimate: quad_error + tail,
                    pieces,
                });
            }
            previous = magnitude;
        }
        start += ELL_BLOCK;
    }
    Err(Error::Internal(format!(
        "angular sum did not converge below ell = {MAX_ELL_SUM}"
    )))
}

/// `Ẽ = −2 Σ_{ℓ≥0} F(ν)`, the regularized double sum over the evenly spaced
/// spectrum. The `Σ ν²` piece that accompanies it is zero under Hurwitz
/// regularization (`ζ(−2, ½) = 0`) and is not included.
pub fn etilde_numeric(geometry: &Geometry, quad_tol: f64) -> Result<RegularizedSum> {
    weighted_branch_sum(geometry, Variant::FullSphere, quad_tol)
}

/// `−2 ∫₀^∞ F(ν) dν` by nested quadrature over `ν` and `t`.
///
/// Exchanging the order of integration gives exactly `−ζ(4) ab / (4π d³)`.
pub fn leading_term_integral(geometry: &Geometry, quad_tol: f64) -> Result<f64> {
    check_tol(quad_tol)?;
    let inner_tol = (quad_tol * 1e-2).max(1e-14);
    let kappa = geometry.eta / PI;
    let failure = std::sync::Mutex::new(None);
    let outer = integrate_to_infinity(
        |nu: f64| match branch_cut_per_nu_real(nu, geometry, inner_tol) {
            Ok(g) => nu * g.value,
            Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        0.25 / kappa,
        quad_tol,
        quad_tol * 1e-3,
    );
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(-2.0 * outer?.value)
}
