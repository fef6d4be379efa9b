//! Casimir energies of a massless scalar field with Dirichlet conditions on
//! two concentric spheres (or hemispheres), in units with ħ = c = 1.
//!
//! The high-ℓ part of the regularized mode sum has no real part (see
//! [`crate::asymptotics::verify_ebar_vanishes`]), so the energy is carried
//! entirely by the evenly spaced spectrum. Two routes are provided: closed
//! forms in the gap parameter `η = d / sqrt(ab)`, and the exponentially
//! convergent ℓ-sum from [`crate::regularization`].

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::regularization::weighted_branch_sum;
use crate::special_fn::{riemann_zeta_small, APERY};
use crate::spectrum::{Geometry, Mode};

pub use crate::spectrum::Variant;

const ZETA2: f64 = PI * PI / 6.0;
const ZETA4: f64 = PI * PI * PI * PI / 90.0;

/// How the energy was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    ClosedForm,
    Numeric,
}

/// A named relative correction: the energy is `leading · (1 + Σ corrections)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correction {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub geometry: Geometry,
    pub variant: Variant,
    pub method: EnergyMethod,
    /// High-ℓ contribution; zero.
    pub e_bar: f64,
    pub e_tilde: f64,
    pub e_total: f64,
    /// The `ζ(4)` term alone.
    pub leading: f64,
    pub corrections: Vec<Correction>,
    /// `e_total / area`.
    pub per_area: f64,
    /// Per-area value with the `1/(16π)` prefactor some references print for
    /// the hemisphere, instead of the `1/(16π²)` that dividing by the area
    /// gives. Only set for half spheres.
    pub per_area_alt_prefactor: Option<f64>,
    /// `4πa²` for full spheres, `2πa²` for half spheres.
    pub area: f64,
    /// Quadrature and truncation error bound (zero for closed forms).
    pub error_estimate: f64,
}

fn area(geometry: &Geometry, variant: Variant) -> f64 {
    let a2 = geometry.a * geometry.a;
    match variant {
        Variant::FullSphere => 4.0 * PI * a2,
        Variant::HalfSphere => 2.0 * PI * a2,
    }
}

fn leading_term(geometry: &Geometry, variant: Variant) -> f64 {
    let base = -ZETA4 * geometry.a * geometry.b / geometry.d.powi(3);
    match variant {
        Variant::FullSphere => base / (4.0 * PI),
        Variant::HalfSphere => base / (8.0 * PI),
    }
}

fn assemble(
    geometry: &Geometry,
    variant: Variant,
    method: EnergyMethod,
    e_tilde: f64,
    corrections: Vec<Correction>,
    error_estimate: f64,
) -> EnergyBreakdown {
    let e_bar = 0.0;
    let e_total = e_bar + e_tilde;
    let area = area(geometry, variant);
    let per_area = e_total / area;
    EnergyBreakdown {
        geometry: *geometry,
        variant,
        method,
        e_bar,
        e_tilde,
        e_total,
        leading: leading_term(geometry, variant),
        corrections,
        per_area,
        per_area_alt_prefactor: match variant {
            Variant::FullSphere => None,
            Variant::HalfSphere => Some(per_area * PI),
        },
        area,
        error_estimate,
    }
}

/// Full spheres: `E = −(ζ(4)/4π)(ab/d³)[1 + η² ζ(2)/(12 ζ(4))]`.
///
/// The same value is also computed as `−(π³/360)(ab/d³)[1 + 5d²/(4π² ab)]`
/// and the two are required to agree to `1e−14`.
pub fn closed_form_full(geometry: &Geometry) -> Result<EnergyBreakdown> {
    let (zeta_form, correction) = full_zeta_form(geometry)?;
    let pi_form = full_pi_form(geometry);
    if ((zeta_form - pi_form) / pi_form).abs() > 1e-14 {
        return Err(Error::Internal(format!(
            "closed forms disagree: {zeta_form:e} vs {pi_form:e}"
        )));
    }
    Ok(assemble(
        geometry,
        Variant::FullSphere,
        EnergyMethod::ClosedForm,
        zeta_form,
        vec![Correction {
            name: "eta2_zeta2",
            value: correction,
        }],
        0.0,
    ))
}

/// `(zeta form, η² correction)` of the full-sphere energy.
pub fn full_zeta_form(geometry: &Geometry) -> Result<(f64, f64)> {
    let zeta2 = riemann_zeta_small(2)?;
    let zeta4 = riemann_zeta_small(4)?;
    let eta = geometry.eta;
    let correction = eta * eta / 12.0 * zeta2 / zeta4;
    let ratio = geometry.a * geometry.b / geometry.d.powi(3);
    Ok((-ratio * zeta4 / (4.0 * PI) * (1.0 + correction), correction))
}

/// The explicit-π form of the full-sphere energy.
pub fn full_pi_form(geometry: &Geometry) -> f64 {
    let ab = geometry.a * geometry.b;
    let d = geometry.d;
    -(PI * PI * PI / 360.0) * ab / d.powi(3) * (1.0 + 5.0 * d * d / (4.0 * PI * PI * ab))
}

/// Half spheres:
///
/// ```text
/// E = −(ζ(4)/8π)(ab/d³) [1 − (π/4)η ζ(3)/ζ(4) + (π/24)η³/ζ(4)
///                          + η² ζ(2)/(12 ζ(4)) − η³/(4π ζ(4))]
/// ```
pub fn closed_form_half(geometry: &Geometry) -> Result<EnergyBreakdown> {
    let eta = geometry.eta;
    let corrections = vec![
        Correction {
            name: "eta_zeta3",
            value: -PI / 4.0 * eta * APERY / ZETA4,
        },
        Correction {
            name: "eta3_pi",
            value: PI / 24.0 * eta.powi(3) / ZETA4,
        },
        Correction {
            name: "eta2_zeta2",
            value: eta * eta / 12.0 * ZETA2 / ZETA4,
        },
        Correction {
            name: "eta3_inverse_pi",
            value: -eta.powi(3) / (4.0 * PI * ZETA4),
        },
    ];
    let bracket = 1.0 + corrections.iter().map(|c| c.value).sum::<f64>();
    let e = leading_term(geometry, Variant::HalfSphere) * bracket;
    Ok(assemble(
        geometry,
        Variant::HalfSphere,
        EnergyMethod::ClosedForm,
        e,
        corrections,
        0.0,
    ))
}

/// Energy per unit area between parallel Dirichlet plates a distance `d`
/// apart: `−ζ(4)/(16π² d³) = −π²/(1440 d³)`.
pub fn plate_limit_per_area(d: f64) -> Result<f64> {
    crate::error::require_positive("d", d)?;
    Ok(-ZETA4 / (16.0 * PI * PI * d.powi(3)))
}

/// Weight `ℓ/2` of angular index `ℓ ≥ 1` in the half-sphere mode sum.
pub fn half_sphere_mode_sum_prefactor(ell: u32) -> Result<f64> {
    Ok(Mode::new(Variant::HalfSphere, ell, 1)?.energy_weight())
}

fn numeric(geometry: &Geometry, variant: Variant, quad_tol: f64) -> Result<EnergyBreakdown> {
    let sum = weighted_branch_sum(geometry, variant, quad_tol)?;
    let leading = leading_term(geometry, variant);
    Ok(assemble(
        geometry,
        variant,
        EnergyMethod::Numeric,
        sum.value,
        vec![Correction {
            name: "beyond_leading",
            value: sum.value / leading - 1.0,
        }],
        sum.truncation_error_estimate,
    ))
}

/// Full-sphere energy from the convergent ℓ-sum `−2 Σ_{ℓ≥0} F(ν)`.
pub fn numeric_full(geometry: &Geometry, quad_tol: f64) -> Result<EnergyBreakdown> {
    numeric(geometry, Variant::FullSphere, quad_tol)
}

/// Half-sphere energy from `−2 Σ_{ℓ≥1} (ℓ/2) F(ν)/ν`.
pub fn numeric_half(geometry: &Geometry, quad_tol: f64) -> Result<EnergyBreakdown> {
    numeric(geometry, Variant::HalfSphere, quad_tol)
}

/// Energy of `variant` by `method`.
pub fn energy(
    geometry: &Geometry,
    variant: Variant,
    method: EnergyMethod,
    quad_tol: f64,
) -> Result<EnergyBreakdown> {
    match (variant, method) {
        (Variant::FullSphere, EnergyMethod::ClosedForm) => closed_form_full(geometry),
        (Variant::HalfSphere, EnergyMethod::ClosedForm) => closed_form_half(geometry),
        (_, EnergyMethod::Numeric) => numeric(geometry, variant, quad_tol),
    }
}

/// `−∂E/∂d` at fixed `sqrt(ab)`, by central difference with step
/// `rel_step · d`. Negative values mean the shells attract.
pub fn force(
    geometry: &Geometry,
    variant: Variant,
    method: EnergyMethod,
    rel_step: f64,
    quad_tol: f64,
) -> Result<f64> {
    if !(1e-6..=1e-2).contains(&rel_step) {
        return Err(Error::Argument(format!(
            "rel_step must lie in [1e-6, 1e-2], got {rel_step}"
        )));
    }
    let mean = geometry.mean_radius();
    let h = rel_step * geometry.d;
    let plus = Geometry::from_mean_and_gap(mean, geometry.d + h)?;
    let minus = Geometry::from_mean_and_gap(mean, geometry.d - h)?;
    let e_plus = energy(&plus, variant, method, quad_tol)?;
    let e_minus = energy(&minus, variant, method, quad_tol)?;
    let difference = e_plus.e_total - e_minus.e_total;

    let relative_noise = match method {
        EnergyMethod::ClosedForm => 64.0 * f64::EPSILON,
        EnergyMethod::Numeric => quad_tol,
    };
    let noise = relative_noise * (e_plus.e_total.abs() + e_minus.e_total.abs())
        + e_plus.error_estimate
        + e_minus.error_estimate;
    if difference.abs() < 100.0 * noise {
        return Err(Error::StepTooSmall(format!(
            "energy difference {difference:e} is within 100x of the noise {noise:e}; increase rel_step"
        )));
    }
    Ok(-difference / (2.0 * h))
}
