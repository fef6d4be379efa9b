//! Dirichlet spectrum of the region between two concentric spheres.
//!
//! For angular index `ℓ` the eigenfrequencies are the positive roots of
//!
//! ```text
//! J_ν(ωb) N_ν(ωa) − J_ν(ωa) N_ν(ωb) = 0,    ν = ℓ + 1/2,
//! ```
//!
//! and for large `ω` they approach the evenly spaced sequence
//! `ω̃² = (nπ/d)² + ν²/(ab)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::special_fn::{eval_ordinary, MAX_ELL};

/// Largest number of roots produced per table.
pub const MAX_ROOTS: usize = 10_000;

// Spec'd scan step is just under half the asymptotic spacing.
const SCAN_FRACTION: f64 = 0.45;
const MAX_STEP_HALVINGS: u32 = 8;

/// Inner radius `a`, outer radius `b` and the derived gap parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geometry {
    pub a: f64,
    pub b: f64,
    /// Gap `b − a`.
    pub d: f64,
    /// `a / b`.
    pub lambda: f64,
    /// `d / sqrt(ab)`.
    pub eta: f64,
    /// `2d / sqrt(ab)`.
    pub xi: f64,
}

impl Geometry {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        require_positive("a", a)?;
        require_positive("b", b)?;
        if b <= a {
            return Err(Error::Domain {
                what: "b",
                value: b,
                reason: "outer radius must exceed the inner radius",
            });
        }
        let d = b - a;
        let mean = (a * b).sqrt();
        let eta = d / mean;
        Ok(Self {
            a,
            b,
            d,
            lambda: a / b,
            eta,
            xi: 2.0 * eta,
        })
    }

    /// Geometry with inner radius `a` and the given `η = d/sqrt(ab)`.
    pub fn from_eta(a: f64, eta: f64) -> Result<Self> {
        require_positive("eta", eta)?;
        // With r = b/a, η = (r − 1)/sqrt(r), so sqrt(r) = (η + sqrt(η² + 4))/2.
        let root = 0.5 * (eta + (eta * eta + 4.0).sqrt());
        Self::new(a, a * root * root)
    }

    /// Geometry with geometric-mean radius `sqrt(ab) = mean` and gap `d`.
    pub fn from_mean_and_gap(mean: f64, d: f64) -> Result<Self> {
        require_positive("mean radius", mean)?;
        require_positive("d", d)?;
        let a = (0.25 * d * d + mean * mean).sqrt() - 0.5 * d;
        Self::new(a, a + d)
    }

    /// Geometry with both radii multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.a * k, self.b * k)
    }

    pub fn mean_radius(&self) -> f64 {
        (self.a * self.b).sqrt()
    }
}

/// Which closed surfaces bound the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    FullSphere,
    HalfSphere,
}

/// One normal mode label together with its counting weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    pub ell: u32,
    pub nu: f64,
    pub n: u32,
    /// Number of azimuthal states: `2ℓ + 1` for full spheres, `ℓ` for half spheres.
    pub degeneracy: f64,
}

impl Mode {
    pub fn new(variant: Variant, ell: u32, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("radial index n starts at 1".into()));
        }
        let degeneracy = match variant {
            Variant::FullSphere => f64::from(2 * ell + 1),
            Variant::HalfSphere if ell == 0 => {
                return Err(Error::Argument("half-sphere modes start at ell = 1".into()))
            }
            Variant::HalfSphere => f64::from(ell),
        };
        Ok(Self {
            ell,
            nu: f64::from(ell) + 0.5,
            n,
            degeneracy,
        })
    }

    /// Weight of `ω` in the zero-point sum `½ Σ degeneracy · ω`.
    pub fn energy_weight(&self) -> f64 {
        0.5 * self.degeneracy
    }
}

/// Numerical roots of the frequency equation for one `ℓ`, alongside the
/// evenly spaced asymptotic prediction for the same `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootTable {
    pub geometry: Geometry,
    pub ell: u32,
    pub roots: Vec<f64>,
    pub asymptotic: Vec<f64>,
}

impl RootTable {
    /// `|ω − ω̃| / ω` for each `n`.
    pub fn relative_deviation(&self) -> Vec<f64> {
        self.roots
            .iter()
            .zip(&self.asymptotic)
            .map(|(w, wt)| ((w - wt) / w).abs())
            .collect()
    }
}

/// The frequency function `J_ν(ωb)N_ν(ωa) − J_ν(ωa)N_ν(ωb)` for arbitrary
/// positive radii (no ordering required; swapping them flips the sign).
pub fn freq_fn_radii(a: f64, b: f64, ell: u32, omega: f64) -> Result<f64> {
    require_positive("omega", omega)?;
    let at_a = eval_ordinary(ell, omega * a)?;
    let at_b = eval_ordinary(ell, omega * b)?;
    Ok(at_b.j_val * at_a.y_val - at_a.j_val * at_b.y_val)
}

pub fn freq_fn(geometry: &Geometry, ell: u32, omega: f64) -> Result<f64> {
    freq_fn_radii(geometry.a, geometry.b, ell, omega)
}

/// Frequency function multiplied by `(π/2) ω sqrt(ab)`; same zeros and signs,
/// `O(1)` amplitude. For `ℓ = 0` it is exactly `−sin(ωd)`.
fn normalized_freq_fn(geometry: &Geometry, ell: u32, omega: f64) -> Result<f64> {
    Ok(freq_fn(geometry, ell, omega)? * 0.5 * PI * omega * geometry.mean_radius())
}

/// `ω̃ = sqrt((nπ/d)² + ν²/(ab))`.
pub fn asymptotic_spectrum(geometry: &Geometry, ell: u32, n: u32) -> f64 {
    let nu = f64::from(ell) + 0.5;
    let radial = f64::from(n) * PI / geometry.d;
    (radial * radial + nu * nu / (geometry.a * geometry.b)).sqrt()
}

/// The first `n_max` positive roots of the frequency equation.
///
/// The scan starts just below the variational lower bound
/// `sqrt((π/d)² + ℓ(ℓ+1)/b²)`, under which no eigenfrequency exists, and steps
/// by a fraction of the smallest expected spacing. Every sign change is
/// refined by bisection to near machine precision. If two roots come closer
/// than two scan steps the scan is repeated with half the step.
pub fn find_roots(geometry: &Geometry, ell: u32, n_max: usize) -> Result<RootTable> {
    if n_max == 0 || n_max > MAX_ROOTS {
        return Err(Error::Argument(format!(
            "n_max must lie in 1..={MAX_ROOTS}, got {n_max}"
        )));
    }
    if ell > MAX_ELL {
        return Err(Error::Argument(format!(
            "ell = {ell} exceeds the supported maximum {MAX_ELL}"
        )));
    }
    let ell_f = f64::from(ell);
    let radial = PI / geometry.d;
    let lower_bound = (radial * radial + ell_f * (ell_f + 1.0) / (geometry.b * geometry.b)).sqrt();
    let start = lower_bound * (1.0 - 1e-3);

    let first_gap = asymptotic_spectrum(geometry, ell, 2) - asymptotic_spectrum(geometry, ell, 1);
    let mut step = SCAN_FRACTION * radial.min(first_gap);

    for _ in 0..=MAX_STEP_HALVINGS {
        let roots = scan(geometry, ell, n_max, start, step)?;
        let min_gap = roots
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if min_gap >= 2.0 * step {
            let asymptotic = (1..=n_max as u32)
                .map(|n| asymptotic_spectrum(geometry, ell, n))
                .collect();
            return Ok(RootTable {
                geometry: *geometry,
                ell,
                roots,
                asymptotic,
            });
        }
        step *= 0.5;
    }
    Err(Error::BracketMiss {
        ell,
        lo: start,
        hi: start + step * (n_max as f64) * 2.0,
        reason: "roots remain closer than two scan steps after repeated refinement".into(),
    })
}

fn scan(geometry: &Geometry, ell: u32, n_max: usize, start: f64, step: f64) -> Result<Vec<f64>> {
    let mut roots = Vec::with_capacity(n_max);
    let mut lo = start;
    let mut f_lo = normalized_freq_fn(geometry, ell, lo)?;
    // Generous cap: the asymptotic count up to ω grows like ωd/π.
    let max_steps = ((n_max as f64 + 2.0) * PI / geometry.d / step * 4.0) as usize + 1000;
    for _ in 0..max_steps {
        if roots.len() == n_max {
            return Ok(roots);
        }
        let hi = lo + step;
        let f_hi = normalized_freq_fn(geometry, ell, hi)?;
        if f_lo == 0.0 {
            roots.push(lo);
        } else if f_lo.signum() != f_hi.signum() && f_hi != 0.0 {
            roots.push(bisect(geometry, ell, lo, hi, f_lo)?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::BracketMiss {
        ell,
        lo: start,
        hi: lo,
        reason: format!("found only {} of {n_max} roots", roots.len()),
    })
}

fn bisect(geometry: &Geometry, ell: u32, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    // Interval width shrinks to a few ulps; the 1e−12 relative requirement
    // is met with a wide margin.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= 4.0 * f64::EPSILON * mid {
            return Ok(mid);
        }
        let f_mid = normalized_freq_fn(geometry, ell, mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Two-term Hankel approximations of `J_ν(x)` and `N_ν(x)` for large `x`:
///
/// ```text
/// J ≈ sqrt(2/πx) [cos χ − μ sin χ],   N ≈ sqrt(2/πx) [sin χ + μ cos χ],
/// χ = x − νπ/2 − π/4,   μ = (4ν² − 1)/(8x).
/// ```
///
/// For `ℓ ≤ 1` the expansion terminates and the result is exact.
pub fn hankel_large_arg(ell: u32, x: f64) -> Result<(f64, f64)> {
    let nu = f64::from(ell) + 0.5;
    let floor = 10.0_f64.max(3.0 * nu);
    if x.is_nan() || x < floor {
        return Err(Error::Argument(format!(
            "Hankel expansion needs x >= {floor} for ell = {ell}, got {x}"
        )));
    }
    let amp = (2.0 / (PI * x)).sqrt();
    let chi = x - 0.5 * nu * PI - 0.25 * PI;
    let mu = (4.0 * nu * nu - 1.0) / (8.0 * x);
    let (s, c) = chi.sin_cos();
    Ok((amp * (c - mu * s), amp * (s + mu * c)))
}
