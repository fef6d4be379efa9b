use casimir_core::asymptotics::{log_grid, verify_ebar_vanishes, CUTOFF_TOL};
use casimir_core::energy::{energy, plate_limit_per_area, EnergyBreakdown, EnergyMethod, Variant};
use casimir_core::regularization::{abel_plana_half_integer, abel_plana_integer, CalibrationCase};
use casimir_core::spectrum::find_roots;
use casimir_core::{Error, Geometry, Result};
use serde::Serialize;

use crate::args::{Case, Command, Lattice, MethodChoice, Shape};

/// Flat rows of one subcommand; every field is a scalar so the same rows
/// serialize to JSON objects and CSV records.
pub enum Rows {
    Roots(Vec<RootRow>),
    Spectrum(Vec<SpectrumRow>),
    Energy(Vec<EnergyRow>),
    Limit(Vec<LimitRow>),
    Calibration(Vec<CalibrationRow>),
    Ebar(Vec<EbarRow>),
}

#[derive(Debug, Serialize)]
pub struct RootRow {
    pub ell: u32,
    pub n: usize,
    pub omega_numeric: f64,
    pub omega_asymptotic: f64,
    pub rel_dev: f64,
}

#[derive(Debug, Serialize)]
pub struct SpectrumRow {
    pub ell: u32,
    pub n_max: usize,
    pub max_rel_dev: f64,
    pub rel_dev_at_n_max: f64,
    /// Whether the deviation falls strictly with n from n = 5 on.
    pub decreasing_from_n5: bool,
}

#[derive(Debug, Serialize)]
pub struct EnergyRow {
    pub variant: Variant,
    pub method: EnergyMethod,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub eta: f64,
    pub e_bar: f64,
    pub e_tilde: f64,
    pub e_total: f64,
    pub leading: f64,
    pub corr_eta_zeta3: Option<f64>,
    pub corr_eta2_zeta2: Option<f64>,
    pub corr_eta3_pi: Option<f64>,
    pub corr_eta3_inverse_pi: Option<f64>,
    pub corr_beyond_leading: Option<f64>,
    pub area: f64,
    pub per_area: f64,
    pub per_area_alt_prefactor: Option<f64>,
    pub plate_limit_per_area: f64,
    pub error_estimate: f64,
    /// `|numeric − closed| / |closed|`, on numeric rows when both were run.
    pub rel_difference: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct LimitRow {
    pub eta: f64,
    pub variant: Variant,
    pub method: EnergyMethod,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub e_total: f64,
    pub per_area: f64,
    pub plate_limit_per_area: f64,
    /// `per_area / plate`.
    pub ratio: f64,
    /// `per_area / (plate · b/a)`, which tends to 1 without the area factor.
    pub ratio_radius_adjusted: f64,
}

#[derive(Debug, Serialize)]
pub struct CalibrationRow {
    pub case: &'static str,
    pub variant: Lattice,
    pub value: f64,
    pub expected: f64,
    pub abs_error: f64,
    pub boundary_term: f64,
    pub cut_integral: f64,
    pub truncation_error_estimate: f64,
}

#[derive(Debug, Default, Serialize)]
pub struct EbarRow {
    /// `parity`, `cutoff` or `summary`.
    pub check: &'static str,
    pub ell: Option<u32>,
    pub nu: Option<f64>,
    pub even_terms: Option<usize>,
    pub even_rms: Option<f64>,
    pub odd_allowed_rms: Option<f64>,
    pub max_odd_significance: Option<f64>,
    pub n: Option<u32>,
    pub phi: Option<f64>,
    pub closed_im: Option<f64>,
    pub quadrature_re: Option<f64>,
    pub quadrature_im: Option<f64>,
    pub rel_difference: Option<f64>,
    pub real_part_rel: Option<f64>,
    pub insufficient_grid: Option<bool>,
    pub passed: bool,
}

fn variant(shape: Shape) -> Variant {
    match shape {
        Shape::Full => Variant::FullSphere,
        Shape::Half => Variant::HalfSphere,
    }
}

fn methods(choice: MethodChoice) -> &'static [EnergyMethod] {
    match choice {
        MethodChoice::ClosedForm => &[EnergyMethod::ClosedForm],
        MethodChoice::Numeric => &[EnergyMethod::Numeric],
        MethodChoice::Both => &[EnergyMethod::ClosedForm, EnergyMethod::Numeric],
    }
}

fn correction(e: &EnergyBreakdown, name: &str) -> Option<f64> {
    e.corrections
        .iter()
        .find(|c| c.name == name)
        .map(|c| c.value)
}

fn energy_row(e: &EnergyBreakdown, rel_difference: Option<f64>) -> Result<EnergyRow> {
    let g = e.geometry;
    Ok(EnergyRow {
        variant: e.variant,
        method: e.method,
        a: g.a,
        b: g.b,
        d: g.d,
        eta: g.eta,
        e_bar: e.e_bar,
        e_tilde: e.e_tilde,
        e_total: e.e_total,
        leading: e.leading,
        corr_eta_zeta3: correction(e, "eta_zeta3"),
        corr_eta2_zeta2: correction(e, "eta2_zeta2"),
        corr_eta3_pi: correction(e, "eta3_pi"),
        corr_eta3_inverse_pi: correction(e, "eta3_inverse_pi"),
        corr_beyond_leading: correction(e, "beyond_leading"),
        area: e.area,
        per_area: e.per_area,
        per_area_alt_prefactor: e.per_area_alt_prefactor,
        plate_limit_per_area: plate_limit_per_area(g.d)?,
        error_estimate: e.error_estimate,
        rel_difference,
    })
}

pub fn run(command: &Command, quad_tol: f64) -> Result<Rows> {
    match *command {
        Command::Roots { a, b, ell, n_max } => {
            let table = find_roots(&Geometry::new(a, b)?, ell, n_max)?;
            let dev = table.relative_deviation();
            Ok(Rows::Roots(
                (0..table.roots.len())
                    .map(|i| RootRow {
                        ell,
                        n: i + 1,
                        omega_numeric: table.roots[i],
                        omega_asymptotic: table.asymptotic[i],
                        rel_dev: dev[i],
                    })
                    .collect(),
            ))
        }
        Command::SpectrumCheck {
            a,
            b,
            ell_max,
            n_max,
        } => {
            let g = Geometry::new(a, b)?;
            let mut rows = Vec::new();
            for ell in 0..=ell_max {
                let dev = find_roots(&g, ell, n_max)?.relative_deviation();
                rows.push(SpectrumRow {
                    ell,
                    n_max,
                    max_rel_dev: dev.iter().copied().fold(0.0, f64::max),
                    rel_dev_at_n_max: dev[n_max - 1],
                    decreasing_from_n5: dev.len() > 5 && dev[4..].windows(2).all(|w| w[1] < w[0]),
                });
            }
            Ok(Rows::Spectrum(rows))
        }
        Command::Energy {
            a,
            b,
            variant: shape,
            method,
        } => {
            let g = Geometry::new(a, b)?;
            let results = methods(method)
                .iter()
                .map(|&m| energy(&g, variant(shape), m, quad_tol))
                .collect::<Result<Vec<_>>>()?;
            let closed = results
                .iter()
                .find(|e| e.method == EnergyMethod::ClosedForm)
                .map(|e| e.e_total);
            results
                .iter()
                .map(|e| {
                    let diff = match (e.method, closed) {
                        (EnergyMethod::Numeric, Some(c)) => Some(((e.e_total - c) / c).abs()),
                        _ => None,
                    };
                    energy_row(e, diff)
                })
                .collect::<Result<_>>()
                .map(Rows::Energy)
        }
        Command::LimitScan {
            a,
            ref eta_list,
            variant: shape,
            method,
        } => {
            if eta_list.is_empty() {
                return Err(Error::Argument("eta list is empty".into()));
            }
            let mut rows = Vec::new();
            for &eta in eta_list {
                let g = Geometry::from_eta(a, eta)?;
                let plate = plate_limit_per_area(g.d)?;
                for &m in methods(method) {
                    let e = energy(&g, variant(shape), m, quad_tol)?;
                    rows.push(LimitRow {
                        eta,
                        variant: e.variant,
                        method: m,
                        a: g.a,
                        b: g.b,
                        d: g.d,
                        e_total: e.e_total,
                        per_area: e.per_area,
                        plate_limit_per_area: plate,
                        ratio: e.per_area / plate,
                        ratio_radius_adjusted: e.per_area / (plate * g.b / g.a),
                    });
                }
            }
            Ok(Rows::Limit(rows))
        }
        Command::AbelPlana { case, variant } => {
            let cases: Vec<CalibrationCase> = match case {
                None => CalibrationCase::ALL.to_vec(),
                Some(Case::Const) => vec![CalibrationCase::Constant],
                Some(Case::Linear) => vec![CalibrationCase::Linear],
                Some(Case::Cubic) => vec![CalibrationCase::Cubic],
            };
            let lattices = match variant {
                None => vec![Lattice::Integer, Lattice::Half],
                Some(l) => vec![l],
            };
            let mut rows = Vec::new();
            for c in cases {
                for &lattice in &lattices {
                    let f = c.summand();
                    let (sum, expected) = match lattice {
                        Lattice::Integer => {
                            (abel_plana_integer(&f, quad_tol)?, c.expected_integer())
                        }
                        Lattice::Half => (
                            abel_plana_half_integer(&f, quad_tol)?,
                            c.expected_half_integer(),
                        ),
                    };
                    rows.push(CalibrationRow {
                        case: c.name(),
                        variant: lattice,
                        value: sum.value,
                        expected,
                        abs_error: (sum.value - expected).abs(),
                        boundary_term: sum.boundary_term,
                        cut_integral: sum.cut_integral,
                        truncation_error_estimate: sum.truncation_error_estimate,
                    });
                }
            }
            Ok(Rows::Calibration(rows))
        }
        Command::VerifyEbar {
            a,
            b,
            ref ell_list,
            ref y_grid,
        } => {
            let g = Geometry::new(a, b)?;
            let grid = y_grid.clone().unwrap_or_else(|| log_grid(0.01, 0.1, 24));
            let report = verify_ebar_vanishes(&g, ell_list, &grid)?;
            let mut rows = Vec::new();
            for e in &report.parity {
                rows.push(EbarRow {
                    check: "parity",
                    ell: Some(e.ell),
                    nu: Some(e.nu),
                    even_terms: Some(e.fit.even_terms),
                    even_rms: Some(e.fit.even_rms),
                    odd_allowed_rms: Some(e.fit.odd_allowed_rms),
                    max_odd_significance: Some(e.fit.max_odd_significance),
                    passed: e.fit.even_fit_at_noise && e.fit.odd_consistent_with_zero,
                    ..EbarRow::default()
                });
            }
            for c in &report.cutoff {
                rows.push(EbarRow {
                    check: "cutoff",
                    nu: Some(c.nu),
                    n: Some(c.n),
                    phi: Some(c.phi),
                    closed_im: Some(c.closed_im),
                    quadrature_re: Some(c.quadrature_re),
                    quadrature_im: Some(c.quadrature_im),
                    rel_difference: Some(c.rel_difference),
                    real_part_rel: Some(c.real_part_rel),
                    passed: c.rel_difference < CUTOFF_TOL && c.real_part_rel < CUTOFF_TOL,
                    ..EbarRow::default()
                });
            }
            rows.push(EbarRow {
                check: "summary",
                insufficient_grid: Some(report.insufficient_grid),
                passed: report.passed,
                ..EbarRow::default()
            });
            Ok(Rows::Ebar(rows))
        }
    }
}
