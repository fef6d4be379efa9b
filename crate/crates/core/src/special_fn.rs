//! Half-integer order Bessel functions and the few zeta values the energies need.
//!
//! Orders are always `ν = ℓ + 1/2`, so every function has an elementary seed
//! at `ν = ±1/2` and the rest follows from the three-term recurrence
//!
//! ```text
//! C_{ν+1}(x) = (2ν/x) C_ν(x) − C_{ν−1}(x)      (J, N)
//! I_{ν−1}(x) = (2ν/x) I_ν(x) + I_{ν+1}(x)      (I, downward)
//! K_{ν+1}(x) = (2ν/x) K_ν(x) + K_{ν−1}(x)      (K, upward)
//! ```
//!
//! run in the direction in which the wanted solution is dominant. Modified
//! functions are returned with the exponential factors `e^{−x}` and `e^{x}`
//! split off; consumers recombine them explicitly.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{require_positive, Error, Result};

/// Largest angular index supported by the Bessel evaluators.
pub const MAX_ELL: u32 = 200;

/// ζ(3), Apéry's constant.
pub const APERY: f64 = 1.202_056_903_159_594_285_4;

// Values beyond this are reported as range errors rather than returned.
const OVERFLOW_GUARD: f64 = 1e300;
const RESCALE_AT: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_{ℓ+1/2}(x)` and `N_{ℓ+1/2}(x)` together with the order `ℓ − 1/2`
/// companions, which give the derivatives without a second evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrdinaryBesselPair {
    pub order_ell: u32,
    pub argument: f64,
    pub j_val: f64,
    pub y_val: f64,
    /// `J_{ℓ−1/2}(x)`.
    pub j_prev: f64,
    /// `N_{ℓ−1/2}(x)`.
    pub y_prev: f64,
}

impl OrdinaryBesselPair {
    pub fn nu(&self) -> f64 {
        f64::from(self.order_ell) + 0.5
    }

    pub fn j_deriv(&self) -> f64 {
        self.j_prev - self.nu() / self.argument * self.j_val
    }

    pub fn y_deriv(&self) -> f64 {
        self.y_prev - self.nu() / self.argument * self.y_val
    }

    /// `J N' − J' N`, which should equal `2/(πx)`.
    pub fn wronskian(&self) -> f64 {
        // The ν/x terms cancel identically.
        self.j_val * self.y_prev - self.j_prev * self.y_val
    }
}

/// `e^{−x} I_{ℓ+1/2}(x)` and `e^{x} K_{ℓ+1/2}(x)`, with the order `ℓ − 1/2`
/// companions under the same scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledBesselPair {
    pub order_ell: u32,
    pub argument: f64,
    pub i_scaled: f64,
    pub k_scaled: f64,
    pub i_scaled_prev: f64,
    pub k_scaled_prev: f64,
}

impl ScaledBesselPair {
    pub fn nu(&self) -> f64 {
        f64::from(self.order_ell) + 0.5
    }

    /// `e^{−x} I'_ν(x)`.
    pub fn i_scaled_deriv(&self) -> f64 {
        self.i_scaled_prev - self.nu() / self.argument * self.i_scaled
    }

    /// `e^{x} K'_ν(x)`.
    pub fn k_scaled_deriv(&self) -> f64 {
        -self.k_scaled_prev - self.nu() / self.argument * self.k_scaled
    }

    /// `I K' − I' K` after unscaling, which should equal `−1/x`.
    pub fn wronskian(&self) -> f64 {
        -(self.i_scaled * self.k_scaled_prev + self.i_scaled_prev * self.k_scaled)
    }
}

fn check_order(ell: u32) -> Result<()> {
    if ell > MAX_ELL {
        return Err(Error::Argument(format!(
            "angular index {ell} exceeds the supported maximum {MAX_ELL}"
        )));
    }
    Ok(())
}

/// Starting order for Miller's backward recurrence: far enough above both the
/// requested order and the turning point that the truncation is invisible.
fn miller_start(ell: u32, x: f64) -> u32 {
    let ell = f64::from(ell);
    (ell + 30.0 + (160.0 * (ell + 1.0)).sqrt() + (50.0 * x).sqrt()).ceil() as u32
}

/// Evaluates `J_{ℓ+1/2}(x)` and `N_{ℓ+1/2}(x)`.
///
/// `N` is always built by upward recurrence. `J` goes upward while
/// `ℓ + 1/2 ≤ x` and otherwise uses a normalized Miller backward recurrence.
pub fn eval_ordinary(ell: u32, x: f64) -> Result<OrdinaryBesselPair> {
    require_positive("x", x)?;
    check_order(ell)?;

    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = x.sin_cos();

    // Order −1/2 and +1/2 seeds.
    let (mut y_prev, mut y_val) = (amp * s, -amp * c);
    for k in 0..ell {
        let nu = f64::from(k) + 0.5;
        let next = 2.0 * nu / x * y_val - y_prev;
        y_prev = y_val;
        y_val = next;
        if !next.is_finite() || next.abs() > OVERFLOW_GUARD {
            return Err(Error::Range(format!(
                "N_(ell+1/2)(x) overflows for ell = {ell}, x = {x:e}"
            )));
        }
    }

    let nu = f64::from(ell) + 0.5;
    let (j_prev, j_val) = if nu <= x {
        let (mut prev, mut cur) = (amp * c, amp * s);
        for k in 0..ell {
            let nu_k = f64::from(k) + 0.5;
            let next = 2.0 * nu_k / x * cur - prev;
            prev = cur;
            cur = next;
        }
        (prev, cur)
    } else {
        miller_ordinary(ell, x, amp, s, c)
    };

    if j_val == 0.0 || !j_val.is_normal() || !j_prev.is_normal() {
        return Err(Error::Range(format!(
            "J_(ell+1/2)(x) underflows for ell = {ell}, x = {x:e}"
        )));
    }

    Ok(OrdinaryBesselPair {
        order_ell: ell,
        argument: x,
        j_val,
        y_val,
        j_prev,
        y_prev,
    })
}

/// Backward recurrence for `J`, returning `(J_{ℓ−1/2}, J_{ℓ+1/2})`.
fn miller_ordinary(ell: u32, x: f64, amp: f64, s: f64, c: f64) -> (f64, f64) {
    let top = miller_start(ell, x);
    // f_hi holds order k + 3/2, f_mid order k + 1/2.
    let (mut f_hi, mut f_mid) = (0.0_f64, 1e-30_f64);
    let mut at_ell = if ell == top { Some(f_mid) } else { None };
    let mut at_ell_prev = None;
    for k in (0..=top).rev() {
        let mu = f64::from(k) + 0.5;
        let f_lo = 2.0 * mu / x * f_mid - f_hi;
        f_hi = f_mid;
        f_mid = f_lo;
        // f_mid is now order k − 1/2.
        if k == ell + 1 {
            at_ell = Some(f_mid);
        } else if k == ell {
            at_ell_prev = Some(f_mid);
        }
        if f_mid.abs() > RESCALE_AT {
            f_mid *= RESCALE_BY;
            f_hi *= RESCALE_BY;
            at_ell = at_ell.map(|v| v * RESCALE_BY);
            at_ell_prev = at_ell_prev.map(|v| v * RESCALE_BY);
        }
    }
    // f_hi is order 1/2 and f_mid order −1/2.
    let scale = if s.abs() >= c.abs() {
        amp * s / f_hi
    } else {
        amp * c / f_mid
    };
    let j_val = at_ell.unwrap_or(0.0) * scale;
    let j_prev = at_ell_prev.unwrap_or(0.0) * scale;
    (j_prev, j_val)
}

/// Evaluates `e^{−x} I_{ℓ+1/2}(x)` and `e^{x} K_{ℓ+1/2}(x)`.
///
/// Scaled values stay representable for `x` up to 700 and `ℓ` up to 200
/// except deep in the small-argument regime, where `K` itself exceeds the
/// double range; that case is a range error.
pub fn eval_modified_scaled(ell: u32, x: f64) -> Result<ScaledBesselPair> {
    require_positive("x", x)?;
    check_order(ell)?;

    // e^{x} K_{±1/2}(x) = sqrt(π/(2x)) exactly.
    let k_half = (PI / (2.0 * x)).sqrt();
    let (mut k_prev, mut k_val) = (k_half, k_half);
    for k in 0..ell {
        let nu = f64::from(k) + 0.5;
        let next = 2.0 * nu / x * k_val + k_prev;
        k_prev = k_val;
        k_val = next;
        if !next.is_finite() || next > OVERFLOW_GUARD {
            return Err(Error::Range(format!(
                "K_(ell+1/2)(x) overflows for ell = {ell}, x = {x:e}"
            )));
        }
    }

    // I by backward recurrence, normalized at order −1/2 where
    // e^{−x} I_{−1/2}(x) = (1 + e^{−2x}) / sqrt(2πx) has no cancellation.
    let top = miller_start(ell, x);
    let (mut f_hi, mut f_mid) = (0.0_f64, 1e-30_f64);
    let mut at_ell = if ell == top { Some(f_mid) } else { None };
    let mut at_ell_prev = None;
    for k in (0..=top).rev() {
        let mu = f64::from(k) + 0.5;
        let f_lo = 2.0 * mu / x * f_mid + f_hi;
        f_hi = f_mid;
        f_mid = f_lo;
        if k == ell + 1 {
            at_ell = Some(f_mid);
        } else if k == ell {
            at_ell_prev = Some(f_mid);
        }
        if f_mid > RESCALE_AT {
            f_mid *= RESCALE_BY;
            f_hi *= RESCALE_BY;
            at_ell = at_ell.map(|v| v * RESCALE_BY);
            at_ell_prev = at_ell_prev.map(|v| v * RESCALE_BY);
        }
    }
    let i_minus_half = (1.0 + (-2.0 * x).exp()) / (2.0 * PI * x).sqrt();
    let scale = i_minus_half / f_mid;
    let i_val = at_ell.unwrap_or(0.0) * scale;
    let i_prev = at_ell_prev.unwrap_or(0.0) * scale;
    if !i_val.is_normal() || !i_prev.is_normal() {
        return Err(Error::Range(format!(
            "I_(ell+1/2)(x) underflows for ell = {ell}, x = {x:e}"
        )));
    }

    Ok(ScaledBesselPair {
        order_ell: ell,
        argument: x,
        i_scaled: i_val,
        k_scaled: k_val,
        i_scaled_prev: i_prev,
        k_scaled_prev: k_prev,
    })
}

/// Riemann ζ(s) for s ∈ {2, 3, 4}.
pub fn riemann_zeta_small(s: u32) -> Result<f64> {
    match s {
        2 => Ok(PI * PI / 6.0),
        3 => Ok(APERY),
        4 => Ok(PI.powi(4) / 90.0),
        _ => Err(Error::Argument(format!(
            "zeta({s}) is not tabulated; supported arguments are 2, 3, 4"
        ))),
    }
}

// B_n(x) = Σ_k coeff[k] x^k with rational coefficients (numerator, denominator),
// lowest power first.
const BERNOULLI_POLY: [&[(i64, i64)]; 8] = [
    &[(1, 1)],
    &[(-1, 2), (1, 1)],
    &[(1, 6), (-1, 1), (1, 1)],
    &[(0, 1), (1, 2), (-3, 2), (1, 1)],
    &[(-1, 30), (0, 1), (1, 1), (-2, 1), (1, 1)],
    &[(0, 1), (-1, 6), (0, 1), (5, 3), (-5, 2), (1, 1)],
    &[(1, 42), (0, 1), (-1, 2), (0, 1), (5, 2), (-3, 1), (1, 1)],
    &[
        (0, 1),
        (1, 6),
        (0, 1),
        (-7, 6),
        (0, 1),
        (7, 2),
        (-7, 2),
        (1, 1),
    ],
];

/// Bernoulli polynomial `B_n(x)` for `n ≤ 7`.
pub fn bernoulli_polynomial(n: usize, x: f64) -> Result<f64> {
    let coeffs = BERNOULLI_POLY.get(n).ok_or_else(|| {
        Error::Argument(format!(
            "Bernoulli polynomial B_{n} is not tabulated (n <= 7)"
        ))
    })?;
    Ok(coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, &(num, den)| acc * x + num as f64 / den as f64))
}

/// Hurwitz `ζ(−m, q) = −B_{m+1}(q) / (m + 1)` for `m ≤ 6`, `q ∈ (0, 1]`.
pub fn hurwitz_zeta_neg(m: u32, q: f64) -> Result<f64> {
    if m > 6 {
        return Err(Error::Argument(format!(
            "zeta(-{m}, q) needs B_{} which is not tabulated (m <= 6)",
            m + 1
        )));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain {
            what: "q",
            value: q,
            reason: "must lie in (0, 1]",
        });
    }
    let n = m as usize + 1;
    Ok(-bernoulli_polynomial(n, q)? / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn j_half_vanishes_at_pi() {
        let p = eval_ordinary(0, PI).unwrap();
        assert!(p.j_val.abs() < 1e-16);
    }

    #[test]
    fn j_half_at_one() {
        let p = eval_ordinary(0, 1.0).unwrap();
        assert!(rel(p.j_val, 0.671_396_707_141_803_1) < 1e-15);
        assert!(rel(p.y_val, -0.431_098_868_018_376_08) < 1e-15);
    }

    #[test]
    fn ordinary_against_reference_values() {
        // (ell, x, J, N) from 40-digit arithmetic.
        let cases = [
            (5, 10.0, -0.140_120_932_366_592_53, 0.236_754_460_665_841_46),
            (5, 0.5, 1.679_855_796_491_575_4e-6, -34_600.372_323_177_52),
            (20, 3.0, 3.308_762_819_568_148_4e-16, -47_439_864_774_214.91),
            (
                20,
                50.0,
                -0.089_057_494_445_934_37,
                0.077_629_842_353_930_45,
            ),
            (50, 30.0, 1.175_653_659_505_305_4e-8, -666_679.923_740_873_5),
            (
                100,
                1000.0,
                -0.006_390_163_952_960_383,
                -0.024_474_988_493_919_557,
            ),
            (
                3,
                1e4,
                -0.007_595_636_468_651_102,
                -0.002_443_007_919_056_848,
            ),
        ];
        for (ell, x, j, y) in cases {
            let p = eval_ordinary(ell, x).unwrap();
            assert!(
                rel(p.j_val, j) < 1e-12,
                "J ell={ell} x={x}: {} vs {j}",
                p.j_val
            );
            assert!(
                rel(p.y_val, y) < 1e-12,
                "N ell={ell} x={x}: {} vs {y}",
                p.y_val
            );
        }
    }

    #[test]
    fn modified_against_reference_values() {
        let cases = [
            (0, 1.0, 0.344_951_313_888_244_63, 1.253_314_137_315_500_3),
            (5, 0.5, 1.038_667_604_368_315_8e-6, 87_153.328_302_875_13),
            (
                20,
                3.0,
                2.030_870_782_434_185_9e-17,
                1.188_289_373_658_731_6e15,
            ),
            (
                50,
                300.0,
                3.295_155_743_416_560_1e-4,
                4.987_762_342_455_745_5,
            ),
            (
                100,
                700.0,
                1.117_807_485_186_525_8e-5,
                63.252_042_004_430_39,
            ),
            (
                10,
                1e-3,
                1.833_263_341_962_052_3e-42,
                2.597_501_750_629_406_7e40,
            ),
        ];
        for (ell, x, i, k) in cases {
            let p = eval_modified_scaled(ell, x).unwrap();
            assert!(
                rel(p.i_scaled, i) < 1e-12,
                "I ell={ell} x={x}: {} vs {i}",
                p.i_scaled
            );
            assert!(
                rel(p.k_scaled, k) < 1e-12,
                "K ell={ell} x={x}: {} vs {k}",
                p.k_scaled
            );
        }
    }

    #[test]
    fn k_half_is_exact() {
        for x in [1e-3, 0.7, 13.0, 650.0] {
            let p = eval_modified_scaled(0, x).unwrap();
            assert_eq!(p.k_scaled, (PI / (2.0 * x)).sqrt());
        }
    }

    #[test]
    fn i_half_closed_form() {
        // I_{1/2}(1) = sqrt(2/π) sinh 1.
        let p = eval_modified_scaled(0, 1.0).unwrap();
        let expected = (-1.0_f64).exp() * (2.0 / PI).sqrt() * 1.0_f64.sinh();
        assert!(rel(p.i_scaled, expected) < 1e-14);
    }

    #[test]
    fn ell_zero_matches_elementary_forms() {
        for x in log_grid(1e-2, 700.0, 60) {
            let o = eval_ordinary(0, x).unwrap();
            let amp = (2.0 / (PI * x)).sqrt();
            assert!((o.j_val - amp * x.sin()).abs() <= 1e-14 * amp);
            assert!((o.y_val + amp * x.cos()).abs() <= 1e-14 * amp);

            let m = eval_modified_scaled(0, x).unwrap();
            let i_ref = -(-2.0 * x).exp_m1() / (2.0 * PI * x).sqrt();
            assert!(rel(m.i_scaled, i_ref) < 1e-14, "x={x}");
        }
    }

    #[test]
    fn wronskian_residual_at_ell_5() {
        let p = eval_ordinary(5, 10.0).unwrap();
        let w = p.j_val * p.y_deriv() - p.j_deriv() * p.y_val;
        assert!((w - 2.0 / (PI * 10.0)).abs() < 1e-14);
    }

    #[test]
    fn modified_wronskian_at_ell_50() {
        let p = eval_modified_scaled(50, 300.0).unwrap();
        assert!(rel(p.wronskian(), -1.0 / 300.0) < 1e-12);
    }

    #[test]
    fn wronskian_grids() {
        for ell in [0, 1, 5, 20, 50, 100] {
            let nu = f64::from(ell) + 0.5;
            for x in log_grid(1e-2, 1e4, 90) {
                match eval_ordinary(ell, x) {
                    Ok(p) => {
                        let expect = 2.0 / (PI * x);
                        assert!(rel(p.wronskian(), expect) < 1e-12, "ell={ell} x={x}");
                    }
                    Err(Error::Range(_)) => assert!(x < nu / 10.0, "ell={ell} x={x}"),
                    Err(e) => panic!("{e}"),
                }
            }
            for x in log_grid(1e-3, 700.0, 90) {
                match eval_modified_scaled(ell, x) {
                    Ok(p) => {
                        assert!(p.i_scaled > 0.0 && p.k_scaled > 0.0);
                        assert!(rel(p.wronskian(), -1.0 / x) < 1e-12, "ell={ell} x={x}");
                    }
                    Err(Error::Range(_)) => assert!(x < nu / 10.0, "ell={ell} x={x}"),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn max_order_domain() {
        assert!(eval_modified_scaled(200, 700.0).is_ok());
        assert!(eval_modified_scaled(200, 50.0).is_ok());
        assert!(matches!(
            eval_modified_scaled(200, 0.1),
            Err(Error::Range(_))
        ));
        assert!(matches!(eval_ordinary(201, 1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn rejects_non_positive_argument() {
        for x in [0.0, -1.0, f64::NAN] {
            assert!(matches!(eval_ordinary(0, x), Err(Error::Domain { .. })));
            assert!(matches!(
                eval_modified_scaled(3, x),
                Err(Error::Domain { .. })
            ));
        }
    }

    #[test]
    fn ordinary_overflow_is_range_error() {
        assert!(matches!(eval_ordinary(100, 1e-2), Err(Error::Range(_))));
    }

    #[test]
    fn zeta_values() {
        assert!(rel(riemann_zeta_small(2).unwrap(), 1.644_934_066_848_226_4) < 1e-15);
        assert!(rel(riemann_zeta_small(4).unwrap(), 1.082_323_233_711_138_2) < 1e-15);
        assert!(riemann_zeta_small(5).is_err());
        assert!(riemann_zeta_small(1).is_err());
    }

    #[test]
    fn zeta3_against_partial_sums() {
        // Partial sum plus the Euler-Maclaurin tail 1/(2N²) − 1/(2N³) + 1/(4N⁴);
        // the neglected remainder is O(N^-6).
        let n = 2000_u32;
        let partial: f64 = (1..n).map(|k| 1.0 / f64::from(k).powi(3)).sum();
        let nf = f64::from(n);
        let tail = 1.0 / (2.0 * nf * nf) + 1.0 / (2.0 * nf.powi(3)) + 1.0 / (4.0 * nf.powi(4));
        let oracle = partial + tail;
        assert!((riemann_zeta_small(3).unwrap() - oracle).abs() < 1e-13);
        assert!((APERY - 1.202_056_903_2).abs() < 1e-10);
    }

    #[test]
    fn hurwitz_examples() {
        assert_eq!(hurwitz_zeta_neg(2, 0.5).unwrap(), 0.0);
        assert_eq!(hurwitz_zeta_neg(0, 0.5).unwrap(), 0.0);
        assert!((hurwitz_zeta_neg(1, 0.5).unwrap() - 1.0 / 24.0).abs() < 1e-16);
        // ζ(−m, 1) = ζ(−m).
        assert!((hurwitz_zeta_neg(0, 1.0).unwrap() + 0.5).abs() < 1e-16);
        assert!((hurwitz_zeta_neg(1, 1.0).unwrap() + 1.0 / 12.0).abs() < 1e-16);
        assert!((hurwitz_zeta_neg(3, 1.0).unwrap() - 1.0 / 120.0).abs() < 1e-16);
        assert!(hurwitz_zeta_neg(7, 0.5).is_err());
        assert!(hurwitz_zeta_neg(1, 0.0).is_err());
    }

    #[test]
    fn hurwitz_vanishes_at_half_for_even_m() {
        for m in [2, 4, 6] {
            assert!(hurwitz_zeta_neg(m, 0.5).unwrap().abs() < 1e-16, "m={m}");
        }
    }

    /// Exact rational arithmetic oracle for the Bernoulli table:
    /// B_n(x) = Σ_k C(n,k) B_k x^{n−k} with B_k from the standard recursion.
    #[test]
    fn bernoulli_table_matches_recursion() {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        fn norm((n, d): (i128, i128)) -> (i128, i128) {
            let g = gcd(n, d).max(1);
            let s = if d < 0 { -1 } else { 1 };
            (s * n / g, s * d / g)
        }
        fn add(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
            norm((a.0 * b.1 + b.0 * a.1, a.1 * b.1))
        }
        fn binom(n: i128, k: i128) -> i128 {
            (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
        }
        // B_0..B_7 via Σ_{k<m} C(m+1,k) B_k = −(m+1) B_m.
        let mut b = vec![(1_i128, 1_i128)];
        for m in 1..8_i128 {
            let mut acc = (0, 1);
            for (k, &bk) in b.iter().enumerate() {
                acc = add(acc, norm((binom(m + 1, k as i128) * bk.0, bk.1)));
            }
            b.push(norm((-acc.0, acc.1 * (m + 1))));
        }
        for (n, row) in BERNOULLI_POLY.iter().enumerate() {
            for (power, &(num, den)) in row.iter().enumerate() {
                let k = n - power;
                let expected = norm((binom(n as i128, k as i128) * b[k].0, b[k].1));
                assert_eq!(
                    norm((num as i128, den as i128)),
                    expected,
                    "B_{n} x^{power}"
                );
            }
        }
    }
}
