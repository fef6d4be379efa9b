//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! The rule's nodes and weights are the QUADPACK ones. The error estimate is
//! the plain `|K15 − G7|`, which is pessimistic for smooth integrands, so the
//! achieved accuracy is usually far better than the requested tolerance.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4000;
const MAX_PANELS: usize = 10_000;

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    /// Real part, used only in diagnostics.
    fn re_part(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn re_part(self) -> f64 {
        self
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn re_part(self) -> f64 {
        self.re
    }
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment<T> {
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: QuadValue>(f: &impl Fn(f64) -> T, lo: f64, hi: f64) -> (T, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut k15 = fc * WGK[7];
    let mut g7 = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        k15 = k15 + pair * w;
        if j % 2 == 1 {
            g7 = g7 + pair * WG[j / 2];
        }
    }
    let k15 = k15 * half;
    let g7 = g7 * half;
    (k15, (k15 - g7).magnitude())
}

/// Integrates `f` over the finite interval `[lo, hi]` until the estimated
/// error is below `max(abs_tol, rel_tol · |I|)`.
pub fn integrate<T: QuadValue>(
    f: impl Fn(f64) -> T,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Estimate<T>> {
    let (value, error) = kronrod(&f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        lo,
        hi,
        value,
        error,
    });
    let mut total = value;
    let mut total_err = error;
    let mut previous = value;
    let mut evaluations = 15;

    loop {
        let finite = total_err.is_finite() && total.magnitude().is_finite();
        if finite && total_err <= abs_tol.max(rel_tol * total.magnitude()) {
            break;
        }
        if heap.len() >= MAX_INTERVALS || !finite {
            return Err(Error::Quadrature {
                lo,
                hi,
                last: total.re_part(),
                previous: previous.re_part(),
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval can no longer be split in double precision.
            return Err(Error::Quadrature {
                lo,
                hi,
                last: total.re_part(),
                previous: previous.re_part(),
                error: total_err,
            });
        }
        let (v1, e1) = kronrod(&f, worst.lo, mid);
        let (v2, e2) = kronrod(&f, mid, worst.hi);
        evaluations += 30;
        previous = total;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Segment {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
    }

    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().fold(T::zero(), |acc, s| acc + s.value);
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Integrates `f` over `[start, ∞)` panel by panel (each of width `width`),
/// stopping once a panel contributes less than `tail_rel` of the running
/// total. Each panel is integrated to relative tolerance `rel_tol`.
pub fn integrate_to_infinity<T: QuadValue>(
    f: impl Fn(f64) -> T,
    start: f64,
    width: f64,
    rel_tol: f64,
    tail_rel: f64,
) -> Result<Estimate<T>> {
    let mut total = T::zero();
    let mut error = 0.0;
    let mut evaluations = 0;
    for k in 0..MAX_PANELS {
        let lo = start + width * k as f64;
        let hi = lo + width;
        // Panels after the first are held to the accuracy of the running total.
        let abs_tol = rel_tol * total.magnitude();
        let panel = integrate(&f, lo, hi, rel_tol, abs_tol)?;
        total = total + panel.value;
        error += panel.error;
        evaluations += panel.evaluations;
        let scale = total.magnitude();
        if k > 0 && panel.value.magnitude() <= tail_rel * scale {
            return Ok(Estimate {
                value: total,
                error: error + panel.value.magnitude(),
                evaluations,
            });
        }
        if scale == 0.0 && k > 0 {
            return Ok(Estimate {
                value: total,
                error,
                evaluations,
            });
        }
    }
    Err(Error::Quadrature {
        lo: start,
        hi: start + width * MAX_PANELS as f64,
        last: total.re_part(),
        previous: total.re_part(),
        error,
    })
}
