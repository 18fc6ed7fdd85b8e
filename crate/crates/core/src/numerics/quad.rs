//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature with
//! bisection of the worst interval, plus a semi-infinite variant that maps
//! `[a, inf)` onto `[0, 1)`.
//!
//! The rule never evaluates the interval endpoints, so integrable endpoint
//! singularities (logarithms, `ln^2`) are resolved by refinement alone.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::domain(
                "QuadratureSpec",
                format!("rel_tol must lie in (0, 1e-2], got {}", self.rel_tol),
            ));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::domain(
                "QuadratureSpec",
                format!("abs_tol must be non-negative, got {}", self.abs_tol),
            ));
        }
        if self.max_subdivisions < 10 {
            return Err(Error::domain(
                "QuadratureSpec",
                format!("max_subdivisions must be at least 10, got {}", self.max_subdivisions),
            ));
        }
        Ok(())
    }

    /// Default for integrals nested inside another integral.
    pub const INNER: QuadratureSpec = QuadratureSpec {
        rel_tol: 1e-8,
        abs_tol: 0.0,
        max_subdivisions: 500,
    };

    /// Default for the outermost (angular) integral of a rate.
    pub const OUTER: QuadratureSpec = QuadratureSpec {
        rel_tol: 1e-7,
        abs_tol: 0.0,
        max_subdivisions: 500,
    };

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureSpec { rel_tol, ..self }
    }

    pub(crate) fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::INNER
    }
}

/// Tolerances for a rate that nests inner integrals inside an outer one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedSpec {
    pub outer: QuadratureSpec,
    pub inner: QuadratureSpec,
}

impl NestedSpec {
    /// Outer tolerance `rel_tol`, inner integrals ten times tighter.
    pub fn from_rel_tol(rel_tol: f64) -> Result<Self> {
        let spec = NestedSpec {
            outer: QuadratureSpec::OUTER.with_rel_tol(rel_tol),
            inner: QuadratureSpec::INNER.with_rel_tol(rel_tol / 10.0),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.outer.validate()?;
        self.inner.validate()
    }
}

impl Default for NestedSpec {
    fn default() -> Self {
        NestedSpec {
            outer: QuadratureSpec::OUTER,
            inner: QuadratureSpec::INNER,
        }
    }
}

/// Result of an integration: value, error estimate, integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_565,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gauss_kronrod_21<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain("quadrature", format!("integrand is {v} at x = {x:e}")))
        }
    };

    let f_center = eval(center)?;
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_kronrod * half;
    let abs_half = half.abs();
    let error = rescale_error((res_kronrod - res_gauss) * half, res_abs * abs_half, res_asc * abs_half);
    Ok(Segment { a, b, value, error })
}

/// Adaptive integration of a fallible integrand over `[a, b]`.
pub fn try_integrate_1d<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::domain(
            "integrate_1d",
            format!("need finite a < b, got [{a}, {b}]"),
        ));
    }

    let first = gauss_kronrod_21(&mut f, a, b)?;
    let mut evaluations = 21;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Segments too narrow to split further; their error is frozen.
    let mut frozen_err = 0.0;

    let mut subdivisions = 1;
    while total_err > spec.tolerance_for(total) {
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence {
                context: format!("integrate_1d on [{a:e}, {b:e}]"),
                estimate: total,
                error: total_err,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b)
            || (worst.b - worst.a) < 100.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE)
        {
            frozen_err += worst.error;
            if heap.is_empty() || frozen_err > spec.tolerance_for(total) {
                return Err(Error::Convergence {
                    context: format!("integrate_1d on [{a:e}, {b:e}] (round-off limit)"),
                    estimate: total,
                    error: total_err,
                    evaluations,
                });
            }
            continue;
        }
        let left = gauss_kronrod_21(&mut f, worst.a, mid)?;
        let right = gauss_kronrod_21(&mut f, mid, worst.b)?;
        evaluations += 42;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in a fixed order to shed accumulated update error.
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().map(|s| s.value).sum::<f64>();
    let error = segments.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    Ok(Estimate {
        value: if frozen_err > 0.0 { total } else { value },
        error,
        evaluations,
    })
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_1d(|x| Ok(f(x)), a, b, spec)
}

/// Fallible integral over `[a, inf)` via `x = a + t / (1 - t)`.
pub fn try_integrate_semi_infinite<F>(mut f: F, a: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !a.is_finite() {
        return Err(Error::domain("integrate_semi_infinite", format!("lower limit {a}")));
    }
    try_integrate_1d(
        |t| {
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            if x.is_infinite() {
                return Ok(0.0);
            }
            let v = f(x)?;
            Ok(if v == 0.0 { 0.0 } else { v / (one_minus * one_minus) })
        },
        0.0,
        1.0,
        spec,
    )
}

/// Integral of `f` over `[a, inf)`.
pub fn integrate_semi_infinite<F>(mut f: F, a: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semi_infinite(|x| Ok(f(x)), a, spec)
}
