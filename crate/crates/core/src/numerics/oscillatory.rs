//! Semi-infinite integrals of slowly decaying integrands carrying a
//! `sin(b x)` factor.
//!
//! The half-line is cut at the zeros `k pi / b` of the sine. Each
//! half-period is integrated adaptively, giving an alternating series whose
//! partial sums are accelerated by repeated pairwise averaging (an Euler
//! transform). The series is also truncated outright once the envelope
//! bound `C / (1 + x)` on the remaining tail drops below tolerance.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::quad::{try_integrate_1d, try_integrate_semi_infinite, Estimate, QuadratureSpec};

const MIN_TERMS: usize = 6;
const MAX_TERMS: usize = 2000;
const AVERAGING_WINDOW: usize = 24;

/// Collapse a window of partial sums by averaging neighbours until one value remains.
fn iterated_average(sums: &[f64]) -> f64 {
    let mut v = sums.to_vec();
    while v.len() > 1 {
        for i in 0..v.len() - 1 {
            v[i] = 0.5 * (v[i] + v[i + 1]);
        }
        v.pop();
    }
    v[0]
}

/// Fallible variant of [`integrate_semi_infinite_oscillatory`].
pub fn try_integrate_semi_infinite_oscillatory<F>(
    mut f: F,
    wavenumber: f64,
    envelope: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(wavenumber >= 0.0) || !wavenumber.is_finite() {
        return Err(Error::domain(
            "integrate_semi_infinite_oscillatory",
            format!("wavenumber must be non-negative, got {wavenumber}"),
        ));
    }
    if !(envelope >= 0.0) || !envelope.is_finite() {
        return Err(Error::domain(
            "integrate_semi_infinite_oscillatory",
            format!("envelope constant must be non-negative, got {envelope}"),
        ));
    }
    if wavenumber == 0.0 {
        return try_integrate_semi_infinite(f, 0.0, spec);
    }

    let half_period = PI / wavenumber;
    let mut partial_sums: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut segment_error = 0.0;
    let mut evaluations = 0;
    let mut previous: Option<f64> = None;

    for k in 0..MAX_TERMS {
        let lo = k as f64 * half_period;
        let hi = (k + 1) as f64 * half_period;
        let seg = try_integrate_1d(&mut f, lo, hi, spec).map_err(|e| e.context("oscillatory half-period"))?;
        sum += seg.value;
        segment_error += seg.error;
        evaluations += seg.evaluations;
        partial_sums.push(sum);

        // Remaining tail is bounded by the envelope.
        let tail_bound = envelope / (1.0 + hi);
        if tail_bound <= 0.1 * spec.tolerance_for(sum) {
            return Ok(Estimate {
                value: sum,
                error: segment_error + tail_bound,
                evaluations,
            });
        }

        if partial_sums.len() >= MIN_TERMS {
            let start = partial_sums.len().saturating_sub(AVERAGING_WINDOW);
            let accelerated = iterated_average(&partial_sums[start..]);
            if let Some(prev) = previous {
                let change = (accelerated - prev).abs();
                if change <= 0.1 * spec.tolerance_for(accelerated) {
                    return Ok(Estimate {
                        value: accelerated,
                        error: segment_error + change,
                        evaluations,
                    });
                }
            }
            previous = Some(accelerated);
        }
    }

    Err(Error::Convergence {
        context: format!("oscillatory tail with wavenumber {wavenumber:e}"),
        estimate: previous.unwrap_or(sum),
        error: segment_error,
        evaluations,
    })
}

/// Integral of `f` over `[0, inf)` where `f` changes sign at the zeros of
/// `sin(wavenumber x)` and obeys `|f(x)| <= envelope / (1 + x)^2`.
///
/// With `wavenumber == 0` this is the plain improper integral of `f`.
pub fn integrate_semi_infinite_oscillatory<F>(
    mut f: F,
    wavenumber: f64,
    envelope: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semi_infinite_oscillatory(|x| Ok(f(x)), wavenumber, envelope, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averaging_accelerates_alternating_harmonic() {
        // 1 - 1/2 + 1/3 - ... = ln 2
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let acc = iterated_average(&sums);
        assert!((acc - 2f64.ln()).abs() < 1e-7, "{acc}");
        assert!((sums[19] - 2f64.ln()).abs() > 1e-2);
    }

    #[test]
    fn zero_wavenumber_is_plain_improper_integral() {
        let spec = QuadratureSpec::INNER;
        let est = integrate_semi_infinite_oscillatory(|x| (-x).exp(), 0.0, 1.0, &spec).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
        let est =
            integrate_semi_infinite_oscillatory(|x| (0.0 * x).sin() / (1.0 + x).powi(2), 0.0, 1.0, &spec).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let spec = QuadratureSpec::INNER;
        assert!(integrate_semi_infinite_oscillatory(|x| x, -1.0, 1.0, &spec).is_err());
        assert!(integrate_semi_infinite_oscillatory(|x| x, f64::NAN, 1.0, &spec).is_err());
        assert!(integrate_semi_infinite_oscillatory(|x| x, 1.0, -1.0, &spec).is_err());
    }
}
