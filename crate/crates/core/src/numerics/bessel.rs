//! Modified Bessel function of the second kind, order one, and the
//! surface-curvature polarization kernel built on it.
//!
//! K1 uses two branches:
//! * `x <= 2`: the ascending series
//!   `K1 = 1/x + ln(x/2) I1(x) - (x/4) sum_k [psi(k+1) + psi(k+2)] t^k / (k! (k+1)!)`,
//!   `t = x^2/4`. All terms are well conditioned here.
//! * `x > 2`: Steed's continued fraction (CF2) for `K0`, `K1` scaled by `e^x`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_BRANCH_MAX: f64 = 2.0;
const CF2_MAX_ITER: usize = 10_000;

/// Crossover between the series and direct evaluation of [`u_p`].
pub const U_P_SERIES_SWITCH: f64 = 1e-3;

/// Iterate the ascending-series terms `c_k = t^k / (k! (k+1)!)` together
/// with `psi(k+1) + psi(k+2)`, calling `visit` until terms stop mattering.
fn ascending_series(t: f64, mut visit: impl FnMut(f64, f64) -> f64) {
    let mut c = 1.0;
    // psi(1) + psi(2) = -2 gamma + 1
    let mut psi_sum = 1.0 - 2.0 * EULER_GAMMA;
    let mut k = 0.0;
    loop {
        let contribution = visit(c, psi_sum);
        k += 1.0;
        c *= t / (k * (k + 1.0));
        // psi(k+1) = psi(k) + 1/k
        psi_sum += 1.0 / k + 1.0 / (k + 1.0);
        if contribution.abs() < 1e-18 || k > 60.0 {
            break;
        }
    }
}

fn k1_series(x: f64) -> f64 {
    let t = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    let mut sum_c = 0.0;
    let mut sum_psi = 0.0;
    ascending_series(t, |c, psi| {
        sum_c += c;
        sum_psi += psi * c;
        c * (1.0 + psi.abs()) / (sum_c.abs() + sum_psi.abs())
    });
    1.0 / x + 0.5 * x * (log_half * sum_c - 0.5 * sum_psi)
}

/// `e^x K1(x)` for `x > 2` via Steed's algorithm (Temme's CF2 with mu = 0).
fn k1_scaled_cf2(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..CF2_MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    let h = a1 * h;
    let k0_scaled = (PI / (2.0 * x)).sqrt() / s;
    k0_scaled * (x + 0.5 - h) / x
}

/// Modified Bessel function of the second kind, `K1(x)`, for `x > 0`.
///
/// Underflows to zero past `x ~ 705`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::domain("bessel_k1", format!("x must be positive, got {x}")));
    }
    Ok(k1_unchecked(x))
}

pub(crate) fn k1_unchecked(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else if x <= SERIES_BRANCH_MAX {
        k1_series(x)
    } else {
        k1_scaled_cf2(x) * (-x).exp()
    }
}

/// `e^x K1(x)`, finite for all `x > 0`.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "bessel_k1_scaled",
            format!("x must be positive and finite, got {x}"),
        ));
    }
    Ok(if x <= SERIES_BRANCH_MAX {
        k1_series(x) * x.exp()
    } else {
        k1_scaled_cf2(x)
    })
}

fn u_p_series(eta: f64) -> f64 {
    let t = 0.25 * eta * eta;
    let half_log = -0.5 * (0.5 * eta).ln();
    let mut sum = 0.0;
    ascending_series(t, |c, psi| {
        let term = c * (half_log + 0.25 * psi);
        sum += term;
        term / sum
    });
    sum
}

fn u_p_direct(eta: f64) -> f64 {
    (1.0 - eta * k1_unchecked(eta)) / (eta * eta)
}

/// Polarization kernel `U_p(eta) = [1 - eta K1(eta)] / eta^2`.
///
/// Behaves as `ln(2/eta)/2 + 1/4 - gamma_E/2` for small `eta` and as
/// `1/eta^2` for large `eta`.
pub fn u_p(eta: f64) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::domain("u_p", format!("eta must be positive, got {eta}")));
    }
    Ok(u_p_unchecked(eta))
}

pub(crate) fn u_p_unchecked(eta: f64) -> f64 {
    if eta < U_P_SERIES_SWITCH {
        u_p_series(eta)
    } else {
        u_p_direct(eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // 40-digit reference values (mpmath besselk).
    const K1_REFERENCE: [(f64, f64); 10] = [
        (1e-8, 99_999_999.999_999_904_817),
        (1e-3, 999.996_238_156_085_574_28),
        (0.1, 9.853_844_780_870_606_134_8),
        (1.0, 0.601_907_230_197_234_574_74),
        (2.0, 0.139_865_881_816_522_427_28),
        (5.0, 0.004_044_613_445_452_164_208_4),
        (10.0, 1.864_877_345_382_558_459_7e-5),
        (50.0, 3.444_102_226_717_555_612_6e-23),
        (300.0, 3.729_895_858_332_372_698_6e-132),
        (700.0, 4.673_110_796_707_966_109_1e-306),
    ];

    #[test]
    fn k1_reference_points() {
        for (x, want) in K1_REFERENCE {
            let got = bessel_k1(x).unwrap();
            assert!(rel(got, want) < 1e-13, "K1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn k1_asymptotes() {
        for x in [1e-12, 1e-10, 1e-8] {
            assert!((x * bessel_k1(x).unwrap() - 1.0).abs() < 1e-12);
        }
        for x in [200.0, 400.0, 650.0] {
            let ratio = bessel_k1(x).unwrap() * x.exp() * (2.0 * x / PI).sqrt();
            // next term of the Hankel expansion is 3/(8x)
            assert!((ratio - 1.0 - 3.0 / (8.0 * x)).abs() < 1e-4, "{x}: {ratio}");
        }
        assert_eq!(bessel_k1(800.0).unwrap(), 0.0);
    }

    #[test]
    fn k1_domain() {
        assert!(bessel_k1(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k1(f64::NAN).is_err());
    }

    #[test]
    fn k1_branches_meet() {
        let below = k1_series(SERIES_BRANCH_MAX);
        let above = k1_scaled_cf2(SERIES_BRANCH_MAX) * (-SERIES_BRANCH_MAX).exp();
        assert!(rel(below, above) < 1e-14, "{below} vs {above}");
    }

    #[test]
    fn k1_monotone_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..400 {
            let x = 1e-6 * 10f64.powf(i as f64 * 0.02);
            let v = bessel_k1(x).unwrap();
            assert!(v < prev, "not decreasing at {x}");
            prev = v;
        }
    }

    #[test]
    fn u_p_reference_points() {
        let cases = [
            (1e-4, 4.913_135_950_427_467_525_1),
            (1e-3, 3.761_843_914_425_722_046_6),
            (0.5, 0.687_117_759_993_398_212_61),
            (1.0, 0.398_092_769_802_765_425_26),
            (3.0, 0.097_725_634_068_379_716_319),
            (20.0, 0.002_499_999_970_584_710_152_2),
        ];
        for (eta, want) in cases {
            let got = u_p(eta).unwrap();
            assert!(rel(got, want) < 1e-10, "U_p({eta}) = {got}, want {want}");
        }
    }

    #[test]
    fn u_p_small_argument_limit() {
        let eta = 1e-4;
        let offset = u_p(eta).unwrap() - 0.5 * (2.0 / eta).ln();
        assert!((offset - (0.25 - 0.5 * EULER_GAMMA)).abs() < 1e-7, "{offset}");
    }

    #[test]
    fn u_p_large_argument_limit() {
        for eta in [50.0, 200.0, 1e4] {
            assert!((u_p(eta).unwrap() * eta * eta - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn u_p_branches_agree_at_switch() {
        let s = u_p_series(U_P_SERIES_SWITCH);
        let d = u_p_direct(U_P_SERIES_SWITCH);
        assert!(rel(s, d) < 1e-8, "{s} vs {d}");
    }

    #[test]
    fn u_p_positive_and_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..=500 {
            let eta = 1e-6 * (50.0f64 / 1e-6).powf(i as f64 / 500.0);
            let v = u_p(eta).unwrap();
            assert!(v > 0.0);
            assert!(v < prev, "not decreasing at {eta}");
            prev = v;
        }
        assert!(u_p(0.0).is_err());
        assert!(u_p(-0.1).is_err());
    }
}
