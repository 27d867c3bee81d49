//! Special functions: the gamma family, the Beta function and the modified
//! Bessel function of the third kind `K_ν` together with its derivative in
//! the order.
//!
//! Gamma-type quantities are returned in log space. `K_ν` uses Temme's series
//! for `x <= 2` and Steed's continued fraction (exponentially scaled) above,
//! followed by forward recurrence in the order with running rescaling, so
//! `log_bessel_k` stays finite where `K_ν` itself would overflow.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunResult {
    pub value: f64,
    pub abs_err_est: f64,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} requires a finite positive argument, got {x}"))
    }
}

/// Smallest argument at which the asymptotic series are used directly.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// `log Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    let mut z = x;
    let mut prod = 1.0;
    let mut shift = 0.0;
    while z < ASYMPTOTIC_FROM {
        prod *= z;
        z += 1.0;
        if prod > 1e280 {
            shift += prod.ln();
            prod = 1.0;
        }
    }
    shift += prod.ln();
    let r = 1.0 / z;
    let r2 = r * r;
    // Stirling series with Bernoulli coefficients B_2k / (2k (2k-1)).
    let series = r
        * (1.0 / 12.0
            + r2 * (-1.0 / 360.0
                + r2 * (1.0 / 1260.0
                    + r2 * (-1.0 / 1680.0
                        + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 * (1.0 / 156.0)))))));
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series - shift
}

/// `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut z = x;
    let mut acc = 0.0;
    while z < ASYMPTOTIC_FROM {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let r2 = 1.0 / (z * z);
    let series = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0
                        - r2 * (5.0 / 660.0 - r2 * (691.0 / 32_760.0 - r2 * (1.0 / 12.0)))))));
    Ok(acc + z.ln() - 0.5 / z - series)
}

/// `ψ̇(x) = dψ/dx` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    let mut z = x;
    let mut acc = 0.0;
    while z < ASYMPTOTIC_FROM {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let r = 1.0 / z;
    let r2 = r * r;
    let series = r
        + r2 * 0.5
        + r * r2
            * (1.0 / 6.0
                - r2 * (1.0 / 30.0
                    - r2 * (1.0 / 42.0
                        - r2 * (1.0 / 30.0
                            - r2 * (5.0 / 66.0 - r2 * (691.0 / 2730.0 - r2 * (7.0 / 6.0)))))));
    Ok(acc + series)
}

/// `log B(a, b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    check_positive("log_beta", a)?;
    check_positive("log_beta", b)?;
    Ok(log_gamma_unchecked(a) + log_gamma_unchecked(b) - log_gamma_unchecked(a + b))
}

/// Returns `(Γ1(μ), Γ2(μ), 1/Γ(1+μ), 1/Γ(1−μ))` for `|μ| <= 1/2`, where
/// `Γ1 = (1/Γ(1−μ) − 1/Γ(1+μ)) / 2μ` and `Γ2 = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = (-log_gamma_unchecked(1.0 + mu)).exp();
    let gammi = (-log_gamma_unchecked(1.0 - mu)).exp();
    let gam2 = 0.5 * (gammi + gampl);
    let gam1 = if mu.abs() < 1e-3 {
        // Odd Taylor coefficients of 1/Γ(1+z) (Abramowitz & Stegun 6.1.34).
        const C2: f64 = EULER_GAMMA;
        const C4: f64 = -0.042_002_635_034_095_2;
        const C6: f64 = -0.042_197_734_555_544_3;
        const C8: f64 = 0.007_218_943_246_663_0;
        let m2 = mu * mu;
        -(C2 + m2 * (C4 + m2 * (C6 + m2 * C8)))
    } else {
        (gammi - gampl) / (2.0 * mu)
    };
    (gam1, gam2, gampl, gammi)
}

/// `(log K_μ(x), log K_{μ+1}(x))` for `|μ| <= 1/2`.
fn log_bessel_k_pair(mu: f64, x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-17;
    const MAX_ITER: usize = 100_000;
    if x <= 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < 1e-15 { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu * mu);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        (sum.ln(), (sum1 * 2.0 / x).ln())
    } else {
        // Steed's algorithm for CF2; gives e^x K_μ(x) directly.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu * mu;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let log_kmu = 0.5 * (PI / (2.0 * x)).ln() - x - s.ln();
        let ratio = (mu + x + 0.5 - h) / x;
        (log_kmu, log_kmu + ratio.ln())
    }
}

/// `log K_ν(x)` for any real `ν` and `x > 0`.
pub fn log_bessel_k(nu: f64, x: f64) -> Result<f64> {
    check_positive("bessel_k", x)?;
    if !nu.is_finite() {
        return domain(format!("bessel_k order must be finite, got {nu}"));
    }
    let nu = nu.abs();
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (log_kmu, log_kmu1) = log_bessel_k_pair(mu, x);
    if n == 0.0 {
        return Ok(log_kmu);
    }
    // Forward recurrence K_{m+1} = (2m/x) K_m + K_{m-1} on values scaled by
    // e^{-offset}; the offset absorbs the growth.
    let offset = log_kmu1;
    let mut km = (log_kmu - offset).exp();
    let mut km1 = 1.0;
    let mut offset = offset;
    let steps = n as u64;
    for i in 1..steps {
        let next = 2.0 * (mu + i as f64) / x * km1 + km;
        km = km1;
        km1 = next;
        if km1 > 1e250 {
            km /= km1;
            offset += km1.ln();
            km1 = 1.0;
        }
    }
    Ok(offset + km1.ln())
}

/// `K_ν(x)`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    let lk = log_bessel_k(nu, x)?;
    let v = lk.exp();
    if v.is_infinite() {
        return Err(Error::Overflow(format!(
            "K_{nu}({x}) exceeds the double range (log value {lk})"
        )));
    }
    Ok(v)
}

/// Exponentially scaled `e^x K_ν(x)`.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    let v = (log_bessel_k(nu, x)? + x).exp();
    if v.is_infinite() {
        return Err(Error::Overflow(format!("e^x K_{nu}({x}) exceeds the double range")));
    }
    Ok(v)
}

fn dnu_step(nu: f64) -> f64 {
    (1e-4_f64).max(1e-4 * nu.abs())
}

/// `∂K_ν(x)/∂ν` with its error estimate.
///
/// One Richardson step on central differences in the order, base step
/// `h = max(1e-4, 1e-4|ν|)`.
pub fn bessel_k_dnu_e(nu: f64, x: f64) -> Result<SpecFunResult> {
    check_positive("bessel_k_dnu", x)?;
    if nu == 0.0 {
        return Ok(SpecFunResult { value: 0.0, abs_err_est: 0.0 });
    }
    let h = dnu_step(nu);
    let central = |h: f64| -> Result<f64> {
        Ok((bessel_k(nu + h, x)? - bessel_k(nu - h, x)?) / (2.0 * h))
    };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let value = (4.0 * d2 - d1) / 3.0;
    let k = bessel_k(nu, x)?;
    let round = 1e-15 * k / h;
    Ok(SpecFunResult { value, abs_err_est: (value - d2).abs() + round })
}

/// `∂K_ν(x)/∂ν`.
pub fn bessel_k_dnu(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_dnu_e(nu, x)?.value)
}

/// `∂ log K_ν(x)/∂ν`, evaluated in log space so it survives where `K_ν` overflows.
pub fn log_bessel_k_dnu(nu: f64, x: f64) -> Result<f64> {
    check_positive("bessel_k_dnu", x)?;
    if nu == 0.0 {
        return Ok(0.0);
    }
    let h = dnu_step(nu);
    let central = |h: f64| -> Result<f64> {
        Ok((log_bessel_k(nu + h, x)? - log_bessel_k(nu - h, x)?) / (2.0 * h))
    };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_gamma_special_values() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-14);
        assert_relative_eq!(log_gamma(0.5).unwrap(), 0.5 * PI.ln(), max_relative = 1e-14);
        // 10! = 3628800
        assert_relative_eq!(log_gamma(11.0).unwrap(), 3_628_800f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(log_gamma(1e-3).unwrap(), 6.907_178_885_383_853_5, max_relative = 1e-13);
    }

    #[test]
    fn gamma_family_rejects_nonpositive() {
        for f in [log_gamma, digamma, trigamma] {
            assert!(matches!(f(0.0), Err(Error::Domain(_))));
            assert!(matches!(f(-1.5), Err(Error::Domain(_))));
        }
        assert!(log_beta(0.0, 1.0).is_err());
        assert!(bessel_k(1.0, 0.0).is_err());
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        assert!((digamma(0.5).unwrap() + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn trigamma_values() {
        let z2 = PI * PI / 6.0;
        assert!((trigamma(1.0).unwrap() - z2).abs() < 1e-13);
        assert!((trigamma(0.5).unwrap() - PI * PI / 2.0).abs() < 1e-13);
        assert!((trigamma(3.0).unwrap() - (z2 - 1.25)).abs() < 1e-13);
    }

    #[test]
    fn log_beta_values() {
        assert!(log_beta(1.0, 1.0).unwrap().abs() < 1e-14);
        assert_relative_eq!(log_beta(0.5, 0.5).unwrap(), PI.ln(), max_relative = 1e-14);
        assert_relative_eq!(log_beta(1.5, 1.5).unwrap(), (PI / 8.0).ln(), max_relative = 1e-13);
    }

    #[test]
    fn temme_gamma1_series_matches_direct_form() {
        // Just above the switch the direct form is accurate to ~1e-12.
        for mu in [1.5e-3, -2e-3, 0.01] {
            let gampl = (-log_gamma_unchecked(1.0 + mu)).exp();
            let gammi = (-log_gamma_unchecked(1.0 - mu)).exp();
            let direct = (gammi - gampl) / (2.0 * mu);
            const C4: f64 = -0.042_002_635_034_095_2;
            const C6: f64 = -0.042_197_734_555_544_3;
            let series = -(EULER_GAMMA + mu * mu * (C4 + mu * mu * C6));
            assert!((direct - series).abs() < 1e-11, "mu={mu}: {direct} vs {series}");
        }
    }

    #[test]
    fn bessel_k_half_integer_closed_form() {
        let exact = (PI / 4.0).sqrt() * (-2.0f64).exp();
        assert_relative_eq!(bessel_k(0.5, 2.0).unwrap(), exact, max_relative = 1e-13);
        // K_{3/2}(x) = sqrt(pi/2x) e^-x (1 + 1/x)
        for x in [0.1, 1.0, 3.0, 30.0] {
            let k32 = (PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x);
            assert_relative_eq!(bessel_k(1.5, x).unwrap(), k32, max_relative = 1e-12);
        }
    }

    #[test]
    fn bessel_k_reference_values() {
        assert_relative_eq!(bessel_k(0.0, 1.0).unwrap(), 0.421_024_438_240_708_3, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(1.0, 1.0).unwrap(), 0.601_907_230_197_234_6, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(-1.0, 1.0).unwrap(), 0.601_907_230_197_234_6, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(2.0, 1.0).unwrap(), 1.624_838_898_635_177_4, max_relative = 1e-13);
    }

    #[test]
    fn bessel_k_overflow_is_signalled() {
        assert!(matches!(bessel_k(200.0, 1e-3), Err(Error::Overflow(_))));
        assert!(log_bessel_k(200.0, 1e-3).unwrap().is_finite());
    }

    #[test]
    fn bessel_k_dnu_zero_order_vanishes() {
        for x in [0.1, 1.0, 7.0] {
            assert_eq!(bessel_k_dnu(0.0, x).unwrap(), 0.0);
        }
    }
}
