//! Rényi information, Shannon entropy, Song measure and Rényi/power
//! divergences of a density, by direct quadrature.

use std::cell::Cell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::density::{Density, LOG_UNDERFLOW};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_with, IntegralResult, QuadOptions, Tolerance};

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    Quadrature,
    /// Central difference of the Rényi spectrum.
    FiniteDifference,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Closed => "closed",
            Method::Quadrature => "quadrature",
            Method::FiniteDifference => "finite_difference",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    /// Order of the Rényi information; absent for Shannon and Song.
    pub alpha: Option<f64>,
    pub value: f64,
    pub method: Method,
    pub abs_err_est: f64,
}

impl MeasureReport {
    pub fn closed(alpha: Option<f64>, value: f64) -> Self {
        Self { alpha, value, method: Method::Closed, abs_err_est: 4.0 * f64::EPSILON * value.abs() }
    }

    pub(crate) fn quadrature(alpha: Option<f64>, value: f64, abs_err_est: f64) -> Self {
        let floor = f64::EPSILON * value.abs().max(1.0);
        Self { alpha, value, method: Method::Quadrature, abs_err_est: abs_err_est.max(floor) }
    }
}

/// Orders closer to 1 than this are rejected by [`renyi_numeric`].
pub const ALPHA_ONE_GUARD: f64 = 1e-6;

/// `exp(l)` with contributions below the underflow threshold set to zero.
fn exp_or_zero(l: f64) -> f64 {
    if l < LOG_UNDERFLOW {
        0.0
    } else {
        l.exp()
    }
}

fn quad<F: Fn(f64) -> f64>(f: F, d: &(impl Density + ?Sized), opts: &QuadOptions) -> Result<IntegralResult> {
    integrate_with(f, d.domain(), opts)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("order alpha must be positive, got {alpha}"));
    }
    if (alpha - 1.0).abs() < ALPHA_ONE_GUARD {
        return domain(format!("order alpha = {alpha} is too close to 1; use the Shannon entropy"));
    }
    Ok(())
}

/// `log ∫ f^α`.
pub fn log_power_integral<D: Density + ?Sized>(f: &D, alpha: f64, tol: Tolerance) -> Result<(f64, f64)> {
    let opts = f.quad_options(tol);
    let r = quad(|x| exp_or_zero(alpha * f.log_density(x)), f, &opts)?;
    if !(r.value > 0.0) || !r.value.is_finite() {
        return Err(Error::Divergent(format!("integral of f^{alpha} is {}", r.value)));
    }
    Ok((r.value.ln(), r.abs_err_est / r.value))
}

/// `R_α = log(∫ f^α)/(1 − α)`.
pub fn renyi_numeric<D: Density + ?Sized>(f: &D, alpha: f64, tol: Tolerance) -> Result<MeasureReport> {
    check_alpha(alpha)?;
    let (log_i, rel) = log_power_integral(f, alpha, tol)?;
    let k = 1.0 - alpha;
    Ok(MeasureReport::quadrature(Some(alpha), log_i / k, rel / k.abs()))
}

/// `R₁ = −∫ f log f`.
pub fn shannon_numeric<D: Density + ?Sized>(f: &D, tol: Tolerance) -> Result<MeasureReport> {
    let opts = f.quad_options(tol);
    let r = quad(
        |x| {
            let l = f.log_density(x);
            if l < LOG_UNDERFLOW {
                0.0
            } else {
                -l * l.exp()
            }
        },
        f,
        &opts,
    )?;
    Ok(MeasureReport::quadrature(None, r.value, r.abs_err_est))
}

/// `S = Var(log f(X))`, as `E[(log f − E log f)²]` after a first pass for
/// the mean.
pub fn song_numeric<D: Density + ?Sized>(f: &D, tol: Tolerance) -> Result<MeasureReport> {
    let opts = f.quad_options(tol);
    let moment = |c: f64, k: i32| {
        quad(
            |x| {
                let l = f.log_density(x);
                if l < LOG_UNDERFLOW {
                    0.0
                } else {
                    (l - c).powi(k) * l.exp()
                }
            },
            f,
            &opts,
        )
    };
    let m1 = moment(0.0, 1)?;
    let m2 = moment(m1.value, 2)?;
    let err = m2.abs_err_est + 2.0 * m1.abs_err_est * m1.abs_err_est;
    Ok(MeasureReport::quadrature(None, m2.value, err))
}

/// `log ∫ f^α g^{1−α}` over the support of `f`.
fn log_affinity<F, G>(f: &F, g: &G, alpha: f64, tol: Tolerance) -> Result<(f64, f64, IntegralResult)>
where
    F: Density + ?Sized,
    G: Density + ?Sized,
{
    if !(alpha.is_finite()) || alpha == 0.0 || alpha == 1.0 {
        return domain(format!("divergence order must differ from 0 and 1, got {alpha}"));
    }
    if !f.domain().within(&g.domain()) {
        return Err(Error::SupportMismatch(format!(
            "support of f {:?} is not contained in the support of g {:?}",
            f.domain(),
            g.domain()
        )));
    }
    let mut opts = f.quad_options(tol);
    let gc = g.center();
    if f.domain().contains(gc) {
        opts.breakpoints.push(gc);
    }
    opts.breakpoints.extend(g.breakpoints().into_iter().filter(|b| f.domain().contains(*b)));
    let mismatch = Cell::new(None);
    let r = quad(
        |x| {
            let lf = f.log_density(x);
            if lf == f64::NEG_INFINITY {
                return 0.0;
            }
            let lg = g.log_density(x);
            if lg == f64::NEG_INFINITY {
                mismatch.set(Some(x));
                return 0.0;
            }
            exp_or_zero(alpha * lf + (1.0 - alpha) * lg)
        },
        f,
        &opts,
    )?;
    if let Some(x) = mismatch.get() {
        return Err(Error::SupportMismatch(format!("g vanishes at {x} where f is positive")));
    }
    if !(r.value > 0.0) || !r.value.is_finite() {
        return Err(Error::Divergent(format!("affinity integral is {}", r.value)));
    }
    Ok((r.value.ln(), r.abs_err_est / r.value, r))
}

/// `D_α(f, g) = log(∫ f^α g^{1−α}) / (α(α − 1))`, nonnegative for every
/// order and equal to zero iff `f = g`.
pub fn renyi_divergence<F, G>(f: &F, g: &G, alpha: f64, tol: Tolerance) -> Result<MeasureReport>
where
    F: Density + ?Sized,
    G: Density + ?Sized,
{
    let (log_i, rel, _) = log_affinity(f, g, alpha, tol)?;
    let k = alpha * (alpha - 1.0);
    Ok(MeasureReport::quadrature(Some(alpha), log_i / k, rel / k.abs()))
}

/// `Ψ_α = (exp(α(α − 1) D_α) − 1)/(α(α − 1))`.
pub fn power_divergence<F, G>(f: &F, g: &G, alpha: f64, tol: Tolerance) -> Result<MeasureReport>
where
    F: Density + ?Sized,
    G: Density + ?Sized,
{
    let (log_i, _, r) = log_affinity(f, g, alpha, tol)?;
    let k = alpha * (alpha - 1.0);
    Ok(MeasureReport::quadrature(Some(alpha), log_i.exp_m1() / k, r.abs_err_est / k.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Cauchy, Laplace, Normal, StudentT, Uniform};
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::new(1e-13, 1e-12)
    }

    #[test]
    fn renyi_examples() {
        let u = Uniform::new(0.0, 1.0).unwrap();
        assert!(renyi_numeric(&u, 3.0, tol()).unwrap().value.abs() < 1e-12);
        let n = Normal::standard();
        let r = renyi_numeric(&n, 2.0, tol()).unwrap();
        assert!((r.value - 0.5 * (4.0 * PI).ln()).abs() < 1e-11);
        assert_eq!(r.method, Method::Quadrature);
        assert!(r.abs_err_est > 0.0);
        let c = Cauchy::new(0.0, 1.0).unwrap();
        assert!((renyi_numeric(&c, 2.0, tol()).unwrap().value - (2.0 * PI).ln()).abs() < 1e-11);
    }

    #[test]
    fn renyi_guards() {
        let n = Normal::standard();
        assert!(matches!(renyi_numeric(&n, 1.0 + 1e-7, tol()), Err(Error::Domain(_))));
        assert!(matches!(renyi_numeric(&n, 0.0, tol()), Err(Error::Domain(_))));
        let c = Cauchy::new(0.0, 1.0).unwrap();
        assert!(matches!(renyi_numeric(&c, 0.4, tol()), Err(Error::Divergent(_))));
    }

    #[test]
    fn shannon_examples() {
        let n = Normal::standard();
        let h = shannon_numeric(&n, tol()).unwrap().value;
        assert!((h - 0.5 * (1.0 + (2.0 * PI).ln())).abs() < 1e-12);
        let c = Cauchy::new(0.0, 1.0).unwrap();
        assert!((shannon_numeric(&c, tol()).unwrap().value - (4.0 * PI).ln()).abs() < 1e-10);
        let u = Uniform::new(0.0, 1.0).unwrap();
        assert!(shannon_numeric(&u, tol()).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn song_examples() {
        assert!((song_numeric(&Normal::standard(), tol()).unwrap().value - 0.5).abs() < 1e-12);
        let l = Laplace::new(0.0, 1.0).unwrap();
        assert!((song_numeric(&l, tol()).unwrap().value - 1.0).abs() < 1e-12);
        let t6 = StudentT::new(6.0, 0.0, 1.0).unwrap();
        assert!((song_numeric(&t6, tol()).unwrap().value - 0.791).abs() < 1e-3);
    }

    #[test]
    fn gaussian_divergences() {
        let f = Normal::standard();
        let g = Normal::new(1.0, 1.0).unwrap();
        let d = renyi_divergence(&f, &g, 0.5, tol()).unwrap().value;
        assert!((d - 0.5).abs() < 1e-10, "{d}");
        assert!(renyi_divergence(&f, &f, 2.0, tol()).unwrap().value.abs() < 1e-12);
        let psi = power_divergence(&f, &g, 0.5, tol()).unwrap().value;
        assert!((psi - ((-0.25 * d).exp() - 1.0) / -0.25).abs() < 1e-10);
    }

    #[test]
    fn support_mismatch() {
        let f = Normal::standard();
        let g = Uniform::new(-1.0, 1.0).unwrap();
        assert!(matches!(renyi_divergence(&f, &g, 2.0, tol()), Err(Error::SupportMismatch(_))));
    }
}
