//! Parameter records, invariant densities, SDE coefficients and closed-form
//! Rényi, Shannon and Song measures for the built-in diffusion families.
//!
//! Every closed form is assembled in log space from [`crate::specfun`].
//! A family whose Rényi integral diverges at the requested order reports
//! [`Error::Divergent`] exactly on the closed validity boundary.

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{divergent, domain, Error, Result};
use crate::measures::{renyi_numeric, shannon_numeric, song_numeric, MeasureReport, Method};
use crate::quadrature::{integrate_with, Interval, QuadOptions, Tolerance};
use crate::sde::{ergodicity_check, CumulativeIntegral, DiffusionSpec, ErgodicityReport, InvariantDensity, RealFn};
use crate::specfun::{digamma, log_bessel_k, log_bessel_k_dnu, log_beta, log_gamma, trigamma};

/// Tolerance used for the quadrature pieces inside closed forms.
pub fn closed_form_tol() -> Tolerance {
    Tolerance::new(1e-15, 1e-13)
}

/// Closed-form Rényi information, Shannon entropy and (where available)
/// Song measure of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyMeasures {
    pub renyi: MeasureReport,
    pub shannon: MeasureReport,
    pub song: Option<MeasureReport>,
}

fn closed(alpha: Option<f64>, value: f64) -> Result<MeasureReport> {
    if value.is_nan() {
        return Err(Error::Overflow("closed form evaluated to NaN".into()));
    }
    Ok(MeasureReport::closed(alpha, value))
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("order alpha must be positive, got {alpha}"));
    }
    if alpha == 1.0 {
        return domain("order alpha = 1 is the Shannon entropy");
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return domain(format!("{name} must be positive, got {v}"));
    }
    Ok(())
}

fn finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return domain(format!("{name} must be finite, got {v}"));
    }
    Ok(())
}

fn log_sinh(y: f64) -> f64 {
    if y > 20.0 {
        y - LN_2 + (-(-2.0 * y).exp()).ln_1p()
    } else {
        y.sinh().ln()
    }
}

fn log_cosh(y: f64) -> f64 {
    let y = y.abs();
    y - LN_2 + (-2.0 * y).exp().ln_1p()
}

// ---------------------------------------------------------------------------
// Analytic densities.

/// Density given by a log-density closure with a known normalizer folded in.
#[derive(Clone)]
pub struct AnalyticDensity {
    name: &'static str,
    log_f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: Interval,
    center: f64,
    scale: f64,
}

impl std::fmt::Debug for AnalyticDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticDensity").field("name", &self.name).field("domain", &self.domain).finish()
    }
}

impl AnalyticDensity {
    fn new(
        name: &'static str,
        domain: Interval,
        center: f64,
        scale: f64,
        log_f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name, log_f: Arc::new(log_f), domain, center, scale }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }
}

impl Density for AnalyticDensity {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn log_density(&self, x: f64) -> f64 {
        if !self.domain.contains(x) {
            return f64::NEG_INFINITY;
        }
        (self.log_f)(x)
    }
    fn center(&self) -> f64 {
        self.center
    }
    fn scale(&self) -> f64 {
        self.scale
    }
}

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck: b = −θ(x − μ), σ² = 2θ, law N(μ, 1).

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OUParams {
    pub theta: f64,
    pub mu: f64,
}

impl OUParams {
    pub fn new(theta: f64, mu: f64) -> Result<Self> {
        positive("theta", theta)?;
        finite("mu", mu)?;
        Ok(Self { theta, mu })
    }

    pub fn density(&self) -> AnalyticDensity {
        let mu = self.mu;
        AnalyticDensity::new("ou", Interval::real_line(), mu, 1.0, move |x| {
            -0.5 * (x - mu) * (x - mu) - 0.5 * (2.0 * PI).ln()
        })
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let (t, mu) = (self.theta, self.mu);
        DiffusionSpec::new(move |x| -t * (x - mu), move |_| 2.0 * t, Interval::real_line(), mu)
    }

    pub fn renyi(&self, alpha: f64) -> Result<MeasureReport> {
        check_order(alpha)?;
        closed(Some(alpha), 0.5 * ((2.0 * PI).ln() - alpha.ln() / (1.0 - alpha)))
    }

    pub fn shannon(&self) -> Result<MeasureReport> {
        closed(None, 0.5 * (1.0 + (2.0 * PI).ln()))
    }

    /// `Var(log φ(X)) = Var(X²/2) = ½`.
    pub fn song(&self) -> Result<MeasureReport> {
        closed(None, 0.5)
    }
}

pub fn ou_measures(p: &OUParams, alpha: f64) -> Result<FamilyMeasures> {
    Ok(FamilyMeasures { renyi: p.renyi(alpha)?, shannon: p.shannon()?, song: Some(p.song()?) })
}

// ---------------------------------------------------------------------------
// Cox-Ingersoll-Ross: b = −θ(x − μ), σ² = 2θx, law Gamma(μ, 1).

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CIRParams {
    pub mu: f64,
    pub theta: f64,
}

impl CIRParams {
    /// Accepts any `μ > 0`; the process is ergodic only for `μ > 1`.
    pub fn new(mu: f64, theta: f64) -> Result<Self> {
        positive("mu", mu)?;
        positive("theta", theta)?;
        Ok(Self { mu, theta })
    }

    pub fn ergodic(&self) -> bool {
        self.mu > 1.0
    }

    pub fn density(&self) -> AnalyticDensity {
        let mu = self.mu;
        let lg = log_gamma(mu).unwrap_or(f64::NAN);
        AnalyticDensity::new("cir", Interval::positive_half_line(), mu, mu.sqrt(), move |x| {
            (mu - 1.0) * x.ln() - x - lg
        })
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let (t, mu) = (self.theta, self.mu);
        Ok(DiffusionSpec::new(move |x| -t * (x - mu), move |x| 2.0 * t * x, Interval::positive_half_line(), mu)?
            .with_scale_hint(mu.sqrt()))
    }

    pub fn renyi(&self, alpha: f64) -> Result<MeasureReport> {
        check_order(alpha)?;
        let mu = self.mu;
        let shape = alpha * (mu - 1.0) + 1.0;
        if shape <= 0.0 {
            return divergent(format!("requires alpha(mu - 1) + 1 > 0, got {shape}"));
        }
        let v = (-alpha * log_gamma(mu)? - shape * alpha.ln() + log_gamma(shape)?) / (1.0 - alpha);
        closed(Some(alpha), v)
    }

    pub fn shannon(&self) -> Result<MeasureReport> {
        let mu = self.mu;
        closed(None, log_gamma(mu)? - (mu - 1.0) * digamma(mu)? + mu)
    }

    pub fn song(&self) -> Result<MeasureReport> {
        let mu = self.mu;
        closed(None, trigamma(mu)? * (mu - 1.0).powi(2) - mu + 2.0)
    }
}

pub fn cir_measures(p: &CIRParams, alpha: f64) -> Result<FamilyMeasures> {
    Ok(FamilyMeasures { renyi: p.renyi(alpha)?, shannon: p.shannon()?, song: Some(p.song()?) })
}

// ---------------------------------------------------------------------------
// Pearson type IV: b = −θ(x − μ), σ² = 2θa(1 + x²).

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearsonIVParams {
    pub a: f64,
    pub mu: f64,
    pub theta: f64,
}

/// Which special order of [`pearson_iv_renyi_special`] to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PearsonBranch {
    /// `α = 2a(m + 1)/(1 + 2a)`, cosine power `2m`.
    Even,
    /// `α = 2a(m + 3/2)/(1 + 2a)`, cosine power `2m + 1`.
    Half,
}

fn as_nonneg_integer(p: f64) -> Option<u32> {
    let r = p.round();
    if p >= 0.0 && (p - r).abs() < 1e-12 && r < 300.0 {
        Some(r as u32)
    } else {
        None
    }
}

/// `log ∫_{−π/2}^{π/2} cos^p(x) e^{−cx} dx` and a relative error estimate.
///
/// Closed form for nonnegative integer `p`, quadrature of the folded form
/// `∫_0^{π/2} 2 sin^p(v) cosh(c(π/2 − v)) dv` otherwise.
pub fn log_cos_power_integral(p: f64, c: f64, tol: Tolerance) -> Result<(f64, f64)> {
    if !(p > -1.0) {
        return divergent(format!("cosine power {p} is not integrable"));
    }
    let c = c.abs();
    if let Some(n) = as_nonneg_integer(p) {
        let m = n / 2;
        if n % 2 == 0 {
            let prod: f64 = (1..=m).map(|k| (c * c + (2 * k) as f64 * (2 * k) as f64).ln()).sum();
            let v = if c == 0.0 {
                // sinh(cπ/2)/c → π/2
                log_gamma((n + 1) as f64)? + PI.ln() - prod
            } else {
                LN_2 + log_gamma((n + 1) as f64)? + log_sinh(0.5 * PI * c) - c.ln() - prod
            };
            return Ok((v, 0.0));
        }
        let prod: f64 = (0..=m).map(|k| (c * c + (2 * k + 1) as f64 * (2 * k + 1) as f64).ln()).sum();
        return Ok((LN_2 + log_gamma((n + 1) as f64)? + log_cosh(0.5 * PI * c) - prod, 0.0));
    }
    log_cos_power_quadrature(p, c, tol)
}

/// Quadrature of the folded form of [`log_cos_power_integral`] for any `p > −1`.
pub fn log_cos_power_quadrature(p: f64, c: f64, tol: Tolerance) -> Result<(f64, f64)> {
    if !(p > -1.0) {
        return divergent(format!("cosine power {p} is not integrable"));
    }
    let c = c.abs();
    let shift = 0.5 * PI * c;
    let opts = QuadOptions { tol, center: Some(0.25 * PI), ..QuadOptions::default() };
    let r = integrate_with(
        |v: f64| {
            let l = LN_2 + p * v.sin().ln() + log_cosh(c * (0.5 * PI - v)) - shift;
            l.exp()
        },
        Interval { lower: 0.0, upper: 0.5 * PI },
        &opts,
    )?;
    Ok((r.value.ln() + shift, r.abs_err_est / r.value))
}

impl PearsonIVParams {
    pub fn new(a: f64, mu: f64, theta: f64) -> Result<Self> {
        positive("a", a)?;
        finite("mu", mu)?;
        positive("theta", theta)?;
        Ok(Self { a, mu, theta })
    }

    /// `log ∫ (1 + x²)^{−1/(2a) − 1} e^{(μ/a) arctan x} dx`.
    pub fn log_normalizer(&self) -> Result<f64> {
        Ok(log_cos_power_integral(1.0 / self.a, self.mu / self.a, closed_form_tol())?.0)
    }

    pub fn mode(&self) -> f64 {
        self.mu / (1.0 + 2.0 * self.a)
    }

    pub fn density(&self) -> Result<AnalyticDensity> {
        let (a, mu) = (self.a, self.mu);
        let lz = self.log_normalizer()?;
        Ok(AnalyticDensity::new("pearson4", Interval::real_line(), self.mode(), 1.0, move |x| {
            -(1.0 / a + 2.0) * x.hypot(1.0).ln() + mu / a * x.atan() - lz
        }))
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let (t, a, mu) = (self.theta, self.a, self.mu);
        DiffusionSpec::new(
            move |x| -t * (x - mu),
            move |x| 2.0 * t * a * x.mul_add(x, 1.0),
            Interval::real_line(),
            self.mode(),
        )
    }

    /// The order of the special closed form.
    pub fn special_alpha(&self, m: u32, branch: PearsonBranch) -> f64 {
        let a = self.a;
        let k = match branch {
            PearsonBranch::Even => m as f64 + 1.0,
            PearsonBranch::Half => m as f64 + 1.5,
        };
        2.0 * a * k / (1.0 + 2.0 * a)
    }
}

/// Rényi information at `α = 2a(m+1)/(1+2a)` or `α = 2a(m+3/2)/(1+2a)`.
///
/// The cosine-power integral at that order has a finite closed form; the
/// base integral `∫ cos^{1/a} e^{−μx/a}` is closed when `1/a` is a
/// nonnegative integer and otherwise computed by quadrature. At `μ = 0`
/// the even branch uses the limit of `C(m, μ) sinh(·)`.
pub fn pearson_iv_renyi_special(p: &PearsonIVParams, m: u32, branch: PearsonBranch) -> Result<MeasureReport> {
    if m == 0 {
        return domain("special orders need m >= 1");
    }
    let (a, mu) = (p.a, p.mu);
    let alpha = p.special_alpha(m, branch);
    let mf = m as f64;
    let (denom, power, c) = match branch {
        PearsonBranch::Even => (1.0 - 2.0 * a * mf, 2.0 * mf, 2.0 * (mf + 1.0) * mu / (1.0 + 2.0 * a)),
        PearsonBranch::Half => (1.0 - a * (2.0 * mf + 1.0), 2.0 * mf + 1.0, (2.0 * mf + 3.0) * mu / (1.0 + 2.0 * a)),
    };
    if denom.abs() < 1e-12 {
        return domain(format!("special order alpha = {alpha} coincides with the excluded value 1"));
    }
    let (log_base, base_err) = log_cos_power_integral(1.0 / a, mu / a, closed_form_tol())?;
    let (log_special, _) = log_cos_power_integral(power, c, closed_form_tol())?;
    let k = (1.0 + 2.0 * a) / denom;
    let value = -alpha * k * log_base + k * log_special;
    let err = (alpha * k).abs() * base_err;
    if base_err == 0.0 {
        closed(Some(alpha), value)
    } else {
        Ok(MeasureReport { alpha: Some(alpha), value, method: Method::Closed, abs_err_est: err.max(f64::EPSILON) })
    }
}

/// Rényi information from the cosine-power representation, both integrals
/// by quadrature.
pub fn pearson_iv_renyi_numeric(p: &PearsonIVParams, alpha: f64) -> Result<MeasureReport> {
    check_order(alpha)?;
    let a = p.a;
    let power = 2.0 * alpha * (0.5 / a + 1.0) - 2.0;
    if power <= -1.0 {
        return divergent(format!("requires alpha(2 + 1/a) - 1 > 0 (alpha = {alpha}, a = {a})"));
    }
    let tol = closed_form_tol();
    let (log_base, e1) = log_cos_power_quadrature(1.0 / a, p.mu / a, tol)?;
    let (log_tilt, e2) = log_cos_power_quadrature(power, alpha * p.mu / a, tol)?;
    let k = 1.0 - alpha;
    let value = (-alpha * log_base + log_tilt) / k;
    let err = (alpha * e1 + e2) / k.abs();
    Ok(MeasureReport::quadrature(Some(alpha), value, err))
}

/// The `α → ∞` limit stated for the Pearson IV spectrum:
/// `log ∫ cos^{1/a}(x) e^{−μx/a} dx`.
pub fn pearson_iv_stated_limit(p: &PearsonIVParams) -> Result<f64> {
    p.log_normalizer()
}

/// The `a = 1` Shannon entropy by quadrature, together with the literal
/// value of the closed formula
/// `3{cosh(μπ/2)/(1+μ²) − (3/2) log Γ'(2) − ½ μπ tanh(μπ/2) + Γ(2) μ²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearsonShannonReport {
    /// The quadrature value; authoritative.
    pub oracle: MeasureReport,
    pub formula_value: f64,
    pub discrepancy: f64,
}

pub fn pearson_iv_shannon_a1(mu: f64) -> Result<PearsonShannonReport> {
    let p = PearsonIVParams::new(1.0, mu, 1.0)?;
    let oracle = shannon_numeric(&p.density()?, Tolerance::new(1e-14, 1e-13))?;
    let gamma_prime_2 = 1.0 - crate::specfun::EULER_GAMMA;
    let h = 0.5 * mu * PI;
    let formula_value =
        3.0 * (h.cosh() / (1.0 + mu * mu) - 1.5 * gamma_prime_2.ln() - h * h.tanh() + mu * mu);
    Ok(PearsonShannonReport { oracle, formula_value, discrepancy: (formula_value - oracle.value).abs() })
}

// ---------------------------------------------------------------------------
// Inverse Gamma: b = −θ(x − μ), σ² = 2θa x², shape 1 + 1/a, scale μ/a.

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvGammaParams {
    pub a: f64,
    pub mu: f64,
    pub theta: f64,
}

impl InvGammaParams {
    pub fn new(a: f64, mu: f64, theta: f64) -> Result<Self> {
        positive("a", a)?;
        positive("mu", mu)?;
        positive("theta", theta)?;
        Ok(Self { a, mu, theta })
    }

    fn shape(&self) -> f64 {
        1.0 + 1.0 / self.a
    }

    fn scale(&self) -> f64 {
        self.mu / self.a
    }

    pub fn density(&self) -> AnalyticDensity {
        let (k, b) = (self.shape(), self.scale());
        let c = k * b.ln() - log_gamma(k).unwrap_or(f64::NAN);
        AnalyticDensity::new("invgamma", Interval::positive_half_line(), self.mu, self.mu, move |x| {
            c - (k + 1.0) * x.ln() - b / x
        })
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let (t, a, mu) = (self.theta, self.a, self.mu);
        Ok(DiffusionSpec::new(
            move |x| -t * (x - mu),
            move |x| 2.0 * t * a * x * x,
            Interval::positive_half_line(),
            mu,
        )?
        .with_scale_hint(mu))
    }

    pub fn renyi(&self, alpha: f64) -> Result<MeasureReport> {
        check_order(alpha)?;
        let k1 = self.shape() + 1.0;
        let arg = alpha * k1 - 1.0;
        if arg <= 0.0 {
            return divergent(format!("requires alpha(2 + 1/a) - 1 > 0, got {arg}"));
        }
        let v = self.scale().ln()
            + ((1.0 - k1 * alpha) * alpha.ln() + log_gamma(arg)? - alpha * log_gamma(self.shape())?) / (1.0 - alpha);
        closed(Some(alpha), v)
    }

    pub fn shannon(&self) -> Result<MeasureReport> {
        let k = self.shape();
        closed(None, self.scale().ln() + log_gamma(k)? + k - (k + 1.0) * digamma(k)?)
    }

    pub fn song(&self) -> Result<MeasureReport> {
        let k = self.shape();
        closed(None, -(k + 2.0) + (k + 1.0).powi(2) * trigamma(k)?)
    }
}

pub fn inverse_gamma_measures(p: &InvGammaParams, alpha: f64) -> Result<FamilyMeasures> {
    Ok(FamilyMeasures { renyi: p.renyi(alpha)?, shannon: p.shannon()?, song: Some(p.song()?) })
}

// ---------------------------------------------------------------------------
// Scaled F (beta prime with p = μ/a, q = 1 + 1/a): σ² = 2θa x(x + 1).

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledFParams {
    pub a: f64,
    pub mu: f64,
    pub theta: f64,
}

impl ScaledFParams {
    /// Accepts any `μ > 0`; the process is ergodic only for `μ/a ≥ 1`.
    pub fn new(a: f64, mu: f64, theta: f64) -> Result<Self> {
        positive("a", a)?;
        positive("mu", mu)?;
        positive("theta", theta)?;
        Ok(Self { a, mu, theta })
    }

    pub fn ergodic(&self) -> bool {
        self.mu / self.a >= 1.0
    }

    fn shapes(&self) -> (f64, f64) {
        (self.mu / self.a, 1.0 + 1.0 / self.a)
    }

    pub fn density(&self) -> AnalyticDensity {
        let (p, q) = self.shapes();
        let lb = log_beta(p, q).unwrap_or(f64::NAN);
        AnalyticDensity::new("scaledf", Interval::positive_half_line(), self.mu, self.mu.max(1.0), move |x| {
            (p - 1.0) * x.ln() - (p + q) * x.ln_1p() - lb
        })
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let (t, a, mu) = (self.theta, self.a, self.mu);
        Ok(DiffusionSpec::new(
            move |x| -t * (x - mu),
            move |x| 2.0 * t * a * x * (x + 1.0),
            Interval::positive_half_line(),
            mu,
        )?
        .with_scale_hint(mu.max(1.0)))
    }

    pub fn renyi(&self, alpha: f64) -> Result<MeasureReport> {
        check_order(alpha)?;
        let (p, q) = self.shapes();
        let (b1, b2) = (alpha * (p - 1.0) + 1.0, alpha * (q + 1.0) - 1.0);
        if b1 <= 0.0 || b2 <= 0.0 {
            return divergent(format!("Beta arguments ({b1}, {b2}) must be positive"));
        }
        closed(Some(alpha), (-alpha * log_beta(p, q)? + log_beta(b1, b2)?) / (1.0 - alpha))
    }

    pub fn shannon(&self) -> Result<MeasureReport> {
        let (p, q) = self.shapes();
        let v = log_beta(p, q)? - (p - 1.0) * digamma(p)? - (q + 1.0) * digamma(q)? + (p + q) * digamma(p + q)?;
        closed(None, v)
    }

    pub fn song(&self) -> Result<MeasureReport> {
        let (p, q) = self.shapes();
        let v = (q + 1.0).powi(2) * trigamma(q)? + (p - 1.0).powi(2) * trigamma(p)? - (p + q).powi(2) * trigamma(p + q)?;
        closed(None, v)
    }
}

pub fn scaled_f_measures(p: &ScaledFParams, alpha: f64) -> Result<FamilyMeasures> {
    Ok(FamilyMeasures { renyi: p.renyi(alpha)?, shannon: p.shannon()?, song: Some(p.song()?) })
}

// ---------------------------------------------------------------------------
// Jacobi: σ² = 2θa x(x − 1) with a < 0, law Beta(−μ/a, −(1 − μ)/a).

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub a: f64,
    pub mu: f64,
    pub theta: f64,
}

impl JacobiParams {
    pub fn new(a: f64, mu: f64, theta: f64) -> Result<Self> {
        if !(a < 0.0 && a.is_finite()) {
            return domain(format!("jacobi needs a < 0, got {a}"));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return domain(format!("jacobi needs mu in (0, 1), got {mu}"));
        }
        if mu.min(1.0 - mu) < -a {
            return domain(format!("jacobi needs min(mu, 1 - mu) >= -a, got mu = {mu}, a = {a}"));
        }
        positive("theta", theta)?;
        Ok(Self { a, mu, theta })
    }

    fn shapes(&self) -> (f64, f64) {
        (-self.mu / self.a, -(1.0 - self.mu) / self.a)
    }

    pub fn density(&self) -> AnalyticDensity {
        let (p, q) = self.shapes();
        let lb = log_beta(p, q).unwrap_or(f64::NAN);
        AnalyticDensity::new("jacobi", Interval::unit(), self.mu, 0.5, move |x| {
            (p - 1.0) * x.ln() + (q - 1.0) * (-x).ln_1p() - lb
        })
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let (t, a, mu) = (self.theta, self.a, self.mu);
        Ok(DiffusionSpec::new(move |x| -t * (x - mu), move |x| 2.0 * t * a * x * (x - 1.0), Interval::unit(), mu)?
            .with_scale_hint(0.5))
    }

    pub fn renyi(&self, alpha: f64) -> Result<MeasureReport> {
        check_order(alpha)?;
        let (p, q) = self.shapes();
        let (b1, b2) = (alpha * (p - 1.0) + 1.0, alpha * (q - 1.0) + 1.0);
        if b1 <= 0.0 || b2 <= 0.0 {
            return divergent(format!("Beta arguments ({b1}, {b2}) must be positive"));
        }
        closed(Some(alpha), (-alpha * log_beta(p, q)? + log_beta(b1, b2)?) / (1.0 - alpha))
    }

    pub fn shannon(&self) -> Result<MeasureReport> {
        let (p, q) = self.shapes();
        let v = log_beta(p, q)? - (p - 1.0) * digamma(p)? - (q - 1.0) * digamma(q)? + (p + q - 2.0) * digamma(p + q)?;
        closed(None, v)
    }

    pub fn song(&self) -> Result<MeasureReport> {
        let (p, q) = self.shapes();
        let v = (p - 1.0).powi(2) * trigamma(p)? + (q - 1.0).powi(2) * trigamma(q)?
            - (p + q - 2.0).powi(2) * trigamma(p + q)?;
        closed(None, v)
    }
}

pub fn jacobi_measures(p: &JacobiParams, alpha: f64) -> Result<FamilyMeasures> {
    Ok(FamilyMeasures { renyi: p.renyi(alpha)?, shannon: p.shannon()?, song: Some(p.song()?) })
}

// ---------------------------------------------------------------------------
// Generalized inverse Gaussian:
// b = (λ²/2)(θ₁x^{2γ−1} − θ₂x^{2γ} + θ₃x^{2γ−2}), σ² = λ²x^{2γ}.

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GIGParams {
    pub gamma: f64,
    pub lambda: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl GIGParams {
    pub fn new(gamma: f64, lambda: f64, theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return domain(format!("gig needs gamma >= 0, got {gamma}"));
        }
        positive("lambda", lambda)?;
        finite("theta1", theta1)?;
        finite("theta2", theta2)?;
        finite("theta3", theta3)?;
        let t1 = theta1 >= 1.0 && theta2 > 0.0 && theta3 >= 0.0;
        let t2 = (1.0 - 2.0 * gamma..1.0).contains(&theta1) && theta2 > 0.0 && theta3 > 0.0;
        let t3 = theta1 < 1.0 - 2.0 * gamma && theta2 >= 0.0 && theta3 > 0.0;
        if !(t1 || t2 || t3) {
            return domain(format!(
                "gig parameters (theta1, theta2, theta3) = ({theta1}, {theta2}, {theta3}) satisfy none of the ergodicity conditions"
            ));
        }
        let p = Self { gamma, lambda, theta1, theta2, theta3 };
        p.log_normalizer()?;
        Ok(p)
    }

    /// `ν = θ₁ − 2γ + 1`, the order of the Bessel function.
    pub fn nu(&self) -> f64 {
        self.theta1 - 2.0 * self.gamma + 1.0
    }

    fn omega(&self) -> f64 {
        2.0 * (self.theta2 * self.theta3).sqrt()
    }

    /// `log ∫ x^{ν−1} e^{−θ₂x − θ₃/x} dx`.
    pub fn log_normalizer(&self) -> Result<f64> {
        let (nu, t2, t3) = (self.nu(), self.theta2, self.theta3);
        if t2 > 0.0 && t3 > 0.0 {
            Ok(LN_2 + 0.5 * nu * (t3 / t2).ln() + log_bessel_k(nu, self.omega())?)
        } else if t3 == 0.0 {
            if nu <= 0.0 {
                return Err(Error::NotErgodic(format!("speed measure not integrable at 0 (nu = {nu})")));
            }
            Ok(log_gamma(nu)? - nu * t2.ln())
        } else {
            if nu >= 0.0 {
                return Err(Error::NotErgodic(format!("speed measure not integrable at infinity (nu = {nu})")));
            }
            Ok(log_gamma(-nu)? + nu * t3.ln())
        }
    }

    fn center(&self) -> f64 {
        let (nu, t2, t3) = (self.nu(), self.theta2, self.theta3);
        if t2 > 0.0 && t3 > 0.0 {
            (t3 / t2).sqrt()
        } else if t3 == 0.0 {
            nu / t2
        } else {
            t3 / (1.0 - nu)
        }
    }

    pub fn density(&self) -> Result<AnalyticDensity> {
        let (nu, t2, t3) = (self.nu(), self.theta2, self.theta3);
        let lz = self.log_normalizer()?;
        let c = self.center();
        Ok(AnalyticDensity::new("gig", Interval::positive_half_line(), c, c, move |x| {
            (nu - 1.0) * x.ln() - t2 * x - t3 / x - lz
        }))
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let Self { gamma, lambda, theta1, theta2, theta3 } = *self;
        let l2 = lambda * lambda;
        let c = self.center();
        Ok(DiffusionSpec::new(
            move |x| {
                0.5 * l2 * x.powf(2.0 * gamma - 2.0) * (theta1 * x - theta2 * x * x + theta3)
            },
            move |x| l2 * x.powf(2.0 * gamma),
            Interval::positive_half_line(),
            c,
        )?
        .with_scale_hint(c))
    }

    fn bessel_form(&self) -> Result<(f64, f64)> {
        if !(self.theta2 > 0.0 && self.theta3 > 0.0) {
            return Err(Error::Unsupported("the Bessel closed forms need theta2 > 0 and theta3 > 0".into()));
        }
        Ok((self.nu(), self.omega()))
    }

    /// `−log(½√(θ₂/θ₃))`.
    fn prefactor(&self) -> f64 {
        -(0.5 * (self.theta2 / self.theta3).sqrt()).ln()
    }

    pub fn renyi(&self, alpha: f64) -> Result<MeasureReport> {
        check_order(alpha)?;
        let (nu, w) = self.bessel_form()?;
        let num = log_bessel_k(alpha * (nu - 1.0) + 1.0, alpha * w)?;
        let den = alpha * log_bessel_k(nu, w)?;
        closed(Some(alpha), self.prefactor() + (num - den) / (1.0 - alpha))
    }

    pub fn shannon(&self) -> Result<MeasureReport> {
        let (nu, w) = self.bessel_form()?;
        let lk = log_bessel_k(nu, w)?;
        let dlk = log_bessel_k_dnu(nu, w)?;
        let ratio = (log_bessel_k(nu - 1.0, w)? - lk).exp();
        closed(None, self.prefactor() + nu + lk - (nu - 1.0) * dlk + w * ratio)
    }

    /// Lower end of the stated codomain, `−log(½√(θ₂/θ₃)) + log K_ν(2√(θ₂θ₃))`.
    pub fn stated_lower_limit(&self) -> Result<f64> {
        let (nu, w) = self.bessel_form()?;
        Ok(self.prefactor() + log_bessel_k(nu, w)?)
    }
}

/// Closed Rényi and Shannon values for a GIG law, each checked against the
/// quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GigMeasures {
    pub renyi: MeasureReport,
    pub shannon: MeasureReport,
    pub renyi_oracle: MeasureReport,
    pub shannon_oracle: MeasureReport,
    /// Set when either closed value differs from its oracle by more than
    /// [`GIG_CHECK_TOL`].
    pub flagged: bool,
}

pub const GIG_CHECK_TOL: f64 = 1e-6;

pub fn gig_measures(p: &GIGParams, alpha: f64) -> Result<GigMeasures> {
    let renyi = p.renyi(alpha)?;
    let shannon = p.shannon()?;
    let f = p.density()?;
    let tol = Tolerance::new(1e-14, 1e-12);
    let renyi_oracle = renyi_numeric(&f, alpha, tol)?;
    let shannon_oracle = shannon_numeric(&f, tol)?;
    let flagged = (renyi.value - renyi_oracle.value).abs() > GIG_CHECK_TOL
        || (shannon.value - shannon_oracle.value).abs() > GIG_CHECK_TOL;
    Ok(GigMeasures { renyi, shannon, renyi_oracle, shannon_oracle, flagged })
}

// ---------------------------------------------------------------------------
// Hyperbolic: b = (σ²/2)(β − γ(x − μ)/√(δ² + (x − μ)²)), constant σ.

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicParams {
    pub gamma: f64,
    pub beta: f64,
    pub delta: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl HyperbolicParams {
    pub fn new(gamma: f64, beta: f64, delta: f64, mu: f64, sigma: f64) -> Result<Self> {
        finite("beta", beta)?;
        if !(gamma > beta.abs() && gamma.is_finite()) {
            return domain(format!("hyperbolic needs gamma > |beta|, got gamma = {gamma}, beta = {beta}"));
        }
        positive("delta", delta)?;
        finite("mu", mu)?;
        positive("sigma", sigma)?;
        Ok(Self { gamma, beta, delta, mu, sigma })
    }

    /// `z = δ√(γ² − β²)`.
    pub fn z(&self) -> f64 {
        self.delta * ((self.gamma - self.beta) * (self.gamma + self.beta)).sqrt()
    }

    /// `log(√(γ² − β²)/(2γδ))`.
    fn log_c0(&self) -> f64 {
        (self.z() / (2.0 * self.gamma * self.delta * self.delta)).ln()
    }

    pub fn mode(&self) -> f64 {
        let Self { gamma, beta, delta, mu, .. } = *self;
        mu + delta * beta / ((gamma - beta) * (gamma + beta)).sqrt()
    }

    pub fn density(&self) -> Result<AnalyticDensity> {
        let Self { gamma, beta, delta, mu, .. } = *self;
        let lc = self.log_c0() - log_bessel_k(1.0, self.z())?;
        let scale = delta.max(1.0 / ((gamma - beta) * (gamma + beta)).sqrt());
        Ok(AnalyticDensity::new("hyperbolic", Interval::real_line(), self.mode(), scale, move |x| {
            let y = x - mu;
            lc - gamma * delta.hypot(y) + beta * y
        }))
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let Self { gamma, beta, delta, mu, sigma } = *self;
        let s2 = sigma * sigma;
        let scale = delta.max(1.0 / ((gamma - beta) * (gamma + beta)).sqrt());
        Ok(DiffusionSpec::new(
            move |x| 0.5 * s2 * (beta - gamma * (x - mu) / delta.hypot(x - mu)),
            move |_| s2,
            Interval::real_line(),
            self.mode(),
        )?
        .with_scale_hint(scale))
    }

    pub fn renyi(&self, alpha: f64) -> Result<MeasureReport> {
        check_order(alpha)?;
        let z = self.z();
        let v = -self.log_c0() + (log_bessel_k(1.0, alpha * z)? - alpha * log_bessel_k(1.0, z)?) / (1.0 - alpha);
        closed(Some(alpha), v)
    }

    pub fn shannon(&self) -> Result<MeasureReport> {
        let z = self.z();
        let lk1 = log_bessel_k(1.0, z)?;
        let r = (log_bessel_k(0.0, z)? - lk1).exp();
        closed(None, lk1 - self.log_c0() + 1.0 + z * r)
    }

    /// `1 + z²(1 − (K₀² + K₀K₂)/(2K₁²))`, equivalently
    /// `1 + z² − z²K₀²/K₁² − zK₀/K₁`.
    pub fn song(&self) -> Result<MeasureReport> {
        let z = self.z();
        let lk1 = log_bessel_k(1.0, z)?;
        let r0 = (log_bessel_k(0.0, z)? - lk1).exp();
        let r2 = (log_bessel_k(2.0, z)? - lk1).exp();
        closed(None, 1.0 + z * z * (1.0 - 0.5 * (r0 * r0 + r0 * r2)))
    }

    /// The `α → ∞` limit as stated: `−log(√(γ²−β²)/(2γδ)) + log K₁(z)`.
    pub fn stated_limit(&self) -> Result<f64> {
        Ok(-self.log_c0() + log_bessel_k(1.0, self.z())?)
    }
}

pub fn hyperbolic_measures(p: &HyperbolicParams, alpha: f64) -> Result<FamilyMeasures> {
    Ok(FamilyMeasures { renyi: p.renyi(alpha)?, shannon: p.shannon()?, song: Some(p.song()?) })
}

// ---------------------------------------------------------------------------
// Jones-Faddy skew t: constant σ, drift (σ²/2)(log f)'.

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewTParams {
    pub gamma: f64,
    pub beta: f64,
    pub sigma: f64,
}

/// `(log(1 + x/r), log(1 − x/r))` with `r = √(k + x²)`, free of cancellation.
fn skew_t_logs(x: f64, k: f64) -> (f64, f64) {
    let r = k.sqrt().hypot(x);
    if x >= 0.0 {
        (((r + x) / r).ln(), (k / (r * (r + x))).ln())
    } else {
        ((k / (r * (r - x))).ln(), ((r - x) / r).ln())
    }
}

impl SkewTParams {
    pub fn new(gamma: f64, beta: f64, sigma: f64) -> Result<Self> {
        positive("gamma", gamma)?;
        positive("beta", beta)?;
        positive("sigma", sigma)?;
        Ok(Self { gamma, beta, sigma })
    }

    fn k(&self) -> f64 {
        self.gamma + self.beta
    }

    pub fn mode(&self) -> f64 {
        let k = self.k();
        let t = (self.gamma - self.beta) / (k + 1.0);
        t * (k / (1.0 - t * t)).sqrt()
    }

    pub fn density(&self) -> Result<AnalyticDensity> {
        let (g, b, k) = (self.gamma + 0.5, self.beta + 0.5, self.k());
        let lz = log_beta(self.gamma, self.beta)? + 0.5 * k.ln() + (k - 1.0) * LN_2;
        Ok(AnalyticDensity::new("skewt", Interval::real_line(), self.mode(), k.sqrt(), move |x| {
            let (lp, lm) = skew_t_logs(x, k);
            g * lp + b * lm - lz
        }))
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let (g, b, k) = (self.gamma + 0.5, self.beta + 0.5, self.k());
        let s2 = self.sigma * self.sigma;
        Ok(DiffusionSpec::new(
            move |x| {
                let r = k.sqrt().hypot(x);
                let (rm, rp) = if x >= 0.0 { (k / (r + x), r + x) } else { (r - x, k / (r - x)) };
                0.5 * s2 * (g * rm / r - b * rp / r) / r
            },
            move |_| s2,
            Interval::real_line(),
            self.mode(),
        )?
        .with_scale_hint(k.sqrt()))
    }

    pub fn renyi(&self, alpha: f64) -> Result<MeasureReport> {
        check_order(alpha)?;
        let (g, b, k) = (self.gamma, self.beta, self.k());
        let (b1, b2) = (alpha * (g + 0.5) - 0.5, alpha * (b + 0.5) - 0.5);
        if b1 <= 0.0 || b2 <= 0.0 {
            return divergent(format!("requires alpha(gamma + 1/2) - 1/2 > 0 and alpha(beta + 1/2) - 1/2 > 0 (alpha = {alpha})"));
        }
        let inner = (alpha - 1.0) * 4f64.ln() + log_beta(b1, b2)? - 0.5 * (alpha - 1.0) * k.ln() - alpha * log_beta(g, b)?;
        closed(Some(alpha), inner / (1.0 - alpha))
    }

    pub fn shannon(&self) -> Result<MeasureReport> {
        let (g, b, k) = (self.gamma, self.beta, self.k());
        let v = -(4.0f64.ln() - 0.5 * k.ln() - log_beta(g, b)?) - (b + 0.5) * digamma(b)? - (g + 0.5) * digamma(g)?
            + (k + 1.0) * digamma(k)?;
        closed(None, v)
    }

    pub fn song(&self) -> Result<MeasureReport> {
        let (g, b, k) = (self.gamma, self.beta, self.k());
        let v = (b + 0.5).powi(2) * trigamma(b)? + (g + 0.5).powi(2) * trigamma(g)? - (k + 1.0).powi(2) * trigamma(k)?;
        closed(None, v)
    }

    /// The `α → ∞` limit as stated: `log B(γ,β) + ½ log(γ+β) − 2 log 2`.
    pub fn stated_limit(&self) -> Result<f64> {
        Ok(log_beta(self.gamma, self.beta)? + 0.5 * self.k().ln() - 2.0 * LN_2)
    }
}

pub fn skew_t_measures(p: &SkewTParams, alpha: f64) -> Result<FamilyMeasures> {
    Ok(FamilyMeasures { renyi: p.renyi(alpha)?, shannon: p.shannon()?, song: Some(p.song()?) })
}

// ---------------------------------------------------------------------------
// Exponential families: drift Σ θᵢ bᵢ, squared diffusion σ².

/// An exponential family of diffusions, `dX = Σ βᵢ bᵢ(X) dt + λσ(X) dW`,
/// written with `θᵢ = βᵢ/λ²`. Its speed density is
/// `m = σ^{−2} exp(Σ θᵢ Tᵢ)` with `Tᵢ = 2∫_{x₀}^x bᵢ/σ²`.
#[derive(Clone)]
pub struct ExpFamSpec {
    pub basis: Vec<RealFn>,
    pub theta: Vec<f64>,
    /// `σ²(x)`, without the factor `λ²`.
    pub sigma2: RealFn,
    pub state_space: Interval,
    pub x0: f64,
    pub scale_hint: f64,
}

impl std::fmt::Debug for ExpFamSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExpFamSpec")
            .field("p", &self.basis.len())
            .field("theta", &self.theta)
            .field("state_space", &self.state_space)
            .field("x0", &self.x0)
            .finish_non_exhaustive()
    }
}

impl ExpFamSpec {
    pub fn new(basis: Vec<RealFn>, theta: Vec<f64>, sigma2: RealFn, state_space: Interval, x0: f64) -> Result<Self> {
        if basis.is_empty() || basis.len() != theta.len() {
            return domain(format!("need one weight per basis function ({} vs {})", basis.len(), theta.len()));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return domain("weights must be finite");
        }
        Interval::new(state_space.lower, state_space.upper)?;
        if !state_space.contains(x0) {
            return domain(format!("x0 = {x0} is not inside the state space"));
        }
        Ok(Self { basis, theta, sigma2, state_space, x0, scale_hint: 1.0 })
    }

    pub fn with_scale_hint(mut self, scale: f64) -> Self {
        if scale > 0.0 && scale.is_finite() {
            self.scale_hint = scale;
        }
        self
    }

    pub fn ou(p: &OUParams) -> Result<Self> {
        let mu = p.mu;
        Self::new(vec![Arc::new(move |x| -(x - mu))], vec![0.5], Arc::new(|_| 1.0), Interval::real_line(), mu)
    }

    pub fn cir(p: &CIRParams) -> Result<Self> {
        Ok(Self::new(
            vec![Arc::new(|_| 1.0), Arc::new(|x| -x)],
            vec![0.5 * p.mu, 0.5],
            Arc::new(|x| x),
            Interval::positive_half_line(),
            p.mu,
        )?
        .with_scale_hint(p.mu.sqrt()))
    }

    pub fn gig(p: &GIGParams) -> Result<Self> {
        let g = p.gamma;
        Ok(Self::new(
            vec![
                Arc::new(move |x: f64| x.powf(2.0 * g - 1.0)),
                Arc::new(move |x: f64| -x.powf(2.0 * g)),
                Arc::new(move |x: f64| x.powf(2.0 * g - 2.0)),
            ],
            vec![0.5 * p.theta1, 0.5 * p.theta2, 0.5 * p.theta3],
            Arc::new(move |x: f64| x.powf(2.0 * g)),
            Interval::positive_half_line(),
            p.center(),
        )?
        .with_scale_hint(p.center()))
    }

    pub fn hyperbolic(p: &HyperbolicParams) -> Result<Self> {
        let (d, mu) = (p.delta, p.mu);
        Self::new(
            vec![Arc::new(|_| 1.0), Arc::new(move |x: f64| -(x - mu) / d.hypot(x - mu))],
            vec![0.5 * p.beta, 0.5 * p.gamma],
            Arc::new(|_| 1.0),
            Interval::real_line(),
            p.mode(),
        )
    }

    /// The diffusion with `λ = 1`; it has the same scale and speed.
    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        let basis = self.basis.clone();
        let theta = self.theta.clone();
        let drift = move |x: f64| basis.iter().zip(&theta).map(|(b, t)| t * b(x)).sum::<f64>();
        Ok(DiffusionSpec::from_arcs(Arc::new(drift), self.sigma2.clone(), self.state_space, self.x0)?
            .with_scale_hint(self.scale_hint))
    }

    /// Probes `θ ∈ Θ ∩ Θ₁` (integrable speed, divergent scale at both ends).
    pub fn membership(&self) -> Result<ErgodicityReport> {
        Ok(ergodicity_check(&self.diffusion()?))
    }

    /// Sufficient statistics `T₁..T_p` as tabulated antiderivatives.
    pub fn statistics(&self) -> Result<Vec<CumulativeIntegral>> {
        self.basis
            .iter()
            .map(|b| {
                let b = b.clone();
                let s2 = self.sigma2.clone();
                let g: RealFn = Arc::new(move |y| 2.0 * b(y) / s2(y));
                CumulativeIntegral::new(g, self.state_space, self.x0, self.scale_hint)
            })
            .collect()
    }

    /// `log m(x) = Σ θᵢ Tᵢ(x) − log σ²(x)`.
    pub fn log_speed(&self) -> Result<impl Fn(f64) -> f64 + Send + Sync + 'static> {
        let stats = self.statistics()?;
        let theta = self.theta.clone();
        let s2 = self.sigma2.clone();
        Ok(move |x: f64| {
            let mut acc = 0.0;
            for (t, th) in stats.iter().zip(&theta) {
                match t.eval(x) {
                    Ok(v) if *th != 0.0 => acc += th * v,
                    Ok(_) => {}
                    Err(_) => return f64::NAN,
                }
            }
            if acc.is_infinite() {
                acc
            } else {
                acc - s2(x).ln()
            }
        })
    }

    /// `f = m/e^{φ}` with `φ(θ) = log ∫ m`.
    pub fn invariant_density(&self, tol: Tolerance) -> Result<InvariantDensity> {
        InvariantDensity::from_log_speed(self.log_speed()?, self.state_space, self.x0, self.scale_hint, tol)
    }
}

/// `R_α = (−αφ(θ) + log ∫ σ^{−2α} exp(α Σ θᵢTᵢ))/(1 − α)` with
/// `φ = log ∫ m` the log-normalizer.
pub fn expfam_renyi(spec: &ExpFamSpec, alpha: f64, tol: Tolerance) -> Result<MeasureReport> {
    check_order(alpha)?;
    let f = spec.invariant_density(tol)?;
    let phi = f.log_normalizer();
    let peak = f.log_speed(spec.x0);
    let opts = QuadOptions { tol, center: Some(spec.x0), scale: spec.scale_hint, breakpoints: vec![spec.x0], ..QuadOptions::default() };
    let r = integrate_with(|x| (alpha * (f.log_speed(x) - peak)).exp(), spec.state_space, &opts)?;
    if !(r.value > 0.0 && r.value.is_finite()) {
        return divergent(format!("tilted integral is {}", r.value));
    }
    let log_tilt = r.value.ln() + alpha * peak;
    let k = 1.0 - alpha;
    let err = (r.abs_err_est / r.value + alpha * f.normalizer_rel_err()) / k.abs();
    Ok(MeasureReport::quadrature(Some(alpha), (log_tilt - alpha * phi) / k, err))
}

// ---------------------------------------------------------------------------
// Uniform access across families.

/// One built-in family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Ou(OUParams),
    Cir(CIRParams),
    #[serde(rename = "pearson4")]
    PearsonIV(PearsonIVParams),
    #[serde(rename = "invgamma")]
    InvGamma(InvGammaParams),
    #[serde(rename = "scaledf")]
    ScaledF(ScaledFParams),
    Jacobi(JacobiParams),
    Gig(GIGParams),
    Hyperbolic(HyperbolicParams),
    #[serde(rename = "skewt")]
    SkewT(SkewTParams),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Ou(_) => "ou",
            Family::Cir(_) => "cir",
            Family::PearsonIV(_) => "pearson4",
            Family::InvGamma(_) => "invgamma",
            Family::ScaledF(_) => "scaledf",
            Family::Jacobi(_) => "jacobi",
            Family::Gig(_) => "gig",
            Family::Hyperbolic(_) => "hyperbolic",
            Family::SkewT(_) => "skewt",
        }
    }

    pub fn density(&self) -> Result<AnalyticDensity> {
        match self {
            Family::Ou(p) => Ok(p.density()),
            Family::Cir(p) => Ok(p.density()),
            Family::PearsonIV(p) => p.density(),
            Family::InvGamma(p) => Ok(p.density()),
            Family::ScaledF(p) => Ok(p.density()),
            Family::Jacobi(p) => Ok(p.density()),
            Family::Gig(p) => p.density(),
            Family::Hyperbolic(p) => p.density(),
            Family::SkewT(p) => p.density(),
        }
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        match self {
            Family::Ou(p) => p.diffusion(),
            Family::Cir(p) => p.diffusion(),
            Family::PearsonIV(p) => p.diffusion(),
            Family::InvGamma(p) => p.diffusion(),
            Family::ScaledF(p) => p.diffusion(),
            Family::Jacobi(p) => p.diffusion(),
            Family::Gig(p) => p.diffusion(),
            Family::Hyperbolic(p) => p.diffusion(),
            Family::SkewT(p) => p.diffusion(),
        }
    }

    /// Closed-form Rényi information; Pearson IV uses its cosine-power
    /// representation. `Unsupported` when the family has no such form.
    pub fn renyi_closed(&self, alpha: f64) -> Result<MeasureReport> {
        match self {
            Family::Ou(p) => p.renyi(alpha),
            Family::Cir(p) => p.renyi(alpha),
            Family::PearsonIV(p) => pearson_iv_renyi_numeric(p, alpha),
            Family::InvGamma(p) => p.renyi(alpha),
            Family::ScaledF(p) => p.renyi(alpha),
            Family::Jacobi(p) => p.renyi(alpha),
            Family::Gig(p) => p.renyi(alpha),
            Family::Hyperbolic(p) => p.renyi(alpha),
            Family::SkewT(p) => p.renyi(alpha),
        }
    }

    pub fn shannon_closed(&self) -> Result<MeasureReport> {
        match self {
            Family::Ou(p) => p.shannon(),
            Family::Cir(p) => p.shannon(),
            Family::PearsonIV(_) => Err(Error::Unsupported("pearson4 has no closed Shannon entropy".into())),
            Family::InvGamma(p) => p.shannon(),
            Family::ScaledF(p) => p.shannon(),
            Family::Jacobi(p) => p.shannon(),
            Family::Gig(p) => p.shannon(),
            Family::Hyperbolic(p) => p.shannon(),
            Family::SkewT(p) => p.shannon(),
        }
    }

    pub fn song_closed(&self) -> Result<MeasureReport> {
        match self {
            Family::Ou(p) => p.song(),
            Family::Cir(p) => p.song(),
            Family::InvGamma(p) => p.song(),
            Family::ScaledF(p) => p.song(),
            Family::Jacobi(p) => p.song(),
            Family::Hyperbolic(p) => p.song(),
            Family::SkewT(p) => p.song(),
            Family::PearsonIV(_) | Family::Gig(_) => {
                Err(Error::Unsupported(format!("{} has no closed Song measure", self.name())))
            }
        }
    }

    /// Closed form when available, quadrature on the analytic density otherwise.
    pub fn renyi(&self, alpha: f64, tol: Tolerance) -> Result<MeasureReport> {
        match self.renyi_closed(alpha) {
            Err(Error::Unsupported(_)) => renyi_numeric(&self.density()?, alpha, tol),
            r => r,
        }
    }

    pub fn shannon(&self, tol: Tolerance) -> Result<MeasureReport> {
        match self.shannon_closed() {
            Err(Error::Unsupported(_)) => shannon_numeric(&self.density()?, tol),
            r => r,
        }
    }

    pub fn song(&self, tol: Tolerance) -> Result<MeasureReport> {
        match self.song_closed() {
            Err(Error::Unsupported(_)) => song_numeric(&self.density()?, tol),
            r => r,
        }
    }

    /// Whether the parameters lie in the ergodic region of the SDE.
    pub fn ergodic(&self) -> bool {
        match self {
            Family::Cir(p) => p.ergodic(),
            Family::ScaledF(p) => p.ergodic(),
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ou_values() {
        let p = OUParams::new(1.0, 0.0).unwrap();
        assert!(close(p.renyi(2.0).unwrap().value, 0.5 * (4.0 * PI).ln(), 1e-15));
        assert!(close(p.shannon().unwrap().value, 1.418_938_533_204_672_7, 1e-15));
    }

    #[test]
    fn cir_values() {
        assert!(close(CIRParams::new(1.0, 1.0).unwrap().shannon().unwrap().value, 1.0, 1e-14));
        let p = CIRParams::new(2.0, 1.0).unwrap();
        assert!(close(p.renyi(2.0).unwrap().value, 4f64.ln(), 1e-14));
        assert!(close(p.song().unwrap().value, PI * PI / 6.0 - 1.0, 1e-13));
        assert!(matches!(CIRParams::new(0.5, 1.0).unwrap().renyi(2.5), Err(Error::Divergent(_))));
    }

    #[test]
    fn pearson_iv_examples() {
        let p = PearsonIVParams::new(1.0, 0.0, 1.0).unwrap();
        let even = pearson_iv_renyi_special(&p, 1, PearsonBranch::Even).unwrap().value;
        assert!(close(even, 4.0 * LN_2 - 3.0 * (PI / 2.0).ln(), 1e-13), "{even}");
        let half = pearson_iv_renyi_special(&p, 1, PearsonBranch::Half).unwrap().value;
        assert!(close(half, -1.5 * ((2f64).powf(-5.0 / 3.0) * 4.0 / 3.0).ln(), 1e-13), "{half}");
        let num = pearson_iv_renyi_numeric(&p, 4.0 / 3.0).unwrap().value;
        assert!(close(num, even, 1e-12));
    }

    #[test]
    fn inverse_gamma_values() {
        let p = InvGammaParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(close(p.shannon().unwrap().value, 3.0 * crate::specfun::EULER_GAMMA - 1.0, 1e-13));
        assert!(close(p.song().unwrap().value, 9.0 * (PI * PI / 6.0 - 1.0) - 4.0, 1e-12));
        let q = InvGammaParams::new(1.0, 7.0, 1.0).unwrap();
        assert_eq!(p.song().unwrap().value, q.song().unwrap().value);
    }

    #[test]
    fn scaled_f_values() {
        let p = ScaledFParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(close(p.shannon().unwrap().value, 1.5 - LN_2, 1e-13));
        assert!(close(p.renyi(2.0).unwrap().value, 1.25f64.ln(), 1e-13));
        assert!(close(p.song().unwrap().value, 2.25, 1e-12));
    }

    #[test]
    fn jacobi_uniform() {
        let p = JacobiParams::new(-0.5, 0.5, 1.0).unwrap();
        assert!(close(p.renyi(2.0).unwrap().value, 0.0, 1e-14));
        assert!(close(p.song().unwrap().value, 0.0, 1e-14));
        assert!(JacobiParams::new(-0.6, 0.5, 1.0).is_err());
    }

    #[test]
    fn skew_t_cauchy_and_t6() {
        let c = SkewTParams::new(0.5, 0.5, 1.0).unwrap();
        assert!(close(c.shannon().unwrap().value, (4.0 * PI).ln(), 1e-13));
        assert!(close(c.renyi(2.0).unwrap().value, (2.0 * PI).ln(), 1e-13));
        let t6 = SkewTParams::new(3.0, 3.0, 1.0).unwrap();
        assert!(close(t6.song().unwrap().value, 0.79105, 1e-5));
    }

    #[test]
    fn hyperbolic_bessel_identity() {
        for z in [0.5, 1.0, 2.0, 10.0] {
            let k0 = crate::specfun::bessel_k(0.0, z).unwrap();
            let k1 = crate::specfun::bessel_k(1.0, z).unwrap();
            let k2 = crate::specfun::bessel_k(2.0, z).unwrap();
            assert!(close(z * (k0 + k2) / (2.0 * k1), 1.0 + z * k0 / k1, 1e-10));
        }
    }

    #[test]
    fn gig_rejects_parameters_outside_ergodic_region() {
        assert!(GIGParams::new(0.0, 1.0, 0.5, 0.0, 0.0).is_err());
        assert!(GIGParams::new(0.0, 1.0, 2.0, 1.0, 0.0).is_ok());
    }
}
