//! Scale function, speed measure and invariant density of a
//! one-dimensional diffusion `dX = b(X) dt + σ(X) dW`, together with a
//! numerical ergodicity probe.
//!
//! All three objects are built from the antiderivative
//! `F(x) = ∫_{x̃}^x b/σ²`, so that `s = exp(−2F)` and `m = exp(2F)/σ²`.
//! [`CumulativeIntegral`] tabulates `F` once on a geometric anchor grid
//! that runs out to both ends of the state space; a later evaluation only
//! integrates the short piece between `x` and its nearest anchor.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_gauss_legendre, integrate_with, Interval, QuadOptions, Tolerance};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients and state space of a scalar diffusion.
#[derive(Clone)]
pub struct DiffusionSpec {
    pub drift: RealFn,
    /// Squared diffusion coefficient `σ²`, positive inside the state space.
    pub sigma2: RealFn,
    pub state_space: Interval,
    /// The point `x̃` where `s(x̃) = 1`.
    pub reference: f64,
    /// Length scale used to place quadrature nodes and probe radii.
    pub scale_hint: f64,
    /// Boundaries declared instantaneously reflecting, `[lower, upper]`.
    pub reflecting: [bool; 2],
}

impl fmt::Debug for DiffusionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionSpec")
            .field("state_space", &self.state_space)
            .field("reference", &self.reference)
            .field("scale_hint", &self.scale_hint)
            .field("reflecting", &self.reflecting)
            .finish_non_exhaustive()
    }
}

impl DiffusionSpec {
    pub fn new(
        drift: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sigma2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        state_space: Interval,
        reference: f64,
    ) -> Result<Self> {
        Self::from_arcs(Arc::new(drift), Arc::new(sigma2), state_space, reference)
    }

    pub fn from_arcs(drift: RealFn, sigma2: RealFn, state_space: Interval, reference: f64) -> Result<Self> {
        Interval::new(state_space.lower, state_space.upper)?;
        if !state_space.contains(reference) {
            return domain(format!("reference point {reference} is not inside the state space"));
        }
        let s2 = sigma2(reference);
        if !(s2 > 0.0 && s2.is_finite()) {
            return domain(format!("sigma^2({reference}) = {s2} is not positive"));
        }
        if !drift(reference).is_finite() {
            return domain(format!("drift is not finite at {reference}"));
        }
        Ok(Self { drift, sigma2, state_space, reference, scale_hint: 1.0, reflecting: [false, false] })
    }

    pub fn with_scale_hint(mut self, scale: f64) -> Self {
        if scale > 0.0 && scale.is_finite() {
            self.scale_hint = scale;
        }
        self
    }

    pub fn with_reflecting(mut self, lower: bool, upper: bool) -> Self {
        self.reflecting = [lower, upper];
        self
    }

    /// Same coefficients, different `x̃`.
    pub fn with_reference(&self, reference: f64) -> Result<Self> {
        let mut out = Self::from_arcs(self.drift.clone(), self.sigma2.clone(), self.state_space, reference)?;
        out.scale_hint = self.scale_hint;
        out.reflecting = self.reflecting;
        Ok(out)
    }

    /// `b/σ²`, the integrand of the scale exponent.
    fn ratio(&self) -> RealFn {
        let b = self.drift.clone();
        let s2 = self.sigma2.clone();
        Arc::new(move |y| b(y) / s2(y))
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !self.state_space.contains(x) {
            return domain(format!("{x} is outside the state space"));
        }
        Ok(())
    }
}

fn piece_tol() -> Tolerance {
    Tolerance::new(1e-15, 1e-14)
}

/// `∫_{x̃}^x b/σ²` by direct quadrature.
fn scale_exponent(spec: &DiffusionSpec, x: f64) -> Result<f64> {
    spec.check_point(x)?;
    let x0 = spec.reference;
    if x == x0 {
        return Ok(0.0);
    }
    let g = spec.ratio();
    let (a, b, sign) = if x > x0 { (x0, x, 1.0) } else { (x, x0, -1.0) };
    let opts = QuadOptions::with_tol(piece_tol());
    let r = match integrate_with(|y| g(y), Interval { lower: a, upper: b }, &opts) {
        Ok(r) => r.value,
        Err(Error::NonConvergence { estimate, .. }) => estimate,
        Err(e) => return Err(e),
    };
    Ok(sign * r)
}

/// `s(x) = exp(−2∫_{x̃}^x b/σ²)`.
pub fn scale_function(spec: &DiffusionSpec, x: f64) -> Result<f64> {
    Ok((-2.0 * scale_exponent(spec, x)?).exp())
}

/// `m(x) = 1/(σ²(x) s(x))`.
pub fn speed_density(spec: &DiffusionSpec, x: f64) -> Result<f64> {
    let f = scale_exponent(spec, x)?;
    let s2 = (spec.sigma2)(x);
    if !(s2 > 0.0) {
        return domain(format!("sigma^2({x}) = {s2} is not positive"));
    }
    Ok((2.0 * f - s2.ln()).exp())
}

/// Beyond this magnitude the antiderivative only matters through its sign.
const CUMULATIVE_CAP: f64 = 1e4;
const MAX_ANCHORS: usize = 1100;

/// Tabulated antiderivative `F(x) = ∫_{x0}^x g` on an open interval.
#[derive(Clone)]
pub struct CumulativeIntegral {
    g: RealFn,
    x0: f64,
    /// `(x_k, F(x_k))` with `x_k` increasing away from `x0`.
    right: Vec<(f64, f64)>,
    /// `(x_k, F(x_k))` with `x_k` decreasing away from `x0`.
    left: Vec<(f64, f64)>,
    domain: Interval,
}

impl fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulativeIntegral")
            .field("x0", &self.x0)
            .field("right_anchors", &self.right.len())
            .field("left_anchors", &self.left.len())
            .finish()
    }
}

fn gl(g: &RealFn, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    match integrate_gauss_legendre(|y| g(y), lo, hi, piece_tol()) {
        Ok(r) => Ok(sign * r.value),
        Err(Error::NonConvergence { estimate, .. }) => Ok(sign * estimate),
        Err(e) => Err(e),
    }
}

impl CumulativeIntegral {
    pub fn new(g: RealFn, domain: Interval, x0: f64, scale: f64) -> Result<Self> {
        if !domain.contains(x0) {
            return domain_err(x0);
        }
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        let right = Self::anchors(&g, x0, domain.upper, scale);
        let left = Self::anchors(&g, x0, domain.lower, scale);
        Ok(Self { g, x0, right, left, domain })
    }

    fn anchors(g: &RealFn, x0: f64, end: f64, scale: f64) -> Vec<(f64, f64)> {
        let dir = if end > x0 { 1.0 } else { -1.0 };
        let mut out = Vec::new();
        let (mut prev_x, mut prev_f) = (x0, 0.0);
        for k in 1..=MAX_ANCHORS {
            let x = if end.is_finite() {
                end - (end - x0) * 0.5f64.powi(k as i32)
            } else {
                x0 + dir * scale * (2f64.powi(k as i32) - 1.0)
            };
            if x == prev_x || x == end || !x.is_finite() || x.abs() > 1e300 {
                break;
            }
            let Ok(piece) = gl(g, prev_x, x) else { break };
            let f = prev_f + piece;
            if !f.is_finite() {
                break;
            }
            out.push((x, f));
            (prev_x, prev_f) = (x, f);
            if f.abs() > CUMULATIVE_CAP {
                break;
            }
        }
        out
    }

    pub fn reference(&self) -> f64 {
        self.x0
    }

    /// `F(x)`; `±inf` once `|F|` is far beyond the representable range of `exp`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x) {
            return domain_err(x);
        }
        let side = if x >= self.x0 { &self.right } else { &self.left };
        let beyond = |a: f64| if x >= self.x0 { a <= x } else { a >= x };
        // last anchor not past x
        let n = side.partition_point(|&(a, _)| beyond(a));
        let (ax, af) = if n == 0 { (self.x0, 0.0) } else { side[n - 1] };
        if n == side.len() && af.abs() > CUMULATIVE_CAP {
            return Ok(af.signum() * f64::INFINITY);
        }
        Ok(af + gl(&self.g, ax, x)?)
    }
}

fn domain_err<T>(x: f64) -> Result<T> {
    domain(format!("{x} is outside the state space"))
}

type LogFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `f = m/G` for an integrable speed density `m`.
#[derive(Clone)]
pub struct InvariantDensity {
    log_m: LogFn,
    log_g: f64,
    g_rel_err: f64,
    domain: Interval,
    center: f64,
    scale: f64,
}

impl fmt::Debug for InvariantDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvariantDensity")
            .field("domain", &self.domain)
            .field("log_normalizer", &self.log_g)
            .field("center", &self.center)
            .finish_non_exhaustive()
    }
}

impl InvariantDensity {
    /// Normalizes an unnormalized log speed density over `domain`.
    pub fn from_log_speed(
        log_m: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Interval,
        center: f64,
        scale: f64,
        tol: Tolerance,
    ) -> Result<Self> {
        if !domain.contains(center) {
            return domain_err(center);
        }
        let peak = log_m(center);
        if !peak.is_finite() {
            return crate::error::domain(format!("speed density is not finite at {center}"));
        }
        let opts = QuadOptions { tol, center: Some(center), scale, breakpoints: vec![center], ..QuadOptions::default() };
        let r = integrate_with(|x| (log_m(x) - peak).exp(), domain, &opts).map_err(|e| match e {
            Error::Divergent(msg) => Error::NotErgodic(format!("speed measure is not integrable: {msg}")),
            e => e,
        })?;
        if !(r.value > 0.0 && r.value.is_finite()) {
            return Err(Error::NotErgodic(format!("speed measure integral is {}", r.value)));
        }
        Ok(Self {
            log_m: Arc::new(log_m),
            log_g: peak + r.value.ln(),
            g_rel_err: r.abs_err_est / r.value,
            domain,
            center,
            scale,
        })
    }

    /// `log m(x)` with `s(x̃) = 1`.
    pub fn log_speed(&self, x: f64) -> f64 {
        (self.log_m)(x)
    }

    pub fn speed(&self, x: f64) -> f64 {
        self.log_speed(x).exp()
    }

    /// `G = ∫ m`.
    pub fn normalizer(&self) -> f64 {
        self.log_g.exp()
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_g
    }

    /// Relative error estimate of `G`.
    pub fn normalizer_rel_err(&self) -> f64 {
        self.g_rel_err
    }
}

impl Density for InvariantDensity {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn log_density(&self, x: f64) -> f64 {
        if !self.domain.contains(x) {
            return f64::NEG_INFINITY;
        }
        self.log_speed(x) - self.log_g
    }
    fn center(&self) -> f64 {
        self.center
    }
    fn scale(&self) -> f64 {
        self.scale
    }
}

/// Builds `f = m/G` from the coefficients of `spec`.
///
/// Fails with [`Error::NotErgodic`] when `∫ m` diverges. Boundaries whose
/// scale integral converges are treated as reflecting.
pub fn invariant_density(spec: &DiffusionSpec, tol: Tolerance) -> Result<InvariantDensity> {
    let cum = Arc::new(CumulativeIntegral::new(spec.ratio(), spec.state_space, spec.reference, spec.scale_hint)?);
    let s2 = spec.sigma2.clone();
    let log_m = move |x: f64| match cum.eval(x) {
        Ok(f) if f.is_infinite() => f,
        Ok(f) => 2.0 * f - s2(x).ln(),
        Err(_) => f64::NAN,
    };
    InvariantDensity::from_log_speed(log_m, spec.state_space, spec.reference, spec.scale_hint, tol)
}

/// Outcome of probing an improper integral on growing truncations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    Bounded,
    Divergent,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ergodic,
    NeedsReflection,
    NotErgodic,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub speed_integral_finite: bool,
    pub left_scale_divergent: bool,
    pub right_scale_divergent: bool,
    pub verdict: Verdict,
    pub speed: [Growth; 2],
    pub scale: [Growth; 2],
}

/// Truncation radii `10^k` for `k = 1..=6`.
const PROBE_DEPTH: i32 = 6;
const GROWTH_RATIO: f64 = 10.0;

fn probe_points(x0: f64, end: f64, scale: f64) -> Vec<f64> {
    (1..=PROBE_DEPTH)
        .map(|k| {
            let r = 10f64.powi(k);
            if end.is_finite() {
                end - (end - x0) / r
            } else if end > x0 {
                x0 + scale * r
            } else {
                x0 - scale * r
            }
        })
        .collect()
}

/// Classifies `∫_{x0}^{end} exp(h)` from partial integrals on the probe radii.
fn probe(h: &(dyn Fn(f64) -> f64 + Sync), x0: f64, end: f64, scale: f64) -> Growth {
    let pts = probe_points(x0, end, scale);
    let opts = QuadOptions::with_tol(Tolerance::new(1e-300, 1e-9));
    let mut partial = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    let mut prev = x0;
    for &p in &pts {
        if p == prev {
            partial.push(acc);
            continue;
        }
        let (a, b) = if p > prev { (prev, p) } else { (p, prev) };
        let piece = match integrate_with(|x| h(x).exp(), Interval { lower: a, upper: b }, &opts) {
            Ok(r) => r.value,
            Err(Error::NonConvergence { estimate, .. }) => estimate,
            Err(Error::Divergent(_)) => return Growth::Divergent,
            Err(_) => return Growth::Undecided,
        };
        acc += piece;
        if !acc.is_finite() {
            return Growth::Divergent;
        }
        partial.push(acc);
        prev = p;
    }
    classify(&partial)
}

fn classify(partial: &[f64]) -> Growth {
    let n = partial.len();
    let last = partial[n - 1];
    let first = partial[0];
    if first > 0.0 && last / first >= GROWTH_RATIO {
        return Growth::Divergent;
    }
    let d_last = partial[n - 1] - partial[n - 2];
    let d_prev = partial[n - 2] - partial[n - 3];
    if d_last <= 1e-12 * last {
        return Growth::Bounded;
    }
    let r = d_last / d_prev;
    if r >= 0.95 {
        Growth::Divergent
    } else if r <= 0.5 {
        Growth::Bounded
    } else {
        Growth::Undecided
    }
}

/// Probes `∫ m` and the scale integrals at both boundaries.
///
/// The diffusion is classified ergodic when `∫ m` is finite and the scale
/// integral diverges at both ends. A boundary with a finite scale integral
/// yields `NeedsReflection` when the spec declares it reflecting and
/// `NotErgodic` otherwise.
pub fn ergodicity_check(spec: &DiffusionSpec) -> ErgodicityReport {
    let undecided = ErgodicityReport {
        speed_integral_finite: false,
        left_scale_divergent: false,
        right_scale_divergent: false,
        verdict: Verdict::Inconclusive,
        speed: [Growth::Undecided; 2],
        scale: [Growth::Undecided; 2],
    };
    let Ok(cum) = CumulativeIntegral::new(spec.ratio(), spec.state_space, spec.reference, spec.scale_hint) else {
        return undecided;
    };
    let s2 = spec.sigma2.clone();
    let log_m = |x: f64| match cum.eval(x) {
        Ok(f) if f.is_infinite() => f,
        Ok(f) => 2.0 * f - s2(x).ln(),
        Err(_) => f64::NAN,
    };
    let log_s = |x: f64| cum.eval(x).map(|f| -2.0 * f).unwrap_or(f64::NAN);
    let (x0, sc) = (spec.reference, spec.scale_hint);
    let Interval { lower, upper } = spec.state_space;
    let speed = [probe(&log_m, x0, lower, sc), probe(&log_m, x0, upper, sc)];
    let scale = [probe(&log_s, x0, lower, sc), probe(&log_s, x0, upper, sc)];
    let verdict = verdict_from(speed, scale, spec.reflecting);
    ErgodicityReport {
        speed_integral_finite: speed.iter().all(|g| *g == Growth::Bounded),
        left_scale_divergent: scale[0] == Growth::Divergent,
        right_scale_divergent: scale[1] == Growth::Divergent,
        verdict,
        speed,
        scale,
    }
}

fn verdict_from(speed: [Growth; 2], scale: [Growth; 2], reflecting: [bool; 2]) -> Verdict {
    if speed.contains(&Growth::Divergent) {
        return Verdict::NotErgodic;
    }
    if speed.contains(&Growth::Undecided) || scale.contains(&Growth::Undecided) {
        return Verdict::Inconclusive;
    }
    if scale.iter().all(|g| *g == Growth::Divergent) {
        return Verdict::Ergodic;
    }
    let reflected = scale.iter().zip(reflecting).all(|(g, r)| *g == Growth::Divergent || r);
    if reflected {
        Verdict::NeedsReflection
    } else {
        Verdict::NotErgodic
    }
}
