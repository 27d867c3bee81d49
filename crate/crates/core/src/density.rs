//! Densities on the line as consumed by the numerical measures.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::quadrature::{Interval, QuadOptions, Tolerance};
use crate::specfun::log_beta;

/// Below this log value `exp` underflows; contributions are treated as zero.
pub const LOG_UNDERFLOW: f64 = -745.0;

/// A probability density known through its logarithm.
pub trait Density: Send + Sync {
    fn domain(&self) -> Interval;

    /// `log f(x)`; `-inf` where the density vanishes.
    fn log_density(&self, x: f64) -> f64;

    fn density(&self, x: f64) -> f64 {
        let l = self.log_density(x);
        if l < LOG_UNDERFLOW {
            0.0
        } else {
            l.exp()
        }
    }

    /// A point near the bulk of the mass (mode, median or location).
    fn center(&self) -> f64;

    /// Length scale of the bulk.
    fn scale(&self) -> f64 {
        1.0
    }

    /// Interior points where the density is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn quad_options(&self, tol: Tolerance) -> QuadOptions {
        let dom = self.domain();
        let mut breakpoints = self.breakpoints();
        let c = self.center();
        if dom.contains(c) {
            breakpoints.push(c);
        }
        QuadOptions { tol, center: Some(c), scale: self.scale(), breakpoints, ..QuadOptions::default() }
    }
}

impl<D: Density + ?Sized> Density for &D {
    fn domain(&self) -> Interval {
        (**self).domain()
    }
    fn log_density(&self, x: f64) -> f64 {
        (**self).log_density(x)
    }
    fn center(&self) -> f64 {
        (**self).center()
    }
    fn scale(&self) -> f64 {
        (**self).scale()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<D: Density + ?Sized> Density for Arc<D> {
    fn domain(&self) -> Interval {
        (**self).domain()
    }
    fn log_density(&self, x: f64) -> f64 {
        (**self).log_density(x)
    }
    fn center(&self) -> f64 {
        (**self).center()
    }
    fn scale(&self) -> f64 {
        (**self).scale()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<D: Density + ?Sized> Density for Box<D> {
    fn domain(&self) -> Interval {
        (**self).domain()
    }
    fn log_density(&self, x: f64) -> f64 {
        (**self).log_density(x)
    }
    fn center(&self) -> f64 {
        (**self).center()
    }
    fn scale(&self) -> f64 {
        (**self).scale()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub mu: f64,
    pub sigma: f64,
}

impl Normal {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !mu.is_finite() {
            return domain(format!("normal needs sigma > 0, got {sigma}"));
        }
        Ok(Self { mu, sigma })
    }

    pub fn standard() -> Self {
        Self { mu: 0.0, sigma: 1.0 }
    }
}

impl Density for Normal {
    fn domain(&self) -> Interval {
        Interval::real_line()
    }
    fn log_density(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        -0.5 * z * z - self.sigma.ln() - 0.5 * (2.0 * PI).ln()
    }
    fn center(&self) -> f64 {
        self.mu
    }
    fn scale(&self) -> f64 {
        self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laplace {
    pub mu: f64,
    pub b: f64,
}

impl Laplace {
    pub fn new(mu: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !mu.is_finite() {
            return domain(format!("laplace needs b > 0, got {b}"));
        }
        Ok(Self { mu, b })
    }
}

impl Density for Laplace {
    fn domain(&self) -> Interval {
        Interval::real_line()
    }
    fn log_density(&self, x: f64) -> f64 {
        -(x - self.mu).abs() / self.b - (2.0 * self.b).ln()
    }
    fn center(&self) -> f64 {
        self.mu
    }
    fn scale(&self) -> f64 {
        self.b
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.mu]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cauchy {
    pub mu: f64,
    pub gamma: f64,
}

impl Cauchy {
    pub fn new(mu: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !mu.is_finite() {
            return domain(format!("cauchy needs gamma > 0, got {gamma}"));
        }
        Ok(Self { mu, gamma })
    }
}

impl Density for Cauchy {
    fn domain(&self) -> Interval {
        Interval::real_line()
    }
    fn log_density(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.gamma;
        -(PI * self.gamma).ln() - z.mul_add(z, 1.0).ln()
    }
    fn center(&self) -> f64 {
        self.mu
    }
    fn scale(&self) -> f64 {
        self.gamma
    }
}

/// Student's t with `nu` degrees of freedom, location `mu`, scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentT {
    pub nu: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl StudentT {
    pub fn new(nu: f64, mu: f64, sigma: f64) -> Result<Self> {
        if !(nu > 0.0) || !(sigma > 0.0) {
            return domain(format!("student t needs nu, sigma > 0, got {nu}, {sigma}"));
        }
        Ok(Self { nu, mu, sigma })
    }
}

impl Density for StudentT {
    fn domain(&self) -> Interval {
        Interval::real_line()
    }
    fn log_density(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        let nu = self.nu;
        -0.5 * (nu + 1.0) * (z * z / nu).ln_1p()
            - 0.5 * nu.ln()
            - log_beta(0.5 * nu, 0.5).unwrap_or(f64::NAN)
            - self.sigma.ln()
    }
    fn center(&self) -> f64 {
        self.mu
    }
    fn scale(&self) -> f64 {
        self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub a: f64,
    pub b: f64,
}

impl Uniform {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Interval::new(a, b)?;
        if !(a.is_finite() && b.is_finite()) {
            return domain("uniform needs finite end points");
        }
        Ok(Self { a, b })
    }
}

impl Density for Uniform {
    fn domain(&self) -> Interval {
        Interval { lower: self.a, upper: self.b }
    }
    fn log_density(&self, _x: f64) -> f64 {
        -(self.b - self.a).ln()
    }
    fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
    fn scale(&self) -> f64 {
        self.b - self.a
    }
}

/// `f(x) = g((x − μ)/σ)/σ` for a base density `g`.
#[derive(Debug, Clone)]
pub struct Affine<D> {
    pub base: D,
    pub shift: f64,
    pub scale: f64,
}

impl<D: Density> Affine<D> {
    pub fn new(base: D, shift: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !shift.is_finite() {
            return domain(format!("affine map needs scale > 0, got {scale}"));
        }
        Ok(Self { base, shift, scale })
    }

    fn map(&self, z: f64) -> f64 {
        self.shift + self.scale * z
    }
}

impl<D: Density> Density for Affine<D> {
    fn domain(&self) -> Interval {
        let d = self.base.domain();
        Interval { lower: self.map(d.lower), upper: self.map(d.upper) }
    }
    fn log_density(&self, x: f64) -> f64 {
        self.base.log_density((x - self.shift) / self.scale) - self.scale.ln()
    }
    fn center(&self) -> f64 {
        self.map(self.base.center())
    }
    fn scale(&self) -> f64 {
        self.scale * self.base.scale()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.base.breakpoints().into_iter().map(|b| self.map(b)).collect()
    }
}

type LogFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density given by a log-density closure.
#[derive(Clone)]
pub struct FnDensity {
    log_f: LogFn,
    domain: Interval,
    center: f64,
    scale: f64,
}

impl FnDensity {
    pub fn new(log_f: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: Interval, center: f64, scale: f64) -> Self {
        Self { log_f: Arc::new(log_f), domain, center, scale }
    }
}

impl std::fmt::Debug for FnDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnDensity").field("domain", &self.domain).field("center", &self.center).finish()
    }
}

impl Density for FnDensity {
    fn domain(&self) -> Interval {
        self.domain
    }
    fn log_density(&self, x: f64) -> f64 {
        (self.log_f)(x)
    }
    fn center(&self) -> f64 {
        self.center
    }
    fn scale(&self) -> f64 {
        self.scale
    }
}
