#![allow(dead_code)]

use diffusion_entropy::density::Density;
use diffusion_entropy::models::*;
use diffusion_entropy::quadrature::{integrate_with, Interval, Tolerance};

pub fn tight() -> Tolerance {
    Tolerance::new(1e-14, 1e-13)
}

pub fn cir() -> Vec<Family> {
    [1.5, 2.0, 4.5].iter().map(|&mu| Family::Cir(CIRParams::new(mu, 1.0).unwrap())).collect()
}

pub fn inverse_gamma() -> Vec<Family> {
    [(1.0, 1.0), (0.5, 2.0), (2.0, 3.0)]
        .iter()
        .map(|&(a, mu)| Family::InvGamma(InvGammaParams::new(a, mu, 1.0).unwrap()))
        .collect()
}

pub fn scaled_f() -> Vec<Family> {
    [(1.0, 1.0), (0.5, 2.0), (1.0, 3.0)]
        .iter()
        .map(|&(a, mu)| Family::ScaledF(ScaledFParams::new(a, mu, 1.0).unwrap()))
        .collect()
}

pub fn jacobi() -> Vec<Family> {
    [(-0.25, 0.5), (-0.2, 0.3), (-0.1, 0.6)]
        .iter()
        .map(|&(a, mu)| Family::Jacobi(JacobiParams::new(a, mu, 1.0).unwrap()))
        .collect()
}

pub fn gig() -> Vec<Family> {
    [(0.0, 1.0, -0.5, 1.0, 1.0), (0.5, 1.0, 1.5, 2.0, 0.5), (1.0, 0.7, -2.0, 1.0, 3.0)]
        .iter()
        .map(|&(g, l, t1, t2, t3)| Family::Gig(GIGParams::new(g, l, t1, t2, t3).unwrap()))
        .collect()
}

pub fn hyperbolic() -> Vec<Family> {
    [(1.0, 0.0, 1.0, 0.0), (2.0, 1.0, 0.5, 1.0), (3.0, -1.0, 2.0, -1.0)]
        .iter()
        .map(|&(g, b, d, mu)| Family::Hyperbolic(HyperbolicParams::new(g, b, d, mu, 1.0).unwrap()))
        .collect()
}

pub fn skew_t() -> Vec<Family> {
    [(0.5, 0.5), (3.0, 3.0), (2.0, 5.0)]
        .iter()
        .map(|&(g, b)| Family::SkewT(SkewTParams::new(g, b, 1.0).unwrap()))
        .collect()
}

pub fn ou() -> Vec<Family> {
    [(1.0, 0.0), (0.5, 2.0)].iter().map(|&(t, mu)| Family::Ou(OUParams::new(t, mu).unwrap())).collect()
}

pub fn pearson_iv() -> Vec<Family> {
    [(1.0, 0.0), (0.5, 1.0), (0.3, -2.0)]
        .iter()
        .map(|&(a, mu)| Family::PearsonIV(PearsonIVParams::new(a, mu, 1.0).unwrap()))
        .collect()
}

/// The seven families with closed Rényi and Shannon forms.
pub fn closed_form_families() -> Vec<Family> {
    [cir(), inverse_gamma(), scaled_f(), jacobi(), gig(), hyperbolic(), skew_t()].concat()
}

pub fn all_families() -> Vec<Family> {
    [ou(), closed_form_families(), pearson_iv()].concat()
}

fn cdf<D: Density>(f: &D, x: f64) -> f64 {
    let d = f.domain();
    let mut opts = f.quad_options(tight());
    opts.breakpoints.retain(|b| *b < x);
    integrate_with(|t| f.density(t), Interval { lower: d.lower, upper: x }, &opts).map(|r| r.value).unwrap_or(f64::NAN)
}

/// The `p`-quantile by bisection on the quadrature CDF.
pub fn quantile<D: Density>(f: &D, p: f64) -> f64 {
    let d = f.domain();
    let c = f.center();
    let s = f.scale();
    let mut lo = if d.lower.is_finite() { d.lower } else { c - s };
    while !d.lower.is_finite() && cdf(f, lo) > p {
        lo = c - 2.0 * (c - lo);
    }
    let mut hi = if d.upper.is_finite() { d.upper } else { c + s };
    while !d.upper.is_finite() && cdf(f, hi) < p {
        hi = c + 2.0 * (hi - c);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cdf(f, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `n` equally spaced points over the central 99% of the mass.
pub fn central_grid<D: Density>(f: &D, n: usize) -> Vec<f64> {
    let (a, b) = (quantile(f, 0.005), quantile(f, 0.995));
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
