mod common;

use std::f64::consts::PI;

use proptest::prelude::*;

use diffusion_entropy::density::{Affine, Cauchy, Density, Laplace, Normal};
use diffusion_entropy::measures::{power_divergence, renyi_divergence, renyi_numeric, shannon_numeric, song_numeric};
use diffusion_entropy::models::*;
use diffusion_entropy::quadrature::{integrate, Interval, Tolerance};
use diffusion_entropy::sde::{invariant_density, scale_function, speed_density};
use diffusion_entropy::specfun::*;
use diffusion_entropy::spectrum::{compute_spectrum, default_grid};

use common::tight;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn relative_only() -> Tolerance {
    Tolerance::new(1e-300, 1e-14)
}

fn cheap() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

/// `K_ν(x) = ∫₀^∞ exp(−x cosh t) cosh(νt) dt`.
fn bessel_k_integral(nu: f64, x: f64) -> f64 {
    let f = |t: f64| (-x * t.cosh() + nu * t).exp() * 0.5 + (-x * t.cosh() - nu * t).exp() * 0.5;
    integrate(f, Interval::new(0.0, f64::INFINITY).unwrap(), relative_only()).unwrap().value
}

/// `∂K_ν(x)/∂ν = ∫₀^∞ t sinh(νt) exp(−x cosh t) dt`.
fn bessel_k_dnu_integral(nu: f64, x: f64) -> f64 {
    let f = |t: f64| t * 0.5 * ((-x * t.cosh() + nu * t).exp() - (-x * t.cosh() - nu * t).exp());
    integrate(f, Interval::new(0.0, f64::INFINITY).unwrap(), relative_only()).unwrap().value
}

proptest! {
    #[test]
    fn digamma_recurrence(x in 0.01f64..60.0) {
        let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
        prop_assert!(d.abs() <= 1e-12 * (1.0 / x).max(1.0), "{d}");
    }

    #[test]
    fn trigamma_recurrence(x in 0.05f64..60.0) {
        let d = trigamma(x + 1.0).unwrap() - trigamma(x).unwrap() + 1.0 / (x * x);
        prop_assert!(d.abs() <= 1e-12 * (1.0 / (x * x)).max(1.0), "{d}");
    }

    #[test]
    fn log_gamma_recurrence(x in 0.01f64..100.0) {
        let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln();
        prop_assert!(d.abs() <= 1e-12 * log_gamma(x + 1.0).unwrap().abs().max(1.0), "{d}");
    }

    #[test]
    fn log_beta_is_symmetric(a in 0.01f64..50.0, b in 0.01f64..50.0) {
        prop_assert_eq!(log_beta(a, b).unwrap(), log_beta(b, a).unwrap());
    }

    #[test]
    fn bessel_k_even_in_order(nu in 0.0f64..6.0, x in 0.05f64..30.0) {
        prop_assert!(rel(bessel_k(nu, x).unwrap(), bessel_k(-nu, x).unwrap()) <= 1e-10);
    }

    #[test]
    fn bessel_k_order_recurrence(nu in -4.0f64..4.0, x in 0.1f64..30.0) {
        // K_{ν+1} = K_{ν−1} + (2ν/x) K_ν
        let lhs = bessel_k_scaled(nu + 1.0, x).unwrap();
        let rhs = bessel_k_scaled(nu - 1.0, x).unwrap() + 2.0 * nu / x * bessel_k_scaled(nu, x).unwrap();
        prop_assert!(rel(lhs, rhs) <= 1e-11, "{lhs} {rhs}");
    }

    #[test]
    fn bessel_k_x_derivative_identity(nu in -3.0f64..3.0, x in 0.2f64..20.0) {
        let d = |h: f64| (bessel_k(nu, x + h).unwrap() - bessel_k(nu, x - h).unwrap()) / (2.0 * h);
        let h = 1e-3 * x.min(1.0);
        let fd = (4.0 * d(h / 2.0) - d(h)) / 3.0;
        let identity = -bessel_k(nu - 1.0, x).unwrap() - nu / x * bessel_k(nu, x).unwrap();
        prop_assert!(rel(fd, identity) <= 1e-7, "{fd} {identity}");
    }

    #[test]
    fn bessel_k_dnu_is_odd(nu in 0.0f64..5.0, x in 0.1f64..20.0) {
        let (p, m) = (bessel_k_dnu(nu, x).unwrap(), bessel_k_dnu(-nu, x).unwrap());
        prop_assert!((p + m).abs() <= 1e-8 * p.abs().max(1e-300).max(bessel_k(nu, x).unwrap()), "{p} {m}");
    }

    #[test]
    fn log_bessel_k_consistent(nu in -5.0f64..5.0, x in 0.05f64..50.0) {
        prop_assert!((log_bessel_k(nu, x).unwrap() - bessel_k(nu, x).unwrap().ln()).abs() <= 1e-12 * log_bessel_k(nu, x).unwrap().abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn bessel_k_matches_integral_representation(nu in -4.0f64..4.0, x in 0.1f64..25.0) {
        prop_assert!(rel(bessel_k(nu, x).unwrap(), bessel_k_integral(nu, x)) <= 1e-10);
    }

    #[test]
    fn bessel_k_dnu_matches_integral_representation(nu in -3.0f64..3.0, x in 0.2f64..20.0) {
        let (got, want) = (bessel_k_dnu(nu, x).unwrap(), bessel_k_dnu_integral(nu, x));
        prop_assert!((got - want).abs() <= 1e-7 * bessel_k(nu, x).unwrap().max(want.abs()), "{got} {want}");
    }

    #[test]
    fn quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, s in 0.3f64..3.0) {
        let dom = Interval::new(f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let tol = Tolerance::default();
        let f = |x: f64| (-x * x / (2.0 * s * s)).exp();
        let g = |x: f64| 1.0 / (1.0 + x * x);
        let both = integrate(|x| a * f(x) + b * g(x), dom, tol).unwrap();
        let (rf, rg) = (integrate(f, dom, tol).unwrap(), integrate(g, dom, tol).unwrap());
        let slack = both.abs_err_est + a.abs() * rf.abs_err_est + b.abs() * rg.abs_err_est + 1e-12;
        prop_assert!((both.value - a * rf.value - b * rg.value).abs() <= slack);
    }

    #[test]
    fn quadrature_gamma_integral(s in 0.3f64..8.0) {
        let r = integrate(|x: f64| ((s - 1.0) * x.ln() - x).exp(), Interval::new(0.0, f64::INFINITY).unwrap(), tight()).unwrap();
        prop_assert!(rel(r.value, log_gamma(s).unwrap().exp()) <= 1e-9);
    }

    #[test]
    fn quadrature_is_deterministic(s in 0.3f64..5.0) {
        let f = |x: f64| ((s - 1.0) * x.ln() - x).exp();
        let dom = Interval::new(0.0, f64::INFINITY).unwrap();
        let (a, b) = (integrate(f, dom, Tolerance::default()).unwrap(), integrate(f, dom, Tolerance::default()).unwrap());
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(a.abs_err_est.to_bits(), b.abs_err_est.to_bits());
    }

    #[test]
    fn scale_function_is_one_at_reference(mu in 1.2f64..6.0, x0 in 0.2f64..8.0) {
        let spec = CIRParams::new(mu, 1.0).unwrap().diffusion().unwrap().with_reference(x0).unwrap();
        prop_assert_eq!(scale_function(&spec, x0).unwrap(), 1.0);
        let lo = scale_function(&spec, 0.5 * x0).unwrap();
        let hi = scale_function(&spec, 2.0 * x0).unwrap();
        prop_assert!(lo > 0.0 && hi > 0.0);
        prop_assert!(speed_density(&spec, x0).unwrap() > 0.0);
    }

    #[test]
    fn invariant_density_ignores_reference(mu in 1.5f64..6.0, x0 in 0.3f64..6.0) {
        let spec = CIRParams::new(mu, 1.0).unwrap().diffusion().unwrap();
        let a = invariant_density(&spec, tight()).unwrap();
        let b = invariant_density(&spec.with_reference(x0).unwrap(), tight()).unwrap();
        for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            prop_assert!(rel(a.density(x), b.density(x)) <= 1e-10, "x = {x}");
        }
    }

    #[test]
    fn invariant_density_integrates_to_one(g in 0.3f64..5.0, b in 0.3f64..5.0) {
        let p = SkewTParams::new(g, b, 1.0).unwrap();
        let f = invariant_density(&p.diffusion().unwrap(), tight()).unwrap();
        let mass = integrate(|x| f.density(x), f.domain(), tight()).unwrap().value;
        prop_assert!((mass - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn song_is_affine_invariant(shift in -5.0f64..5.0, scale in 0.2f64..5.0) {
        let base = song_numeric(&Laplace::new(0.0, 1.0).unwrap(), tight()).unwrap().value;
        let moved = song_numeric(&Affine::new(Laplace::new(0.0, 1.0).unwrap(), shift, scale).unwrap(), tight()).unwrap().value;
        prop_assert!((base - moved).abs() <= 1e-6);
        let base = song_numeric(&Cauchy::new(0.0, 1.0).unwrap(), tight()).unwrap().value;
        let moved = song_numeric(&Cauchy::new(shift, scale).unwrap(), tight()).unwrap().value;
        prop_assert!((base - moved).abs() <= 1e-6);
    }

    #[test]
    fn self_divergence_vanishes(alpha in 0.1f64..5.0, nu in 1.0f64..10.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let f = diffusion_entropy::density::StudentT::new(nu, 0.0, 1.0).unwrap();
        prop_assert!(renyi_divergence(&f, &f, alpha, tight()).unwrap().value.abs() <= 1e-10);
        prop_assert!(power_divergence(&f, &f, alpha, tight()).unwrap().value.abs() <= 1e-10);
    }

    #[test]
    fn gaussian_divergences_match_closed_form(alpha in 0.1f64..4.0, d in -2.0f64..2.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let (f, g) = (Normal::new(0.0, 1.0).unwrap(), Normal::new(d, 1.0).unwrap());
        // ∫ f^α g^{1−α} = exp(−α(1−α)d²/2)
        let log_int = -alpha * (1.0 - alpha) * d * d / 2.0;
        let got = renyi_divergence(&f, &g, alpha, tight()).unwrap().value;
        prop_assert!((got - log_int / (alpha * (alpha - 1.0))).abs() <= 1e-8);
        let psi = power_divergence(&f, &g, alpha, tight()).unwrap().value;
        prop_assert!((psi - log_int.exp_m1() / (alpha * (alpha - 1.0))).abs() <= 1e-8);
    }

    #[test]
    fn power_divergence_agrees_to_first_order(alpha in 0.2f64..3.0, d in 1e-4f64..1e-3) {
        prop_assume!((alpha - 1.0).abs() > 1e-2);
        let (f, g) = (Normal::new(0.0, 1.0).unwrap(), Normal::new(d, 1.0).unwrap());
        let dv = renyi_divergence(&f, &g, alpha, tight()).unwrap().value;
        let psi = power_divergence(&f, &g, alpha, tight()).unwrap().value;
        prop_assert!(dv <= 1e-6);
        prop_assert!((dv - psi).abs() <= (alpha * (1.0 - alpha)).abs() * dv * dv + 1e-12);
    }

    #[test]
    fn renyi_approaches_shannon(mu in 1.2f64..6.0) {
        let f = CIRParams::new(mu, 1.0).unwrap().density();
        let r1 = shannon_numeric(&f, tight()).unwrap().value;
        for a in [1.0 - 1e-3, 1.0 + 1e-3] {
            prop_assert!((renyi_numeric(&f, a, tight()).unwrap().value - r1).abs() <= 5e-3);
        }
    }

    #[test]
    fn cir_closed_matches_quadrature(mu in 1.05f64..8.0, alpha in 0.3f64..4.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let p = CIRParams::new(mu, 1.0).unwrap();
        let closed = p.renyi(alpha).unwrap().value;
        let numeric = renyi_numeric(&p.density(), alpha, tight()).unwrap().value;
        prop_assert!((closed - numeric).abs() <= 1e-7, "{closed} {numeric}");
    }

    #[test]
    fn inverse_gamma_closed_matches_quadrature(a in 0.2f64..3.0, mu in 0.2f64..4.0, alpha in 0.6f64..4.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let p = InvGammaParams::new(a, mu, 1.0).unwrap();
        let closed = p.renyi(alpha).unwrap().value;
        let numeric = renyi_numeric(&p.density(), alpha, tight()).unwrap().value;
        prop_assert!((closed - numeric).abs() <= 1e-7, "{closed} {numeric}");
    }

    #[test]
    fn skew_t_is_reflection_symmetric(g in 0.3f64..6.0, b in 0.3f64..6.0, alpha in 0.3f64..4.0) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let (p, q) = (SkewTParams::new(g, b, 1.0).unwrap(), SkewTParams::new(b, g, 1.0).unwrap());
        let (mp, mq) = (skew_t_measures(&p, alpha).unwrap(), skew_t_measures(&q, alpha).unwrap());
        prop_assert!((mp.renyi.value - mq.renyi.value).abs() <= 1e-12 * mp.renyi.value.abs().max(1.0));
        prop_assert!((mp.shannon.value - mq.shannon.value).abs() <= 1e-12 * mp.shannon.value.abs().max(1.0));
        let (sp, sq) = (mp.song.unwrap().value, mq.song.unwrap().value);
        prop_assert!((sp - sq).abs() <= 1e-12 * sp.abs().max(1.0));
        let (fp, fq) = (p.density().unwrap(), q.density().unwrap());
        for x in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            prop_assert!(rel(fp.log_density(x), fq.log_density(-x)) <= 1e-12);
        }
    }

    #[test]
    fn hyperbolic_closed_matches_quadrature(gamma in 0.5f64..4.0, frac in -0.9f64..0.9, delta in 0.2f64..3.0) {
        let p = HyperbolicParams::new(gamma, frac * gamma, delta, 0.0, 1.0).unwrap();
        let f = p.density().unwrap();
        let closed = p.shannon().unwrap().value;
        let numeric = shannon_numeric(&f, tight()).unwrap().value;
        prop_assert!((closed - numeric).abs() <= 1e-6, "{closed} {numeric}");
        let closed = p.song().unwrap().value;
        let numeric = song_numeric(&f, tight()).unwrap().value;
        prop_assert!((closed - numeric).abs() <= 1e-6, "{closed} {numeric}");
    }

    #[test]
    fn spectrum_is_nonincreasing(g in 0.5f64..5.0, b in 0.5f64..5.0) {
        let fam = Family::SkewT(SkewTParams::new(g, b, 1.0).unwrap());
        let table = compute_spectrum(&fam, &default_grid(), tight()).unwrap();
        prop_assert!(table.is_nonincreasing());
    }
}

#[test]
fn bessel_ratio_identity() {
    for z in [0.5, 1.0, 2.0, 10.0] {
        let (k0, k1, k2) = (bessel_k_scaled(0.0, z).unwrap(), bessel_k_scaled(1.0, z).unwrap(), bessel_k_scaled(2.0, z).unwrap());
        let lhs = z * (k0 + k2) / (2.0 * k1);
        assert!((lhs - (1.0 + z * k0 / k1)).abs() <= 1e-10, "z = {z}");
    }
}

#[test]
fn integral_oracle_sanity() {
    // K_{1/2}(x) = sqrt(π/(2x)) e^{−x}
    for x in [0.3, 1.0, 4.0] {
        let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
        assert!(rel(bessel_k_integral(0.5, x), want) <= 1e-12);
    }
}
