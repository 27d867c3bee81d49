//! Rényi spectra over α-grids, their gradient, the Song measure recovered
//! from the gradient at α = 1, and tail ordering.

use std::fmt;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{domain, Error, Result};
use crate::measures::{renyi_numeric, shannon_numeric, song_numeric, MeasureReport, Method};
use crate::models::Family;
use crate::quadrature::Tolerance;

/// Anything with a Rényi spectrum.
pub trait RenyiSource: Sync {
    /// `R_α` for `α ≠ 1`.
    fn renyi(&self, alpha: f64, tol: Tolerance) -> Result<MeasureReport>;

    /// `R₁`.
    fn shannon(&self, tol: Tolerance) -> Result<MeasureReport>;

    /// `R_α` with the Shannon entropy at `α = 1`.
    fn spectrum_value(&self, alpha: f64, tol: Tolerance) -> Result<MeasureReport> {
        if alpha == 1.0 {
            self.shannon(tol).map(|r| MeasureReport { alpha: Some(1.0), ..r })
        } else {
            self.renyi(alpha, tol)
        }
    }
}

/// Closed forms where the family has them, quadrature otherwise.
impl RenyiSource for Family {
    fn renyi(&self, alpha: f64, tol: Tolerance) -> Result<MeasureReport> {
        Family::renyi(self, alpha, tol)
    }
    fn shannon(&self, tol: Tolerance) -> Result<MeasureReport> {
        Family::shannon(self, tol)
    }
}

/// A density whose spectrum is computed by quadrature only.
#[derive(Debug, Clone)]
pub struct Numeric<D>(pub D);

impl<D: Density> RenyiSource for Numeric<D> {
    fn renyi(&self, alpha: f64, tol: Tolerance) -> Result<MeasureReport> {
        renyi_numeric(&self.0, alpha, tol)
    }
    fn shannon(&self, tol: Tolerance) -> Result<MeasureReport> {
        shannon_numeric(&self.0, tol)
    }
}

impl<S: RenyiSource + ?Sized> RenyiSource for &S {
    fn renyi(&self, alpha: f64, tol: Tolerance) -> Result<MeasureReport> {
        (**self).renyi(alpha, tol)
    }
    fn shannon(&self, tol: Tolerance) -> Result<MeasureReport> {
        (**self).shannon(tol)
    }
}

/// Why a row has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    /// `∫ f^α` diverges at this order.
    Divergent,
    /// Any other failure (domain, overflow, non-convergence).
    Error,
}

impl fmt::Display for RowFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowFlag::Divergent => "divergent",
            RowFlag::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub alpha: f64,
    pub renyi: Option<f64>,
    pub method: Option<Method>,
    pub err: Option<f64>,
    pub flag: Option<RowFlag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl SpectrumRow {
    fn from_result(alpha: f64, r: Result<MeasureReport>) -> Self {
        match r {
            Ok(m) => Self { alpha, renyi: Some(m.value), method: Some(m.method), err: Some(m.abs_err_est), flag: None, message: None },
            Err(e) => {
                let flag = if matches!(e, Error::Divergent(_)) { RowFlag::Divergent } else { RowFlag::Error };
                Self { alpha, renyi: None, method: None, err: None, flag: Some(flag), message: Some(e.to_string()) }
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
    /// `(α, dR/dα)` at interior rows whose neighbours both have values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Vec<(f64, f64)>>,
}

impl SpectrumTable {
    pub fn row(&self, alpha: f64) -> Option<&SpectrumRow> {
        self.rows.iter().find(|r| r.alpha == alpha)
    }

    /// Finite rows as `(α, R_α, err)`.
    pub fn values(&self) -> Vec<(f64, f64, f64)> {
        self.rows.iter().filter_map(|r| Some((r.alpha, r.renyi?, r.err.unwrap_or(0.0)))).collect()
    }

    /// Whether consecutive finite rows are nonincreasing within twice
    /// their combined error estimates.
    pub fn is_nonincreasing(&self) -> bool {
        self.values().windows(2).all(|w| {
            let slack = 2.0 * (w[0].2 + w[1].2) + 4.0 * f64::EPSILON * w[0].1.abs().max(w[1].1.abs());
            w[1].1 <= w[0].1 + slack
        })
    }

    /// Fills `gradient` by three-point differences on the (uneven) grid.
    pub fn with_gradient(mut self) -> Self {
        let v = self.values();
        let g = v
            .windows(3)
            .map(|w| {
                let (x0, x1, x2) = (w[0].0, w[1].0, w[2].0);
                let (h0, h1) = (x1 - x0, x2 - x1);
                let d = -h1 / (h0 * (h0 + h1)) * w[0].1 + (h1 - h0) / (h0 * h1) * w[1].1 + h0 / (h1 * (h0 + h1)) * w[2].1;
                (x1, d)
            })
            .collect();
        self.gradient = Some(g);
        self
    }
}

/// `steps` geometrically spaced orders from `min` to `max` inclusive.
pub fn geometric_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && min < max && max.is_finite()) {
        return domain(format!("need 0 < alpha_min < alpha_max, got {min}, {max}"));
    }
    if steps < 2 {
        return domain(format!("need at least 2 steps, got {steps}"));
    }
    let r = (max / min).ln() / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i == steps - 1 { max } else { min * (r * i as f64).exp() })
        .collect())
}

/// 33 geometric orders over `[0.25, 16]`.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(0.25, 16.0, 33).expect("static grid")
}

/// `R_α` at each order plus the Shannon row at `α = 1`.
///
/// Rows are independent; a failed row is flagged in place and the rest of
/// the table is still computed.
pub fn compute_spectrum<S: RenyiSource + ?Sized>(source: &S, alphas: &[f64], tol: Tolerance) -> Result<SpectrumTable> {
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return domain(format!("orders must be positive and finite, got {a}"));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return domain("orders must be strictly increasing");
    }
    let mut grid = alphas.to_vec();
    if let Err(i) = grid.binary_search_by(|a| a.total_cmp(&1.0)) {
        grid.insert(i, 1.0);
    }
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(grid.len()).max(1);
    let chunk = grid.len().div_ceil(workers);
    let rows = thread::scope(|s| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter().map(|&a| SpectrumRow::from_result(a, source.spectrum_value(a, tol))).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("spectrum worker panicked")).collect()
    });
    Ok(SpectrumTable { rows, gradient: None })
}

/// Central difference `(R_{α+h} − R_{α−h})/(2h)`.
pub fn gradient_at<S: RenyiSource + ?Sized>(source: &S, alpha: f64, h: f64, tol: Tolerance) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return domain(format!("step must be positive, got {h}"));
    }
    if !(alpha - h > 0.0 && (alpha + h).is_finite()) {
        return domain(format!("alpha ± h = {alpha} ± {h} leaves (0, ∞)"));
    }
    let up = source.spectrum_value(alpha + h, tol)?.value;
    let down = source.spectrum_value(alpha - h, tol)?.value;
    Ok((up - down) / (2.0 * h))
}

/// Gradient read off a computed table: central difference between the two
/// rows adjacent to `alpha`.
pub fn gradient_from_table(table: &SpectrumTable, alpha: f64) -> Result<f64> {
    let v = table.values();
    let i = v.iter().position(|r| r.0 == alpha).ok_or_else(|| Error::Domain(format!("no finite row at alpha = {alpha}")))?;
    if i == 0 || i + 1 == v.len() {
        return domain(format!("alpha = {alpha} has no finite neighbour on both sides"));
    }
    Ok((v[i + 1].1 - v[i - 1].1) / (v[i + 1].0 - v[i - 1].0))
}

/// `S = −2 Ṙ₁`, with a Richardson-style error estimate `|D(h) − D(h/2)|/3`.
pub fn song_from_spectrum<S: RenyiSource + ?Sized>(source: &S, h: f64, tol: Tolerance) -> Result<MeasureReport> {
    if !(h > 0.0 && h <= 0.1) {
        return domain(format!("step must lie in (0, 0.1], got {h}"));
    }
    let d1 = gradient_at(source, 1.0, h, tol)?;
    let d2 = gradient_at(source, 1.0, 0.5 * h, tol)?;
    let value = -2.0 * d1;
    let err = (2.0 * (d1 - d2).abs() / 3.0).max(f64::EPSILON * value.abs().max(1.0));
    Ok(MeasureReport { alpha: None, value, method: Method::FiniteDifference, abs_err_est: err })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailOrder {
    FPrecedesG,
    GPrecedesF,
    EqualWithinTol,
}

pub const TAIL_TIE_TOL: f64 = 1e-6;

/// Orders two laws by Song measure: `f ≺ g` iff `S(f) ≤ S(g)`.
pub fn tail_order<F, G>(f: &F, g: &G, tol: Tolerance) -> Result<TailOrder>
where
    F: Density + ?Sized,
    G: Density + ?Sized,
{
    let sf = song_numeric(f, tol)?.value;
    let sg = song_numeric(g, tol)?.value;
    Ok(if (sf - sg).abs() <= TAIL_TIE_TOL {
        TailOrder::EqualWithinTol
    } else if sf < sg {
        TailOrder::FPrecedesG
    } else {
        TailOrder::GPrecedesF
    })
}

/// `R_α` at a large or small order compared with a stated limit value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub alpha: f64,
    pub value: Option<f64>,
    pub stated: f64,
    pub abs_diff: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

pub fn check_limit<S: RenyiSource + ?Sized>(source: &S, alpha: f64, stated: f64, within: f64, tol: Tolerance) -> LimitCheck {
    match source.spectrum_value(alpha, tol) {
        Ok(r) => {
            let d = (r.value - stated).abs();
            LimitCheck { alpha, value: Some(r.value), stated, abs_diff: Some(d), pass: d <= within, message: None }
        }
        Err(e) => LimitCheck { alpha, value: None, stated, abs_diff: None, pass: false, message: Some(e.to_string()) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Laplace, Normal, StudentT, Uniform};
    use crate::models::{OUParams, SkewTParams};

    fn tol() -> Tolerance {
        Tolerance::new(1e-14, 1e-13)
    }

    #[test]
    fn grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 33);
        assert_eq!((g[0], g[32]), (0.25, 16.0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ou_spectrum() {
        let ou = Family::Ou(OUParams::new(1.0, 0.0).unwrap());
        let t = compute_spectrum(&ou, &[0.5, 2.0, 4.0], tol()).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!((t.row(1.0).unwrap().renyi.unwrap() - 1.418_938_533_204_672_7).abs() < 1e-15);
        assert!(t.is_nonincreasing());
    }

    #[test]
    fn divergent_rows_flagged() {
        let s = Family::SkewT(SkewTParams::new(0.5, 0.5, 1.0).unwrap());
        let t = compute_spectrum(&s, &[0.4, 2.0, 3.0], tol()).unwrap();
        assert_eq!(t.rows[0].flag, Some(RowFlag::Divergent));
        assert!(t.rows[0].renyi.is_none());
        assert!(t.rows[1..].iter().all(|r| r.renyi.is_some()));
    }

    #[test]
    fn uniform_spectrum_is_zero() {
        let t = compute_spectrum(&Numeric(Uniform::new(0.0, 1.0).unwrap()), &default_grid(), tol()).unwrap();
        assert!(t.rows.iter().all(|r| r.renyi.unwrap().abs() < 1e-12));
    }

    #[test]
    fn song_from_gradient() {
        let ou = Family::Ou(OUParams::new(1.0, 0.0).unwrap());
        assert!((gradient_at(&ou, 1.0, 1e-3, tol()).unwrap() + 0.25).abs() < 1e-6);
        let l = Numeric(Laplace::new(0.0, 1.0).unwrap());
        assert!((gradient_at(&l, 1.0, 1e-3, tol()).unwrap() + 0.5).abs() < 1e-5);
        let t6 = Numeric(StudentT::new(6.0, 0.0, 1.0).unwrap());
        assert!((song_from_spectrum(&t6, 1e-3, tol()).unwrap().value - 0.791).abs() < 1e-3);
        assert!(song_from_spectrum(&t6, 0.2, tol()).is_err());
    }

    #[test]
    fn tail_ordering() {
        let t6 = StudentT::new(6.0, 0.0, 1.0).unwrap();
        let l = Laplace::new(0.0, 1.0).unwrap();
        assert_eq!(tail_order(&t6, &l, tol()).unwrap(), TailOrder::FPrecedesG);
        assert_eq!(tail_order(&l, &l, tol()).unwrap(), TailOrder::EqualWithinTol);
        let n = Normal::standard();
        let c = crate::density::Cauchy::new(0.0, 1.0).unwrap();
        assert_eq!(tail_order(&n, &c, tol()).unwrap(), TailOrder::FPrecedesG);
    }
}
