//! Model configuration files and the models they describe.
//!
//! A configuration is a TOML document:
//!
//! ```toml
//! family = "skewt"
//!
//! [params]
//! gamma = 3.0
//! beta = 3.0
//! ```
//!
//! The `custom` family takes `drift`, `sigma2`, `state_space` and an
//! optional `reference`; `expfam` takes `basis`, `weights`, `sigma2`,
//! `state_space` and `reference`. Any key can be overridden with a
//! `key=value` string, parameters either as `params.name=v` or `name=v`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::measures::{renyi_numeric, shannon_numeric, song_numeric, MeasureReport};
use crate::models::*;
use crate::quadrature::{Interval, Tolerance};
use crate::sde::{invariant_density, DiffusionSpec, InvariantDensity, RealFn};
use crate::spectrum::RenyiSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Ou,
    Cir,
    Pearson4,
    Invgamma,
    Scaledf,
    Jacobi,
    Gig,
    Hyperbolic,
    Skewt,
    Expfam,
    Custom,
}

impl FamilyName {
    pub const ALL: [FamilyName; 11] = [
        FamilyName::Ou,
        FamilyName::Cir,
        FamilyName::Pearson4,
        FamilyName::Invgamma,
        FamilyName::Scaledf,
        FamilyName::Jacobi,
        FamilyName::Gig,
        FamilyName::Hyperbolic,
        FamilyName::Skewt,
        FamilyName::Expfam,
        FamilyName::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyName::Ou => "ou",
            FamilyName::Cir => "cir",
            FamilyName::Pearson4 => "pearson4",
            FamilyName::Invgamma => "invgamma",
            FamilyName::Scaledf => "scaledf",
            FamilyName::Jacobi => "jacobi",
            FamilyName::Gig => "gig",
            FamilyName::Hyperbolic => "hyperbolic",
            FamilyName::Skewt => "skewt",
            FamilyName::Expfam => "expfam",
            FamilyName::Custom => "custom",
        }
    }

    /// `(name, default)` for each parameter; `None` means required.
    pub fn params(self) -> &'static [(&'static str, Option<f64>)] {
        match self {
            FamilyName::Ou => &[("theta", Some(1.0)), ("mu", Some(0.0))],
            FamilyName::Cir => &[("mu", None), ("theta", Some(1.0))],
            FamilyName::Pearson4 | FamilyName::Invgamma | FamilyName::Scaledf | FamilyName::Jacobi => {
                &[("a", None), ("mu", None), ("theta", Some(1.0))]
            }
            FamilyName::Gig => &[
                ("gamma", Some(0.0)),
                ("lambda", Some(1.0)),
                ("theta1", None),
                ("theta2", None),
                ("theta3", None),
            ],
            FamilyName::Hyperbolic => {
                &[("gamma", None), ("beta", Some(0.0)), ("delta", None), ("mu", Some(0.0)), ("sigma", Some(1.0))]
            }
            FamilyName::Skewt => &[("gamma", None), ("beta", None), ("sigma", Some(1.0))],
            FamilyName::Expfam | FamilyName::Custom => &[],
        }
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<Expr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<Expr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_space: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let t = v.trim();
    match t {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => t.parse().map_err(|_| Error::Config(format!("{key}: {v:?} is not a number"))),
    }
}

impl ModelConfig {
    pub fn new(family: FamilyName) -> Self {
        Self {
            family,
            drift: None,
            sigma2: None,
            basis: Vec::new(),
            weights: Vec::new(),
            state_space: None,
            reference: None,
            scale: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads `path` if given, then applies each `key=value` override.
    pub fn load(path: Option<&Path>, sets: &[String]) -> Result<Self> {
        let (family_set, rest): (Vec<&String>, Vec<&String>) =
            sets.iter().partition(|s| s.split_once('=').is_some_and(|(k, _)| k.trim() == "family"));
        let mut cfg = match (path, family_set.last()) {
            (Some(p), _) => Self::from_file(p)?,
            (None, Some(s)) => Self::new(s.split_once('=').unwrap().1.parse()?),
            (None, None) => return Err(Error::Config("no model given: pass --model <file> or --set family=<name>".into())),
        };
        for s in family_set.into_iter().chain(rest) {
            cfg.apply(s)?;
        }
        Ok(cfg)
    }

    /// Applies one `key=value` override.
    pub fn apply(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not of the form key=value")))?;
        let key = key.trim();
        match key {
            "family" => self.family = value.parse()?,
            "drift" => self.drift = Some(value.parse()?),
            "sigma2" => self.sigma2 = Some(value.parse()?),
            "basis" => self.basis = value.split(';').map(str::parse).collect::<Result<_>>()?,
            "weights" => self.weights = value.split(',').map(|v| parse_f64(key, v)).collect::<Result<_>>()?,
            "state_space" => {
                let parts: Vec<f64> = value.split(',').map(|v| parse_f64(key, v)).collect::<Result<_>>()?;
                let [lo, hi] = parts[..] else {
                    return Err(Error::Config(format!("state_space needs two values, got {value:?}")));
                };
                self.state_space = Some([lo, hi]);
            }
            "reference" => self.reference = Some(parse_f64(key, value)?),
            "scale" => self.scale = Some(parse_f64(key, value)?),
            _ => {
                let name = key.strip_prefix("params.").unwrap_or(key);
                if name.is_empty() || name.contains('.') {
                    return Err(Error::Config(format!("unknown key {key:?}")));
                }
                self.params.insert(name.to_string(), parse_f64(key, value)?);
            }
        }
        Ok(())
    }

    fn param_values(&self) -> Result<BTreeMap<&'static str, f64>> {
        let spec = self.family.params();
        if let Some(k) = self.params.keys().find(|k| !spec.iter().any(|(n, _)| n == k)) {
            let known: Vec<&str> = spec.iter().map(|p| p.0).collect();
            return Err(Error::Config(format!("{}: unknown parameter {k:?} (expected {known:?})", self.family)));
        }
        spec.iter()
            .map(|&(n, d)| {
                self.params
                    .get(n)
                    .copied()
                    .or(d)
                    .map(|v| (n, v))
                    .ok_or_else(|| Error::Config(format!("{}: missing parameter {n:?}", self.family)))
            })
            .collect()
    }

    fn interval(&self) -> Result<Interval> {
        let [lo, hi] = self
            .state_space
            .ok_or_else(|| Error::Config(format!("{}: state_space is required", self.family)))?;
        Interval::new(lo, hi).map_err(|e| Error::Config(e.to_string()))
    }

    fn reference_in(&self, dom: Interval) -> f64 {
        self.reference.unwrap_or_else(|| match (dom.lower.is_finite(), dom.upper.is_finite()) {
            (true, true) => 0.5 * (dom.lower + dom.upper),
            (true, false) => dom.lower + 1.0,
            (false, true) => dom.upper - 1.0,
            (false, false) => 0.0,
        })
    }

    /// Builds the model; `tol` is used for normalizing numerically defined
    /// invariant densities.
    pub fn build(&self, tol: Tolerance) -> Result<Model> {
        if !matches!(self.family, FamilyName::Custom | FamilyName::Expfam)
            && (self.drift.is_some() || self.sigma2.is_some() || !self.basis.is_empty() || !self.weights.is_empty())
        {
            return Err(Error::Config(format!("{}: coefficient expressions apply only to custom and expfam", self.family)));
        }
        let p = self.param_values()?;
        let family = match self.family {
            FamilyName::Ou => Family::Ou(OUParams::new(p["theta"], p["mu"])?),
            FamilyName::Cir => Family::Cir(CIRParams::new(p["mu"], p["theta"])?),
            FamilyName::Pearson4 => Family::PearsonIV(PearsonIVParams::new(p["a"], p["mu"], p["theta"])?),
            FamilyName::Invgamma => Family::InvGamma(InvGammaParams::new(p["a"], p["mu"], p["theta"])?),
            FamilyName::Scaledf => Family::ScaledF(ScaledFParams::new(p["a"], p["mu"], p["theta"])?),
            FamilyName::Jacobi => Family::Jacobi(JacobiParams::new(p["a"], p["mu"], p["theta"])?),
            FamilyName::Gig => {
                Family::Gig(GIGParams::new(p["gamma"], p["lambda"], p["theta1"], p["theta2"], p["theta3"])?)
            }
            FamilyName::Hyperbolic => Family::Hyperbolic(HyperbolicParams::new(
                p["gamma"],
                p["beta"],
                p["delta"],
                p["mu"],
                p["sigma"],
            )?),
            FamilyName::Skewt => Family::SkewT(SkewTParams::new(p["gamma"], p["beta"], p["sigma"])?),
            FamilyName::Custom => return self.build_custom(tol),
            FamilyName::Expfam => return self.build_expfam(tol),
        };
        Ok(Model::Family(family))
    }

    fn build_custom(&self, tol: Tolerance) -> Result<Model> {
        if !self.basis.is_empty() || !self.weights.is_empty() {
            return Err(Error::Config("custom: use drift, not basis/weights".into()));
        }
        let drift = self.drift.clone().ok_or_else(|| Error::Config("custom: drift is required".into()))?;
        let sigma2 = self.sigma2.clone().ok_or_else(|| Error::Config("custom: sigma2 is required".into()))?;
        let dom = self.interval()?;
        let x0 = self.reference_in(dom);
        for x in probe_points(dom, x0) {
            check_expr("drift", &drift, x, false)?;
            check_expr("sigma2", &sigma2, x, true)?;
        }
        let b = drift.clone();
        let s = sigma2.clone();
        let spec = DiffusionSpec::new(move |x| b.eval(x), move |x| s.eval(x), dom, x0)?
            .with_scale_hint(self.scale.unwrap_or(1.0));
        let density = Arc::new(invariant_density(&spec, tol)?);
        Ok(Model::Custom { spec, density })
    }

    fn build_expfam(&self, tol: Tolerance) -> Result<Model> {
        if self.drift.is_some() {
            return Err(Error::Config("expfam: use basis and weights, not drift".into()));
        }
        if self.basis.is_empty() || self.basis.len() != self.weights.len() {
            return Err(Error::Config(format!(
                "expfam: need one weight per basis function ({} basis, {} weights)",
                self.basis.len(),
                self.weights.len()
            )));
        }
        let sigma2 = self.sigma2.clone().ok_or_else(|| Error::Config("expfam: sigma2 is required".into()))?;
        let dom = self.interval()?;
        let x0 = self.reference_in(dom);
        for x in probe_points(dom, x0) {
            for b in &self.basis {
                check_expr("basis", b, x, false)?;
            }
            check_expr("sigma2", &sigma2, x, true)?;
        }
        let basis: Vec<RealFn> = self
            .basis
            .iter()
            .map(|e| {
                let e = e.clone();
                Arc::new(move |x: f64| e.eval(x)) as RealFn
            })
            .collect();
        let s2: RealFn = Arc::new(move |x| sigma2.eval(x));
        let spec = ExpFamSpec::new(basis, self.weights.clone(), s2, dom, x0)?.with_scale_hint(self.scale.unwrap_or(1.0));
        let density = Arc::new(spec.invariant_density(tol)?);
        Ok(Model::ExpFam { spec, density })
    }
}

fn probe_points(dom: Interval, x0: f64) -> Vec<f64> {
    let mut pts = vec![x0];
    for k in 1..=20 {
        let t = k as f64 / 21.0;
        if dom.is_finite() {
            pts.push(dom.lower + t * dom.width());
            continue;
        }
        let step = 10f64.powf(-2.0 + 5.0 * t);
        if dom.upper.is_finite() {
            pts.push(dom.upper - (dom.upper - x0) * (1.0 - t));
        } else {
            pts.push(x0 + step);
        }
        if dom.lower.is_finite() {
            pts.push(dom.lower + (x0 - dom.lower) * (1.0 - t));
        } else {
            pts.push(x0 - step);
        }
    }
    pts.retain(|x| dom.contains(*x));
    pts
}

fn check_expr(name: &str, e: &Expr, x: f64, positive: bool) -> Result<()> {
    let v = e.eval(x);
    if !v.is_finite() || (positive && v <= 0.0) {
        let want = if positive { "a finite positive value" } else { "a finite value" };
        return Err(Error::Config(format!("{name} = {e} gives {v} at x = {x}, expected {want}")));
    }
    Ok(())
}

/// A model ready for evaluation.
#[derive(Debug, Clone)]
pub enum Model {
    Family(Family),
    ExpFam { spec: ExpFamSpec, density: Arc<InvariantDensity> },
    Custom { spec: DiffusionSpec, density: Arc<InvariantDensity> },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Family(f) => f.name(),
            Model::ExpFam { .. } => "expfam",
            Model::Custom { .. } => "custom",
        }
    }

    pub fn density(&self) -> Result<Arc<dyn Density>> {
        Ok(match self {
            Model::Family(f) => Arc::new(f.density()?),
            Model::ExpFam { density, .. } | Model::Custom { density, .. } => density.clone(),
        })
    }

    pub fn diffusion(&self) -> Result<DiffusionSpec> {
        match self {
            Model::Family(f) => f.diffusion(),
            Model::ExpFam { spec, .. } => spec.diffusion(),
            Model::Custom { spec, .. } => Ok(spec.clone()),
        }
    }

    pub fn renyi_closed(&self, alpha: f64) -> Result<MeasureReport> {
        match self {
            Model::Family(f) => f.renyi_closed(alpha),
            _ => Err(Error::Unsupported(format!("{} has no closed forms", self.name()))),
        }
    }

    pub fn shannon_closed(&self) -> Result<MeasureReport> {
        match self {
            Model::Family(f) => f.shannon_closed(),
            _ => Err(Error::Unsupported(format!("{} has no closed forms", self.name()))),
        }
    }

    pub fn song_closed(&self) -> Result<MeasureReport> {
        match self {
            Model::Family(f) => f.song_closed(),
            _ => Err(Error::Unsupported(format!("{} has no closed forms", self.name()))),
        }
    }

    pub fn song(&self, tol: Tolerance) -> Result<MeasureReport> {
        match self {
            Model::Family(f) => f.song(tol),
            _ => song_numeric(&self.density()?, tol),
        }
    }
}

impl RenyiSource for Model {
    fn renyi(&self, alpha: f64, tol: Tolerance) -> Result<MeasureReport> {
        match self {
            Model::Family(f) => f.renyi(alpha, tol),
            Model::ExpFam { density, .. } | Model::Custom { density, .. } => renyi_numeric(density, alpha, tol),
        }
    }

    fn shannon(&self, tol: Tolerance) -> Result<MeasureReport> {
        match self {
            Model::Family(f) => f.shannon(tol),
            Model::ExpFam { density, .. } | Model::Custom { density, .. } => shannon_numeric(density, tol),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::new(1e-13, 1e-12)
    }

    #[test]
    fn parses_family_file() {
        let cfg = ModelConfig::from_toml("family = \"skewt\"\n[params]\ngamma = 3.0\nbeta = 3.0\n").unwrap();
        let m = cfg.build(tol()).unwrap();
        assert_eq!(m.name(), "skewt");
        assert!((m.song(tol()).unwrap().value - 0.79105).abs() < 1e-5);
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = ModelConfig::from_toml("family = \"ou\"\n[params]\nmu = 1.0\n").unwrap();
        cfg.apply("params.mu=2.5").unwrap();
        cfg.apply("theta = 3").unwrap();
        assert_eq!(cfg.params["mu"], 2.5);
        assert_eq!(cfg.params["theta"], 3.0);
        let cfg = ModelConfig::load(None, &["mu=1".into(), "family=cir".into()]).unwrap();
        assert_eq!(cfg.family, FamilyName::Cir);
    }

    #[test]
    fn rejects_malformed_configs() {
        assert!(matches!(ModelConfig::from_toml("family = \"nope\""), Err(Error::Config(_))));
        let cfg = ModelConfig::new(FamilyName::Ou).with_param("sigma", 1.0);
        assert!(matches!(cfg.build(tol()), Err(Error::Config(_))));
        let cfg = ModelConfig::new(FamilyName::Cir);
        assert!(matches!(cfg.build(tol()), Err(Error::Config(_))));
        let mut cfg = ModelConfig::new(FamilyName::Custom);
        cfg.apply("drift=-x").unwrap();
        cfg.apply("sigma2=x").unwrap();
        cfg.apply("state_space=-inf,inf").unwrap();
        assert!(matches!(cfg.build(tol()), Err(Error::Config(_))));
        assert!(matches!(ModelConfig::new(FamilyName::Jacobi).with_param("a", 0.5).with_param("mu", 0.5).build(tol()), Err(Error::Domain(_))));
    }

    #[test]
    fn custom_cir_matches_family() {
        let mut cfg = ModelConfig::new(FamilyName::Custom);
        for s in ["drift=-(x - 2)", "sigma2=2*x", "state_space=0,inf", "reference=2"] {
            cfg.apply(s).unwrap();
        }
        let m = cfg.build(tol()).unwrap();
        let c = CIRParams::new(2.0, 1.0).unwrap();
        let r = m.renyi(2.0, tol()).unwrap().value;
        assert!((r - c.renyi(2.0).unwrap().value).abs() < 1e-9);
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = ModelConfig::new(FamilyName::Expfam);
        for s in ["basis=1;-x", "weights=1,0.5", "sigma2=x", "state_space=0,inf", "reference=2"] {
            cfg.apply(s).unwrap();
        }
        let text = cfg.to_toml().unwrap();
        assert_eq!(ModelConfig::from_toml(&text).unwrap(), cfg);
        let m = cfg.build(tol()).unwrap();
        let c = CIRParams::new(2.0, 1.0).unwrap();
        assert!((m.renyi(3.0, tol()).unwrap().value - c.renyi(3.0).unwrap().value).abs() < 1e-8);
    }
}
