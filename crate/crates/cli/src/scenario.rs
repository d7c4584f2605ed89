use std::path::Path;

use k3glue_core::k3_config::FiberType;
use k3glue_core::scales_bubbles::Locus;
use num_rational::Rational64;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Green,
    OvTriple,
    GlueInu,
    GlueInustar,
    GlueAlg,
    SectorLiouville,
    Distortion,
    Indicial,
    Moduli,
    BubbleMap,
    SemiflatOps,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Green => "green",
            Kind::OvTriple => "ov-triple",
            Kind::GlueInu => "glue-inu",
            Kind::GlueInustar => "glue-inustar",
            Kind::GlueAlg => "glue-alg",
            Kind::SectorLiouville => "sector-liouville",
            Kind::Distortion => "distortion",
            Kind::Indicial => "indicial",
            Kind::Moduli => "moduli",
            Kind::BubbleMap => "bubble-map",
            Kind::SemiflatOps => "semiflat-ops",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: Kind,
    /// Basename for the CSV/JSON pair; defaults to the kind.
    pub output: Option<String>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub name: String,
    pub locus: Locus,
    pub expect: Option<String>,
}

/// Union of all parameter blocks; each kind reads the fields it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub nu: Option<usize>,
    pub poles: Option<Vec<f64>>,
    pub radii: Option<Vec<f64>>,
    pub u3: Option<f64>,
    pub delta: Option<f64>,
    /// δ list given directly.
    pub deltas: Option<Vec<f64>>,
    /// δ list given as k with δ = e^{-k}.
    pub neg_log_deltas: Option<Vec<f64>>,
    pub delta0: Option<f64>,
    pub e_values: Option<Vec<f64>>,
    pub mu: Option<f64>,
    pub grid: Option<usize>,
    pub fiber: Option<String>,
    pub fibers: Option<String>,
    pub tau: Option<[f64; 2]>,
    pub ell: Option<f64>,
    pub beta: Option<String>,
    pub sigma: Option<String>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub jmax: Option<i64>,
    pub expect_iota: Option<String>,
    pub expect_dim_b: Option<i64>,
    pub y: Option<[f64; 2]>,
    pub steps: Option<Vec<f64>>,
    pub probes: Option<Vec<ProbeSpec>>,
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let sc: Scenario = toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    sc.params.validate(sc.kind)?;
    Ok(sc)
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_rational(s: &str) -> Result<Rational64, CliError> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad(format!("bad rational '{s}'")))?, b.trim().parse().map_err(|_| bad(format!("bad rational '{s}'")))?);
            if b == 0 {
                return Err(bad(format!("zero denominator in '{s}'")));
            }
            Rational64::new(a, b)
        }
        None => Rational64::from_integer(s.parse().map_err(|_| bad(format!("bad rational '{s}'")))?),
    };
    Ok(r)
}

impl Params {
    pub fn pole_list(&self) -> Result<Vec<f64>, CliError> {
        match (&self.poles, self.nu) {
            (Some(p), _) => Ok(p.clone()),
            (None, Some(nu)) => Ok((0..nu).map(|i| 0.1 + i as f64 / nu as f64).collect()),
            (None, None) => Err(bad("need `poles` or `nu`")),
        }
    }

    pub fn delta_list(&self) -> Result<Vec<f64>, CliError> {
        let d: Vec<f64> = match (&self.deltas, &self.neg_log_deltas) {
            (Some(d), None) => d.clone(),
            (None, Some(k)) => k.iter().map(|k| (-k).exp()).collect(),
            (Some(_), Some(_)) => return Err(bad("give only one of `deltas` and `neg_log_deltas`")),
            (None, None) => return Err(bad("need a delta list")),
        };
        if d.len() < 2 {
            return Err(bad("a rate fit needs at least two deltas"));
        }
        if d.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(bad("deltas must lie in (0, 1)"));
        }
        if d.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad("delta list must be strictly decreasing"));
        }
        Ok(d)
    }

    pub fn fiber_type(&self) -> Result<FiberType, CliError> {
        let s = self.fiber.as_deref().ok_or_else(|| bad("need `fiber`"))?;
        FiberType::parse(s).map_err(|e| bad(e.to_string()))
    }

    fn validate(&self, kind: Kind) -> Result<(), CliError> {
        if let Some(p) = &self.poles {
            if p.is_empty() || p.iter().any(|t| !t.is_finite()) {
                return Err(bad("poles must be a non-empty list of finite numbers"));
            }
        }
        if let Some(nu) = self.nu {
            if nu == 0 || nu > 64 {
                return Err(bad("nu must lie in 1..=64"));
            }
        }
        if let Some(r) = &self.radii {
            if r.iter().any(|&x| !(x > 0.0)) {
                return Err(bad("radii must be positive"));
            }
        }
        if let Some(e) = &self.e_values {
            if e.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                return Err(bad("e_values must lie in (0, 1)"));
            }
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0 && mu < 1.0) {
                return Err(bad("mu must lie in (0, 1)"));
            }
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return Err(bad("delta must lie in (0, 1)"));
            }
        }
        if let Some(g) = self.grid {
            if !(2..=512).contains(&g) {
                return Err(bad("grid must lie in 2..=512"));
            }
        }
        if let Some(ell) = self.ell {
            if !(ell > 0.0 && ell < 1.0) {
                return Err(bad("ell must lie in (0, 1)"));
            }
        }
        if let Some(t) = self.tau {
            if !(t[1] > 0.0) {
                return Err(bad("tau must lie in the upper half plane"));
            }
        }
        if let Some(s) = &self.steps {
            if s.len() != 2 || !(s[0] > s[1] && s[1] > 0.0) {
                return Err(bad("steps must be two decreasing positive numbers"));
            }
        }
        for r in [&self.beta, &self.sigma, &self.expect_iota].into_iter().flatten() {
            parse_rational(r)?;
        }
        if let (Some(a), Some(b)) = (self.r1, self.r2) {
            if !(a > 0.0 && b > a) {
                return Err(bad("need 0 < r1 < r2"));
            }
        }
        if self.fiber.is_some() {
            self.fiber_type()?;
        }
        match kind {
            Kind::GlueInu | Kind::GlueInustar => {
                self.delta_list()?;
            }
            Kind::GlueAlg => {
                self.delta_list()?;
                self.fiber_type()?;
            }
            Kind::Moduli if self.fibers.is_none() => return Err(bad("moduli needs `fibers`")),
            Kind::Indicial | Kind::SectorLiouville if self.beta.is_none() => return Err(bad("need `beta`")),
            Kind::BubbleMap | Kind::SemiflatOps => {
                self.fiber_type()?;
            }
            _ => {}
        }
        Ok(())
    }
}
