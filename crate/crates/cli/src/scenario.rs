//! Scenario documents: versioned JSON with command-line overrides.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

pub const SCENARIO_VERSION: u32 = 1;
const MAX_GRID_POINTS: usize = 100_000;

/// Evenly spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub const fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => {
                let step = (self.stop - self.start) / (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        if k == n - 1 {
                            self.stop
                        } else {
                            self.start + step * k as f64
                        }
                    })
                    .collect()
            }
        }
    }

    fn validate(&self, field: &str, lo: f64, hi: f64) -> Result<()> {
        if self.count == 0 || self.count > MAX_GRID_POINTS {
            return Err(CliError::validation(
                format!("{field}.count"),
                format!("must be in 1..={MAX_GRID_POINTS}, got {}", self.count),
            ));
        }
        if self.count > 1 && self.stop <= self.start {
            return Err(CliError::validation(field, "stop must exceed start"));
        }
        in_range(&format!("{field}.start"), self.start, lo, hi)?;
        in_range(&format!("{field}.stop"), self.stop, lo, hi)
    }
}

fn in_range(field: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v.is_finite() && v >= lo && v <= hi {
        Ok(())
    } else {
        Err(CliError::validation(field, format!("{v} outside [{lo}, {hi}]")))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::validation(field, format!("{v} must be positive")))
    }
}

fn each(field: &str, vs: &[f64], check: impl Fn(&str, f64) -> Result<()>) -> Result<()> {
    if vs.is_empty() {
        return Err(CliError::validation(field, "must not be empty"));
    }
    vs.iter()
        .enumerate()
        .try_for_each(|(k, &v)| check(&format!("{field}[{k}]"), v))
}

/// Every parameter any command reads. Commands ignore the fields they do not use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default = "d::alpha")]
    pub alpha: f64,
    /// Fibre attenuation in dB/km.
    #[serde(default = "d::loss_db_per_km")]
    pub loss_db_per_km: f64,
    /// Total Alice-Bob distance for `point`.
    #[serde(default = "d::distance_km")]
    pub distance_km: f64,
    #[serde(default = "d::eta_h")]
    pub eta_h: f64,
    #[serde(default = "d::eta_o")]
    pub eta_o: f64,
    /// DV detector efficiency; when absent each command uses its own default.
    #[serde(default)]
    pub eta_d: Option<f64>,
    /// Homodyne outcome.
    #[serde(default = "d::p")]
    pub p: f64,
    /// Fock truncation for numerical oracles.
    #[serde(default = "d::cv_dim")]
    pub cv_dim: usize,
    #[serde(default = "d::alpha_grid")]
    pub alpha_grid: Grid,
    #[serde(default = "d::distance_grid")]
    pub distance_grid: Grid,
    #[serde(default = "d::transmittance_grid")]
    pub transmittance_grid: Grid,
    /// Loss fractions R for `fig2`.
    #[serde(default = "d::loss_fractions")]
    pub loss_fractions: Vec<f64>,
    /// Fixed distances for the alpha sweep.
    #[serde(default = "d::distances_km")]
    pub distances_km: Vec<f64>,
    /// Fixed amplitudes for the distance sweep.
    #[serde(default = "d::alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "d::r_targets")]
    pub r_targets: Vec<f64>,
    #[serde(default = "d::eta_ds")]
    pub eta_ds: Vec<f64>,
    #[serde(default = "d::n_bars")]
    pub n_bars: Vec<f64>,
    /// Add numerical overlap columns to `fidelity`.
    #[serde(default)]
    pub oracle: bool,
}

mod d {
    use super::{Grid, FRAC_PI_2};

    pub fn alpha() -> f64 {
        0.5
    }
    pub fn loss_db_per_km() -> f64 {
        0.2
    }
    pub fn distance_km() -> f64 {
        100.0
    }
    pub fn eta_h() -> f64 {
        0.55
    }
    pub fn eta_o() -> f64 {
        0.8
    }
    pub fn p() -> f64 {
        FRAC_PI_2
    }
    pub fn cv_dim() -> usize {
        24
    }
    pub fn alpha_grid() -> Grid {
        Grid::new(0.05, 1.5, 30)
    }
    pub fn distance_grid() -> Grid {
        Grid::new(0.0, 300.0, 31)
    }
    pub fn transmittance_grid() -> Grid {
        Grid::new(0.0, 1.0, 21)
    }
    pub fn loss_fractions() -> Vec<f64> {
        vec![0.0, 0.25, 0.5, 0.75, 0.9]
    }
    pub fn distances_km() -> Vec<f64> {
        vec![50.0, 100.0, 150.0]
    }
    pub fn alphas() -> Vec<f64> {
        vec![0.5, 0.6, 0.8]
    }
    pub fn r_targets() -> Vec<f64> {
        vec![1e-6, 1e-8, 1e-10]
    }
    pub fn eta_ds() -> Vec<f64> {
        vec![0.97, 0.95, 0.90]
    }
    pub fn n_bars() -> Vec<f64> {
        vec![0.01, 0.05, 0.1]
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Self::from_value(Value::Object(version_only())).expect("defaults are valid")
    }
}

fn version_only() -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("version".into(), Value::from(SCENARIO_VERSION));
    m
}

impl Scenario {
    /// Reads `path` (or starts from defaults), applies `key=value` overrides, and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                serde_json::from_str::<Value>(&text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(version_only()),
        };
        let defaults = serde_json::to_value(Self::default()).expect("scenario serializes");
        for o in overrides {
            apply_override(&mut doc, &defaults, o)?;
        }
        Self::from_value(doc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        Self::from_value(doc)
    }

    fn from_value(doc: Value) -> Result<Self> {
        match doc.get("version") {
            None => return Err(CliError::validation("version", "missing")),
            Some(v) if v.as_u64() != Some(SCENARIO_VERSION as u64) => {
                return Err(CliError::validation(
                    "version",
                    format!("unsupported version {v}, expected {SCENARIO_VERSION}"),
                ))
            }
            Some(_) => {}
        }
        let s: Scenario = serde_path_to_error::deserialize(doc).map_err(|e| {
            let field = match e.path().to_string() {
                p if p == "." => "scenario".to_string(),
                p => p,
            };
            CliError::validation(field, e.into_inner().to_string())
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        in_range("alpha", self.alpha, 1e-6, 2.0)?;
        positive("loss_db_per_km", self.loss_db_per_km)?;
        in_range("distance_km", self.distance_km, 0.0, 1000.0)?;
        in_range("eta_h", self.eta_h, 0.0, 1.0)?;
        in_range("eta_o", self.eta_o, 0.0, 1.0)?;
        if let Some(e) = self.eta_d {
            in_range("eta_d", e, 0.0, 1.0)?;
        }
        if !self.p.is_finite() {
            return Err(CliError::validation("p", "must be finite"));
        }
        if !(4..=96).contains(&self.cv_dim) {
            return Err(CliError::validation(
                "cv_dim",
                format!("{} outside 4..=96", self.cv_dim),
            ));
        }
        self.alpha_grid.validate("alpha_grid", 1e-6, 2.0)?;
        self.distance_grid.validate("distance_grid", 0.0, 1000.0)?;
        self.transmittance_grid.validate("transmittance_grid", 0.0, 1.0)?;
        each("loss_fractions", &self.loss_fractions, |f, v| in_range(f, v, 0.0, 1.0))?;
        each("distances_km", &self.distances_km, |f, v| in_range(f, v, 0.0, 1000.0))?;
        each("alphas", &self.alphas, |f, v| in_range(f, v, 1e-6, 2.0))?;
        each("r_targets", &self.r_targets, positive)?;
        each("eta_ds", &self.eta_ds, |f, v| in_range(f, v, 0.0, 1.0))?;
        each("n_bars", &self.n_bars, |f, v| in_range(f, v, 0.0, 1e3))
    }

    /// Flattened `key = json` pairs in key order.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let value = serde_json::to_value(self).expect("scenario serializes");
        let mut out = Vec::new();
        if let Value::Object(map) = value {
            for (k, v) in map {
                out.push((k, v.to_string()));
            }
        }
        out
    }
}

/// `key=value` where value is JSON when it parses and a string otherwise.
///
/// Dotted keys reach into objects; a missing parent starts from its default.
fn apply_override(doc: &mut Value, defaults: &Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--param expects key=value, got `{spec}`")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Usage(format!("--param with empty key: `{spec}`")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let mut fallback = Some(defaults);
    let parts: Vec<&str> = key.split('.').collect();
    for (k, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::validation(parts[..k].join("."), "is not an object"))?;
        if k + 1 == parts.len() {
            obj.insert((*part).to_string(), value);
            return Ok(());
        }
        fallback = fallback.and_then(|f| f.get(part));
        let seed = fallback.filter(|f| f.is_object()).cloned();
        node = obj
            .entry((*part).to_string())
            .or_insert_with(|| seed.unwrap_or_else(|| Value::Object(Map::new())));
    }
    unreachable!("split yields at least one part")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = Grid::new(0.1, 0.7, 7).points();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 0.7);
        assert_eq!(Grid::new(3.0, 3.0, 1).points(), vec![3.0]);
    }

    #[test]
    fn defaults_need_only_version() {
        let s = Scenario::from_json(r#"{"version": 1}"#).unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.alpha, 0.5);
        assert_eq!(s.eta_d, None);
    }

    #[test]
    fn unknown_key_rejected() {
        let e = Scenario::from_json(r#"{"version": 1, "alpah": 0.4}"#).unwrap_err();
        assert_eq!(e.category(), "validation");
        assert!(e.to_string().contains("alpah"));
    }

    #[test]
    fn version_checked() {
        assert!(matches!(
            Scenario::from_json(r#"{"alpha": 0.4}"#),
            Err(CliError::Validation { ref field, .. }) if field == "version"
        ));
        assert!(Scenario::from_json(r#"{"version": 2}"#).is_err());
    }

    #[test]
    fn malformed_json_reports_position() {
        let e = Scenario::from_json("{\n  \"version\": 1,\n  \"alpha\": \n}").unwrap_err();
        assert_eq!(e.category(), "parse");
        assert!(e.to_string().contains("line 4"), "{e}");
    }

    #[test]
    fn out_of_range_names_field() {
        let e = Scenario::from_json(r#"{"version": 1, "eta_h": 1.5}"#).unwrap_err();
        assert!(matches!(e, CliError::Validation { ref field, .. } if field == "eta_h"));
        let e = Scenario::from_json(r#"{"version": 1, "eta_ds": [0.9, -1]}"#).unwrap_err();
        assert!(matches!(e, CliError::Validation { ref field, .. } if field == "eta_ds[1]"));
    }

    fn with_overrides(doc: Value, specs: &[&str]) -> Result<Scenario> {
        let defaults = serde_json::to_value(Scenario::default()).unwrap();
        let mut doc = doc;
        for s in specs {
            apply_override(&mut doc, &defaults, s)?;
        }
        Scenario::from_value(doc)
    }

    #[test]
    fn overrides_win() {
        let doc = serde_json::json!({"version": 1, "alpha": 0.3});
        let s = with_overrides(doc, &["alpha=0.7", "alpha_grid.count=5", "oracle=true"]).unwrap();
        assert_eq!(s.alpha, 0.7);
        assert_eq!(s.alpha_grid, Grid::new(0.05, 1.5, 5));
        assert!(s.oracle);
    }

    #[test]
    fn partial_grid_in_file_rejected() {
        let doc = serde_json::json!({"version": 1, "alpha_grid": {"count": 5}});
        assert_eq!(with_overrides(doc, &[]).unwrap_err().category(), "validation");
    }

    #[test]
    fn bad_overrides() {
        let doc = serde_json::json!({"version": 1});
        let e = with_overrides(doc.clone(), &["alpha=big"]).unwrap_err();
        assert!(
            matches!(e, CliError::Validation { ref field, .. } if field == "alpha"),
            "{e}"
        );
        assert_eq!(with_overrides(doc.clone(), &["alpha"]).unwrap_err().category(), "usage");
        assert_eq!(
            with_overrides(doc, &["alpha.x=1"]).unwrap_err().category(),
            "validation"
        );
    }
}
