//! Plain-text scenario configuration: `key = value` lines grouped in
//! `[section]` headers, `#` or `;` comments, repeatable keys for list-like
//! entries (cosine terms). Override strings `section.key=value` replace or
//! append values before interpretation, so type errors surface before any
//! dispatch.

use crate::assembly::Window;
use crate::error::{Error, Result};
use crate::experiment::{preset_scenario, InitialData, Preset, Scenario};
use crate::field::{
    CosTerm, DecayKind, DiffusionField, DriftField, LambdaShape, OscillatingMatrixField,
    ScalarField,
};
use std::collections::BTreeMap;

/// Parsed configuration: ordered sections of ordered `(key, value)` pairs.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    sections: BTreeMap<String, Vec<(String, String)>>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = ConfigMap::default();
        let mut current = String::from("global");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(format!("line {}: unclosed section header", lineno + 1)))?;
                current = name.trim().to_string();
                map.sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected 'key = value', got '{line}'", lineno + 1))
            })?;
            map.sections
                .entry(current.clone())
                .or_default()
                .push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(map)
    }

    /// Applies one `section.key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::config(format!("override '{spec}' is not KEY=VALUE")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| Error::config(format!("override key '{path}' is not section.key")))?;
        let entries = self.sections.entry(section.to_string()).or_default();
        entries.retain(|(k, _)| k != key);
        entries.push((key.to_string(), value.trim().to_string()));
        Ok(())
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.get(section).is_some_and(|v| !v.is_empty())
    }

    /// Last value of a key (scalar semantics).
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)?
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Every value of a repeatable key, in order.
    pub fn get_all(&self, section: &str, key: &str) -> Vec<&str> {
        self.sections
            .get(section)
            .map(|entries| {
                entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
            })
            .unwrap_or_default()
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::config(format!("{section}.{key}: '{v}' is not a number")))
            })
            .transpose()
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::config(format!("{section}.{key}: '{v}' is not an integer")))
            })
            .transpose()
    }

    pub fn get_u64(&self, section: &str, key: &str) -> Result<Option<u64>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| Error::config(format!("{section}.{key}: '{v}' is not an integer")))
            })
            .transpose()
    }

    /// Whitespace-separated list of numbers.
    pub fn get_f64_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(section, key)
            .map(|v| {
                v.split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>().map_err(|_| {
                            Error::config(format!("{section}.{key}: '{tok}' is not a number"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .transpose()
    }
}

fn parse_numbers(section: &str, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::config(format!("{section}.{key}: '{tok}' is not a number")))
        })
        .collect()
}

/// Scalar profile from prefixed keys inside a section:
/// `<prefix>.base`, repeatable `<prefix>.cos = amp f1 [f2] [phase]`,
/// `<prefix>.decay = gauss|exp amp rate`.
pub fn scalar_field_from_config(
    cfg: &ConfigMap,
    section: &str,
    prefix: &str,
    dim: usize,
) -> Result<Option<ScalarField>> {
    let base_key = format!("{prefix}.base");
    let cos_key = format!("{prefix}.cos");
    let decay_key = format!("{prefix}.decay");
    let base = cfg.get_f64(section, &base_key)?;
    let cos_specs = cfg.get_all(section, &cos_key);
    let decay_spec = cfg.get(section, &decay_key);
    if base.is_none() && cos_specs.is_empty() && decay_spec.is_none() {
        return Ok(None);
    }
    let mut cosines = Vec::new();
    for spec in cos_specs {
        let nums = parse_numbers(section, &cos_key, spec)?;
        if nums.len() < 1 + dim || nums.len() > 2 + dim {
            return Err(Error::config(format!(
                "{section}.{cos_key}: expected 'amp {} [phase]', got '{spec}'",
                if dim == 1 { "f1" } else { "f1 f2" }
            )));
        }
        let phase = if nums.len() == 2 + dim { nums[1 + dim] } else { 0.0 };
        cosines.push(CosTerm { amplitude: nums[0], freq: nums[1..1 + dim].to_vec(), phase });
    }
    let mut field = ScalarField::new(dim, base.unwrap_or(0.0), cosines, None)?;
    if let Some(spec) = decay_spec {
        let mut parts = spec.split_whitespace();
        let kind = match parts.next() {
            Some("gauss") => DecayKind::Gaussian,
            Some("exp") => DecayKind::Exponential,
            other => {
                return Err(Error::config(format!(
                    "{section}.{decay_key}: expected 'gauss|exp amp rate', got '{other:?}'"
                )))
            }
        };
        let rest: Vec<f64> = parts
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::config(format!("{section}.{decay_key}: '{tok}' is not a number"))
                })
            })
            .collect::<Result<_>>()?;
        if rest.len() != 2 {
            return Err(Error::config(format!("{section}.{decay_key}: expected amp and rate")));
        }
        field = field.with_decay(kind, rest[0], rest[1]);
    }
    Ok(Some(field))
}

/// Matrix field from a `[field]` section: `dimension`, `alpha`, and entry
/// prefixes `a` (1D) or `a11` / `a22` / `a12` (2D).
pub fn matrix_field_from_config(cfg: &ConfigMap, section: &str) -> Result<Option<OscillatingMatrixField>> {
    if !cfg.has_section(section) {
        return Ok(None);
    }
    let dim = cfg.get_usize(section, "dimension")?.unwrap_or(1);
    if dim == 0 || dim > 2 {
        return Err(Error::config(format!("{section}.dimension must be 1 or 2")));
    }
    let alpha = cfg.get_f64(section, "alpha")?;
    let field = if dim == 1 {
        let a = scalar_field_from_config(cfg, section, "a", 1)?
            .ok_or_else(|| Error::config(format!("{section}: missing entry 'a.*'")))?;
        let floor = alpha.unwrap_or_else(|| a.lower_bound());
        OscillatingMatrixField::scalar_1d(a, floor)
    } else {
        let a11 = scalar_field_from_config(cfg, section, "a11", 2)?
            .ok_or_else(|| Error::config(format!("{section}: missing entry 'a11.*'")))?;
        let a22 = scalar_field_from_config(cfg, section, "a22", 2)?
            .ok_or_else(|| Error::config(format!("{section}: missing entry 'a22.*'")))?;
        let a12 = scalar_field_from_config(cfg, section, "a12", 2)?;
        let structural = match &a12 {
            Some(f) => a11.lower_bound().min(a22.lower_bound()) - f.sup_bound(),
            None => a11.lower_bound().min(a22.lower_bound()),
        };
        let floor = alpha.unwrap_or(structural);
        match a12 {
            Some(a12) => OscillatingMatrixField::full_2d(a11, a22, a12, floor),
            None => OscillatingMatrixField::diagonal_2d(a11, a22, floor),
        }
    };
    field.map(Some).map_err(|e| Error::config(format!("{section}: {e}")))
}

fn drift_from_config(cfg: &ConfigMap, dim: usize) -> Result<Option<DriftField>> {
    if !cfg.has_section("drift") {
        return Ok(None);
    }
    let spatial = scalar_field_from_config(cfg, "drift", "space", dim)?
        .unwrap_or_else(|| ScalarField::constant(dim, 0.0));
    let temporal = scalar_field_from_config(cfg, "drift", "time", 1)?
        .unwrap_or_else(|| ScalarField::constant(1, 1.0));
    let shape = match cfg.get("drift", "shape") {
        Some(s) => LambdaShape::parse(s)?,
        None => LambdaShape::Linear,
    };
    Ok(Some(DriftField::new(spatial, temporal, shape)?))
}

fn diffusion_from_config(cfg: &ConfigMap, dim: usize) -> Result<Option<DiffusionField>> {
    if !cfg.has_section("diffusion") {
        return Ok(None);
    }
    let modes = cfg.get_usize("diffusion", "modes")?.unwrap_or(1);
    let spatial = scalar_field_from_config(cfg, "diffusion", "space", dim)?
        .unwrap_or_else(|| ScalarField::constant(dim, 1.0));
    let temporal = scalar_field_from_config(cfg, "diffusion", "time", 1)?
        .unwrap_or_else(|| ScalarField::constant(1, 1.0));
    let shape = match cfg.get("diffusion", "shape") {
        Some(s) => LambdaShape::parse(s)?,
        None => LambdaShape::Linear,
    };
    Ok(Some(DiffusionField::with_power_weights(modes, spatial, temporal, shape)?))
}

/// Materializes a scenario: preset base (default `problem1`) with every
/// `[scenario]` / `[field]` / `[drift]` / `[diffusion]` / `[cell]` / `[wave]`
/// key applied on top.
pub fn scenario_from_config(cfg: &ConfigMap) -> Result<Scenario> {
    let preset = match cfg.get("scenario", "preset") {
        Some(name) => Preset::parse(name)?,
        None => {
            if !cfg.has_section("field") {
                return Err(Error::config(
                    "config needs a [scenario] preset or an explicit [field] section",
                ));
            }
            Preset::Problem1
        }
    };
    let mut sc = preset_scenario(preset).map_err(|e| Error::config(e.to_string()))?;

    if let Some(m) = matrix_field_from_config(cfg, "field")? {
        sc.dim = m.dim();
        sc.matrix = m;
    }
    if let Some(f) = drift_from_config(cfg, sc.dim)? {
        sc.drift = f;
    }
    if let Some(g) = diffusion_from_config(cfg, sc.dim)? {
        sc.diffusion = g;
    }

    if let Some(v) = cfg.get_u64("scenario", "seed")? {
        sc.seed = v;
    }
    if let Some(v) = cfg.get_f64("scenario", "T")? {
        sc.t_final = v;
    }
    if let Some(v) = cfg.get_f64("scenario", "dt")? {
        sc.dt = v;
    }
    if let Some(v) = cfg.get_usize("scenario", "grid_n")? {
        sc.grid_n = v;
    }
    if let Some(v) = cfg.get_usize("scenario", "stride")? {
        sc.record_stride = v;
    }
    if let Some(v) = cfg.get_usize("scenario", "paths")? {
        sc.paths = v;
    }
    if let Some(v) = cfg.get_f64_list("scenario", "epsilon")? {
        sc.epsilons = v;
    }
    if let Some(v) = cfg.get_f64_list("scenario", "delta")? {
        sc.deltas = v;
    }
    if let Some(v) = cfg.get_f64("cell", "tol")? {
        sc.tol = v;
    }
    if let Some(v) = cfg.get_usize("cell", "n")? {
        sc.cell_n = v;
    }
    if let Some(v) = cfg.get_f64_list("cell", "r")? {
        sc.r_schedule = v;
    }
    if let Some(v) = cfg.get_usize("cell", "points_per_unit")? {
        sc.points_per_unit = v;
    }
    match cfg.get("cell", "window") {
        Some("full") => sc.window = Window::Full,
        Some("interior") => sc.window = Window::Interior,
        Some(other) => {
            return Err(Error::config(format!("cell.window must be full|interior, got '{other}'")))
        }
        None => {}
    }
    match cfg.get("scenario", "initial") {
        Some("zero") => sc.initial = InitialData::Zero,
        Some("sine") | None => {}
        Some(other) => {
            return Err(Error::config(format!("scenario.initial must be sine|zero, got '{other}'")))
        }
    }
    if let Some(name) = cfg.get("scenario", "name") {
        sc.name = name.to_string();
    }
    sc.validate().map_err(|e| Error::config(e.to_string()))?;
    Ok(sc)
}
