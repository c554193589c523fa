//! Run configuration: flat INI-style sections with line-anchored errors.
//! Unknown sections, unknown keys and duplicate keys are rejected.

use std::fmt;

use serde::Serialize;

use crate::error::Error;
use crate::model::{MlsSpec, SystemSpec};
use crate::response::SolverOptions;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Serialize)]
pub struct SystemConfig {
    pub omega_10: f64,
    pub omega_21: f64,
    pub g0: f64,
    pub num_levels: usize,
    pub omega_r: f64,
    pub kappa: f64,
    /// Explicit ladder override; replaces the transmon constructor when set.
    pub level_freqs: Option<Vec<f64>>,
    pub couplings: Option<Vec<f64>>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            omega_10: 6000.0,
            omega_21: 5750.0,
            g0: 100.0,
            num_levels: 6,
            omega_r: 7000.0,
            kappa: 0.05,
            level_freqs: None,
            couplings: None,
        }
    }
}

impl SystemConfig {
    pub fn build_system(&self) -> Result<SystemSpec, Error> {
        let mls = self.build_mls(self.num_levels)?;
        SystemSpec::new(mls, self.omega_r, self.kappa)
    }

    /// Build the MLS with a given level count (transmon parameterization); an
    /// explicit ladder ignores `num_levels`.
    pub fn build_mls(&self, num_levels: usize) -> Result<MlsSpec, Error> {
        match (&self.level_freqs, &self.couplings) {
            (Some(freqs), Some(gs)) => MlsSpec::new(freqs.clone(), gs.clone()),
            (None, None) => MlsSpec::transmon(self.omega_10, self.omega_21, self.g0, num_levels),
            _ => Err(Error::InvalidSpec(
                "level_freqs and couplings must be given together".into(),
            )),
        }
    }

    pub fn with_levels(&self, num_levels: usize) -> Result<SystemSpec, Error> {
        let mls = self.build_mls(num_levels)?;
        SystemSpec::new(mls, self.omega_r, self.kappa)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    pub beta: f64,
    pub max_iter: usize,
    pub tol_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        Self {
            beta: o.beta,
            max_iter: o.max_iter,
            tol_scale: o.tol_scale,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            beta: self.beta,
            max_iter: self.max_iter,
            tol_scale: self.tol_scale,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeffsConfig {
    pub omega_r_min: f64,
    pub omega_r_max: f64,
    pub omega_r_points: usize,
    pub fit_n_max: usize,
}

impl Default for CoeffsConfig {
    fn default() -> Self {
        Self {
            omega_r_min: 4000.0,
            omega_r_max: 9000.0,
            omega_r_points: 251,
            fit_n_max: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SnrSectionConfig {
    pub omega_r_same: f64,
    pub omega_r_opposite: f64,
    pub t1_us: f64,
    pub eta: f64,
    pub nbar_points: usize,
    /// The photon grid spans [0, nbar_max_frac * n_crit(same-sign system)].
    pub nbar_max_frac: f64,
    pub kappa_ratios: Vec<f64>,
}

impl Default for SnrSectionConfig {
    fn default() -> Self {
        Self {
            omega_r_same: 4515.0,
            omega_r_opposite: 7660.0,
            t1_us: 1.0,
            eta: 1.0,
            nbar_points: 111,
            nbar_max_frac: 1.0,
            kappa_ratios: vec![0.5, 1.0, 1.5],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResponseConfig {
    pub omega_m: f64,
    pub power_min_db: f64,
    pub power_max_db: f64,
    pub power_step_db: f64,
    pub levels: Vec<usize>,
    pub num_levels_list: Vec<usize>,
}

impl Default for ResponseConfig {
    fn default() -> Self {
        Self {
            omega_m: 7000.0,
            power_min_db: 40.0,
            power_max_db: 85.0,
            power_step_db: 0.25,
            levels: vec![0, 1, 2],
            num_levels_list: vec![2, 3, 6],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MapConfig {
    pub omega_m_min: f64,
    pub omega_m_max: f64,
    pub omega_m_points: usize,
    pub power_min_db: f64,
    pub power_max_db: f64,
    pub power_step_db: f64,
    pub levels: Vec<usize>,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            omega_m_min: 6990.0,
            omega_m_max: 7015.0,
            omega_m_points: 51,
            power_min_db: 40.0,
            power_max_db: 85.0,
            power_step_db: 1.0,
            levels: vec![0, 1],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatesConfig {
    pub omega_m: f64,
    pub power_min_db: f64,
    pub power_max_db: f64,
    pub power_step_db: f64,
    /// Charge dispersions eps_i; the built-in table when omitted.
    pub dispersions: Option<Vec<f64>>,
    pub noise: String,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self {
            omega_m: 7000.0,
            power_min_db: 20.0,
            power_max_db: 55.0,
            power_step_db: 0.5,
            dispersions: None,
            noise: "one_over_f".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleConfig {
    /// MLS state probed by the multiplicity scan.
    pub level: usize,
    /// Power inside the bistable window.
    pub power_db: f64,
    pub powers_outside_db: Vec<f64>,
    pub scan_points: usize,
    pub jc_photon_numbers: Vec<f64>,
    pub block_check_levels: usize,
    pub block_check_cutoff: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            level: 2,
            power_db: 62.75,
            powers_outside_db: vec![58.0, 66.0],
            scan_points: 600,
            jc_photon_numbers: vec![0.0, 1.0, 10.0, 1e3, 1e6],
            block_check_levels: 3,
            block_check_cutoff: 6,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub solver: SolverConfig,
    pub coeffs: CoeffsConfig,
    pub snr: SnrSectionConfig,
    pub response: ResponseConfig,
    pub map: MapConfig,
    pub rates: RatesConfig,
    pub oracle: OracleConfig,
}

impl RunConfig {
    /// Resolved configuration as ordered `section.key = value` lines, embedded
    /// in every output file for reproducibility.
    pub fn echo_lines(&self) -> Vec<String> {
        let value = serde_json::to_value(self).expect("config serializes");
        let mut lines = Vec::new();
        if let serde_json::Value::Object(sections) = value {
            for (section, body) in sections {
                if let serde_json::Value::Object(keys) = body {
                    for (key, v) in keys {
                        lines.push(format!("{section}.{key} = {}", echo_value(&v)));
                    }
                }
            }
        }
        lines
    }
}

fn echo_value(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Array(items) => items
            .iter()
            .map(echo_value)
            .collect::<Vec<_>>()
            .join(","),
        serde_json::Value::Null => "none".into(),
        other => other.to_string(),
    }
}

/// Parse an INI-style configuration, applying it over the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    let mut seen: Vec<(String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ConfigError {
                line: line_no,
                message: format!("malformed section header `{line}`"),
            })?;
            section = name.trim().to_string();
            if !matches!(
                section.as_str(),
                "system" | "solver" | "coeffs" | "snr" | "response" | "map" | "rates" | "oracle"
            ) {
                return Err(ConfigError {
                    line: line_no,
                    message: format!("unknown section `{section}`"),
                });
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim();
        if section.is_empty() {
            return Err(ConfigError {
                line: line_no,
                message: format!("key `{key}` appears before any [section]"),
            });
        }
        if seen.contains(&(section.clone(), key.clone())) {
            return Err(ConfigError {
                line: line_no,
                message: format!("duplicate key `{key}` in [{section}]"),
            });
        }
        seen.push((section.clone(), key.clone()));
        apply_key(&mut cfg, &section, &key, value, line_no)?;
    }
    Ok(cfg)
}

fn bad(line: usize, message: String) -> ConfigError {
    ConfigError { line, message }
}

fn parse_f64(v: &str, key: &str, line: usize) -> Result<f64, ConfigError> {
    v.parse()
        .map_err(|_| bad(line, format!("`{key}` expects a number, got `{v}`")))
}

fn parse_usize(v: &str, key: &str, line: usize) -> Result<usize, ConfigError> {
    v.parse()
        .map_err(|_| bad(line, format!("`{key}` expects an integer, got `{v}`")))
}

fn parse_f64_list(v: &str, key: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| bad(line, format!("`{key}` expects numbers, got `{s}`")))
        })
        .collect()
}

fn parse_usize_list(v: &str, key: &str, line: usize) -> Result<Vec<usize>, ConfigError> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| bad(line, format!("`{key}` expects integers, got `{s}`")))
        })
        .collect()
}

fn apply_key(
    cfg: &mut RunConfig,
    section: &str,
    key: &str,
    v: &str,
    line: usize,
) -> Result<(), ConfigError> {
    match (section, key) {
        ("system", "omega_10") => cfg.system.omega_10 = parse_f64(v, key, line)?,
        ("system", "omega_21") => cfg.system.omega_21 = parse_f64(v, key, line)?,
        ("system", "g0") => cfg.system.g0 = parse_f64(v, key, line)?,
        ("system", "num_levels") => cfg.system.num_levels = parse_usize(v, key, line)?,
        ("system", "omega_r") => cfg.system.omega_r = parse_f64(v, key, line)?,
        ("system", "kappa") => cfg.system.kappa = parse_f64(v, key, line)?,
        ("system", "level_freqs") => cfg.system.level_freqs = Some(parse_f64_list(v, key, line)?),
        ("system", "couplings") => cfg.system.couplings = Some(parse_f64_list(v, key, line)?),

        ("solver", "beta") => cfg.solver.beta = parse_f64(v, key, line)?,
        ("solver", "max_iter") => cfg.solver.max_iter = parse_usize(v, key, line)?,
        ("solver", "tol_scale") => cfg.solver.tol_scale = parse_f64(v, key, line)?,

        ("coeffs", "omega_r_min") => cfg.coeffs.omega_r_min = parse_f64(v, key, line)?,
        ("coeffs", "omega_r_max") => cfg.coeffs.omega_r_max = parse_f64(v, key, line)?,
        ("coeffs", "omega_r_points") => cfg.coeffs.omega_r_points = parse_usize(v, key, line)?,
        ("coeffs", "fit_n_max") => cfg.coeffs.fit_n_max = parse_usize(v, key, line)?,

        ("snr", "omega_r_same") => cfg.snr.omega_r_same = parse_f64(v, key, line)?,
        ("snr", "omega_r_opposite") => cfg.snr.omega_r_opposite = parse_f64(v, key, line)?,
        ("snr", "t1_us") => cfg.snr.t1_us = parse_f64(v, key, line)?,
        ("snr", "eta") => cfg.snr.eta = parse_f64(v, key, line)?,
        ("snr", "nbar_points") => cfg.snr.nbar_points = parse_usize(v, key, line)?,
        ("snr", "nbar_max_frac") => cfg.snr.nbar_max_frac = parse_f64(v, key, line)?,
        ("snr", "kappa_ratios") => cfg.snr.kappa_ratios = parse_f64_list(v, key, line)?,

        ("response", "omega_m") => cfg.response.omega_m = parse_f64(v, key, line)?,
        ("response", "power_min_db") => cfg.response.power_min_db = parse_f64(v, key, line)?,
        ("response", "power_max_db") => cfg.response.power_max_db = parse_f64(v, key, line)?,
        ("response", "power_step_db") => cfg.response.power_step_db = parse_f64(v, key, line)?,
        ("response", "levels") => cfg.response.levels = parse_usize_list(v, key, line)?,
        ("response", "num_levels_list") => {
            cfg.response.num_levels_list = parse_usize_list(v, key, line)?
        }

        ("map", "omega_m_min") => cfg.map.omega_m_min = parse_f64(v, key, line)?,
        ("map", "omega_m_max") => cfg.map.omega_m_max = parse_f64(v, key, line)?,
        ("map", "omega_m_points") => cfg.map.omega_m_points = parse_usize(v, key, line)?,
        ("map", "power_min_db") => cfg.map.power_min_db = parse_f64(v, key, line)?,
        ("map", "power_max_db") => cfg.map.power_max_db = parse_f64(v, key, line)?,
        ("map", "power_step_db") => cfg.map.power_step_db = parse_f64(v, key, line)?,
        ("map", "levels") => cfg.map.levels = parse_usize_list(v, key, line)?,

        ("rates", "omega_m") => cfg.rates.omega_m = parse_f64(v, key, line)?,
        ("rates", "power_min_db") => cfg.rates.power_min_db = parse_f64(v, key, line)?,
        ("rates", "power_max_db") => cfg.rates.power_max_db = parse_f64(v, key, line)?,
        ("rates", "power_step_db") => cfg.rates.power_step_db = parse_f64(v, key, line)?,
        ("rates", "dispersions") => cfg.rates.dispersions = Some(parse_f64_list(v, key, line)?),
        ("rates", "noise") => {
            if v != "one_over_f" {
                return Err(bad(line, format!("unknown noise model `{v}`")));
            }
            cfg.rates.noise = v.to_string();
        }

        ("oracle", "level") => cfg.oracle.level = parse_usize(v, key, line)?,
        ("oracle", "power_db") => cfg.oracle.power_db = parse_f64(v, key, line)?,
        ("oracle", "powers_outside_db") => {
            cfg.oracle.powers_outside_db = parse_f64_list(v, key, line)?
        }
        ("oracle", "scan_points") => cfg.oracle.scan_points = parse_usize(v, key, line)?,
        ("oracle", "jc_photon_numbers") => {
            cfg.oracle.jc_photon_numbers = parse_f64_list(v, key, line)?
        }
        ("oracle", "block_check_levels") => {
            cfg.oracle.block_check_levels = parse_usize(v, key, line)?
        }
        ("oracle", "block_check_cutoff") => {
            cfg.oracle.block_check_cutoff = parse_usize(v, key, line)?
        }

        _ => {
            return Err(bad(line, format!("unknown key `{key}` in [{section}]")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_build() {
        let cfg = RunConfig::default();
        let spec = cfg.system.build_system().unwrap();
        assert_eq!(spec.num_levels(), 6);
        assert_eq!(spec.omega_r, 7000.0);
    }

    #[test]
    fn parses_overrides() {
        let text = "\n[system]\nnum_levels = 7\nkappa = 1.0\n\n[rates]\npower_step_db = 0.5\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.system.num_levels, 7);
        assert_eq!(cfg.system.kappa, 1.0);
        assert_eq!(cfg.rates.power_step_db, 0.5);
        // untouched sections keep defaults
        assert_eq!(cfg.coeffs.omega_r_points, 251);
    }

    #[test]
    fn unknown_key_is_line_anchored() {
        let text = "[system]\nomega_10 = 6000\nbogus = 3\n";
        let err = parse_config(text).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("bogus"));
    }

    #[test]
    fn unknown_section_rejected() {
        let err = parse_config("[nope]\nx = 1\n").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = parse_config("[system]\ng0 = 1\ng0 = 2\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn type_errors_are_line_anchored() {
        let err = parse_config("[system]\nomega_10 = abc\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_config("[response]\nlevels = 0,x\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn explicit_ladder_requires_both_keys() {
        let cfg = parse_config("[system]\nlevel_freqs = 0,6000\n").unwrap();
        assert!(cfg.system.build_system().is_err());
        let cfg = parse_config("[system]\nlevel_freqs = 0,6000\ncouplings = 120\n").unwrap();
        let spec = cfg.system.build_system().unwrap();
        assert_eq!(spec.mls.couplings, vec![120.0]);
    }

    #[test]
    fn echo_lines_are_deterministic() {
        let cfg = RunConfig::default();
        let a = cfg.echo_lines();
        let b = cfg.echo_lines();
        assert_eq!(a, b);
        assert!(a.iter().any(|l| l.starts_with("system.omega_10 = ")));
        assert!(a.iter().any(|l| l == "rates.dispersions = none"));
    }
}
