//! Plain-text `key = value` configuration with dotted sections.

use std::collections::BTreeMap;
use std::path::PathBuf;

use hgf_core::hgm::{OdeMethod, SolverSettings};
use hgf_core::filters::UkfParams;
use hgf_core::oracle::QuadratureConfig;

use crate::HarnessError;

/// Raw parsed key/value pairs, order-insensitive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues(pub BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(KeyValues(map))
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    fn parse_as<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError> {
        match self.get(key) {
            None => Ok(None),
            Some(text) => text
                .parse()
                .map(Some)
                .map_err(|_| HarnessError::Config(format!("bad value for `{key}`: `{text}`"))),
        }
    }
}

/// Fully resolved experiment configuration. Unset keys take the defaults
/// documented alongside each field.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// `model`: `nonlinear1d` (default) or `linear`.
    pub model: String,
    /// `filters`: comma-separated subset of kf, ekf, ukf, pf, oracle, hgm.
    pub filters: Vec<String>,
    /// `realizations`: default 300.
    pub realizations: usize,
    /// `steps`: default 50.
    pub steps: usize,
    /// `seed`: default 17.
    pub seed: u64,
    /// `out_dir`: default `out`.
    pub out_dir: PathBuf,
    pub solver: SolverSettings,
    pub quadrature: QuadratureConfig,
    /// `pf.particles`: default 100.
    pub pf_particles: usize,
    pub ukf: UkfParams,
    /// `hgm.pfaffian_file`: required when the hgm filter is selected.
    pub hgm_pfaffian_file: Option<PathBuf>,
    /// `hgm.init_table_file`: optional precomputed table; the sign grid
    /// is generated otherwise.
    pub hgm_init_table_file: Option<PathBuf>,
    /// `init.mean` / `init.var`: initial belief and simulation density.
    pub init_mean: f64,
    pub init_var: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: "nonlinear1d".to_string(),
            filters: vec!["oracle".into(), "pf".into(), "ukf".into(), "ekf".into()],
            realizations: 300,
            steps: 50,
            seed: 17,
            out_dir: PathBuf::from("out"),
            solver: SolverSettings::default(),
            quadrature: QuadratureConfig::default(),
            pf_particles: 100,
            ukf: UkfParams::default(),
            hgm_pfaffian_file: None,
            hgm_init_table_file: None,
            init_mean: 0.0,
            init_var: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_key_values(kv: &KeyValues) -> Result<Self, HarnessError> {
        let mut cfg = ExperimentConfig::default();
        for key in kv.0.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(HarnessError::Config(format!("unknown config key `{key}`")));
            }
        }
        if let Some(v) = kv.get("model") {
            cfg.model = v.to_string();
        }
        if let Some(v) = kv.get("filters") {
            cfg.filters = v.split(',').map(|s| s.trim().to_string()).collect();
        }
        if let Some(v) = kv.parse_as("realizations")? {
            cfg.realizations = v;
        }
        if let Some(v) = kv.parse_as("steps")? {
            cfg.steps = v;
        }
        if let Some(v) = kv.parse_as("seed")? {
            cfg.seed = v;
        }
        if let Some(v) = kv.get("out_dir") {
            cfg.out_dir = PathBuf::from(v);
        }
        if let Some(v) = kv.get("solver.method") {
            cfg.solver.method = OdeMethod::parse(v)
                .ok_or_else(|| HarnessError::Config(format!("unknown solver.method `{v}`")))?;
        }
        if let Some(v) = kv.parse_as("solver.steps_per_unit")? {
            cfg.solver.steps_per_unit = v;
        }
        if let Some(v) = kv.parse_as("solver.min_steps")? {
            cfg.solver.min_steps = v;
        }
        if let Some(v) = kv.parse_as("solver.min_denominator")? {
            cfg.solver.min_denominator = v;
        }
        if let Some(v) = kv.parse_as("solver.pole_scan_samples")? {
            cfg.solver.pole_scan_samples = v;
        }
        if let Some(v) = kv.parse_as("quadrature.hermite_order")? {
            cfg.quadrature.hermite_order = v;
        }
        if let Some(v) = kv.parse_as("quadrature.truncation_sigmas")? {
            cfg.quadrature.truncation_sigmas = v;
        }
        if let Some(v) = kv.parse_as("quadrature.tolerance")? {
            cfg.quadrature.tolerance = v;
        }
        if let Some(v) = kv.parse_as("pf.particles")? {
            cfg.pf_particles = v;
        }
        if let Some(v) = kv.parse_as("ukf.alpha")? {
            cfg.ukf.alpha = v;
        }
        if let Some(v) = kv.parse_as("ukf.beta")? {
            cfg.ukf.beta = v;
        }
        if let Some(v) = kv.parse_as("ukf.kappa")? {
            cfg.ukf.kappa = v;
        }
        if let Some(v) = kv.get("hgm.pfaffian_file") {
            cfg.hgm_pfaffian_file = Some(PathBuf::from(v));
        }
        if let Some(v) = kv.get("hgm.init_table_file") {
            cfg.hgm_init_table_file = Some(PathBuf::from(v));
        }
        if let Some(v) = kv.parse_as("init.mean")? {
            cfg.init_mean = v;
        }
        if let Some(v) = kv.parse_as("init.var")? {
            cfg.init_var = v;
        }
        if cfg.realizations == 0 {
            return Err(HarnessError::Config("realizations must be at least 1".into()));
        }
        if cfg.steps == 0 {
            return Err(HarnessError::Config("steps must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_key_values(&KeyValues::parse(&text)?)
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut map = BTreeMap::new();
        map.insert("model".into(), self.model.clone());
        map.insert("filters".into(), self.filters.join(", "));
        map.insert("realizations".into(), self.realizations.to_string());
        map.insert("steps".into(), self.steps.to_string());
        map.insert("seed".into(), self.seed.to_string());
        map.insert("out_dir".into(), self.out_dir.display().to_string());
        map.insert("solver.method".into(), self.solver.method.name().to_string());
        map.insert("solver.steps_per_unit".into(), self.solver.steps_per_unit.to_string());
        map.insert("solver.min_steps".into(), self.solver.min_steps.to_string());
        map.insert("solver.min_denominator".into(), self.solver.min_denominator.to_string());
        map.insert("solver.pole_scan_samples".into(), self.solver.pole_scan_samples.to_string());
        map.insert("quadrature.hermite_order".into(), self.quadrature.hermite_order.to_string());
        map.insert(
            "quadrature.truncation_sigmas".into(),
            self.quadrature.truncation_sigmas.to_string(),
        );
        map.insert("quadrature.tolerance".into(), self.quadrature.tolerance.to_string());
        map.insert("pf.particles".into(), self.pf_particles.to_string());
        map.insert("ukf.alpha".into(), self.ukf.alpha.to_string());
        map.insert("ukf.beta".into(), self.ukf.beta.to_string());
        map.insert("ukf.kappa".into(), self.ukf.kappa.to_string());
        if let Some(p) = &self.hgm_pfaffian_file {
            map.insert("hgm.pfaffian_file".into(), p.display().to_string());
        }
        if let Some(p) = &self.hgm_init_table_file {
            map.insert("hgm.init_table_file".into(), p.display().to_string());
        }
        map.insert("init.mean".into(), self.init_mean.to_string());
        map.insert("init.var".into(), self.init_var.to_string());
        KeyValues(map)
    }
}

const KNOWN_KEYS: &[&str] = &[
    "model",
    "filters",
    "realizations",
    "steps",
    "seed",
    "out_dir",
    "solver.method",
    "solver.steps_per_unit",
    "solver.min_steps",
    "solver.min_denominator",
    "solver.pole_scan_samples",
    "quadrature.hermite_order",
    "quadrature.truncation_sigmas",
    "quadrature.tolerance",
    "pf.particles",
    "ukf.alpha",
    "ukf.beta",
    "ukf.kappa",
    "hgm.pfaffian_file",
    "hgm.init_table_file",
    "init.mean",
    "init.var",
];
