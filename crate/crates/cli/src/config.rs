//! Run configuration: a TOML file plus dotted-path overrides.

use std::path::{Path, PathBuf};

use decohere::analysis::{RegionConfig, Schedule};
use decohere::statmech::{BottomAttachment, Engine};
use decohere::InitialState;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads; 0 lets the pool decide.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub statmech: StatmechSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub q: f64,
    pub t_total: Option<usize>,
    pub t_burn_in: Option<usize>,
    pub sample_stride: Option<usize>,
    pub initial_state: InitialState,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            l: 8,
            p: 0.2,
            q: 0.0,
            t_total: None,
            t_burn_in: None,
            sample_stride: None,
            initial_state: InitialState::ProductZero,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub realizations: usize,
    pub schedule: Schedule,
    pub initial_state: InitialState,
    pub regions: RegionConfig,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            l: vec![16],
            p: vec![0.1, 0.3, 0.5],
            q: vec![0.0, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0],
            realizations: 10,
            schedule: Schedule::default(),
            initial_state: InitialState::ProductZero,
            regions: RegionConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    /// `I_AB = b ln(1/q) + c` per `(L, p)`.
    Log,
    /// `I_AB = d exp(−e q)` per `(L, p)`.
    Exp,
    /// `S_A = α L + β log₂ L + γ` per `p` at `q = 0`.
    Volume,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    /// Sweep CSV; defaults to `sweep.csv` in the output directory.
    pub input: Option<PathBuf>,
    pub model: FitKind,
    /// Sizes to fit; empty means every size in the table.
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    /// Measurement rates to fit; empty means every `p` in the table.
    pub p: Vec<f64>,
    /// Inclusive `q` window; defaults to the model's standard window.
    pub window: Option<[f64; 2]>,
    pub weighted: bool,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            input: None,
            model: FitKind::Log,
            l: Vec::new(),
            p: Vec::new(),
            window: None,
            weighted: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericMode {
    /// Exact rationals for `Q ≤ 3`, floats above.
    Auto,
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Both,
    BruteForce,
    TransferMatrix,
}

impl EngineChoice {
    pub fn engines(self) -> Vec<Engine> {
        match self {
            EngineChoice::Both => vec![Engine::BruteForce, Engine::TransferMatrix],
            EngineChoice::BruteForce => vec![Engine::BruteForce],
            EngineChoice::TransferMatrix => vec![Engine::TransferMatrix],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatmechSection {
    /// Rényi index; the replica number is `Q = n k + 1`.
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub p: f64,
    pub q: f64,
    pub width: usize,
    pub depth: usize,
    /// Region A is this many sites at the right end of the top row.
    pub region_len: usize,
    pub attachment: BottomAttachment,
    pub numeric: NumericMode,
    pub engines: EngineChoice,
}

impl Default for StatmechSection {
    fn default() -> Self {
        Self {
            n: 2,
            k: 1,
            d: 4,
            p: 0.3,
            q: 0.0,
            width: 2,
            depth: 3,
            region_len: 1,
            attachment: BottomAttachment::Vertical,
            numeric: NumericMode::Auto,
            engines: EngineChoice::Both,
        }
    }
}

impl StatmechSection {
    pub fn q_order(&self) -> usize {
        self.n * self.k + 1
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub circuits: usize,
    pub max_sites: usize,
    pub tolerance: f64,
    /// Pins the monitored rate of every circuit; drawn uniformly when unset.
    pub p: Option<f64>,
    pub q: Option<f64>,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            circuits: 200,
            max_sites: 5,
            tolerance: 1e-9,
            p: None,
            q: None,
        }
    }
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn check_unit(path: &str, v: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(path, format!("{v} outside [0, 1]")))
    }
}

fn check_size(path: &str, l: usize) -> Result<(), CliError> {
    if l >= 2 && l.is_multiple_of(2) {
        Ok(())
    } else {
        Err(invalid(
            path,
            format!("system size must be even and at least 2, got {l}"),
        ))
    }
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        check_size("simulate.L", self.l)?;
        check_unit("simulate.p", self.p)?;
        check_unit("simulate.q", self.q)?;
        if self.sample_stride == Some(0) {
            return Err(invalid("simulate.sample_stride", "must be at least 1"));
        }
        Ok(())
    }
}

impl SweepSection {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.l.is_empty() || self.p.is_empty() || self.q.is_empty() {
            return Err(invalid("sweep", "L, p and q lists must be non-empty"));
        }
        for (i, &l) in self.l.iter().enumerate() {
            check_size(&format!("sweep.L[{i}]"), l)?;
        }
        for (i, &p) in self.p.iter().enumerate() {
            check_unit(&format!("sweep.p[{i}]"), p)?;
        }
        for (i, &q) in self.q.iter().enumerate() {
            check_unit(&format!("sweep.q[{i}]"), q)?;
        }
        if self.realizations == 0 {
            return Err(invalid("sweep.realizations", "must be at least 1"));
        }
        let s = &self.schedule;
        if s.burn_in_per_site >= s.total_per_site {
            return Err(invalid(
                "sweep.schedule.burn_in_per_site",
                "must be below total_per_site",
            ));
        }
        if s.stride_divisor == 0 {
            return Err(invalid("sweep.schedule.stride_divisor", "must be at least 1"));
        }
        Ok(())
    }
}

impl FitSection {
    pub fn validate(&self) -> Result<(), CliError> {
        for (i, &p) in self.p.iter().enumerate() {
            check_unit(&format!("fit.p[{i}]"), p)?;
        }
        if let Some([lo, hi]) = self.window {
            if !(lo <= hi) {
                return Err(invalid("fit.window", format!("empty window [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

impl StatmechSection {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 1 || self.k < 1 {
            return Err(invalid("statmech.n", "n and k must be at least 1"));
        }
        if self.d < self.q_order() {
            return Err(invalid(
                "statmech.d",
                format!("d = {} must be at least Q = nk + 1 = {}", self.d, self.q_order()),
            ));
        }
        check_unit("statmech.p", self.p)?;
        check_unit("statmech.q", self.q)?;
        if self.width == 0 {
            return Err(invalid("statmech.width", "must be at least 1"));
        }
        if self.depth < 2 {
            return Err(invalid("statmech.depth", "must be at least 2"));
        }
        if self.region_len > self.width {
            return Err(invalid("statmech.region_len", "exceeds the patch width"));
        }
        Ok(())
    }
}

impl OracleSection {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(2..=6).contains(&self.max_sites) {
            return Err(invalid(
                "oracle.max_sites",
                format!("must lie in 2..=6, got {}", self.max_sites),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("oracle.tolerance", "must be positive"));
        }
        if let Some(p) = self.p {
            check_unit("oracle.p", p)?;
        }
        if let Some(q) = self.q {
            check_unit("oracle.q", q)?;
        }
        Ok(())
    }
}

/// Reads `path` (or starts empty) and applies `key=value` overrides.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut root = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => toml::Table::new(),
    };
    for item in overrides {
        apply_override(&mut root, item)?;
    }
    serde_path_to_error::deserialize(toml::Value::Table(root)).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner()))
    })
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_override(root: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {item:?} is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad override key {key:?}")));
    }
    let (leaf, parents) = parts.split_last().expect("non-empty");
    let mut table = root;
    for (depth, part) in parents.iter().enumerate() {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("{} is not a table", parts[..=depth].join("."))))?;
    }
    table.insert(leaf.to_string(), parse_value(raw.trim()));
    Ok(())
}

/// SHA-256 over the command name, the master seed and the section that
/// determines the command's data output.
pub fn config_hash<S: Serialize>(command: &str, seed: u64, section: &S) -> String {
    let body = serde_json::json!({ "command": command, "master_seed": seed, "section": section });
    hex::encode(Sha256::digest(body.to_string().as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_set_nested_leaves() {
        let cfg = load(
            None,
            &[
                "sweep.realizations=3".into(),
                "sweep.p=[0.1, 0.2]".into(),
                "simulate.initial_state=maximally_mixed".into(),
                "master_seed=7".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.sweep.realizations, 3);
        assert_eq!(cfg.sweep.p, vec![0.1, 0.2]);
        assert_eq!(cfg.simulate.initial_state, InitialState::MaximallyMixed);
        assert_eq!(cfg.master_seed, 7);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = load(None, &["sweep.realizations=\"many\"".into()]).unwrap_err();
        assert!(err.to_string().contains("sweep.realizations"), "{err}");
        let err = load(None, &["simulate.bogus=1".into()]).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = load(None, &["master_seed.x=1".into()]).unwrap_err();
        assert!(err.to_string().contains("master_seed"), "{err}");
        assert!(load(None, &["novalue".into()]).is_err());
    }

    #[test]
    fn validation_paths() {
        let mut cfg = load(None, &[]).unwrap();
        cfg.simulate.p = 1.5;
        assert!(cfg.simulate.validate().unwrap_err().to_string().contains("simulate.p"));
        cfg.sweep.l = vec![16, 7];
        assert!(cfg.sweep.validate().unwrap_err().to_string().contains("sweep.L[1]"));
        cfg.statmech.d = 2;
        assert!(cfg.statmech.validate().unwrap_err().to_string().contains("statmech.d"));
        cfg.oracle.max_sites = 7;
        assert!(cfg.oracle.validate().is_err());
    }

    #[test]
    fn hash_ignores_paths_and_threads() {
        let a = load(None, &["output_dir=\"x\"".into(), "threads=3".into()]).unwrap();
        let b = load(None, &[]).unwrap();
        assert_eq!(
            config_hash("simulate", a.master_seed, &a.simulate),
            config_hash("simulate", b.master_seed, &b.simulate)
        );
        let c = load(None, &["simulate.q=0.1".into()]).unwrap();
        assert_ne!(
            config_hash("simulate", b.master_seed, &b.simulate),
            config_hash("simulate", c.master_seed, &c.simulate)
        );
    }
}
