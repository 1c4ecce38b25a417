use std::path::{Path, PathBuf};

use iesplan_core::analysis::Extreme;
use iesplan_core::io::read_json;
use iesplan_core::model::ExclusivityMode;
use iesplan_core::solve::SolverConfig;
use serde::{Deserialize, Serialize};

/// Everything a run needs. Relative paths are resolved against the
/// directory of the config file. Missing catalog or tariffs fall back to
/// the bundled presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub catalog: Option<PathBuf>,
    pub tariffs: Option<PathBuf>,
    pub planning_years: u32,
    pub discount_rate: f64,

    /// Historical days in ScenarioSet CSV layout.
    pub history: Option<PathBuf>,
    pub history_ev: Option<PathBuf>,
    /// Moment targets as JSON, used instead of estimating from history.
    pub targets: Option<PathBuf>,
    pub scenarios: Option<PathBuf>,
    pub scenarios_ev: Option<PathBuf>,
    pub use_existing_scenarios: bool,
    pub out_dir: PathBuf,

    pub n_scenarios: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iters: usize,
    pub block_correlation: bool,

    pub exclusivity_mode: ExclusivityMode,
    pub zeta: f64,
    /// Tax for `plan`; the tariff file value when absent.
    pub carbon_tax: Option<f64>,
    pub carbon_taxes: Vec<f64>,
    /// Scenario whose dispatch is reported; both extremes when absent.
    pub extreme: Option<Extreme>,
    pub export_mps: bool,
    pub solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            catalog: None,
            tariffs: None,
            planning_years: 10,
            discount_rate: 0.06,
            history: None,
            history_ev: None,
            targets: None,
            scenarios: None,
            scenarios_ev: None,
            use_existing_scenarios: false,
            out_dir: PathBuf::from("out"),
            n_scenarios: 10,
            seed: 7,
            tol: 0.05,
            max_iters: 50,
            block_correlation: true,
            exclusivity_mode: ExclusivityMode::Relaxed,
            zeta: 0.05,
            carbon_tax: None,
            carbon_taxes: vec![40.0, 100.0, 400.0, 700.0, 1000.0],
            extreme: None,
            export_mps: false,
            solver: SolverConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> iesplan_core::Result<Self> {
        let mut cfg: RunConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p.as_mut() {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        fix(&mut self.catalog);
        fix(&mut self.tariffs);
        fix(&mut self.history);
        fix(&mut self.history_ev);
        fix(&mut self.targets);
        fix(&mut self.scenarios);
        fix(&mut self.scenarios_ev);
        if self.out_dir.is_relative() {
            self.out_dir = base.join(&self.out_dir);
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.n_scenarios < 4 {
            return Err(format!("n_scenarios must be at least 4, got {}", self.n_scenarios));
        }
        if !(0.0..1.0).contains(&self.zeta) {
            return Err(format!("zeta {} outside [0, 1)", self.zeta));
        }
        if !(self.tol > 0.0) {
            return Err(format!("tol must be positive, got {}", self.tol));
        }
        let paths = [
            &self.catalog,
            &self.tariffs,
            &self.history,
            &self.history_ev,
            &self.targets,
            &self.scenarios,
            &self.scenarios_ev,
        ];
        for p in paths.into_iter().flatten() {
            if !p.exists() {
                return Err(format!("{}: file not found", p.display()));
            }
        }
        Ok(())
    }
}
