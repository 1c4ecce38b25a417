use iesplan_milp::exec::map_slice;
use serde::Serialize;

use super::{run_plan, CostBreakdown, PlanRun};
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::solve::{status_label, SolverConfig};
use crate::types::{CaseInputs, FcKind, ScenarioSet};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepLevel {
    pub carbon_tax: f64,
    pub status: String,
    pub x_fc: Vec<(FcKind, u32)>,
    pub x_ess_kwh: Option<f64>,
    pub substandard: Option<usize>,
    pub breakdown: Option<CostBreakdown>,
    pub objective: Option<f64>,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

impl SweepLevel {
    pub fn from_run(carbon_tax: f64, run: &PlanRun) -> Self {
        let plan = run.plan.as_ref();
        SweepLevel {
            carbon_tax,
            status: status_label(run.status()).to_string(),
            x_fc: plan.map(|p| p.x_fc.clone()).unwrap_or_default(),
            x_ess_kwh: plan.map(|p| p.x_ess_kwh),
            substandard: run.audit.as_ref().map(|a| a.count),
            breakdown: run.breakdown,
            objective: run.outcome.bnb.objective,
            error: None,
            wall_time_s: run.outcome.wall_time_s,
        }
    }

    fn failed(carbon_tax: f64, err: &Error) -> Self {
        SweepLevel {
            carbon_tax,
            status: "error".into(),
            x_fc: Vec::new(),
            x_ess_kwh: None,
            substandard: None,
            breakdown: None,
            objective: None,
            error: Some(err.to_string()),
            wall_time_s: 0.0,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.breakdown.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub levels: Vec<SweepLevel>,
    /// Totals non-decreasing in the tax over the levels that solved.
    pub monotone: bool,
}

impl SweepResult {
    pub fn any_succeeded(&self) -> bool {
        self.levels.iter().any(SweepLevel::succeeded)
    }
}

/// True when, sorted by tax, each total is at least the previous one minus
/// `rel_tol` of its magnitude.
pub fn is_non_decreasing(points: &[(f64, f64)], rel_tol: f64) -> bool {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).all(|w| w[1].1 >= w[0].1 - rel_tol * w[0].1.abs().max(1.0))
}

/// Solve once per tax level with identical scenarios. A failing level is
/// recorded and the sweep continues.
pub fn sweep_carbon_tax(
    case: &CaseInputs,
    scenarios: &ScenarioSet,
    config: &ModelConfig,
    solver: &SolverConfig,
    taxes: &[f64],
) -> Result<SweepResult> {
    if taxes.is_empty() {
        return Err(Error::InvalidParameter("carbon-tax list is empty".into()));
    }
    if let Some(bad) = taxes.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::InvalidParameter(format!("carbon tax {bad} must be finite and non-negative")));
    }
    let levels = map_slice(config.execution, taxes, |&tax| {
        let mut c = case.clone();
        c.tariffs.carbon_tax = tax;
        match run_plan(&c, scenarios, config, solver) {
            Ok(run) => SweepLevel::from_run(tax, &run),
            Err(e) => {
                log::warn!("carbon tax {tax}: {e}");
                SweepLevel::failed(tax, &e)
            }
        }
    });
    let points: Vec<(f64, f64)> = levels.iter().filter_map(|l| l.breakdown.map(|b| (l.carbon_tax, b.total))).collect();
    let monotone = is_non_decreasing(&points, 2.0 * solver.rel_gap.max(1e-9));
    Ok(SweepResult { levels, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotonicity_check() {
        assert!(is_non_decreasing(&[(40.0, 1.0), (100.0, 2.0), (400.0, 2.0)], 0.0));
        assert!(!is_non_decreasing(&[(100.0, 2.0), (40.0, 3.0)], 1e-6));
        assert!(is_non_decreasing(&[(1.0, 5.0)], 0.0));
    }
}
