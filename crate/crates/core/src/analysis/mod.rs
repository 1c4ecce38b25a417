//! Reports: cost breakdowns, chance audits, dispatch tables, sweeps.

mod audit;
mod breakdown;
mod dispatch;
mod report;
mod sweep;
mod verify;

pub use audit::{chance_audit, ChanceAudit, SocViolation};
pub use breakdown::{cost_breakdown, cost_terms, investment_cost, CostBreakdown};
pub use dispatch::{dispatch_table, extreme_scenario, fmt_num, soc_table, Extreme, Table};
pub use report::{audit_json, cost_breakdown_csv, plan_summary_csv, write_plan_reports, AuditDocument};
pub use sweep::{is_non_decreasing, sweep_carbon_tax, SweepLevel, SweepResult};
pub use verify::{verify_plan, PlanCheck};

use iesplan_milp::{check_point, BnbStatus, FeasibilityReport};

use crate::error::Result;
use crate::model::{assemble_model, ModelConfig, RowFamily};
use crate::solve::{diagnose_infeasibility, extract_solution, solve_model, PlanSolution, SolveOutcome, SolverConfig};
use crate::types::{CaseInputs, ScenarioSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ModelStats {
    pub n_cols: usize,
    pub n_rows: usize,
    pub nnz: usize,
    pub n_integer: usize,
}

/// Result of one assemble, solve, extract and verify pass.
#[derive(Debug, Clone)]
pub struct PlanRun {
    pub stats: ModelStats,
    pub annualization: f64,
    pub outcome: SolveOutcome,
    pub plan: Option<PlanSolution>,
    pub breakdown: Option<CostBreakdown>,
    pub audit: Option<ChanceAudit>,
    pub check: Option<PlanCheck>,
    /// Row, bound and integrality check of the raw solver point.
    pub point_check: Option<FeasibilityReport>,
    /// Families whose removal restores LP feasibility, when infeasible.
    pub infeasible_families: Vec<RowFamily>,
}

impl PlanRun {
    pub fn status(&self) -> BnbStatus {
        self.outcome.bnb.status
    }
}

pub fn run_plan(
    case: &CaseInputs,
    scenarios: &ScenarioSet,
    config: &ModelConfig,
    solver: &SolverConfig,
) -> Result<PlanRun> {
    let model = assemble_model(case, scenarios, config)?;
    let stats = ModelStats {
        n_cols: model.n_cols(),
        n_rows: model.n_rows(),
        nnz: model.problem.nnz(),
        n_integer: model.problem.integer_columns().len(),
    };
    let outcome = solve_model(&model, solver)?;
    let mut run = PlanRun {
        stats,
        annualization: model.annualization,
        outcome,
        plan: None,
        breakdown: None,
        audit: None,
        check: None,
        point_check: None,
        infeasible_families: Vec::new(),
    };
    match &run.outcome.bnb.x {
        Some(x) => {
            run.point_check = Some(check_point(&model.problem, x, 1e-6));
            let plan = extract_solution(&model, case, scenarios, x)?;
            let check = verify_plan(&plan, case, scenarios, config, 1e-6);
            if check.is_feasible() {
                run.breakdown = Some(cost_terms(&plan, case, model.annualization)?);
            }
            run.audit = Some(chance_audit(&plan, &case.catalog.ev_fleet, config.zeta, scenarios.len()));
            run.check = Some(check);
            run.plan = Some(plan);
        }
        None if run.outcome.bnb.status == BnbStatus::Infeasible => {
            run.infeasible_families = diagnose_infeasibility(&model, solver)?;
        }
        None => {}
    }
    Ok(run)
}
