use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::dispatch::fmt_num;
use super::{dispatch_table, soc_table, ChanceAudit, ModelStats, PlanCheck, PlanRun, SweepLevel};
use crate::error::{Error, Result};
use crate::model::{ExclusivityMode, ModelConfig};
use crate::solve::status_label;
use crate::types::{CaseInputs, EquipmentCatalog, ScenarioSet};

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// One row per tax level: units per fuel-cell type, BESS size and the
/// number of substandard scenarios.
pub fn plan_summary_csv(levels: &[SweepLevel], catalog: &EquipmentCatalog) -> String {
    let mut out = String::from("carbon_tax,status");
    for fc in &catalog.fuel_cells {
        out.push_str(&format!(",{}_units", fc.id));
    }
    out.push_str(",bess_kwh,substandard_scenarios\n");
    for l in levels {
        out.push_str(&format!("{},{}", fmt_num(l.carbon_tax), l.status));
        for fc in &catalog.fuel_cells {
            let units = l.x_fc.iter().find(|(k, _)| *k == fc.id).map(|u| u.1.to_string());
            out.push_str(&format!(",{}", units.unwrap_or_default()));
        }
        out.push_str(&format!(",{},{}\n", opt(l.x_ess_kwh), l.substandard.map(|c| c.to_string()).unwrap_or_default()));
    }
    out
}

/// One row per tax level with every cost term in ¥10⁴.
pub fn cost_breakdown_csv(levels: &[SweepLevel]) -> String {
    let mut out = String::from(
        "carbon_tax,fc_investment,bess_investment,gas_cost,grid_cost,carbon_from_elec,carbon_from_gas,soc_penalty,total\n",
    );
    for l in levels {
        out.push_str(&fmt_num(l.carbon_tax));
        match &l.breakdown {
            Some(b) => {
                for v in b.parts().iter().chain([b.total].iter()) {
                    out.push(',');
                    out.push_str(&fmt_num(*v));
                }
            }
            None => out.push_str(&",".repeat(8)),
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct PointCheckSummary {
    pub max_row_violation: f64,
    pub max_bound_violation: f64,
    pub max_integrality_violation: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditDocument {
    pub status: String,
    pub objective: Option<f64>,
    pub best_bound: f64,
    pub root_bound: f64,
    pub gap: Option<f64>,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub wall_time_s: f64,
    pub model: ModelStats,
    pub annualization_factor: f64,
    pub zeta: f64,
    pub exclusivity_mode: ExclusivityMode,
    pub carbon_tax: f64,
    pub substandard_scenarios: Vec<usize>,
    pub chance: Option<ChanceAudit>,
    pub verification: Option<PlanCheck>,
    pub point_check: Option<PointCheckSummary>,
    pub infeasible_families: Vec<String>,
}

pub fn audit_json(run: &PlanRun, case: &CaseInputs, config: &ModelConfig) -> AuditDocument {
    let bnb = &run.outcome.bnb;
    AuditDocument {
        status: status_label(bnb.status).into(),
        objective: bnb.objective,
        best_bound: bnb.best_bound,
        root_bound: bnb.root_bound,
        gap: bnb.objective.map(|_| bnb.gap()),
        nodes: bnb.nodes,
        lp_iterations: bnb.lp_iterations,
        wall_time_s: run.outcome.wall_time_s,
        model: run.stats,
        annualization_factor: run.annualization,
        zeta: config.zeta,
        exclusivity_mode: config.exclusivity_mode,
        carbon_tax: case.tariffs.carbon_tax,
        substandard_scenarios: run.plan.as_ref().map(|p| p.substandard.clone()).unwrap_or_default(),
        chance: run.audit.clone(),
        verification: run.check.clone(),
        point_check: run.point_check.as_ref().map(|r| PointCheckSummary {
            max_row_violation: r.max_row_violation,
            max_bound_violation: r.max_bound_violation,
            max_integrality_violation: r.max_integrality_violation,
            feasible: r.is_feasible(),
        }),
        infeasible_families: run.infeasible_families.iter().map(|f| f.label().to_string()).collect(),
    }
}

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Write plan_summary.csv, cost_breakdown.csv, audit.json and the dispatch
/// and SOC tables of the listed scenarios into `dir`.
pub fn write_plan_reports(
    dir: &Path,
    run: &PlanRun,
    case: &CaseInputs,
    scenarios: &ScenarioSet,
    config: &ModelConfig,
    dispatch_scenarios: &[usize],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let level = [SweepLevel::from_run(case.tariffs.carbon_tax, run)];
    write(dir.join("plan_summary.csv"), &plan_summary_csv(&level, &case.catalog), &mut written)?;
    write(dir.join("cost_breakdown.csv"), &cost_breakdown_csv(&level), &mut written)?;
    if let Some(plan) = &run.plan {
        let mut list = dispatch_scenarios.to_vec();
        list.sort_unstable();
        list.dedup();
        for s in list {
            write(
                dir.join(format!("dispatch_{s}.csv")),
                &dispatch_table(plan, case, scenarios, s)?.to_csv(),
                &mut written,
            )?;
            write(dir.join(format!("soc_{s}.csv")), &soc_table(plan, case, s)?.to_csv(), &mut written)?;
        }
    }
    let mut json = serde_json::to_string_pretty(&audit_json(run, case, config))?;
    json.push('\n');
    write(dir.join("audit.json"), &json, &mut written)?;
    Ok(written)
}
