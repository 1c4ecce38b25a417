use serde::{Deserialize, Serialize};

use super::verify::verify_plan;
use crate::error::{Error, Result};
use crate::finance::annualization_factor;
use crate::model::ModelConfig;
use crate::solve::PlanSolution;
use crate::types::{CaseInputs, EquipmentCatalog, FcKind, ScenarioSet, YUAN_PER_MODEL_UNIT};

/// Cost terms in ¥10⁴, in the column order of the published cost table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub fc_investment: f64,
    pub bess_investment: f64,
    pub gas_cost: f64,
    pub grid_cost: f64,
    pub carbon_from_elec: f64,
    pub carbon_from_gas: f64,
    pub soc_penalty: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn parts(&self) -> [f64; 7] {
        [
            self.fc_investment,
            self.bess_investment,
            self.gas_cost,
            self.grid_cost,
            self.carbon_from_elec,
            self.carbon_from_gas,
            self.soc_penalty,
        ]
    }
}

/// (FC, BESS) investment in ¥10⁴ for a first-stage plan.
pub fn investment_cost(catalog: &EquipmentCatalog, x_fc: &[(FcKind, u32)], x_ess_kwh: f64) -> Result<(f64, f64)> {
    let mut fc = 0.0;
    for &(kind, units) in x_fc {
        let spec = catalog
            .fuel_cell(kind)
            .ok_or_else(|| Error::InvalidParameter(format!("fuel cell {kind} is not in the catalog")))?;
        fc += units as f64 * spec.invest_cost;
    }
    Ok((fc, x_ess_kwh * catalog.bess.invest_cost))
}

/// Recompute every cost term from the dispatch, with no reference to the
/// solver objective.
pub fn cost_terms(plan: &PlanSolution, case: &CaseInputs, m: f64) -> Result<CostBreakdown> {
    let cat = &case.catalog;
    let tar = &case.tariffs;
    let (fc_inv, bess_inv) = investment_cost(cat, &plan.x_fc, plan.x_ess_kwh)?;
    let mut out = CostBreakdown { fc_investment: fc_inv, bess_investment: bess_inv, ..CostBreakdown::default() };
    let scale = m / YUAN_PER_MODEL_UNIT;
    for d in &plan.scenarios {
        for (i, fc) in cat.fuel_cells.iter().enumerate() {
            let fuel: f64 = d.fuel[i].iter().sum();
            out.gas_cost += scale * fuel * fc.fuel_price;
            out.carbon_from_gas += scale * fuel * fc.fuel_emission * tar.carbon_tax;
        }
        for (t, g) in d.grid.iter().enumerate() {
            out.grid_cost += scale * g * tar.elec_price[t];
            out.carbon_from_elec += scale * g * tar.grid_emission[t] * tar.carbon_tax;
        }
        for ev in &d.evs {
            out.soc_penalty += scale * ev.shortfall_kwh * tar.soc_penalty;
        }
    }
    out.total = out.parts().iter().sum();
    Ok(out)
}

/// Verified cost breakdown: refuses plans that fail the physical re-check.
pub fn cost_breakdown(
    plan: &PlanSolution,
    case: &CaseInputs,
    scenarios: &ScenarioSet,
    config: &ModelConfig,
) -> Result<CostBreakdown> {
    let check = verify_plan(plan, case, scenarios, config, 1e-6);
    if !check.is_feasible() {
        let shown: Vec<&str> = check.violations.iter().take(5).map(String::as_str).collect();
        return Err(Error::InfeasibleSolution(format!(
            "{} violation(s): {}",
            check.violations.len(),
            shown.join("; ")
        )));
    }
    let grid = case.time_grid(scenarios.len())?;
    cost_terms(plan, case, annualization_factor(&grid))
}
