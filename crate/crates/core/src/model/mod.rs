//! Assembly of the scenario-expanded planning MILP.

mod build;
mod index;

pub use build::{
    build_bess_constraints, build_chance_constraints, build_device_bounds, build_energy_balance, build_ev_constraints,
    build_objective, build_tess_constraints, column_bounds,
};
pub use index::{VarIndex, VarKey};

use iesplan_milp::exec::{map_range, Execution};
use iesplan_milp::{Problem, Row};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finance::annualization_factor;
use crate::types::{CaseInputs, ScenarioSet, TimeGrid};
use crate::validate::validate_scenario_set;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExclusivityMode {
    Binary,
    #[default]
    Relaxed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub zeta: f64,
    pub exclusivity_mode: ExclusivityMode,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { zeta: 0.05, exclusivity_mode: ExclusivityMode::Relaxed, execution: Execution::default() }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if (0.0..1.0).contains(&self.zeta) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("zeta {} outside [0, 1)", self.zeta)))
        }
    }

    /// Number of scenarios allowed to miss the departure SOC target.
    pub fn max_substandard(&self, n_scenarios: usize) -> usize {
        (n_scenarios as f64 * self.zeta + 1e-9).floor() as usize
    }
}

/// Constraint family of a row, used for reporting and infeasibility hints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFamily {
    ElecBalance,
    HeatBalance,
    FcOutput,
    BessSoc,
    BessDynamics,
    BessRate,
    BessLifetime,
    BessExclusive,
    TessDynamics,
    TessExclusive,
    EvDynamics,
    EvDeparture,
    EvExclusive,
    Shortfall,
    Cardinality,
}

impl RowFamily {
    pub fn label(self) -> &'static str {
        match self {
            RowFamily::ElecBalance => "electric balance",
            RowFamily::HeatBalance => "heat balance",
            RowFamily::FcOutput => "fuel-cell output limits",
            RowFamily::BessSoc => "BESS state-of-charge window",
            RowFamily::BessDynamics => "BESS energy dynamics",
            RowFamily::BessRate => "BESS charge/discharge rate",
            RowFamily::BessLifetime => "BESS lifetime cycles",
            RowFamily::BessExclusive => "BESS exclusivity",
            RowFamily::TessDynamics => "TESS energy dynamics",
            RowFamily::TessExclusive => "TESS exclusivity",
            RowFamily::EvDynamics => "EV energy dynamics",
            RowFamily::EvDeparture => "EV departure SOC window",
            RowFamily::EvExclusive => "EV exclusivity",
            RowFamily::Shortfall => "EV departure shortfall",
            RowFamily::Cardinality => "chance-constraint cardinality",
        }
    }
}

/// Scenario-expanded model: the solver problem plus the semantic index.
#[derive(Debug, Clone)]
pub struct MilpModel {
    pub problem: Problem,
    pub index: VarIndex,
    pub row_family: Vec<RowFamily>,
    pub grid: TimeGrid,
    pub annualization: f64,
    pub config: ModelConfig,
}

impl MilpModel {
    pub fn n_cols(&self) -> usize {
        self.problem.n_cols()
    }

    pub fn n_rows(&self) -> usize {
        self.problem.n_rows()
    }
}

/// Everything a builder reads.
#[derive(Debug, Clone, Copy)]
pub struct ModelContext<'a> {
    pub case: &'a CaseInputs,
    pub scenarios: &'a ScenarioSet,
    pub config: &'a ModelConfig,
    pub grid: TimeGrid,
    pub annualization: f64,
}

impl<'a> ModelContext<'a> {
    pub fn new(case: &'a CaseInputs, scenarios: &'a ScenarioSet, config: &'a ModelConfig) -> Result<Self> {
        config.validate()?;
        case.validate()?;
        let grid = case.time_grid(scenarios.len())?;
        let report = validate_scenario_set(scenarios, &case.catalog, &case.tariffs);
        if !report.is_valid() {
            let shown: Vec<String> = report.violations.iter().take(5).map(|v| v.to_string()).collect();
            return Err(Error::Model(format!(
                "{} scenario violation(s): {}",
                report.violations.len(),
                shown.join("; ")
            )));
        }
        Ok(ModelContext { case, scenarios, config, grid, annualization: annualization_factor(&grid) })
    }

    pub(crate) fn binary(&self) -> bool {
        self.config.exclusivity_mode == ExclusivityMode::Binary
    }
}

/// Allocate every column in (s, t, i, j)-lexicographic order: first-stage
/// columns, then per scenario the hourly device columns, EV columns for
/// parked hours, shortfalls and the scenario flag.
pub fn index_variables(ctx: &ModelContext<'_>) -> VarIndex {
    let mut idx = VarIndex::default();
    idx.push(VarKey::XEss);
    let n_fc = ctx.case.catalog.fuel_cells.len();
    for i in 0..n_fc {
        idx.push(VarKey::XFc { i });
    }
    let binary = ctx.binary();
    for (s, sc) in ctx.scenarios.scenarios.iter().enumerate() {
        for t in 0..ctx.grid.hours {
            idx.push(VarKey::Grid { s, t });
            for i in 0..n_fc {
                idx.push(VarKey::Fuel { s, t, i });
            }
            idx.push(VarKey::Pv { s, t });
            idx.push(VarKey::BessCh { s, t });
            idx.push(VarKey::BessDis { s, t });
            idx.push(VarKey::BessE { s, t });
            idx.push(VarKey::TessCh { s, t });
            idx.push(VarKey::TessDis { s, t });
            idx.push(VarKey::TessE { s, t });
            if binary {
                idx.push(VarKey::YBess { s, t });
                idx.push(VarKey::YTess { s, t });
            }
            for (j, ev) in sc.evs.iter().enumerate() {
                if ev.parked_hours().contains(&t) {
                    idx.push(VarKey::EvCh { s, t, j });
                    idx.push(VarKey::EvDis { s, t, j });
                    idx.push(VarKey::EvE { s, t, j });
                    if binary {
                        idx.push(VarKey::YEv { s, t, j });
                    }
                }
            }
        }
        for j in 0..sc.evs.len() {
            idx.push(VarKey::Shortfall { s, j });
        }
        idx.push(VarKey::Z { s });
    }
    idx
}

/// Rows of one scenario in family order.
fn scenario_rows(ctx: &ModelContext<'_>, idx: &VarIndex, s: usize) -> Vec<(RowFamily, Row)> {
    let mut out = Vec::new();
    build::balance_rows(ctx, idx, s, &mut out);
    build::fc_rows(ctx, idx, s, &mut out);
    build::bess_rows(ctx, idx, s, &mut out);
    build::tess_rows(ctx, idx, s, &mut out);
    build::ev_rows(ctx, idx, s, &mut out);
    build::shortfall_rows(ctx, idx, s, &mut out);
    out
}

pub fn assemble_model(case: &CaseInputs, scenarios: &ScenarioSet, config: &ModelConfig) -> Result<MilpModel> {
    let ctx = ModelContext::new(case, scenarios, config)?;
    let idx = index_variables(&ctx);
    let objective = build_objective(&ctx, &idx);
    let mut problem = Problem::new("iesplan");
    for (col, key) in idx.keys().iter().enumerate() {
        let (lo, hi) = column_bounds(&ctx, key);
        problem.add_column(key.to_string(), lo, hi, key.kind(), objective[col]);
    }
    let blocks = map_range(config.execution, scenarios.len(), |s| scenario_rows(&ctx, &idx, s));
    let mut row_family = Vec::new();
    for (fam, row) in blocks.into_iter().flatten() {
        row_family.push(fam);
        problem.add_row(row);
    }
    row_family.push(RowFamily::Cardinality);
    problem.add_row(build::cardinality_row(&ctx, &idx));
    problem.validate()?;
    Ok(MilpModel { problem, index: idx, row_family, grid: ctx.grid, annualization: ctx.annualization, config: *config })
}
