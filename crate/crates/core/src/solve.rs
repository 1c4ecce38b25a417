//! Solving an assembled model and mapping columns back to a plan.

use std::time::Instant;

use iesplan_milp::exec::Execution;
use iesplan_milp::{branch_and_bound, solve_lp, BnbOptions, BnbSolution, BnbStatus, LpOptions, LpStatus, Problem};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MilpModel, RowFamily, VarKey};
use crate::types::{CaseInputs, FcKind, ScenarioSet};

/// Solver tolerances and limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub int_tol: f64,
    pub rel_gap: f64,
    pub max_nodes: usize,
    pub time_limit_s: Option<f64>,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feas_tol: 1e-7,
            opt_tol: 1e-7,
            int_tol: 1e-6,
            rel_gap: 1e-6,
            max_nodes: 200_000,
            time_limit_s: None,
            execution: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn lp_options(&self) -> LpOptions {
        LpOptions { feas_tol: self.feas_tol, opt_tol: self.opt_tol, ..LpOptions::default() }
    }

    pub fn bnb_options(&self) -> BnbOptions {
        BnbOptions {
            lp: self.lp_options(),
            int_tol: self.int_tol,
            rel_gap: self.rel_gap,
            max_nodes: self.max_nodes,
            time_limit_s: self.time_limit_s,
            exec: self.execution,
            ..BnbOptions::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub bnb: BnbSolution,
    pub wall_time_s: f64,
}

/// Design decisions first, then the substandard indicators, then the
/// per-hour exclusivity binaries.
fn branching_priority(model: &MilpModel) -> Vec<i32> {
    model
        .index
        .keys()
        .iter()
        .map(|k| match k {
            VarKey::XFc { .. } => 2,
            VarKey::Z { .. } => 1,
            _ => 0,
        })
        .collect()
}

pub fn solve_model(model: &MilpModel, cfg: &SolverConfig) -> Result<SolveOutcome> {
    let start = Instant::now();
    let opts = BnbOptions { priority: branching_priority(model), ..cfg.bnb_options() };
    let bnb = branch_and_bound(&model.problem, &opts)?;
    Ok(SolveOutcome { bnb, wall_time_s: start.elapsed().as_secs_f64() })
}

/// Constraint families whose removal makes the LP relaxation feasible. An
/// empty list with an infeasible MILP points at integrality.
pub fn diagnose_infeasibility(model: &MilpModel, cfg: &SolverConfig) -> Result<Vec<RowFamily>> {
    let mut families: Vec<RowFamily> = model.row_family.clone();
    families.sort();
    families.dedup();
    let mut culprits = Vec::new();
    for fam in families {
        let mut p = Problem { rows: Vec::new(), ..model.problem.clone() };
        for (row, f) in model.problem.rows.iter().zip(&model.row_family) {
            if *f != fam {
                p.rows.push(row.clone());
            }
        }
        if solve_lp(&p, &cfg.lp_options())?.status == LpStatus::Optimal {
            culprits.push(fam);
        }
    }
    Ok(culprits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvDispatch {
    pub arrive_hour: usize,
    pub depart_hour: usize,
    /// Per hour of the day; zero outside the parking interval.
    pub ch: Vec<f64>,
    pub dis: Vec<f64>,
    /// Start-of-hour energy for hours `arrive..depart`, then the departure
    /// energy, so `energy.len() == depart - arrive + 1`.
    pub energy: Vec<f64>,
    pub shortfall_kwh: f64,
}

impl EvDispatch {
    pub fn departure_energy(&self) -> f64 {
        *self.energy.last().unwrap_or(&0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDispatch {
    pub grid: Vec<f64>,
    pub pv: Vec<f64>,
    /// fuel[i][t], kWh of fuel per hour for catalog fuel cell i.
    pub fuel: Vec<Vec<f64>>,
    pub bess_ch: Vec<f64>,
    pub bess_dis: Vec<f64>,
    pub bess_energy: Vec<f64>,
    pub tess_ch: Vec<f64>,
    pub tess_dis: Vec<f64>,
    pub tess_energy: Vec<f64>,
    pub evs: Vec<EvDispatch>,
    pub substandard_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSolution {
    pub x_ess_kwh: f64,
    /// Units per catalog fuel cell, in catalog order.
    pub x_fc: Vec<(FcKind, u32)>,
    pub scenarios: Vec<ScenarioDispatch>,
    /// Scenarios with Z = 1.
    pub substandard: Vec<usize>,
    pub objective: f64,
    /// Column values after rounding and purification.
    pub columns: Vec<f64>,
}

impl PlanSolution {
    pub fn units(&self, kind: FcKind) -> u32 {
        self.x_fc.iter().find(|(k, _)| *k == kind).map_or(0, |(_, n)| *n)
    }
}

/// Remove simultaneous charge and discharge, which the relaxed model allows
/// but never needs: both flows drop by the smaller one, leaving the stored
/// energy unchanged. The freed electricity displaces grid import, then PV;
/// heat surplus is allowed by the heat balance.
fn purify(model: &MilpModel, case: &CaseInputs, scenarios: &ScenarioSet, x: &mut [f64]) {
    let idx = &model.index;
    let cat = &case.catalog;
    for (s, sc) in scenarios.scenarios.iter().enumerate() {
        for t in 0..model.grid.hours {
            let grid = idx.col(VarKey::Grid { s, t });
            let pv = idx.col(VarKey::Pv { s, t });
            let absorb = |x: &mut [f64], surplus: f64| -> bool {
                let room = x[grid] + x[pv];
                if room + 1e-12 < surplus {
                    return false;
                }
                let g = surplus.min(x[grid]);
                x[grid] -= g;
                x[pv] = (x[pv] - (surplus - g)).max(0.0);
                true
            };
            let bess = (idx.col(VarKey::BessCh { s, t }), idx.col(VarKey::BessDis { s, t }));
            let d = x[bess.0].min(x[bess.1]);
            if d > 0.0 && absorb(x, d * (1.0 / cat.bess.eta_ch - cat.bess.eta_dis)) {
                x[bess.0] -= d;
                x[bess.1] -= d;
            }
            for j in 0..sc.evs.len() {
                let (Some(ch), Some(dis)) = (idx.get(VarKey::EvCh { s, t, j }), idx.get(VarKey::EvDis { s, t, j }))
                else {
                    continue;
                };
                let d = x[ch].min(x[dis]);
                let fleet = &cat.ev_fleet;
                if d > 0.0 && absorb(x, d * (1.0 / fleet.eta_ch - fleet.eta_dis)) {
                    x[ch] -= d;
                    x[dis] -= d;
                }
            }
            let tess = (idx.col(VarKey::TessCh { s, t }), idx.col(VarKey::TessDis { s, t }));
            let d = x[tess.0].min(x[tess.1]);
            if d > 0.0 {
                x[tess.0] -= d;
                x[tess.1] -= d;
            }
        }
    }
}

/// Map a column vector back to semantic fields. Integer columns are rounded
/// to the nearest integer; in relaxed mode simultaneous storage flows are
/// purified.
pub fn extract_solution(
    model: &MilpModel,
    case: &CaseInputs,
    scenarios: &ScenarioSet,
    x: &[f64],
) -> Result<PlanSolution> {
    let idx = &model.index;
    if x.len() != idx.len() {
        return Err(Error::Model(format!("{} values for {} columns", x.len(), idx.len())));
    }
    let mut x = x.to_vec();
    for (j, c) in model.problem.columns.iter().enumerate() {
        if c.kind.is_integral() {
            x[j] = x[j].round();
        }
    }
    if model.config.exclusivity_mode == crate::model::ExclusivityMode::Relaxed {
        purify(model, case, scenarios, &mut x);
    }
    let get = |key: VarKey| -> Result<f64> {
        idx.get(key).map(|c| x[c]).ok_or_else(|| Error::Model(format!("column {key} missing from index")))
    };
    let hours = model.grid.hours;
    let series = |f: &dyn Fn(usize) -> VarKey| -> Result<Vec<f64>> { (0..hours).map(|t| get(f(t))).collect() };
    let cat = &case.catalog;
    let mut x_fc = Vec::new();
    for (i, fc) in cat.fuel_cells.iter().enumerate() {
        x_fc.push((fc.id, get(VarKey::XFc { i })?.max(0.0) as u32));
    }
    let mut out = Vec::with_capacity(scenarios.len());
    let mut substandard = Vec::new();
    for (s, sc) in scenarios.scenarios.iter().enumerate() {
        let mut evs = Vec::new();
        for (j, rec) in sc.evs.iter().enumerate() {
            let mut ch = vec![0.0; hours];
            let mut dis = vec![0.0; hours];
            let mut energy = Vec::new();
            for t in rec.parked_hours() {
                ch[t] = get(VarKey::EvCh { s, t, j })?;
                dis[t] = get(VarKey::EvDis { s, t, j })?;
                energy.push(get(VarKey::EvE { s, t, j })?);
            }
            let last = rec.depart_hour - 1;
            energy.push(energy.last().copied().unwrap_or(0.0) + ch[last] - dis[last]);
            evs.push(EvDispatch {
                arrive_hour: rec.arrive_hour,
                depart_hour: rec.depart_hour,
                ch,
                dis,
                energy,
                shortfall_kwh: get(VarKey::Shortfall { s, j })?,
            });
        }
        let flag = get(VarKey::Z { s })? > 0.5;
        if flag {
            substandard.push(s);
        }
        out.push(ScenarioDispatch {
            grid: series(&|t| VarKey::Grid { s, t })?,
            pv: series(&|t| VarKey::Pv { s, t })?,
            fuel: (0..cat.fuel_cells.len()).map(|i| series(&|t| VarKey::Fuel { s, t, i })).collect::<Result<_>>()?,
            bess_ch: series(&|t| VarKey::BessCh { s, t })?,
            bess_dis: series(&|t| VarKey::BessDis { s, t })?,
            bess_energy: series(&|t| VarKey::BessE { s, t })?,
            tess_ch: series(&|t| VarKey::TessCh { s, t })?,
            tess_dis: series(&|t| VarKey::TessDis { s, t })?,
            tess_energy: series(&|t| VarKey::TessE { s, t })?,
            evs,
            substandard_flag: flag,
        });
    }
    let objective = model.problem.objective_value(&x);
    Ok(PlanSolution { x_ess_kwh: get(VarKey::XEss)?, x_fc, scenarios: out, substandard, objective, columns: x })
}

/// Status of a finished solve as reported to users.
pub fn status_label(status: BnbStatus) -> &'static str {
    match status {
        BnbStatus::Optimal => "optimal",
        BnbStatus::Infeasible => "infeasible",
        BnbStatus::Unbounded => "unbounded",
        BnbStatus::GapLimit => "gap_limit",
        BnbStatus::NodeLimit => "node_limit",
        BnbStatus::TimeLimit => "time_limit",
    }
}
