//! Physical re-check of a plan from its semantic fields, without touching
//! the solver or the assembled rows.

use serde::Serialize;

use crate::model::ModelConfig;
use crate::solve::PlanSolution;
use crate::types::{CaseInputs, ScenarioSet};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PlanCheck {
    pub max_elec_residual: f64,
    pub min_heat_surplus: f64,
    pub max_soc_violation: f64,
    pub max_cyclic_residual: f64,
    pub max_dynamics_residual: f64,
    pub max_limit_violation: f64,
    pub violations: Vec<String>,
}

impl PlanCheck {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Checker {
    rep: PlanCheck,
    tol: f64,
}

impl Checker {
    fn limit(&mut self, what: impl FnOnce() -> String, value: f64, lo: f64, hi: f64) {
        let v = (lo - value).max(value - hi).max(0.0);
        self.rep.max_limit_violation = self.rep.max_limit_violation.max(v);
        if v > self.tol || value.is_nan() {
            self.rep.violations.push(format!("{} = {value} outside [{lo}, {hi}]", what()));
        }
    }

    fn soc(&mut self, what: impl FnOnce() -> String, value: f64, lo: f64, hi: f64) {
        let v = (lo - value).max(value - hi).max(0.0);
        self.rep.max_soc_violation = self.rep.max_soc_violation.max(v);
        if v > self.tol || value.is_nan() {
            self.rep.violations.push(format!("{} = {value} outside [{lo}, {hi}]", what()));
        }
    }

    fn dynamics(&mut self, what: impl FnOnce() -> String, residual: f64, cyclic: bool) {
        let r = residual.abs();
        if cyclic {
            self.rep.max_cyclic_residual = self.rep.max_cyclic_residual.max(r);
        } else {
            self.rep.max_dynamics_residual = self.rep.max_dynamics_residual.max(r);
        }
        if r > self.tol || r.is_nan() {
            self.rep.violations.push(format!("{} residual {residual}", what()));
        }
    }
}

/// Re-verify balances, device limits, storage dynamics and the cyclic
/// closure, EV departure targets and the scenario cardinality.
pub fn verify_plan(
    plan: &PlanSolution,
    case: &CaseInputs,
    scenarios: &ScenarioSet,
    config: &ModelConfig,
    tol: f64,
) -> PlanCheck {
    let cat = &case.catalog;
    let tar = &case.tariffs;
    let (b, th, fleet) = (&cat.bess, &cat.tess, &cat.ev_fleet);
    let mut c = Checker { rep: PlanCheck { min_heat_surplus: f64::INFINITY, ..PlanCheck::default() }, tol };
    let x_ess = plan.x_ess_kwh;
    c.limit(|| "BESS capacity".into(), x_ess, 0.0, b.max_capacity_kwh);
    for (i, fc) in cat.fuel_cells.iter().enumerate() {
        let units = plan.x_fc.get(i).map_or(0, |u| u.1);
        c.limit(|| format!("{} units", fc.id), units as f64, 0.0, fc.max_units as f64);
    }
    if plan.scenarios.len() != scenarios.len() {
        c.rep.violations.push(format!("plan has {} scenarios, input has {}", plan.scenarios.len(), scenarios.len()));
        return c.rep;
    }
    let hours = scenarios.hours;
    for (s, (sc, d)) in scenarios.scenarios.iter().zip(&plan.scenarios).enumerate() {
        let peak = sc.elec_load.iter().cloned().fold(0.0, f64::max);
        for t in 0..hours {
            let mut supply = d.pv[t] + d.grid[t] - d.bess_ch[t] / b.eta_ch + b.eta_dis * d.bess_dis[t];
            let mut heat = -d.tess_ch[t] / th.eta_ch + th.eta_dis * d.tess_dis[t];
            for (i, fc) in cat.fuel_cells.iter().enumerate() {
                let fuel = d.fuel[i][t];
                supply += fc.gas_to_elec * fuel;
                heat += fc.gas_to_heat * fuel;
                let units = plan.x_fc[i].1 as f64;
                c.limit(
                    || format!("s{s} t{t} {} electric output", fc.id),
                    fc.gas_to_elec * fuel,
                    0.0,
                    units * fc.max_elec_kw,
                );
                c.limit(
                    || format!("s{s} t{t} {} heat output", fc.id),
                    fc.gas_to_heat * fuel,
                    0.0,
                    units * fc.max_heat_kw,
                );
            }
            for ev in &d.evs {
                supply += -ev.ch[t] / fleet.eta_ch + fleet.eta_dis * ev.dis[t];
            }
            let res = (supply - sc.elec_load[t]).abs();
            c.rep.max_elec_residual = c.rep.max_elec_residual.max(res);
            if res > tol * (1.0 + peak) {
                c.rep.violations.push(format!("s{s} t{t} electric balance residual {res}"));
            }
            let surplus = heat - sc.heat_load[t];
            c.rep.min_heat_surplus = c.rep.min_heat_surplus.min(surplus);
            if surplus < -tol {
                c.rep.violations.push(format!("s{s} t{t} heat deficit {}", -surplus));
            }
            c.limit(|| format!("s{s} t{t} grid"), d.grid[t], 0.0, tar.grid_cap_kw);
            c.limit(|| format!("s{s} t{t} PV"), d.pv[t], 0.0, sc.pv_avail[t].min(tar.pv_cap_kw));
            c.limit(|| format!("s{s} t{t} BESS charge"), d.bess_ch[t], 0.0, b.rate_fraction * x_ess);
            c.limit(|| format!("s{s} t{t} BESS discharge"), d.bess_dis[t], 0.0, b.rate_fraction * x_ess);
            c.soc(|| format!("s{s} t{t} BESS energy"), d.bess_energy[t], b.soc_min * x_ess, b.soc_max * x_ess);
            c.limit(|| format!("s{s} t{t} TESS charge"), d.tess_ch[t], 0.0, th.max_rate_kw());
            c.limit(|| format!("s{s} t{t} TESS discharge"), d.tess_dis[t], 0.0, th.max_rate_kw());
            c.soc(|| format!("s{s} t{t} TESS energy"), d.tess_energy[t], 0.0, th.capacity_kwh);
            let next = (t + 1) % hours;
            let cyclic = next == 0;
            c.dynamics(
                || format!("s{s} t{t} BESS {}", if cyclic { "cyclic closure" } else { "dynamics" }),
                d.bess_energy[next] - d.bess_energy[t] - d.bess_ch[t] + d.bess_dis[t],
                cyclic,
            );
            c.dynamics(
                || format!("s{s} t{t} TESS {}", if cyclic { "cyclic closure" } else { "dynamics" }),
                d.tess_energy[next] - d.tess_energy[t] - d.tess_ch[t] + d.tess_dis[t],
                cyclic,
            );
        }
        let charged: f64 = d.bess_ch.iter().sum();
        let life = case.planning.planning_years as f64 * 365.0 * charged - b.lifetime_cycles * x_ess;
        if life > tol * (1.0 + b.lifetime_cycles * x_ess) {
            c.rep.violations.push(format!("s{s} BESS lifetime cycles exceeded by {life}"));
        }
        if d.evs.len() != sc.evs.len() {
            c.rep.violations.push(format!("s{s}: {} EV schedules for {} EVs", d.evs.len(), sc.evs.len()));
            continue;
        }
        let (emin, emax) = (fleet.soc_min * fleet.capacity_kwh, fleet.soc_max * fleet.capacity_kwh);
        for (j, (rec, ev)) in sc.evs.iter().zip(&d.evs).enumerate() {
            let e0 = rec.initial_soc * fleet.capacity_kwh;
            c.dynamics(|| format!("s{s} ev{j} arrival energy"), ev.energy[0] - e0, false);
            for (k, t) in rec.parked_hours().enumerate() {
                c.limit(|| format!("s{s} t{t} ev{j} charge"), ev.ch[t], 0.0, fleet.charger_kw);
                c.limit(|| format!("s{s} t{t} ev{j} discharge"), ev.dis[t], 0.0, fleet.max_discharge_kw());
                c.soc(|| format!("s{s} t{t} ev{j} energy"), ev.energy[k], emin, emax);
                c.dynamics(
                    || format!("s{s} t{t} ev{j} dynamics"),
                    ev.energy[k + 1] - ev.energy[k] - ev.ch[t] + ev.dis[t],
                    false,
                );
            }
            for t in (0..hours).filter(|t| !rec.parked_hours().contains(t)) {
                if ev.ch[t] != 0.0 || ev.dis[t] != 0.0 {
                    c.rep.violations.push(format!("s{s} t{t} ev{j} flows while away"));
                }
            }
            let dep = ev.departure_energy();
            c.soc(|| format!("s{s} ev{j} departure energy"), dep, emin, emax);
            let short = fleet.target_departure_soc * fleet.capacity_kwh - dep;
            if short > tol {
                if !d.substandard_flag {
                    c.rep.violations.push(format!("s{s} ev{j} departs {short} kWh short in a standard scenario"));
                }
                if ev.shortfall_kwh + tol < short {
                    c.rep.violations.push(format!("s{s} ev{j} shortfall {} below deficit {short}", ev.shortfall_kwh));
                }
            }
        }
    }
    let flagged = plan.scenarios.iter().filter(|d| d.substandard_flag).count();
    let limit = config.max_substandard(scenarios.len());
    if flagged > limit {
        c.rep.violations.push(format!("{flagged} substandard scenarios exceed the limit {limit}"));
    }
    if c.rep.min_heat_surplus == f64::INFINITY {
        c.rep.min_heat_surplus = 0.0;
    }
    c.rep
}
