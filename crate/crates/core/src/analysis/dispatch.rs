use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve::PlanSolution;
use crate::types::{CaseInputs, ScenarioSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extreme {
    Elec,
    Heat,
}

/// Scenario with the largest daily electric or heat load; ties go to the
/// lowest index.
pub fn extreme_scenario(set: &ScenarioSet, which: Extreme) -> Option<usize> {
    let total = |s: usize| match which {
        Extreme::Elec => set.scenarios[s].total_elec(),
        Extreme::Heat => set.scenarios[s].total_heat(),
    };
    (0..set.len()).fold(None, |best: Option<usize>, s| match best {
        Some(b) if total(b) >= total(s) => Some(b),
        _ => Some(s),
    })
}

/// Hourly table; `NaN` cells are written empty (EV away from the site).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                if self.header[k] == "hour" {
                    let _ = write!(out, "{}", *v as usize);
                } else if !v.is_nan() {
                    let _ = write!(out, "{}", fmt_num(*v));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Fixed six-decimal rendering with negative zero normalized.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// One row per hour: prices, loads, every device flow, storage energy and
/// EV SOC. Fuel-cell outputs are reported as converted electric and heat
/// power.
pub fn dispatch_table(plan: &PlanSolution, case: &CaseInputs, scenarios: &ScenarioSet, s: usize) -> Result<Table> {
    let d = plan.scenarios.get(s).ok_or(Error::UnknownScenario(s))?;
    let sc = scenarios.scenarios.get(s).ok_or(Error::UnknownScenario(s))?;
    let cat = &case.catalog;
    let mut header: Vec<String> =
        ["hour", "price", "elec_load", "heat_load", "pv_avail", "grid", "pv"].iter().map(|h| h.to_string()).collect();
    for fc in &cat.fuel_cells {
        header.push(format!("{}_elec", fc.id));
        header.push(format!("{}_heat", fc.id));
    }
    for h in ["bess_ch", "bess_dis", "bess_energy", "tess_ch", "tess_dis", "tess_energy"] {
        header.push(h.into());
    }
    for j in 0..d.evs.len() {
        header.push(format!("ev{j}_ch"));
        header.push(format!("ev{j}_dis"));
        header.push(format!("ev{j}_soc"));
    }
    let cap = cat.ev_fleet.capacity_kwh;
    let rows = (0..scenarios.hours)
        .map(|t| {
            let mut r = vec![
                t as f64,
                case.tariffs.elec_price[t],
                sc.elec_load[t],
                sc.heat_load[t],
                sc.pv_avail[t],
                d.grid[t],
                d.pv[t],
            ];
            for (i, fc) in cat.fuel_cells.iter().enumerate() {
                r.push(fc.gas_to_elec * d.fuel[i][t]);
                r.push(fc.gas_to_heat * d.fuel[i][t]);
            }
            r.extend([d.bess_ch[t], d.bess_dis[t], d.bess_energy[t], d.tess_ch[t], d.tess_dis[t], d.tess_energy[t]]);
            for ev in &d.evs {
                r.push(ev.ch[t]);
                r.push(ev.dis[t]);
                let soc = if (ev.arrive_hour..ev.depart_hour).contains(&t) {
                    ev.energy[t - ev.arrive_hour] / cap
                } else {
                    f64::NAN
                };
                r.push(soc);
            }
            r
        })
        .collect();
    Ok(Table { header, rows })
}

/// Start-of-hour SOC for hours 0..=T (the last row is end of day): BESS,
/// TESS and every EV while it is on site, including its departure SOC.
pub fn soc_table(plan: &PlanSolution, case: &CaseInputs, s: usize) -> Result<Table> {
    let d = plan.scenarios.get(s).ok_or(Error::UnknownScenario(s))?;
    let cat = &case.catalog;
    let hours = d.grid.len();
    let mut header = vec!["hour".to_string(), "bess_soc".into(), "tess_soc".into()];
    header.extend((0..d.evs.len()).map(|j| format!("ev{j}_soc")));
    let ratio = |e: f64, cap: f64| if cap > 0.0 { e / cap } else { f64::NAN };
    let rows = (0..=hours)
        .map(|t| {
            let k = t % hours;
            let mut r =
                vec![t as f64, ratio(d.bess_energy[k], plan.x_ess_kwh), ratio(d.tess_energy[k], cat.tess.capacity_kwh)];
            for ev in &d.evs {
                let soc = if (ev.arrive_hour..=ev.depart_hour).contains(&t) {
                    ev.energy[t - ev.arrive_hour] / cat.ev_fleet.capacity_kwh
                } else {
                    f64::NAN
                };
                r.push(soc);
            }
            r
        })
        .collect();
    Ok(Table { header, rows })
}
