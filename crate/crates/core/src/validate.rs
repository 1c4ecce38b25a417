//! Invariant checks on a scenario set against the catalog and tariffs.

use std::fmt;

use serde::Serialize;

use crate::types::{EquipmentCatalog, ScenarioSet, TariffSet};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub scenario: Option<usize>,
    pub hour: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = self.scenario {
            write!(f, "scenario {s}")?;
            if let Some(t) = self.hour {
                write!(f, " hour {t}")?;
            }
            write!(f, ": ")?;
        }
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, scenario: Option<usize>, hour: Option<usize>, field: impl Into<String>, message: String) {
        self.violations.push(Violation { scenario, hour, field: field.into(), message });
    }
}

pub fn validate_scenario_set(set: &ScenarioSet, catalog: &EquipmentCatalog, tariffs: &TariffSet) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let t_len = set.hours;
    if set.scenarios.is_empty() {
        rep.push(None, None, "scenarios", "set is empty".into());
    }
    if tariffs.hours() != t_len {
        rep.push(None, None, "hours", format!("scenarios have {t_len} hours but tariffs have {}", tariffs.hours()));
    }
    let fleet = &catalog.ev_fleet;
    for (s, sc) in set.scenarios.iter().enumerate() {
        let series = [("elec_load_kw", &sc.elec_load), ("heat_load_kw", &sc.heat_load), ("pv_avail_kw", &sc.pv_avail)];
        for (name, v) in series {
            if v.len() != t_len {
                rep.push(Some(s), None, name, format!("length {} differs from {t_len} hours", v.len()));
                continue;
            }
            for (t, &x) in v.iter().enumerate() {
                if !x.is_finite() || x < 0.0 {
                    rep.push(Some(s), Some(t), name, format!("value {x} must be finite and non-negative"));
                }
            }
        }
        for (t, &p) in sc.pv_avail.iter().enumerate() {
            if p > tariffs.pv_cap_kw {
                rep.push(Some(s), Some(t), "pv_avail_kw", format!("{p} exceeds PV capacity {}", tariffs.pv_cap_kw));
            }
        }
        if sc.evs.len() != fleet.n_ev {
            rep.push(Some(s), None, "ev", format!("{} EV records, fleet has {}", sc.evs.len(), fleet.n_ev));
        }
        for (j, ev) in sc.evs.iter().enumerate() {
            let field = format!("ev {j}");
            if ev.arrive_hour >= t_len {
                rep.push(Some(s), None, field.clone(), format!("arrive_hour {} outside [0, {t_len})", ev.arrive_hour));
            }
            if ev.depart_hour > t_len {
                rep.push(Some(s), None, field.clone(), format!("depart_hour {} beyond {t_len}", ev.depart_hour));
            }
            if ev.depart_hour <= ev.arrive_hour {
                rep.push(
                    Some(s),
                    None,
                    field.clone(),
                    format!("depart_hour {} not after arrive_hour {}", ev.depart_hour, ev.arrive_hour),
                );
            }
            if !(ev.initial_soc >= fleet.soc_min && ev.initial_soc <= fleet.soc_max) {
                rep.push(
                    Some(s),
                    None,
                    field,
                    format!("initial_soc {} outside [{}, {}]", ev.initial_soc, fleet.soc_min, fleet.soc_max),
                );
            }
        }
    }
    rep
}
