#![allow(dead_code)]

use iesplan_core::presets;
use iesplan_core::{CaseInputs, EvRecord, FcKind, Scenario, ScenarioSet};

/// Preset case restricted to the listed fuel cells and `hours` hours.
pub fn case_with(hours: usize, fcs: &[FcKind], n_ev: usize) -> CaseInputs {
    let mut case = presets::case();
    case.catalog.fuel_cells.retain(|f| fcs.contains(&f.id));
    case.catalog.ev_fleet.n_ev = n_ev;
    case.tariffs = presets::tariffs(hours, 40.0);
    case
}

pub fn flat_scenario(hours: usize, elec: f64, heat: f64, pv: f64, evs: Vec<EvRecord>) -> Scenario {
    Scenario { elec_load: vec![elec; hours], heat_load: vec![heat; hours], pv_avail: vec![pv; hours], evs }
}

pub fn set(hours: usize, scenarios: Vec<Scenario>) -> ScenarioSet {
    ScenarioSet { hours, scenarios }
}
