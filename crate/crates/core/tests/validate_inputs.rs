mod common;

use common::{case_with, flat_scenario, set};
use iesplan_core::validate::validate_scenario_set;
use iesplan_core::{EvRecord, FcKind};

#[test]
fn well_formed_set_has_no_violations() {
    let case = case_with(24, &[FcKind::PemGas], 1);
    let ev = EvRecord { arrive_hour: 8, depart_hour: 18, initial_soc: 0.4 };
    let s = set(24, vec![flat_scenario(24, 300.0, 50.0, 100.0, vec![ev])]);
    assert!(validate_scenario_set(&s, &case.catalog, &case.tariffs).is_valid());
}

#[test]
fn departure_before_arrival_is_one_violation() {
    let case = case_with(24, &[FcKind::PemGas], 1);
    let ev = EvRecord { arrive_hour: 10, depart_hour: 9, initial_soc: 0.4 };
    let s = set(24, vec![flat_scenario(24, 300.0, 50.0, 100.0, vec![ev])]);
    let rep = validate_scenario_set(&s, &case.catalog, &case.tariffs);
    assert_eq!(rep.violations.len(), 1, "{:?}", rep.violations);
    assert_eq!(rep.violations[0].scenario, Some(0));
}

#[test]
fn pv_above_capacity_is_one_violation() {
    let case = case_with(24, &[FcKind::PemGas], 0);
    let mut sc = flat_scenario(24, 300.0, 50.0, 100.0, vec![]);
    sc.pv_avail[12] = 1200.0;
    let rep = validate_scenario_set(&set(24, vec![sc]), &case.catalog, &case.tariffs);
    assert_eq!(rep.violations.len(), 1);
    assert_eq!(rep.violations[0].hour, Some(12));
    assert!(rep.violations[0].to_string().contains("1200"));
}

#[test]
fn negative_load_and_wrong_fleet_size() {
    let case = case_with(4, &[FcKind::PemGas], 2);
    let mut sc = flat_scenario(4, 100.0, 10.0, 0.0, vec![]);
    sc.elec_load[1] = -1.0;
    let rep = validate_scenario_set(&set(4, vec![sc]), &case.catalog, &case.tariffs);
    assert_eq!(rep.violations.len(), 2);
}
