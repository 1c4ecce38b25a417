use std::path::PathBuf;

use iesplan_core::io::{read_json, read_scenarios};
use iesplan_core::presets;
use iesplan_core::validate::validate_scenario_set;
use iesplan_core::{EquipmentCatalog, TariffSet};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn catalog_and_tariffs_match_presets() {
    let catalog: EquipmentCatalog = read_json(&data("catalog.json")).unwrap();
    let tariffs: TariffSet = read_json(&data("tariffs.json")).unwrap();
    assert_eq!(catalog, presets::catalog());
    assert_eq!(tariffs, presets::tariffs(24, 40.0));
}

#[test]
fn history_is_a_valid_year() {
    let hist = read_scenarios(&data("history_load.csv"), Some(&data("history_ev.csv"))).unwrap();
    assert_eq!(hist.len(), 365);
    assert_eq!(hist.hours, 24);
    assert_eq!(hist.n_ev(), 5);
    let case = presets::case();
    assert!(validate_scenario_set(&hist, &case.catalog, &case.tariffs).is_valid());
    for sc in &hist.scenarios {
        assert!(sc.elec_load.iter().all(|&x| x >= 200.0));
        assert!(sc.heat_load.iter().all(|&x| x <= 160.0));
        for t in (0..5).chain(20..24) {
            assert_eq!(sc.pv_avail[t], 0.0);
        }
    }
}
