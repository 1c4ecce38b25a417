mod common;

use common::{case_with, flat_scenario, set};
use iesplan_core::model::{assemble_model, ExclusivityMode, ModelConfig, RowFamily, VarKey};
use iesplan_core::{EvRecord, FcKind};

fn config(mode: ExclusivityMode) -> ModelConfig {
    ModelConfig { exclusivity_mode: mode, ..ModelConfig::default() }
}

#[test]
fn census_without_evs() {
    let case = case_with(2, &[FcKind::PemGas], 0);
    let s = set(2, vec![flat_scenario(2, 10.0, 5.0, 0.0, vec![])]);
    let m = assemble_model(&case, &s, &config(ExclusivityMode::Relaxed)).unwrap();
    // X_ESS, X_FC, 2 grid, 2 fuel, 2 PV, 4 BESS flows, 2 BESS energy, 4 TESS flows, 2 TESS energy, Z
    assert_eq!(m.n_cols(), 21);
    // 4 balance + 4 fuel-cell + 11 BESS + 2 TESS + 1 cardinality
    assert_eq!(m.n_rows(), 22);
    let count = |f: RowFamily| m.row_family.iter().filter(|&&r| r == f).count();
    assert_eq!(count(RowFamily::ElecBalance) + count(RowFamily::HeatBalance), 4);
    assert_eq!(count(RowFamily::FcOutput), 4);
    assert_eq!(count(RowFamily::TessDynamics), 2);
    assert_eq!(count(RowFamily::Cardinality), 1);
}

#[test]
fn census_with_ev_and_binaries() {
    let case = case_with(2, &[FcKind::PemGas], 1);
    let ev = EvRecord { arrive_hour: 0, depart_hour: 2, initial_soc: 0.5 };
    let s = set(2, vec![flat_scenario(2, 10.0, 5.0, 0.0, vec![ev])]);
    let relaxed = assemble_model(&case, &s, &config(ExclusivityMode::Relaxed)).unwrap();
    // + 2 ch, 2 dis, 2 energy, 1 shortfall
    assert_eq!(relaxed.n_cols(), 28);
    let binary = assemble_model(&case, &s, &config(ExclusivityMode::Binary)).unwrap();
    // + 2 BESS, 2 TESS, 2 EV exclusivity binaries
    assert_eq!(binary.n_cols(), 34);
    assert_eq!(binary.index.count(|k| matches!(k, VarKey::YEv { .. })), 2);
    // arrival energy is fixed at 0.5 * 60
    let c = relaxed.index.get(VarKey::EvE { s: 0, t: 0, j: 0 }).unwrap();
    let col = &relaxed.problem.columns[c];
    assert_eq!((col.lower, col.upper), (30.0, 30.0));
}

#[test]
fn objective_coefficients() {
    let case = case_with(2, &[FcKind::PemGas, FcKind::PemH2], 0);
    let s = set(2, vec![flat_scenario(2, 10.0, 5.0, 0.0, vec![])]);
    let m = assemble_model(&case, &s, &config(ExclusivityMode::Relaxed)).unwrap();
    let cost = |k: VarKey| m.problem.objective[m.index.get(k).unwrap()];
    assert_eq!(cost(VarKey::XEss), 0.15);
    assert_eq!(cost(VarKey::XFc { i: 0 }), 30.0);
    assert_eq!(cost(VarKey::XFc { i: 1 }), 295.0);
    let mm = m.annualization / 1e4;
    let grid = cost(VarKey::Grid { s: 0, t: 0 });
    assert!((grid - mm * (case.tariffs.elec_price[0] + 40.0 * case.tariffs.grid_emission[0])).abs() < 1e-15);
    assert_eq!(cost(VarKey::BessCh { s: 0, t: 0 }), 0.0);
}

#[test]
fn census_formula_at_case_scale() {
    let hours = 24;
    let n = 100;
    let n_ev = 10;
    let case = case_with(hours, &[FcKind::Sofc, FcKind::PemGas, FcKind::PemH2], n_ev);
    let evs: Vec<EvRecord> =
        (0..n_ev).map(|j| EvRecord { arrive_hour: j, depart_hour: j + 10, initial_soc: 0.5 }).collect();
    let s = set(hours, (0..n).map(|_| flat_scenario(hours, 300.0, 50.0, 0.0, evs.clone())).collect());
    let m = assemble_model(&case, &s, &config(ExclusivityMode::Relaxed)).unwrap();
    let parked: usize = evs.iter().map(|e| e.depart_hour - e.arrive_hour).sum();
    // 1 + 3 first stage; per scenario: T (grid + 3 fuel + pv + 6 storage) + 3 per parked EV hour + NEV + 1
    let per = hours * 11 + 3 * parked + n_ev + 1;
    assert_eq!(m.n_cols(), 4 + n * per);
}
