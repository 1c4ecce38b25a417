mod common;

use common::{case_with, flat_scenario, set};
use iesplan_core::analysis::{cost_breakdown, run_plan};
use iesplan_core::milp::BnbStatus;
use iesplan_core::model::{ExclusivityMode, ModelConfig, RowFamily};
use iesplan_core::solve::SolverConfig;
use iesplan_core::{EvRecord, FcKind};

fn relaxed(zeta: f64) -> ModelConfig {
    ModelConfig { zeta, ..ModelConfig::default() }
}

#[test]
fn arbitrage_charges_in_valley_and_discharges_at_peak() {
    let mut case = case_with(24, &[FcKind::PemGas], 0);
    case.catalog.bess.invest_cost = 0.001;
    let scen = set(24, vec![flat_scenario(24, 300.0, 20.0, 0.0, vec![])]);
    let run = run_plan(&case, &scen, &relaxed(0.05), &SolverConfig::default()).unwrap();
    assert_eq!(run.status(), BnbStatus::Optimal);
    let plan = run.plan.as_ref().unwrap();
    assert!(plan.x_ess_kwh > 1.0, "cheap storage should be bought: {}", plan.x_ess_kwh);
    let d = &plan.scenarios[0];
    let valley_ch: f64 = (0..6).map(|t| d.bess_ch[t]).sum();
    let peak_dis: f64 = [8, 9, 10, 18, 19, 20].iter().map(|&t| d.bess_dis[t]).sum();
    assert!(valley_ch > 1.0 && peak_dis > 1.0, "valley ch {valley_ch}, peak dis {peak_dis}");
    assert!(run.check.as_ref().unwrap().is_feasible());
    let b = cost_breakdown(plan, &case, &scen, &relaxed(0.05)).unwrap();
    assert!((b.total - run.outcome.bnb.objective.unwrap()).abs() <= 1e-6 * (1.0 + b.total.abs()));
}

#[test]
fn unreachable_soc_with_zero_zeta_is_infeasible() {
    let case = case_with(4, &[FcKind::PemGas], 1);
    // one hour parked from 10 % cannot reach 90 %
    let ev = EvRecord { arrive_hour: 1, depart_hour: 2, initial_soc: 0.1 };
    let scen = set(4, vec![flat_scenario(4, 100.0, 10.0, 0.0, vec![ev])]);
    let run = run_plan(&case, &scen, &relaxed(0.0), &SolverConfig::default()).unwrap();
    assert_eq!(run.status(), BnbStatus::Infeasible);
    assert!(
        run.infeasible_families.contains(&RowFamily::Shortfall)
            || run.infeasible_families.contains(&RowFamily::Cardinality),
        "{:?}",
        run.infeasible_families
    );
}

#[test]
fn substandard_scenario_allowed_within_budget() {
    let case = case_with(4, &[FcKind::PemGas], 1);
    let short = EvRecord { arrive_hour: 1, depart_hour: 2, initial_soc: 0.1 };
    let long = EvRecord { arrive_hour: 0, depart_hour: 4, initial_soc: 0.5 };
    let scens: Vec<_> =
        (0..20).map(|s| flat_scenario(4, 100.0, 10.0, 0.0, vec![if s == 3 { short } else { long }])).collect();
    let scen = set(4, scens);
    let run = run_plan(&case, &scen, &relaxed(0.05), &SolverConfig::default()).unwrap();
    assert_eq!(run.status(), BnbStatus::Optimal);
    let audit = run.audit.unwrap();
    assert_eq!(audit.substandard, vec![3]);
    assert!(audit.pass);
}

#[test]
fn relaxed_and_binary_agree() {
    let case = case_with(6, &[FcKind::PemGas, FcKind::Sofc], 1);
    let ev = EvRecord { arrive_hour: 1, depart_hour: 5, initial_soc: 0.6 };
    let scen =
        set(6, vec![flat_scenario(6, 250.0, 40.0, 50.0, vec![ev]), flat_scenario(6, 300.0, 60.0, 0.0, vec![ev])]);
    let r = run_plan(&case, &scen, &relaxed(0.05), &SolverConfig::default()).unwrap();
    let bcfg = ModelConfig { exclusivity_mode: ExclusivityMode::Binary, ..relaxed(0.05) };
    let b = run_plan(&case, &scen, &bcfg, &SolverConfig::default()).unwrap();
    assert_eq!(r.status(), BnbStatus::Optimal);
    assert_eq!(b.status(), BnbStatus::Optimal);
    let (ro, bo) = (r.outcome.bnb.objective.unwrap(), b.outcome.bnb.objective.unwrap());
    assert!((ro - bo).abs() <= 1e-6 * ro.abs().max(1.0), "{ro} vs {bo}");
    for d in &r.plan.unwrap().scenarios {
        for t in 0..6 {
            assert!(d.bess_ch[t] * d.bess_dis[t] <= 1e-6);
            assert!(d.tess_ch[t] * d.tess_dis[t] <= 1e-6);
        }
        for ev in &d.evs {
            for t in ev.arrive_hour..ev.depart_hour {
                assert!(ev.ch[t] * ev.dis[t] <= 1e-6);
            }
        }
    }
}
