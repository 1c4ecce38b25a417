use std::fs;
use std::path::Path;

use iesplan_core::analysis::{
    cost_breakdown_csv, extreme_scenario, fmt_num, plan_summary_csv, run_plan, sweep_carbon_tax, write_plan_reports,
    Extreme,
};
use iesplan_core::io::{read_json, read_scenarios, write_json, write_scenarios};
use iesplan_core::milp::{write_mps, BnbStatus};
use iesplan_core::model::{assemble_model, ModelConfig};
use iesplan_core::presets;
use iesplan_core::scengen::{generate_from_targets, generate_scenarios, HmmOptions, MomentTargets, ScenGenLog};
use iesplan_core::solve::status_label;
use iesplan_core::validate::validate_scenario_set;
use iesplan_core::{CaseInputs, Planning, ScenarioSet};

use crate::config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BEST_EFFORT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug)]
pub struct Failure(pub String);

impl From<iesplan_core::Error> for Failure {
    fn from(e: iesplan_core::Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

pub fn load_case(cfg: &RunConfig) -> Result<CaseInputs, Failure> {
    let catalog = match &cfg.catalog {
        Some(p) => read_json(p)?,
        None => presets::catalog(),
    };
    let mut tariffs = match &cfg.tariffs {
        Some(p) => read_json(p)?,
        None => presets::tariffs(24, 40.0),
    };
    if let Some(tax) = cfg.carbon_tax {
        tariffs.carbon_tax = tax;
    }
    let case = CaseInputs {
        planning: Planning { planning_years: cfg.planning_years, discount_rate: cfg.discount_rate },
        catalog,
        tariffs,
    };
    case.validate()?;
    Ok(case)
}

fn hmm_options(cfg: &RunConfig) -> HmmOptions {
    HmmOptions { tol: cfg.tol, max_iters: cfg.max_iters, ..HmmOptions::default() }
}

fn generate(cfg: &RunConfig, case: &CaseInputs) -> Result<(ScenarioSet, ScenGenLog), Failure> {
    let fleet = &case.catalog.ev_fleet;
    let pv_cap = case.tariffs.pv_cap_kw;
    if let Some(path) = &cfg.targets {
        let targets: MomentTargets = read_json(path)?;
        return Ok(generate_from_targets(
            &targets,
            case.tariffs.hours(),
            fleet.n_ev,
            cfg.n_scenarios,
            cfg.seed,
            &hmm_options(cfg),
            fleet,
            pv_cap,
        )?);
    }
    let history = cfg.history.as_ref().ok_or_else(|| Failure("no history, targets or scenarios configured".into()))?;
    let hist = read_scenarios(history, cfg.history_ev.as_deref())?;
    if hist.hours != case.tariffs.hours() {
        return Err(Failure(format!(
            "{}: history has {} hours per day, tariffs have {}",
            history.display(),
            hist.hours,
            case.tariffs.hours()
        )));
    }
    if hist.n_ev() != fleet.n_ev {
        return Err(Failure(format!("history has {} EVs per day, the fleet has {}", hist.n_ev(), fleet.n_ev)));
    }
    Ok(generate_scenarios(&hist, cfg.n_scenarios, cfg.seed, &hmm_options(cfg), cfg.block_correlation, fleet, pv_cap)?)
}

fn write_generated(dir: &Path, set: &ScenarioSet, log: &ScenGenLog) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
    write_scenarios(set, &dir.join("scenarios_load.csv"), &dir.join("scenarios_ev.csv"))?;
    write_json(&dir.join("scengen_log.json"), log)?;
    Ok(())
}

fn report_log(log: &ScenGenLog) {
    if let Some(best) = log.iterations.get(log.best_iteration.saturating_sub(1)) {
        println!(
            "scenarios: {} x {} dims, best iteration {}: moment error {:.4}, correlation error {:.4} (tol {})",
            log.n_scenarios, log.dims, log.best_iteration, best.max_moment_error, best.max_correlation_error, log.tol
        );
    }
}

/// Scenarios from files when configured, otherwise generated and written
/// to the output directory.
fn scenarios(cfg: &RunConfig, case: &CaseInputs) -> Result<ScenarioSet, Failure> {
    if cfg.use_existing_scenarios {
        let path = cfg
            .scenarios
            .as_ref()
            .ok_or_else(|| Failure("use_existing_scenarios set without a scenarios path".into()))?;
        return Ok(read_scenarios(path, cfg.scenarios_ev.as_deref())?);
    }
    let (set, log) = generate(cfg, case)?;
    report_log(&log);
    if !log.converged {
        log::warn!("scenario generation stopped above tolerance; continuing with the best iterate");
    }
    write_generated(&cfg.out_dir, &set, &log)?;
    Ok(set)
}

fn model_config(cfg: &RunConfig) -> ModelConfig {
    ModelConfig { zeta: cfg.zeta, exclusivity_mode: cfg.exclusivity_mode, ..ModelConfig::default() }
}

fn ensure_valid(set: &ScenarioSet, case: &CaseInputs) -> Result<(), Failure> {
    let report = validate_scenario_set(set, &case.catalog, &case.tariffs);
    if report.is_valid() {
        return Ok(());
    }
    let shown: Vec<String> = report.violations.iter().take(10).map(ToString::to_string).collect();
    Err(Failure(format!("{} scenario violation(s):\n  {}", report.violations.len(), shown.join("\n  "))))
}

pub fn scen_gen(cfg: &RunConfig) -> Outcome {
    let case = load_case(cfg)?;
    let (set, log) = generate(cfg, &case)?;
    write_generated(&cfg.out_dir, &set, &log)?;
    report_log(&log);
    println!("wrote {}", cfg.out_dir.join("scenarios_load.csv").display());
    if log.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!("best effort: tolerance {} not met in {} iterations", log.tol, log.iterations.len());
        Ok(EXIT_BEST_EFFORT)
    }
}

pub fn plan(cfg: &RunConfig) -> Outcome {
    let case = load_case(cfg)?;
    let set = scenarios(cfg, &case)?;
    ensure_valid(&set, &case)?;
    let mcfg = model_config(cfg);
    if cfg.export_mps {
        export(cfg, &case, &set, &mcfg)?;
    }
    let run = run_plan(&case, &set, &mcfg, &cfg.solver)?;
    let dispatch: Vec<usize> = match cfg.extreme {
        Some(e) => extreme_scenario(&set, e).into_iter().collect(),
        None => [Extreme::Elec, Extreme::Heat].iter().filter_map(|&e| extreme_scenario(&set, e)).collect(),
    };
    write_plan_reports(&cfg.out_dir, &run, &case, &set, &mcfg, &dispatch)?;
    let status = run.status();
    println!("status: {}", status_label(status));
    if let Some(plan) = &run.plan {
        let units: Vec<String> = plan.x_fc.iter().map(|(k, u)| format!("{k}={u}")).collect();
        println!("fuel cells: {}", units.join(" "));
        println!("bess: {} kWh", fmt_num(plan.x_ess_kwh));
        println!("substandard scenarios: {:?}", plan.substandard);
    }
    if let Some(b) = &run.breakdown {
        println!("total cost: {} (10^4 yuan)", fmt_num(b.total));
    }
    println!("reports in {}", cfg.out_dir.display());
    Ok(match status {
        BnbStatus::Optimal => match &run.check {
            Some(c) if !c.is_feasible() => {
                eprintln!("solution failed re-verification: {}", c.violations.first().cloned().unwrap_or_default());
                EXIT_BEST_EFFORT
            }
            _ => EXIT_OK,
        },
        BnbStatus::Infeasible => {
            eprintln!("model is infeasible");
            if run.infeasible_families.is_empty() {
                eprintln!("hint: no single constraint family explains it");
            }
            for f in &run.infeasible_families {
                eprintln!("hint: relaxing the {} constraints restores LP feasibility", f.label());
            }
            EXIT_INFEASIBLE
        }
        BnbStatus::Unbounded => return Err(Failure("model is unbounded; check device limits".into())),
        _ => {
            eprintln!("best effort: solver stopped with status {}", status_label(status));
            EXIT_BEST_EFFORT
        }
    })
}

pub fn sweep(cfg: &RunConfig) -> Outcome {
    let case = load_case(cfg)?;
    let set = scenarios(cfg, &case)?;
    ensure_valid(&set, &case)?;
    let res = sweep_carbon_tax(&case, &set, &model_config(cfg), &cfg.solver, &cfg.carbon_taxes)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Failure(format!("{}: {e}", cfg.out_dir.display())))?;
    let write = |name: &str, text: String| {
        let p = cfg.out_dir.join(name);
        fs::write(&p, text).map_err(|e| Failure(format!("{}: {e}", p.display())))
    };
    write("plan_summary.csv", plan_summary_csv(&res.levels, &case.catalog))?;
    write("cost_breakdown.csv", cost_breakdown_csv(&res.levels))?;
    for l in &res.levels {
        let total = l.breakdown.map(|b| fmt_num(b.total)).unwrap_or_else(|| "-".into());
        println!("tax {}: {} total {}", fmt_num(l.carbon_tax), l.status, total);
        if let Some(e) = &l.error {
            eprintln!("tax {}: {e}", fmt_num(l.carbon_tax));
        }
    }
    if !res.monotone {
        eprintln!("warning: total cost decreases with the carbon tax");
    }
    println!("reports in {}", cfg.out_dir.display());
    if res.any_succeeded() {
        Ok(EXIT_OK)
    } else if res.levels.iter().all(|l| l.status == status_label(BnbStatus::Infeasible)) {
        Ok(EXIT_INFEASIBLE)
    } else {
        Ok(EXIT_BEST_EFFORT)
    }
}

fn export(cfg: &RunConfig, case: &CaseInputs, set: &ScenarioSet, mcfg: &ModelConfig) -> Result<(), Failure> {
    let model = assemble_model(case, set, mcfg)?;
    let text = write_mps(&model.problem).map_err(|e| Failure(e.to_string()))?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Failure(format!("{}: {e}", cfg.out_dir.display())))?;
    let path = cfg.out_dir.join("model.mps");
    fs::write(&path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    println!("wrote {} ({} columns, {} rows)", path.display(), model.n_cols(), model.n_rows());
    Ok(())
}

pub fn export_mps(cfg: &RunConfig) -> Outcome {
    let case = load_case(cfg)?;
    let set = scenarios(cfg, &case)?;
    ensure_valid(&set, &case)?;
    export(cfg, &case, &set, &model_config(cfg))?;
    Ok(EXIT_OK)
}

/// Check inputs without solving: catalog, tariffs and whichever scenario
/// source is configured.
pub fn validate(cfg: &RunConfig) -> Outcome {
    let case = load_case(cfg)?;
    println!("catalog and tariffs: ok ({} hours)", case.tariffs.hours());
    let mut sets: Vec<(String, ScenarioSet)> = Vec::new();
    if let Some(p) = &cfg.scenarios {
        sets.push((p.display().to_string(), read_scenarios(p, cfg.scenarios_ev.as_deref())?));
    }
    if let Some(p) = &cfg.history {
        sets.push((p.display().to_string(), read_scenarios(p, cfg.history_ev.as_deref())?));
    }
    let mut bad = 0;
    for (name, set) in &sets {
        let report = validate_scenario_set(set, &case.catalog, &case.tariffs);
        if report.is_valid() {
            println!("{name}: ok ({} scenarios)", set.len());
        } else {
            bad += report.violations.len();
            for v in &report.violations {
                println!("{name}: {v}");
            }
        }
    }
    Ok(if bad == 0 { EXIT_OK } else { EXIT_INPUT })
}
