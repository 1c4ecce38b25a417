//! Heuristic moment-matching scenario generation.

mod correlate;
mod cubic;
mod generate;
mod moments;

pub use correlate::{cholesky, decorrelate, impose_correlation, repair_psd};
pub use cubic::{apply_cubic, fit_cubic_transform, raw_moments};
pub use generate::{hmm_generate, seed_column, HmmOptions, IterationLog, RawSampleMatrix};
pub use moments::{column_moments, sample_moments, MomentTargets};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{EvFleetSpec, EvRecord, Scenario, ScenarioSet};

/// Column layout of one scenario as a random vector: hourly electric load,
/// heat load and PV, then (arrive, depart, soc) per EV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioLayout {
    pub hours: usize,
    pub n_ev: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    Elec,
    Heat,
    Pv,
    Ev,
}

impl ScenarioLayout {
    pub fn dims(&self) -> usize {
        3 * self.hours + 3 * self.n_ev
    }

    pub fn elec(&self, t: usize) -> usize {
        t
    }

    pub fn heat(&self, t: usize) -> usize {
        self.hours + t
    }

    pub fn pv(&self, t: usize) -> usize {
        2 * self.hours + t
    }

    /// field 0 = arrive, 1 = depart, 2 = soc.
    pub fn ev(&self, j: usize, field: usize) -> usize {
        3 * self.hours + 3 * j + field
    }

    fn block(&self, k: usize) -> Block {
        match k / self.hours.max(1) {
            0 => Block::Elec,
            1 => Block::Heat,
            2 => Block::Pv,
            _ => Block::Ev,
        }
    }

    pub fn matrix(&self, set: &ScenarioSet) -> DMatrix<f64> {
        DMatrix::from_fn(set.len(), self.dims(), |s, k| {
            let sc = &set.scenarios[s];
            let t = k % self.hours.max(1);
            match self.block(k) {
                Block::Elec => sc.elec_load[t],
                Block::Heat => sc.heat_load[t],
                Block::Pv => sc.pv_avail[t],
                Block::Ev => {
                    let e = k - 3 * self.hours;
                    let ev = &sc.evs[e / 3];
                    match e % 3 {
                        0 => ev.arrive_hour as f64,
                        1 => ev.depart_hour as f64,
                        _ => ev.initial_soc,
                    }
                }
            }
        })
    }
}

/// Moment and correlation targets estimated from historical days. Constant
/// columns become degenerate dimensions. With `block_correlation`, only
/// within-block and load-PV correlations are kept.
pub fn estimate_targets(history: &ScenarioSet, block_correlation: bool) -> MomentTargets {
    let layout = ScenarioLayout { hours: history.hours, n_ev: history.n_ev() };
    let x = layout.matrix(history);
    let d = layout.dims();
    let mut t = MomentTargets {
        mean: vec![0.0; d],
        variance: vec![0.0; d],
        skewness: vec![0.0; d],
        kurtosis: vec![3.0; d],
        correlation: Vec::new(),
    };
    for k in 0..d {
        let col = x.column(k);
        let (m, v, s, ku) = column_moments(col.as_slice());
        t.mean[k] = m;
        if v > 1e-12 * m.abs().max(1.0).powi(2) {
            t.variance[k] = v;
            t.skewness[k] = s;
            t.kurtosis[k] = ku.max(s * s + 1.0 + 1e-9);
        }
    }
    let mut r = moments::correlation(&x, &t.mean, &t.variance);
    if block_correlation {
        for i in 0..d {
            for j in 0..d {
                let (a, b) = (layout.block(i), layout.block(j));
                let keep = a == b
                    || matches!(
                        (a, b),
                        (Block::Pv, Block::Elec | Block::Heat) | (Block::Elec | Block::Heat, Block::Pv)
                    );
                if !keep {
                    r[i][j] = 0.0;
                }
            }
        }
    }
    let fixed = repair_psd(&DMatrix::from_fn(d, d, |i, j| r[i][j]), 1e-6);
    t.correlation = (0..d).map(|i| (0..d).map(|j| fixed[(i, j)]).collect()).collect();
    t
}

/// Round continuous EV fields to a parking interval and clamp the SOC.
pub fn discretize_ev_fields(arrive: f64, depart: f64, soc: f64, hours: usize, fleet: &EvFleetSpec) -> EvRecord {
    let clamp = |v: f64, lo: usize, hi: usize| (v.round().max(lo as f64).min(hi as f64)) as usize;
    let arrive_hour = clamp(arrive, 0, hours - 1);
    let mut depart_hour = clamp(depart, 1, hours);
    if depart_hour <= arrive_hour {
        depart_hour = arrive_hour + 1;
    }
    EvRecord { arrive_hour, depart_hour, initial_soc: soc.clamp(fleet.soc_min, fleet.soc_max) }
}

/// Turn generated rows into scenarios: loads clamped at zero, PV to
/// [0, pv_cap], EV fields discretized.
pub fn to_scenario_set(values: &DMatrix<f64>, layout: ScenarioLayout, fleet: &EvFleetSpec, pv_cap: f64) -> ScenarioSet {
    let hours = layout.hours;
    let scenarios = (0..values.nrows())
        .map(|s| {
            let row = |k: usize| values[(s, k)];
            Scenario {
                elec_load: (0..hours).map(|t| row(layout.elec(t)).max(0.0)).collect(),
                heat_load: (0..hours).map(|t| row(layout.heat(t)).max(0.0)).collect(),
                pv_avail: (0..hours).map(|t| row(layout.pv(t)).clamp(0.0, pv_cap)).collect(),
                evs: (0..layout.n_ev)
                    .map(|j| {
                        discretize_ev_fields(
                            row(layout.ev(j, 0)),
                            row(layout.ev(j, 1)),
                            row(layout.ev(j, 2)),
                            hours,
                            fleet,
                        )
                    })
                    .collect(),
            }
        })
        .collect();
    ScenarioSet { hours, scenarios }
}

/// Convergence record written next to generated scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenGenLog {
    pub seed: u64,
    pub n_scenarios: usize,
    pub dims: usize,
    pub tol: f64,
    pub converged: bool,
    pub best_iteration: usize,
    pub iterations: Vec<IterationLog>,
}

/// History to scenario set: estimate targets, run moment matching, and
/// discretize. Loads and PV are clamped as in [`to_scenario_set`].
pub fn generate_scenarios(
    history: &ScenarioSet,
    n: usize,
    seed: u64,
    opts: &HmmOptions,
    block_correlation: bool,
    fleet: &EvFleetSpec,
    pv_cap: f64,
) -> Result<(ScenarioSet, ScenGenLog)> {
    let targets = estimate_targets(history, block_correlation);
    generate_from_targets(&targets, history.hours, history.n_ev(), n, seed, opts, fleet, pv_cap)
}

#[allow(clippy::too_many_arguments)]
pub fn generate_from_targets(
    targets: &MomentTargets,
    hours: usize,
    n_ev: usize,
    n: usize,
    seed: u64,
    opts: &HmmOptions,
    fleet: &EvFleetSpec,
    pv_cap: f64,
) -> Result<(ScenarioSet, ScenGenLog)> {
    let layout = ScenarioLayout { hours, n_ev };
    if targets.dims() != layout.dims() {
        return Err(Error::InvalidParameter(format!(
            "targets have {} dimensions, {hours} hours and {n_ev} EVs need {}",
            targets.dims(),
            layout.dims()
        )));
    }
    let raw = hmm_generate(targets, n, seed, opts)?;
    let set = to_scenario_set(&raw.values, layout, fleet, pv_cap);
    let log = ScenGenLog {
        seed,
        n_scenarios: n,
        dims: layout.dims(),
        tol: opts.tol,
        converged: raw.converged,
        best_iteration: raw.best_iteration,
        iterations: raw.iteration_log,
    };
    Ok((set, log))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fleet() -> EvFleetSpec {
        EvFleetSpec {
            n_ev: 1,
            capacity_kwh: 60.0,
            charger_kw: 7.0,
            discharge_rate_fraction: 0.25,
            eta_ch: 0.95,
            eta_dis: 0.95,
            soc_min: 0.1,
            soc_max: 1.0,
            target_departure_soc: 0.9,
        }
    }

    #[test]
    fn ev_rounding_rules() {
        let f = fleet();
        let r = discretize_ev_fields(8.4, 17.6, 0.55, 24, &f);
        assert_eq!((r.arrive_hour, r.depart_hour, r.initial_soc), (8, 18, 0.55));
        let r = discretize_ev_fields(9.4, 9.5, 0.2, 24, &f);
        assert_eq!((r.arrive_hour, r.depart_hour), (9, 10));
        assert_eq!(discretize_ev_fields(1.0, 5.0, 1.7, 24, &f).initial_soc, 1.0);
        let r = discretize_ev_fields(30.0, 40.0, 0.0, 24, &f);
        assert_eq!((r.arrive_hour, r.depart_hour, r.initial_soc), (23, 24, 0.1));
    }

    #[test]
    fn layout_round_trips_through_matrix() {
        let set = ScenarioSet {
            hours: 2,
            scenarios: vec![Scenario {
                elec_load: vec![1.0, 2.0],
                heat_load: vec![3.0, 4.0],
                pv_avail: vec![0.0, 5.0],
                evs: vec![EvRecord { arrive_hour: 0, depart_hour: 2, initial_soc: 0.5 }],
            }],
        };
        let layout = ScenarioLayout { hours: 2, n_ev: 1 };
        let m = layout.matrix(&set);
        assert_eq!(m.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 2.0, 3.0, 4.0, 0.0, 5.0, 0.0, 2.0, 0.5]);
        assert_eq!(to_scenario_set(&m, layout, &fleet(), 1000.0), set);
    }
}
