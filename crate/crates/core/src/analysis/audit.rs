use serde::Serialize;

use crate::solve::PlanSolution;
use crate::types::EvFleetSpec;

const SOC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SocViolation {
    pub scenario: usize,
    pub ev: usize,
    pub departure_soc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChanceAudit {
    /// Lowest departure SOC per scenario, `None` without EVs.
    pub worst_departure_soc: Vec<Option<f64>>,
    pub substandard: Vec<usize>,
    pub violations: Vec<SocViolation>,
    pub count: usize,
    pub limit: usize,
    pub pass: bool,
}

/// Count scenarios in which any EV leaves below the target SOC, from the
/// raw departure energies.
pub fn chance_audit(plan: &PlanSolution, fleet: &EvFleetSpec, zeta: f64, n: usize) -> ChanceAudit {
    let target = fleet.target_departure_soc;
    let mut worst = Vec::with_capacity(plan.scenarios.len());
    let mut substandard = Vec::new();
    let mut violations = Vec::new();
    for (s, d) in plan.scenarios.iter().enumerate() {
        let mut low: Option<f64> = None;
        let mut bad = false;
        for (j, ev) in d.evs.iter().enumerate() {
            let soc = ev.departure_energy() / fleet.capacity_kwh;
            low = Some(low.map_or(soc, |l: f64| l.min(soc)));
            if soc < target - SOC_TOL {
                bad = true;
                violations.push(SocViolation { scenario: s, ev: j, departure_soc: soc });
            }
        }
        worst.push(low);
        if bad {
            substandard.push(s);
        }
    }
    let limit = (n as f64 * zeta + 1e-9).floor() as usize;
    let count = substandard.len();
    ChanceAudit { worst_departure_soc: worst, substandard, violations, count, limit, pass: count <= limit }
}
