//! Domain types: time grid, equipment catalog, tariffs and scenarios.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monetary unit of the planning model is ten thousand yuan.
pub const YUAN_PER_MODEL_UNIT: f64 = 1e4;

/// Daily horizon, scenario count and discounting horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub hours: usize,
    pub n_scenarios: usize,
    pub planning_years: u32,
    pub discount_rate: f64,
}

impl TimeGrid {
    pub fn new(hours: usize, n_scenarios: usize, planning_years: u32, discount_rate: f64) -> Result<Self> {
        if hours == 0 {
            return Err(Error::InvalidParameter("hours per day must be at least 1".into()));
        }
        if n_scenarios == 0 {
            return Err(Error::InvalidParameter("at least one scenario is required".into()));
        }
        if planning_years == 0 {
            return Err(Error::InvalidParameter("planning period must be at least one year".into()));
        }
        if !(0.0..1.0).contains(&discount_rate) {
            return Err(Error::InvalidParameter(format!("discount rate {discount_rate} outside [0, 1)")));
        }
        Ok(TimeGrid { hours, n_scenarios, planning_years, discount_rate })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FcKind {
    #[serde(rename = "SOFC")]
    Sofc,
    #[serde(rename = "PEM_gas")]
    PemGas,
    #[serde(rename = "PEM_H2")]
    PemH2,
}

impl FcKind {
    pub fn label(self) -> &'static str {
        match self {
            FcKind::Sofc => "SOFC",
            FcKind::PemGas => "PEM_gas",
            FcKind::PemH2 => "PEM_H2",
        }
    }
}

impl fmt::Display for FcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Investable fuel-cell type. Fuel quantities are in kWh of fuel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcSpec {
    pub id: FcKind,
    /// ¥10⁴ per set.
    pub invest_cost: f64,
    /// kWh electric per kWh fuel.
    pub gas_to_elec: f64,
    /// kWh heat per kWh fuel.
    pub gas_to_heat: f64,
    pub max_elec_kw: f64,
    pub max_heat_kw: f64,
    /// ¥ per kWh of fuel.
    pub fuel_price: f64,
    /// Tonnes CO₂ per kWh of fuel.
    pub fuel_emission: f64,
    pub max_units: u32,
    /// Marks parameters that are assumptions rather than published data.
    #[serde(default)]
    pub assumed: bool,
}

impl FcSpec {
    /// Largest fuel draw any feasible dispatch can use.
    pub fn max_fuel_kw(&self) -> f64 {
        let units = self.max_units as f64;
        let mut cap = f64::INFINITY;
        if self.gas_to_elec > 0.0 {
            cap = cap.min(units * self.max_elec_kw / self.gas_to_elec);
        }
        if self.gas_to_heat > 0.0 {
            cap = cap.min(units * self.max_heat_kw / self.gas_to_heat);
        }
        if cap.is_finite() {
            cap
        } else {
            0.0
        }
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            self.invest_cost,
            self.gas_to_elec,
            self.gas_to_heat,
            self.max_elec_kw,
            self.max_heat_kw,
            self.fuel_price,
            self.fuel_emission,
        ];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(format!("{}: parameters must be finite and non-negative", self.id)));
        }
        if self.gas_to_elec + self.gas_to_heat > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "{}: electric + heat conversion {} exceeds 1",
                self.id,
                self.gas_to_elec + self.gas_to_heat
            )));
        }
        Ok(())
    }
}

fn default_eta_electric() -> f64 {
    0.95
}

fn default_eta_thermal() -> f64 {
    0.9
}

fn check_eta(what: &str, eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what}: efficiency {eta} outside (0, 1]")))
    }
}

fn check_soc(what: &str, lo: f64, hi: f64) -> Result<()> {
    if 0.0 <= lo && lo < hi && hi <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what}: SOC window [{lo}, {hi}] invalid")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BessSpec {
    /// ¥10⁴ per kWh.
    pub invest_cost: f64,
    /// Charge/discharge power per kWh of capacity.
    pub rate_fraction: f64,
    #[serde(default = "default_eta_electric")]
    pub eta_ch: f64,
    #[serde(default = "default_eta_electric")]
    pub eta_dis: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub lifetime_cycles: f64,
    pub max_capacity_kwh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TessSpec {
    pub capacity_kwh: f64,
    pub rate_fraction: f64,
    #[serde(default = "default_eta_thermal")]
    pub eta_ch: f64,
    #[serde(default = "default_eta_thermal")]
    pub eta_dis: f64,
}

impl TessSpec {
    pub fn max_rate_kw(&self) -> f64 {
        self.rate_fraction * self.capacity_kwh
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvFleetSpec {
    pub n_ev: usize,
    pub capacity_kwh: f64,
    pub charger_kw: f64,
    pub discharge_rate_fraction: f64,
    #[serde(default = "default_eta_electric")]
    pub eta_ch: f64,
    #[serde(default = "default_eta_electric")]
    pub eta_dis: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    #[serde(default = "default_target_soc")]
    pub target_departure_soc: f64,
}

fn default_target_soc() -> f64 {
    0.9
}

impl EvFleetSpec {
    pub fn max_discharge_kw(&self) -> f64 {
        self.discharge_rate_fraction * self.capacity_kwh
    }

    /// Largest possible departure shortfall below the target, in kWh.
    pub fn max_shortfall_kwh(&self) -> f64 {
        (self.target_departure_soc - self.soc_min) * self.capacity_kwh
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquipmentCatalog {
    pub fuel_cells: Vec<FcSpec>,
    pub bess: BessSpec,
    pub tess: TessSpec,
    pub ev_fleet: EvFleetSpec,
}

impl EquipmentCatalog {
    pub fn validate(&self) -> Result<()> {
        for (k, fc) in self.fuel_cells.iter().enumerate() {
            fc.validate()?;
            if self.fuel_cells[..k].iter().any(|o| o.id == fc.id) {
                return Err(Error::InvalidParameter(format!("fuel cell {} listed twice", fc.id)));
            }
        }
        let b = &self.bess;
        check_eta("BESS charge", b.eta_ch)?;
        check_eta("BESS discharge", b.eta_dis)?;
        check_soc("BESS", b.soc_min, b.soc_max)?;
        if !(b.rate_fraction > 0.0) {
            return Err(Error::InvalidParameter("BESS rate fraction must be positive".into()));
        }
        if b.invest_cost < 0.0 || b.max_capacity_kwh < 0.0 || b.lifetime_cycles < 0.0 {
            return Err(Error::InvalidParameter("BESS cost, capacity and cycles must be non-negative".into()));
        }
        let t = &self.tess;
        check_eta("TESS charge", t.eta_ch)?;
        check_eta("TESS discharge", t.eta_dis)?;
        if t.capacity_kwh < 0.0 || t.rate_fraction < 0.0 {
            return Err(Error::InvalidParameter("TESS capacity and rate must be non-negative".into()));
        }
        let e = &self.ev_fleet;
        check_eta("EV charge", e.eta_ch)?;
        check_eta("EV discharge", e.eta_dis)?;
        check_soc("EV", e.soc_min, e.soc_max)?;
        if !(e.target_departure_soc > e.soc_min && e.target_departure_soc <= e.soc_max) {
            return Err(Error::InvalidParameter(format!(
                "EV target departure SOC {} outside ({}, {}]",
                e.target_departure_soc, e.soc_min, e.soc_max
            )));
        }
        if e.capacity_kwh <= 0.0 || e.charger_kw < 0.0 || e.discharge_rate_fraction < 0.0 {
            return Err(Error::InvalidParameter("EV capacity must be positive and rates non-negative".into()));
        }
        Ok(())
    }

    pub fn fuel_cell(&self, kind: FcKind) -> Option<&FcSpec> {
        self.fuel_cells.iter().find(|f| f.id == kind)
    }
}

/// Hourly tariffs and site limits. Prices are in ¥/kWh, the carbon tax in
/// ¥/tonne; conversion to model units happens when the objective is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TariffSet {
    pub elec_price: Vec<f64>,
    /// Tonnes CO₂ per kWh imported, per hour.
    pub grid_emission: Vec<f64>,
    pub carbon_tax: f64,
    /// ¥ per kWh of departure shortfall.
    pub soc_penalty: f64,
    pub grid_cap_kw: f64,
    pub pv_cap_kw: f64,
}

impl TariffSet {
    pub fn hours(&self) -> usize {
        self.elec_price.len()
    }

    pub fn validate(&self, hours: usize) -> Result<()> {
        if self.elec_price.len() != hours || self.grid_emission.len() != hours {
            return Err(Error::InvalidParameter(format!(
                "tariff vectors have lengths {} and {}, expected {hours}",
                self.elec_price.len(),
                self.grid_emission.len()
            )));
        }
        let scalars = [self.carbon_tax, self.soc_penalty, self.grid_cap_kw, self.pv_cap_kw];
        if self.elec_price.iter().chain(&self.grid_emission).chain(&scalars).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter("tariff entries must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Planning {
    pub planning_years: u32,
    pub discount_rate: f64,
}

/// Catalog, tariffs and planning horizon: the single JSON input document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseInputs {
    pub planning: Planning,
    pub catalog: EquipmentCatalog,
    pub tariffs: TariffSet,
}

impl CaseInputs {
    pub fn validate(&self) -> Result<()> {
        self.catalog.validate()?;
        self.tariffs.validate(self.tariffs.hours())?;
        TimeGrid::new(self.tariffs.hours(), 1, self.planning.planning_years, self.planning.discount_rate)?;
        Ok(())
    }

    pub fn time_grid(&self, n_scenarios: usize) -> Result<TimeGrid> {
        TimeGrid::new(self.tariffs.hours(), n_scenarios, self.planning.planning_years, self.planning.discount_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvRecord {
    pub arrive_hour: usize,
    /// Exclusive: the EV is parked for hours `arrive_hour..depart_hour`.
    pub depart_hour: usize,
    pub initial_soc: f64,
}

impl EvRecord {
    pub fn parked_hours(&self) -> std::ops::Range<usize> {
        self.arrive_hour..self.depart_hour
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub elec_load: Vec<f64>,
    pub heat_load: Vec<f64>,
    pub pv_avail: Vec<f64>,
    pub evs: Vec<EvRecord>,
}

impl Scenario {
    pub fn total_elec(&self) -> f64 {
        self.elec_load.iter().sum()
    }

    pub fn total_heat(&self) -> f64 {
        self.heat_load.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub hours: usize,
    pub scenarios: Vec<Scenario>,
}

impl ScenarioSet {
    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn n_ev(&self) -> usize {
        self.scenarios.first().map_or(0, |s| s.evs.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_invariants() {
        assert!(TimeGrid::new(24, 100, 10, 0.06).is_ok());
        assert!(TimeGrid::new(0, 1, 1, 0.0).is_err());
        assert!(TimeGrid::new(24, 0, 1, 0.0).is_err());
        assert!(TimeGrid::new(24, 1, 0, 0.0).is_err());
        assert!(TimeGrid::new(24, 1, 1, 1.0).is_err());
    }

    #[test]
    fn fc_conversion_must_not_exceed_one() {
        let fc = FcSpec {
            id: FcKind::Sofc,
            invest_cost: 80.0,
            gas_to_elec: 0.63,
            gas_to_heat: 0.5,
            max_elec_kw: 4.5,
            max_heat_kw: 2.0,
            fuel_price: 0.257,
            fuel_emission: 0.0002,
            max_units: 3,
            assumed: false,
        };
        assert!(fc.validate().is_err());
    }

    #[test]
    fn fuel_cap_is_binding_output() {
        let fc = FcSpec {
            id: FcKind::PemGas,
            invest_cost: 30.0,
            gas_to_elec: 0.34,
            gas_to_heat: 0.5,
            max_elec_kw: 4.2,
            max_heat_kw: 6.2,
            fuel_price: 0.257,
            fuel_emission: 0.0002,
            max_units: 2,
            assumed: false,
        };
        // electric side binds: 2 * 4.2 / 0.34 < 2 * 6.2 / 0.5
        assert!((fc.max_fuel_kw() - 8.4 / 0.34).abs() < 1e-12);
    }
}
