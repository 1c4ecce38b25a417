//! Example catalog and tariffs for the bundled Shanghai-like case. Values not
//! published with the case study are marked `assumed` in the catalog or
//! documented in the README.

use crate::finance::fuel_price_per_kwh;
use crate::types::{
    BessSpec, CaseInputs, EquipmentCatalog, EvFleetSpec, FcKind, FcSpec, Planning, TariffSet, TessSpec,
};

pub const GAS_PRICE_PER_M3: f64 = 2.57;
pub const GAS_LHV_KWH_PER_M3: f64 = 10.0;
/// ¥ per kWh of hydrogen (about ¥16.7/kg).
pub const H2_PRICE_PER_KWH: f64 = 0.5;
/// t CO₂ per kWh of natural gas burned.
pub const GAS_EMISSION: f64 = 0.000202;

pub const PEAK_PRICE: f64 = 1.02;
pub const FLAT_PRICE: f64 = 0.674;
pub const VALLEY_PRICE: f64 = 0.297;

/// Time-of-use price for hour `t` of 24: valley 22:00-06:00, peak
/// 08:00-11:00 and 18:00-21:00, flat otherwise.
pub fn tou_price(t: usize) -> f64 {
    match t {
        0..=5 | 22..=23 => VALLEY_PRICE,
        8..=10 | 18..=20 => PEAK_PRICE,
        _ => FLAT_PRICE,
    }
}

/// Two-level grid carbon intensity in t/kWh: daytime 08:00-22:00 is higher.
pub fn grid_emission(t: usize) -> f64 {
    if (8..22).contains(&t) {
        0.00075
    } else {
        0.00055
    }
}

pub fn fuel_cells() -> Vec<FcSpec> {
    let gas = fuel_price_per_kwh(GAS_PRICE_PER_M3, GAS_LHV_KWH_PER_M3).unwrap_or(0.257);
    vec![
        FcSpec {
            id: FcKind::Sofc,
            invest_cost: 80.0,
            gas_to_elec: 0.63,
            gas_to_heat: 0.28,
            max_elec_kw: 4.5,
            max_heat_kw: 2.0,
            fuel_price: gas,
            fuel_emission: GAS_EMISSION,
            max_units: 20,
            assumed: false,
        },
        FcSpec {
            id: FcKind::PemGas,
            invest_cost: 30.0,
            gas_to_elec: 0.34,
            gas_to_heat: 0.5,
            max_elec_kw: 4.2,
            max_heat_kw: 6.2,
            fuel_price: gas,
            fuel_emission: GAS_EMISSION,
            max_units: 40,
            assumed: false,
        },
        FcSpec {
            id: FcKind::PemH2,
            invest_cost: 295.0,
            gas_to_elec: 0.5,
            gas_to_heat: 0.45,
            max_elec_kw: 60.0,
            max_heat_kw: 60.0,
            fuel_price: H2_PRICE_PER_KWH,
            fuel_emission: 0.0,
            max_units: 6,
            assumed: true,
        },
    ]
}

pub fn catalog() -> EquipmentCatalog {
    EquipmentCatalog {
        fuel_cells: fuel_cells(),
        bess: BessSpec {
            invest_cost: 0.15,
            rate_fraction: 0.25,
            eta_ch: 0.95,
            eta_dis: 0.95,
            soc_min: 0.1,
            soc_max: 1.0,
            lifetime_cycles: 5000.0,
            max_capacity_kwh: 3000.0,
        },
        tess: TessSpec { capacity_kwh: 150.0, rate_fraction: 0.5, eta_ch: 0.9, eta_dis: 0.9 },
        ev_fleet: EvFleetSpec {
            n_ev: 5,
            capacity_kwh: 60.0,
            charger_kw: 7.0,
            discharge_rate_fraction: 0.25,
            eta_ch: 0.95,
            eta_dis: 0.95,
            soc_min: 0.1,
            soc_max: 1.0,
            target_departure_soc: 0.9,
        },
    }
}

pub fn tariffs(hours: usize, carbon_tax: f64) -> TariffSet {
    let hour_of_day = |t: usize| t * 24 / hours;
    TariffSet {
        elec_price: (0..hours).map(|t| tou_price(hour_of_day(t))).collect(),
        grid_emission: (0..hours).map(|t| grid_emission(hour_of_day(t))).collect(),
        carbon_tax,
        soc_penalty: 1.0,
        grid_cap_kw: 2000.0,
        pv_cap_kw: 1000.0,
    }
}

/// Ten-year horizon at 6 % discounting, 24 hours, carbon tax ¥40/t.
pub fn case() -> CaseInputs {
    CaseInputs {
        planning: Planning { planning_years: 10, discount_rate: 0.06 },
        catalog: catalog(),
        tariffs: tariffs(24, 40.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_case_is_valid() {
        case().validate().unwrap();
        let prices: Vec<f64> = (0..24).map(tou_price).collect();
        assert_eq!(prices.iter().filter(|&&p| p == VALLEY_PRICE).count(), 8);
        assert_eq!(prices.iter().filter(|&&p| p == PEAK_PRICE).count(), 6);
    }
}
