//! Closed-form money arithmetic shared by the model and the reports.

use crate::error::{Error, Result};
use crate::types::TimeGrid;

/// Converts one scenario-day of operating cost into present value over the
/// planning horizon, already divided by the number of scenarios.
pub fn annualization_factor(grid: &TimeGrid) -> f64 {
    let mut sum = 0.0;
    let mut discount = 1.0;
    for _ in 0..grid.planning_years {
        sum += 1.0 / discount;
        discount *= 1.0 + grid.discount_rate;
    }
    365.0 * sum / grid.n_scenarios as f64
}

/// ¥/m³ to ¥/kWh of fuel given the lower heating value in kWh/m³.
pub fn fuel_price_per_kwh(price_per_m3: f64, lhv: f64) -> Result<f64> {
    if !(lhv > 0.0) || !lhv.is_finite() {
        return Err(Error::InvalidParameter(format!("lower heating value must be positive, got {lhv}")));
    }
    Ok(price_per_m3 / lhv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(pp: u32, gamma: f64, n: usize) -> TimeGrid {
        TimeGrid::new(24, n, pp, gamma).unwrap()
    }

    #[test]
    fn annualization_examples() {
        assert!((annualization_factor(&grid(1, 0.08, 100)) - 3.65).abs() < 1e-12);
        assert!((annualization_factor(&grid(2, 0.0, 100)) - 7.3).abs() < 1e-12);
        let m = annualization_factor(&grid(10, 0.06, 100));
        assert!((m - 28.476).abs() < 1e-3, "{m}");
    }

    #[test]
    fn monotone_in_horizon_and_rate() {
        for pp in 2..15 {
            assert!(annualization_factor(&grid(pp + 1, 0.05, 10)) > annualization_factor(&grid(pp, 0.05, 10)));
            assert!(annualization_factor(&grid(pp, 0.06, 10)) < annualization_factor(&grid(pp, 0.05, 10)));
        }
    }

    #[test]
    fn fuel_price_conversion() {
        assert!((fuel_price_per_kwh(2.57, 10.0).unwrap() - 0.257).abs() < 1e-15);
        assert_eq!(fuel_price_per_kwh(0.0, 10.0).unwrap(), 0.0);
        assert!(fuel_price_per_kwh(2.57, 0.0).is_err());
        assert!(fuel_price_per_kwh(2.57, -1.0).is_err());
    }
}
