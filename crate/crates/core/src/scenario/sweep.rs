use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::output::{Cell, Column, Table};
use super::pipeline::{run_scenario, run_with_mismatch, ScenarioResult};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    WidthHz,
    PeakHz,
    ReceiverRadiusM,
    /// Imposes the mismatch directly, bypassing the geometry.
    Q,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 4] = [Self::WidthHz, Self::PeakHz, Self::ReceiverRadiusM, Self::Q];

    pub fn name(self) -> &'static str {
        match self {
            Self::WidthHz => "width_hz",
            Self::PeakHz => "peak_hz",
            Self::ReceiverRadiusM => "receiver_radius_m",
            Self::Q => "q",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("parameter", format!("unknown sweep parameter `{s}` (width_hz, peak_hz, receiver_radius_m, q)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub result: ScenarioResult,
}

/// One result per grid point, in grid order.
pub fn sweep(config: &ScenarioConfig, parameter: SweepParameter, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::param("grid", "must contain at least one point"));
    }
    grid.iter()
        .map(|&value| {
            let mut c = config.clone();
            let result = match parameter {
                SweepParameter::WidthHz => {
                    c.source.width_hz = value;
                    run_scenario(&c)
                }
                SweepParameter::PeakHz => {
                    c.source.peak_hz = value;
                    run_scenario(&c)
                }
                SweepParameter::ReceiverRadiusM => {
                    c.receiver.radius_m = value;
                    run_scenario(&c)
                }
                SweepParameter::Q => run_with_mismatch(&c, value),
            }?;
            Ok(SweepRow { value, result })
        })
        .collect()
}

/// Rows with the swept value as the leading column.
pub fn sweep_table(parameter: SweepParameter, rows: &[SweepRow]) -> Table {
    let mut columns = vec![Column::new(format!("swept_{}", parameter.name()), "swept input")];
    if let Some(first) = rows.first() {
        columns.extend(first.result.columns());
    }
    let mut table = Table::new(columns);
    for row in rows {
        let mut cells = vec![Cell::Number(row.value)];
        cells.extend(row.result.cells());
        table.push(cells);
    }
    table
}

/// `n` points from `start` to `stop` inclusive, spaced evenly in log10.
pub fn log_grid(start: f64, stop: f64, n: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > 0.0 && start.is_finite() && stop.is_finite()) {
        return Err(Error::param("grid", "log grid bounds must be positive and finite"));
    }
    if n == 0 {
        return Err(Error::param("grid", "must contain at least one point"));
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let (a, b) = (start.log10(), stop.log10());
    Ok((0..n)
        .map(|i| match i {
            0 => start,
            i if i == n - 1 => stop,
            i => 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::{ObserverConfig, Protocol};

    fn base() -> ScenarioConfig {
        ScenarioConfig::earth_link(ObserverConfig::far_field(), Protocol::EntangleQkd)
    }

    #[test]
    fn widening_the_source_shrinks_q() {
        let grid = log_grid(1e6, 1e12, 13).unwrap();
        let rows = sweep(&base(), SweepParameter::WidthHz, &grid).unwrap();
        let qs: Vec<f64> = rows.iter().map(|r| r.result.q.value.unwrap()).collect();
        assert!(qs.windows(2).all(|w| w[1] < w[0]));
        // while δΩ₀/σ dominates, q ∝ σ⁻²; it heads for the δ²-level floor
        let scaled = qs.last().unwrap() * 1e12;
        assert!(((scaled - qs[0]) / qs[0]).abs() < 0.01);
        assert!(*qs.last().unwrap() < 1e-13);
    }

    #[test]
    fn single_point_matches_run() {
        let c = base();
        let rows = sweep(&c, SweepParameter::WidthHz, &[c.source.width_hz]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].result, run_scenario(&c).unwrap());
    }

    #[test]
    fn q_sweep_negativity() {
        let rows = sweep(&base(), SweepParameter::Q, &[0.0, 0.5, 1.0]).unwrap();
        let n: Vec<f64> = rows.iter().map(|r| r.result.negativity.value.unwrap()).collect();
        for (got, want) in n.iter().zip([0.5, 0.354, 0.0]) {
            assert!((got - want).abs() < 1e-3);
        }
    }

    #[test]
    fn errors() {
        assert!(sweep(&base(), SweepParameter::Q, &[]).is_err());
        assert!(sweep(&base(), SweepParameter::WidthHz, &[-1.0]).is_err());
        assert!("radius".parse::<SweepParameter>().is_err());
        assert_eq!("receiver_radius_m".parse::<SweepParameter>().unwrap(), SweepParameter::ReceiverRadiusM);
    }

    #[test]
    fn table_leads_with_parameter() {
        let rows = sweep(&base(), SweepParameter::Q, &[0.1, 0.2]).unwrap();
        let t = sweep_table(SweepParameter::Q, &rows);
        assert_eq!(t.columns[0].name, "swept_q");
        assert_eq!(t.columns[1].name, "chi");
        assert_eq!(t.rows.len(), 2);
    }

    #[test]
    fn radius_sweep_is_monotone() {
        let c = ScenarioConfig::earth_link(ObserverConfig::fixed_at(7e6), Protocol::EntangleQkd);
        let rows = sweep(&c, SweepParameter::ReceiverRadiusM, &[7e6, 1e7, 4.2e7, 1e9]).unwrap();
        let qs: Vec<f64> = rows.iter().map(|r| r.result.q.value.unwrap()).collect();
        assert!(qs.windows(2).all(|w| w[1] > w[0]));
    }
}
