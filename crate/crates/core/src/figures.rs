//! Curve data behind the seven figures: one CSV table per panel plus a JSON
//! manifest describing every panel's parameters.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::distributions::{occupation_pdf_binomial_limit, occupation_pdf_exact_with};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fluctuation::{pearson_correlation, total_fluctuation_ratio};
use crate::format::sig12;
use crate::moments::{mean_density_limit, std_over_mean, variance_limit};
use crate::system::SystemParams;

/// A temperature grid, `log:min:max:points` or `lin:min:max:points`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl TemperatureGrid {
    pub fn log(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points, log: true }
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points, log: false }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let steps = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let f = i as f64 / steps;
                if self.log {
                    (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + f * (self.max - self.min)
                }
            })
            .collect()
    }
}

impl FromStr for TemperatureGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("grid {s:?} is not kind:min:max:points"));
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, min, max, points] = parts[..] else {
            return Err(bad());
        };
        let min: f64 = min.parse().map_err(|_| bad())?;
        let max: f64 = max.parse().map_err(|_| bad())?;
        let points: usize = points.parse().map_err(|_| bad())?;
        if points == 0 || !(min.is_finite() && max.is_finite()) || min > max {
            return Err(bad());
        }
        match kind {
            "log" if min > 0.0 => Ok(Self::log(min, max, points)),
            "lin" => Ok(Self::linear(min, max, points)),
            _ => Err(bad()),
        }
    }
}

/// One table of a figure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub name: String,
    pub columns: Vec<String>,
    pub params: Value,
    pub rows: Vec<Vec<f64>>,
}

impl Panel {
    pub fn file_name(&self, figure: u8) -> String {
        format!("fig{figure}_{}.csv", self.name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| sig12(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub id: u8,
    pub title: String,
    pub params: Value,
    pub panels: Vec<Panel>,
}

impl FigureData {
    pub fn panel(&self, name: &str) -> Option<&Panel> {
        self.panels.iter().find(|p| p.name == name)
    }

    pub fn manifest_entry(&self) -> Value {
        json!({
            "figure": self.id,
            "title": self.title,
            "params": self.params,
            "panels": self.panels.iter().map(|p| json!({
                "file": p.file_name(self.id),
                "columns": p.columns,
                "params": p.params,
            })).collect::<Vec<_>>(),
        })
    }
}

pub const FIGURE_IDS: [u8; 7] = [1, 2, 3, 4, 5, 6, 7];

pub fn figure(id: u8) -> Result<FigureData> {
    figure_with(id, Execution::default())
}

pub fn figure_with(id: u8, exec: Execution) -> Result<FigureData> {
    match id {
        1 => std_over_mean_figure(),
        2 => first_level_figure(),
        3 => pdf_comparison_figure(3, 50, exec),
        4 => pdf_comparison_figure(4, 100, exec),
        5 => high_temperature_pdf_figure(exec),
        6 => pearson_figure(),
        7 => total_fluctuation_figure(TemperatureGrid::log(0.01, 1e4, 200), &[10, 30, 50, 70, 90]),
        _ => Err(Error::Domain(format!("no figure {id}; figures are 1 to 7"))),
    }
}

pub fn manifest(figures: &[FigureData]) -> Value {
    json!({ "figures": figures.iter().map(FigureData::manifest_entry).collect::<Vec<_>>() })
}

fn std_over_mean_figure() -> Result<FigureData> {
    let grid = TemperatureGrid::log(1e-3, 1e4, 141);
    let sizes = [10u64, 100, 1_000, 10_000, 100_000];
    let levels: Vec<u64> = (0..=5).collect();
    let mut panels = Vec::new();
    for &n in &sizes {
        let mut columns = vec!["T".to_string()];
        columns.extend(levels.iter().map(|j| format!("j{j}")));
        let rows = grid
            .values()
            .into_iter()
            .map(|t| {
                let mut row = vec![t];
                for &j in &levels {
                    row.push(std_over_mean(n, t, j)?);
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        panels.push(Panel {
            name: format!("N{n}"),
            columns,
            params: json!({ "N": n, "levels": levels }),
            rows,
        });
    }
    Ok(FigureData {
        id: 1,
        title: "standard deviation of occupation densities in units of the mean, against T".into(),
        params: json!({ "N": sizes, "levels": levels, "T_grid": grid }),
        panels,
    })
}

fn first_level_figure() -> Result<FigureData> {
    let grid = TemperatureGrid::log(1e-2, 1e2, 121);
    let sizes = [10u64, 100];
    let mut panels = Vec::new();
    for &n in &sizes {
        let rows = grid
            .values()
            .into_iter()
            .map(|t| Ok(vec![t, mean_density_limit(t, 1)?, variance_limit(n, t, 1)?.sqrt()]))
            .collect::<Result<_>>()?;
        panels.push(Panel {
            name: format!("N{n}"),
            columns: vec!["T".into(), "mean_x1".into(), "std_x1".into()],
            params: json!({ "N": n, "level": 1 }),
            rows,
        });
    }
    Ok(FigureData {
        id: 2,
        title: "occupation density of level 1 and its standard deviation, against T".into(),
        params: json!({ "N": sizes, "level": 1, "T_grid": grid }),
        panels,
    })
}

fn pdf_comparison_figure(id: u8, n: u64, exec: Execution) -> Result<FigureData> {
    let temps = [1u64, 2, 3, 4];
    let levels: Vec<u64> = (0..=3).collect();
    let mut panels = Vec::new();
    for &t in &temps {
        let params = SystemParams::new(n, n * t)?;
        let mut columns = vec!["k".to_string()];
        let mut series = Vec::new();
        let mut warnings = Vec::new();
        for &j in &levels {
            let exact = occupation_pdf_exact_with(&params, j, exec)?.to_f64();
            let limit = occupation_pdf_binomial_limit(n, t as f64, j)?;
            if let Some(w) = limit.warning() {
                warnings.push(w.to_string());
            }
            columns.push(format!("exact_j{j}"));
            columns.push(format!("limit_j{j}"));
            series.push(exact.probabilities().to_vec());
            series.push(limit.probabilities().to_vec());
        }
        let rows = (0..=n as usize)
            .map(|k| {
                let mut row = vec![k as f64];
                row.extend(series.iter().map(|s| s[k]));
                row
            })
            .collect();
        panels.push(Panel {
            name: format!("T{t}"),
            columns,
            params: json!({ "N": n, "M": n * t, "T": t, "levels": levels, "warnings": warnings }),
            rows,
        });
    }
    Ok(FigureData {
        id,
        title: format!("exact and large-N distributions of n_j at N = {n}"),
        params: json!({ "N": n, "T": temps, "levels": levels }),
        panels,
    })
}

fn high_temperature_pdf_figure(exec: Execution) -> Result<FigureData> {
    let temps = [10u64, 20, 50, 100];
    let sizes = [16u64, 64, 256, 1024];
    let mut panels = Vec::new();
    let mut summary = Vec::new();
    for &n in &sizes {
        let mut columns = vec!["k".to_string()];
        let mut series = Vec::new();
        for &t in &temps {
            let params = SystemParams::new(n, n * t)?;
            let table = occupation_pdf_exact_with(&params, 1, exec)?.to_f64();
            let mean = table.mean();
            let std = table.std_dev();
            summary.push(vec![n as f64, t as f64, mean, std, std / mean]);
            columns.push(format!("T{t}"));
            series.push(table.probabilities().to_vec());
        }
        let rows = (0..=n as usize)
            .map(|k| {
                let mut row = vec![k as f64];
                row.extend(series.iter().map(|s| s[k]));
                row
            })
            .collect();
        panels.push(Panel {
            name: format!("N{n}"),
            columns,
            params: json!({ "N": n, "T": temps, "level": 1 }),
            rows,
        });
    }
    panels.push(Panel {
        name: "widths".into(),
        columns: ["N", "T", "mean", "std", "std_over_mean"].map(String::from).to_vec(),
        params: json!({ "level": 1 }),
        rows: summary,
    });
    Ok(FigureData {
        id: 5,
        title: "exact distribution of n_1 at high temperature".into(),
        params: json!({ "N": sizes, "T": temps, "level": 1 }),
        panels,
    })
}

fn pearson_figure() -> Result<FigureData> {
    let grid = TemperatureGrid::log(1e-3, 1e3, 121);
    let mut panels = Vec::new();
    for j in 1..=4u64 {
        let others: Vec<u64> = (0..=5).filter(|&i| i != j).collect();
        let mut columns = vec!["T".to_string()];
        columns.extend(others.iter().map(|i| format!("i{i}")));
        let rows = grid
            .values()
            .into_iter()
            .map(|t| {
                let mut row = vec![t];
                for &i in &others {
                    row.push(pearson_correlation(t, i, j)?.abs());
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        panels.push(Panel {
            name: format!("j{j}"),
            columns,
            params: json!({ "j": j, "i": others }),
            rows,
        });
    }
    Ok(FigureData {
        id: 6,
        title: "modulus of the correlation between occupations of levels i and j".into(),
        params: json!({ "i": (0..=5).collect::<Vec<u64>>(), "j": [1, 2, 3, 4], "T_grid": grid }),
        panels,
    })
}

/// Total fluctuation curves; exposed so callers can pick their own grid and sizes.
pub fn total_fluctuation_figure(grid: TemperatureGrid, sizes: &[u64]) -> Result<FigureData> {
    let mut columns = vec!["T".to_string()];
    columns.extend(sizes.iter().map(|n| format!("N{n}")));
    let rows = grid
        .values()
        .into_iter()
        .map(|t| {
            let mut row = vec![t];
            for &n in sizes {
                row.push(total_fluctuation_ratio(n, t)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(FigureData {
        id: 7,
        title: "square root of the covariance trace over the summed mean occupations".into(),
        params: json!({ "N": sizes, "T_grid": grid }),
        panels: vec![Panel {
            name: "total".into(),
            columns,
            params: json!({ "N": sizes }),
            rows,
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: TemperatureGrid = "log:0.01:10000:200".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 200);
        assert!((v[0] - 0.01).abs() < 1e-15 && (v[199] - 1e4).abs() < 1e-8);
        let g: TemperatureGrid = "lin:1:4:4".parse().unwrap();
        assert_eq!(g.values(), vec![1.0, 2.0, 3.0, 4.0]);
        for bad in ["log:0:1:3", "log:1:2", "cubic:1:2:3", "lin:2:1:3", "lin:1:2:0", "lin:a:2:3"] {
            assert!(bad.parse::<TemperatureGrid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn csv_layout() {
        let p = Panel {
            name: "x".into(),
            columns: vec!["T".into(), "v".into()],
            params: json!({}),
            rows: vec![vec![1.0, 2.0 / 3.0], vec![10.0, 1e-7]],
        };
        assert_eq!(p.to_csv(), "T,v\n1,0.666666666667\n10,1e-07\n");
        assert_eq!(p.file_name(3), "fig3_x.csv");
        assert_eq!(p.column("v").unwrap(), vec![2.0 / 3.0, 1e-7]);
    }

    #[test]
    fn unknown_figure_is_rejected() {
        assert!(figure(0).is_err());
        assert!(figure(8).is_err());
    }

    #[test]
    fn light_figures_have_expected_panels() {
        let f1 = figure(1).unwrap();
        assert_eq!(f1.panels.len(), 5);
        assert_eq!(f1.panels[0].columns.len(), 7);
        let f6 = figure(6).unwrap();
        assert_eq!(f6.panels.len(), 4);
        assert!(f6.panels.iter().all(|p| p.columns.len() == 6));
        let f7 = figure(7).unwrap();
        assert_eq!(f7.panels[0].rows.len(), 200);
        let f3 = figure(3).unwrap();
        assert_eq!(f3.params["N"], 50);
        assert_eq!(f3.panels.len(), 4);
        for p in &f3.panels {
            for c in 1..p.columns.len() {
                let s: f64 = p.rows.iter().map(|r| r[c]).sum();
                assert!((s - 1.0).abs() < 1e-9, "{} {}", p.name, p.columns[c]);
            }
        }
        let m = manifest(&[f1, f3]);
        assert_eq!(m["figures"][1]["panels"][0]["file"], "fig3_T1.csv");
    }
}
