//! Multi-seed aggregation and table rendering.

use serde::{Deserialize, Serialize};

use crate::config::DyMode;
use crate::error::{Error, Result};

use super::metrics::EpisodeMetrics;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator, 0 for one value).
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyAggregate);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Ok(Self { mean, std })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    /// Table label of the robot version.
    pub version: String,
    pub id: String,
    pub mdb: Summary,
    pub atb: Summary,
    pub dy: Summary,
    pub reached: usize,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<EpisodeMetrics<f64>>,
    /// Single deterministic run; rendered without a spread.
    pub deterministic: bool,
    pub config_hash: String,
    pub dy_mode: DyMode,
}

/// Per-metric mean and sample std over seeds.
pub fn aggregate(
    version: &str,
    id: &str,
    metrics: &[EpisodeMetrics<f64>],
    seeds: &[u64],
    config_hash: &str,
    deterministic: bool,
    dy_mode: DyMode,
) -> Result<ScenarioReport> {
    if metrics.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    if metrics.len() != seeds.len() {
        return Err(Error::DimensionMismatch {
            expected: seeds.len(),
            got: metrics.len(),
        });
    }
    let col = |f: fn(&EpisodeMetrics<f64>) -> f64| -> Vec<f64> { metrics.iter().map(f).collect() };
    Ok(ScenarioReport {
        version: version.into(),
        id: id.into(),
        mdb: Summary::of(&col(|m| m.mdb))?,
        atb: Summary::of(&col(|m| m.atb as f64))?,
        dy: Summary::of(&col(|m| m.dy))?,
        reached: metrics.iter().filter(|m| m.reached).count(),
        seeds: seeds.to_vec(),
        per_seed: metrics.to_vec(),
        deterministic,
        config_hash: config_hash.into(),
        dy_mode,
    })
}

/// One significant digit below 1, whole numbers above.
pub fn format_std(std: f64) -> String {
    if std == 0.0 || !std.is_finite() {
        return "0".into();
    }
    if std >= 0.95 {
        return format!("{std:.0}");
    }
    let scale = |v: f64| 10f64.powi((-v.log10().floor()) as i32);
    // Rounding can carry into a new leading digit (0.096 -> 0.1).
    let rounded = (std * scale(std)).round() / scale(std);
    let decimals = (-rounded.log10().floor()) as usize;
    format!("{rounded:.decimals$}")
}

fn cell(s: &Summary, decimals: usize, deterministic: bool) -> String {
    let mean = format!("{:.decimals$}", s.mean);
    if deterministic {
        mean
    } else {
        format!("{mean} ± {}", format_std(s.std))
    }
}

impl ScenarioReport {
    /// `MDB | ATB | DY` cells.
    pub fn row(&self) -> String {
        format!(
            "{} | {} | {}",
            cell(&self.mdb, 2, self.deterministic),
            cell(&self.atb, 0, self.deterministic),
            cell(&self.dy, 2, self.deterministic)
        )
    }
}

/// Markdown table with one row per report, in the given order.
pub fn markdown_table(reports: &[ScenarioReport]) -> String {
    let dy_label = match reports.first().map(|r| r.dy_mode) {
        Some(DyMode::Max) => "DY (max)",
        Some(DyMode::Terminal) => "DY (terminal)",
        _ => "DY (mean)",
    };
    let rows: Vec<[String; 4]> = reports
        .iter()
        .map(|r| {
            let row = r.row();
            let mut parts = row.split(" | ").map(str::to_string);
            [
                r.version.clone(),
                parts.next().unwrap_or_default(),
                parts.next().unwrap_or_default(),
                parts.next().unwrap_or_default(),
            ]
        })
        .collect();
    let header = [
        "Version of the Robot".to_string(),
        "MDB".into(),
        "ATB".into(),
        dy_label.into(),
    ];
    let widths: Vec<usize> = (0..4)
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String; 4]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(&header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for r in &rows {
        out.push_str(&line(r));
    }
    out
}
