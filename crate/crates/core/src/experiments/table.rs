// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One raw measurement. Every column except `wall_time_ms` is a pure
/// function of the config and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub rows: usize,
    pub cols: usize,
    pub node_count: usize,
    pub strategy: String,
    pub seed: u64,
    /// Failed nodes at this point, `-1` outside the resilience study.
    pub failures: i64,
    pub objective: Option<f64>,
    pub kappa: Option<f64>,
    pub d_metric: Option<f64>,
    pub qubits: Option<usize>,
    /// Empty classes (static) or single-node components (resilience).
    pub excluded: usize,
    pub detail: String,
    pub wall_time_ms: f64,
}

/// Column order of the raw CSV.
pub const RESULT_COLUMNS: [&str; 14] = [
    "experiment",
    "rows",
    "cols",
    "node_count",
    "strategy",
    "seed",
    "failures",
    "objective",
    "kappa",
    "d_metric",
    "qubits",
    "excluded",
    "detail",
    "wall_time_ms",
];

/// Mean and sample standard deviation per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub experiment: String,
    pub rows: usize,
    pub cols: usize,
    pub node_count: usize,
    pub strategy: String,
    pub failures: i64,
    pub trials: usize,
    pub objective_mean: Option<f64>,
    pub objective_std: Option<f64>,
    pub kappa_mean: Option<f64>,
    pub kappa_std: Option<f64>,
    pub d_mean: Option<f64>,
    pub d_std: Option<f64>,
    pub qubits_mean: Option<f64>,
    pub excluded_mean: f64,
}

/// `(mean, sample std)`; the std of a single value is 0.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

type CellKey = (String, usize, usize, usize, String, i64);

impl ResultTable {
    pub fn new(rows: Vec<ResultRow>) -> Self {
        Self { rows }
    }

    fn cell_key(r: &ResultRow) -> CellKey {
        (
            r.experiment.clone(),
            r.rows,
            r.cols,
            r.node_count,
            r.strategy.clone(),
            r.failures,
        )
    }

    /// Aggregates in order of first appearance of each cell.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut order: Vec<CellKey> = Vec::new();
        let mut cells: BTreeMap<CellKey, Vec<&ResultRow>> = BTreeMap::new();
        for r in &self.rows {
            let key = Self::cell_key(r);
            let cell = cells.entry(key.clone()).or_default();
            if cell.is_empty() {
                order.push(key);
            }
            cell.push(r);
        }
        order
            .into_iter()
            .map(|key| {
                let cell = &cells[&key];
                let column = |f: &dyn Fn(&ResultRow) -> Option<f64>| {
                    let vals: Vec<f64> = cell.iter().filter_map(|r| f(r)).collect();
                    mean_std(&vals)
                };
                let objective = column(&|r| r.objective);
                let kappa = column(&|r| r.kappa);
                let d = column(&|r| r.d_metric);
                let qubits = column(&|r| r.qubits.map(|q| q as f64));
                let excluded = column(&|r| Some(r.excluded as f64)).map_or(0.0, |m| m.0);
                let (experiment, rows, cols, node_count, strategy, failures) = key;
                AggregateRow {
                    experiment,
                    rows,
                    cols,
                    node_count,
                    strategy,
                    failures,
                    trials: cell.len(),
                    objective_mean: objective.map(|m| m.0),
                    objective_std: objective.map(|m| m.1),
                    kappa_mean: kappa.map(|m| m.0),
                    kappa_std: kappa.map(|m| m.1),
                    d_mean: d.map(|m| m.0),
                    d_std: d.map(|m| m.1),
                    qubits_mean: qubits.map(|m| m.0),
                    excluded_mean: excluded,
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_records(out, &self.rows)
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        write_records(out, &self.aggregate())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Raw CSV without the trailing timing column, for reproducibility
    /// checks.
    pub fn data_columns_csv(&self) -> Result<String> {
        let full = self.to_csv_string()?;
        Ok(full
            .lines()
            .map(|line| line.rsplit_once(',').map_or(line, |(data, _)| data))
            .collect::<Vec<_>>()
            .join("\n"))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let rows = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        Ok(Self { rows })
    }
}

fn write_records<W: Write, T: Serialize>(out: W, records: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(strategy: &str, seed: u64, objective: f64) -> ResultRow {
        ResultRow {
            experiment: "static-eval".into(),
            rows: 2,
            cols: 10,
            node_count: 20,
            strategy: strategy.into(),
            seed,
            failures: -1,
            objective: Some(objective),
            kappa: None,
            d_metric: None,
            qubits: None,
            excluded: 0,
            detail: String::new(),
            wall_time_ms: seed as f64 * 1.5,
        }
    }

    #[test]
    fn sample_std() {
        assert_eq!(mean_std(&[]), None);
        assert_eq!(mean_std(&[4.0]), Some((4.0, 0.0)));
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(m, 5.0);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn aggregate_groups_cells_in_order() {
        let t = ResultTable::new(vec![
            row("random", 0, 3.0),
            row("optimized", 0, 2.0),
            row("random", 1, 5.0),
        ]);
        let agg = t.aggregate();
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].strategy, "random");
        assert_eq!(agg[0].trials, 2);
        assert_eq!(agg[0].objective_mean, Some(4.0));
        assert_eq!(agg[1].objective_std, Some(0.0));
        assert_eq!(agg[0].kappa_mean, None);
    }

    #[test]
    fn csv_header_and_roundtrip() {
        let t = ResultTable::new(vec![row("random", 0, 3.0), row("random", 1, 4.0)]);
        let text = t.to_csv_string().unwrap();
        assert_eq!(text.lines().next().unwrap(), RESULT_COLUMNS.join(","));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, &text).unwrap();
        assert_eq!(ResultTable::read_csv(&path).unwrap(), t);
    }

    #[test]
    fn data_columns_drop_timing() {
        let a = ResultTable::new(vec![row("random", 3, 3.0)]);
        let mut b = a.clone();
        b.rows[0].wall_time_ms = 99.0;
        assert_ne!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
        assert_eq!(a.data_columns_csv().unwrap(), b.data_columns_csv().unwrap());
        assert!(!a.data_columns_csv().unwrap().contains("4.5"));
    }
}
