use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{fmt_num, TrialRecord};
use crate::optimizers::Scheme;
use crate::relay_eval::RelayStrategy;

/// Mean and standard error over the feasible trials of one curve point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub strategy: RelayStrategy,
    pub scheme: Scheme,
    pub p_r_dbm: f64,
    pub trials: usize,
    pub feasible: usize,
    pub objective: (f64, f64),
    pub e1: (f64, f64),
    pub e2: (f64, f64),
    pub net1: (f64, f64),
    pub net2: (f64, f64),
    /// `E2 / (E1 + E2)` per trial, averaged over trials with `E1 + E2 > 0`.
    pub share: (f64, f64),
}

impl SummaryRow {
    pub fn feasibility_rate(&self) -> f64 {
        self.feasible as f64 / self.trials as f64
    }
}

/// Sample mean and standard error; a single value has zero error.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Groups by (strategy, scheme, relay power) in that sort order.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(RelayStrategy, Scheme, i64), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        // millidecibel key keeps float sweep points orderable
        let key = (r.strategy, r.scheme, (r.p_r_dbm * 1000.0).round() as i64);
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_values()
        .map(|rs| {
            let ok: Vec<&TrialRecord> = rs.iter().copied().filter(|r| r.feasible()).collect();
            let col = |f: fn(&TrialRecord) -> f64| mean_stderr(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
            let shares: Vec<f64> = ok.iter().filter_map(|r| r.share()).collect();
            SummaryRow {
                strategy: rs[0].strategy,
                scheme: rs[0].scheme,
                p_r_dbm: rs[0].p_r_dbm,
                trials: rs.len(),
                feasible: ok.len(),
                objective: col(|r| r.objective),
                e1: col(|r| r.e1),
                e2: col(|r| r.e2),
                net1: col(|r| r.net1),
                net2: col(|r| r.net2),
                share: mean_stderr(&shares),
            }
        })
        .collect()
}

const COLUMNS: [&str; 6] = ["objective", "e1", "e2", "net1", "net2", "share"];

fn stats(row: &SummaryRow) -> [(f64, f64); 6] {
    [row.objective, row.e1, row.e2, row.net1, row.net2, row.share]
}

/// Aligned plain-text table.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut out = format!("{:<6} {:<11} {:>8} {:>9}", "strat", "scheme", "P_r/dBm", "feasible");
    for name in &COLUMNS {
        let _ = write!(out, " {:>22}", format!("{name} (se)"));
    }
    out.push('\n');
    for row in rows {
        let _ = write!(
            out,
            "{:<6} {:<11} {:>8.2} {:>9}",
            row.strategy.as_str(),
            row.scheme.as_str(),
            row.p_r_dbm,
            format!("{}/{}", row.feasible, row.trials)
        );
        for (m, se) in stats(row) {
            let _ = write!(out, " {:>22}", format!("{m:.4} ({se:.4})"));
        }
        out.push('\n');
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("strategy,scheme,p_r_dbm,trials,feasible,feasibility_rate");
    for name in &COLUMNS {
        let _ = write!(out, ",{name}_mean,{name}_stderr");
    }
    out.push('\n');
    for row in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            row.strategy,
            row.scheme,
            fmt_num(row.p_r_dbm),
            row.trials,
            row.feasible,
            fmt_num(row.feasibility_rate())
        );
        for (m, se) in stats(row) {
            let _ = write!(out, ",{},{}", fmt_num(m), fmt_num(se));
        }
        out.push('\n');
    }
    out
}
