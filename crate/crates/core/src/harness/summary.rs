use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{fmt_g, ResultRow};
use crate::error::Result;

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub mean: f64,
    pub se: f64,
}

impl MetricSummary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        if values.len() < 2 {
            return MetricSummary { mean, se: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        MetricSummary {
            mean,
            se: (var / n).sqrt(),
        }
    }
}

/// One `(dataset, method, setting, cost)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub dataset: String,
    pub method: String,
    pub setting: String,
    pub cost: f64,
    pub n: usize,
    pub risk01c: MetricSummary,
    pub rejection_ratio: MetricSummary,
    pub accepted_error: MetricSummary,
    /// Set for groups of one row, whose standard error is reported as 0.
    pub single: bool,
}

/// Groups rows by everything but the trial, preserving first-seen order.
pub fn aggregate(rows: &[ResultRow]) -> Vec<Summary> {
    let mut groups: Vec<((String, String, String, String), Vec<&ResultRow>)> = Vec::new();
    for r in rows {
        let key = (r.dataset.clone(), r.method.clone(), r.setting.clone(), fmt_g(r.cost));
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let pick = |f: fn(&ResultRow) -> f64| MetricSummary::of(&members.iter().map(|r| f(r)).collect::<Vec<_>>());
            let first = members[0];
            Summary {
                dataset: first.dataset.clone(),
                method: first.method.clone(),
                setting: first.setting.clone(),
                cost: first.cost,
                n: members.len(),
                risk01c: pick(|r| r.risk01c),
                rejection_ratio: pick(|r| r.rejection_ratio),
                accepted_error: pick(|r| r.accepted_error),
                single: members.len() == 1,
            }
        })
        .collect()
}

/// Writes summaries; `scale` multiplies every metric (100 gives the 0-100
/// presentation).
pub fn write_summary<W: Write>(summaries: &[Summary], scale: f64, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(
        out,
        "dataset,method,setting,cost,n,risk01c_mean,risk01c_se,rejection_ratio_mean,rejection_ratio_se,accepted_error_mean,accepted_error_se,single"
    )?;
    for s in summaries {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.dataset,
            s.method,
            s.setting,
            fmt_g(s.cost),
            s.n,
            fmt_g(scale * s.risk01c.mean),
            fmt_g(scale * s.risk01c.se),
            fmt_g(scale * s.rejection_ratio.mean),
            fmt_g(scale * s.rejection_ratio.se),
            fmt_g(scale * s.accepted_error.mean),
            fmt_g(scale * s.accepted_error.se),
            u8::from(s.single)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary_csv(summaries: &[Summary], scale: f64, path: impl AsRef<Path>) -> Result<()> {
    write_summary(summaries, scale, File::create(path)?)
}
