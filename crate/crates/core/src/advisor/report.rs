use std::fmt::Write as _;

use super::{AdvisorError, Crossover, TrainScenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowValues {
    pub speedup: f64,
    /// µs
    pub time_to_converge: f64,
}

/// One `(N, M)` factorization of a device count.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub device_count: u64,
    pub n: u64,
    pub m: u32,
    pub outcome: Result<RowValues, AdvisorError>,
    pub recommended: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StrategyReport {
    pub rows: Vec<ReportRow>,
}

pub const REPORT_HEADER: &str = "device_count,N,M,speedup,time_to_converge,recommended";
pub const SWEEP_HEADER: &str = "N,M,crossover,margin";

impl StrategyReport {
    /// The recommended row for `device_count`, if any factorization worked.
    pub fn recommended(&self, device_count: u64) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.device_count == device_count && r.recommended)
    }

    pub fn errors(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.outcome.is_err())
    }

    pub fn any_ok(&self) -> bool {
        self.rows.iter().any(|r| r.outcome.is_ok())
    }

    /// Errored rows keep their place with empty numeric fields.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", REPORT_HEADER);
        for r in &self.rows {
            let (speedup, time) = match &r.outcome {
                Ok(v) => (format!("{:.6}", v.speedup), format!("{:.6}", v.time_to_converge)),
                Err(_) => (String::new(), String::new()),
            };
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.device_count, r.n, r.m, speedup, time, r.recommended
            )
            .unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub m: u32,
    pub outcome: Result<Crossover, AdvisorError>,
}

impl TrainScenario {
    /// Crossover check for every `n` in `ns` and `m` in `ms`, `n` outermost.
    pub fn sweep(&self, ns: &[u64], ms: &[u32]) -> Vec<SweepRow> {
        ns.iter()
            .flat_map(|&n| {
                ms.iter().map(move |&m| SweepRow {
                    n,
                    m,
                    outcome: self.crossover_check(n, m),
                })
            })
            .collect()
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{}\n", SWEEP_HEADER);
    for r in rows {
        match &r.outcome {
            Ok(c) => writeln!(out, "{},{},{},{:.6}", r.n, r.m, c.hybrid_better, c.margin),
            Err(_) => writeln!(out, "{},{},,", r.n, r.m),
        }
        .unwrap();
    }
    out
}
