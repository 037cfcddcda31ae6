use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    steps_per_epoch, AdvisorError, Crossover, EpochCurve, ReportRow, RowValues, ScalingEfficiency,
    Strategy, StrategyReport,
};

/// Per-step model-parallel speedup by MP degree. `SU(1) = 1` always.
#[derive(Debug, Clone, PartialEq)]
pub struct MpSpeedupTable {
    entries: BTreeMap<u32, f64>,
}

impl MpSpeedupTable {
    pub fn new(entries: impl IntoIterator<Item = (u32, f64)>) -> Result<Self, AdvisorError> {
        let mut map = BTreeMap::from([(1, 1.0)]);
        let mut seen = Vec::new();
        for (m, su) in entries {
            if m == 0 {
                return Err(AdvisorError::Invalid("MP degree must be >= 1".into()));
            }
            if !(su > 0.0 && su.is_finite()) {
                return Err(AdvisorError::Invalid(format!("MP speedup {} for M={} must be > 0", su, m)));
            }
            if m == 1 && su != 1.0 {
                return Err(AdvisorError::Invalid(format!("SU(1) must be 1, got {}", su)));
            }
            if seen.contains(&m) {
                return Err(AdvisorError::Invalid(format!("MP degree {} listed twice", m)));
            }
            seen.push(m);
            map.insert(m, su);
        }
        Ok(MpSpeedupTable { entries: map })
    }

    pub fn get(&self, m: u32) -> Result<f64, AdvisorError> {
        self.entries.get(&m).copied().ok_or(AdvisorError::UnknownMp(m))
    }

    /// MP degrees in ascending order.
    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurvePoint {
    batch: u64,
    epochs: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SePoint {
    workers: u64,
    se: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SeSpec {
    Constant {
        #[serde(default = "unit")]
        value: f64,
    },
    Table {
        points: Vec<SePoint>,
    },
}

fn unit() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MpEntry {
    m: u32,
    speedup: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    dataset_size: u64,
    mini_batch: u64,
    step_time_single: f64,
    epoch_curve: Vec<CurvePoint>,
    se: SeSpec,
    mp: Vec<MpEntry>,
}

/// Everything the time-to-converge model needs for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainScenario {
    pub dataset_size: u64,
    /// Samples per data-parallel worker per step.
    pub mini_batch: u64,
    /// Single-device step time, µs.
    pub step_time_single: f64,
    pub epoch_curve: EpochCurve,
    pub se: ScalingEfficiency,
    pub mp: MpSpeedupTable,
}

impl TrainScenario {
    pub fn new(
        dataset_size: u64,
        mini_batch: u64,
        step_time_single: f64,
        epoch_curve: EpochCurve,
        se: ScalingEfficiency,
        mp: MpSpeedupTable,
    ) -> Result<Self, AdvisorError> {
        if dataset_size == 0 || mini_batch == 0 {
            return Err(AdvisorError::Invalid("dataset size and mini-batch must be positive".into()));
        }
        if !(step_time_single > 0.0 && step_time_single.is_finite()) {
            return Err(AdvisorError::Invalid(format!(
                "single-device step time {} must be positive",
                step_time_single
            )));
        }
        if epoch_curve.min_batch() != mini_batch as f64 {
            return Err(AdvisorError::Invalid(format!(
                "epoch curve starts at batch {}, mini-batch is {}",
                epoch_curve.min_batch(),
                mini_batch
            )));
        }
        Ok(TrainScenario {
            dataset_size,
            mini_batch,
            step_time_single,
            epoch_curve,
            se,
            mp,
        })
    }

    pub fn parse(text: &str) -> Result<Self, AdvisorError> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| AdvisorError::Schema(e.to_string()))?;
        let curve = EpochCurve::new(file.epoch_curve.iter().map(|p| (p.batch, p.epochs)).collect())?;
        let se = match file.se {
            SeSpec::Constant { value } => ScalingEfficiency::constant(value)?,
            SeSpec::Table { points } => {
                ScalingEfficiency::table(points.iter().map(|p| (p.workers, p.se)).collect())?
            }
        };
        let mp = MpSpeedupTable::new(file.mp.iter().map(|e| (e.m, e.speedup)))?;
        Self::new(file.dataset_size, file.mini_batch, file.step_time_single, curve, se, mp)
    }

    pub fn to_json(&self) -> String {
        let se = match &self.se {
            ScalingEfficiency::Constant(value) => SeSpec::Constant { value: *value },
            ScalingEfficiency::Table(points) => SeSpec::Table {
                points: points
                    .iter()
                    .map(|&(w, se)| SePoint { workers: w as u64, se })
                    .collect(),
            },
        };
        let file = ScenarioFile {
            dataset_size: self.dataset_size,
            mini_batch: self.mini_batch,
            step_time_single: self.step_time_single,
            epoch_curve: self
                .epoch_curve
                .points()
                .into_iter()
                .map(|(batch, epochs)| CurvePoint { batch, epochs })
                .collect(),
            se,
            mp: self
                .mp
                .entries
                .iter()
                .map(|(&m, &speedup)| MpEntry { m, speedup })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }

    fn global_batch(&self, workers: u64) -> u64 {
        workers * self.mini_batch
    }

    /// Epochs to converge with `workers` data-parallel workers.
    pub fn epochs(&self, workers: u64) -> Result<f64, AdvisorError> {
        self.epoch_curve.epochs_at(self.global_batch(workers) as f64)
    }

    pub fn dp_speedup(&self, n: u64) -> Result<f64, AdvisorError> {
        let e1 = self.epochs(1)?;
        let en = self.epochs(n)?;
        Ok(self.se.at(n)? * n as f64 * e1 / en)
    }

    pub fn hybrid_speedup(&self, n: u64, m: u32) -> Result<f64, AdvisorError> {
        let su = self.mp.get(m)?;
        Ok(su * self.dp_speedup(n)?)
    }

    pub fn crossover_check(&self, n: u64, m: u32) -> Result<Crossover, AdvisorError> {
        let su = self.mp.get(m)?;
        let nm = n * m as u64;
        let efficiency_ratio = self.se.at(nm)? / self.se.at(n)?;
        let epoch_ratio = self.epochs(n)? / self.epochs(nm)?;
        let margin = su - m as f64 * efficiency_ratio * epoch_ratio;
        Ok(Crossover {
            hybrid_better: margin > 0.0,
            margin,
        })
    }

    /// Total training time in µs for `n` workers of `m` devices each.
    pub fn time_to_converge(&self, n: u64, m: u32) -> Result<f64, AdvisorError> {
        let su = self.mp.get(m)?;
        let step = self.step_time_single / (su * self.se.at(n)?);
        let steps = steps_per_epoch(self.dataset_size, self.global_batch(n));
        Ok(step * steps as f64 * self.epochs(n)?)
    }

    /// Every `(N, M)` with `N·M = devices` and `M` in the MP table, ascending `M`.
    fn rows_for(&self, devices: u64) -> Vec<ReportRow> {
        let mut rows: Vec<ReportRow> = self
            .mp
            .degrees()
            .filter(|&m| devices.is_multiple_of(m as u64))
            .map(|m| {
                let n = devices / m as u64;
                let outcome = self.hybrid_speedup(n, m).and_then(|speedup| {
                    Ok(RowValues {
                        speedup,
                        time_to_converge: self.time_to_converge(n, m)?,
                    })
                });
                ReportRow {
                    device_count: devices,
                    n,
                    m,
                    outcome,
                    recommended: false,
                }
            })
            .collect();

        let mut best: Option<(usize, f64)> = None;
        for (i, row) in rows.iter().enumerate() {
            if let Ok(v) = &row.outcome {
                // near-equal speedups keep the smaller M
                if best.is_none_or(|(_, s)| v.speedup > s * (1.0 + 1e-12)) {
                    best = Some((i, v.speedup));
                }
            }
        }
        if let Some((i, _)) = best {
            rows[i].recommended = true;
        }
        rows
    }

    pub fn best_strategy(&self, devices: u64) -> Result<Strategy, AdvisorError> {
        if devices == 0 {
            return Err(AdvisorError::Invalid("device count must be >= 1".into()));
        }
        self.rows_for(devices)
            .into_iter()
            .find(|r| r.recommended)
            .map(|r| Strategy {
                n: r.n,
                m: r.m,
                speedup: r.outcome.expect("recommended rows succeed").speedup,
            })
            .ok_or(AdvisorError::NoFeasibleFactorization(devices))
    }

    pub fn speedup_curve(&self, device_counts: &[u64]) -> StrategyReport {
        StrategyReport {
            rows: device_counts
                .iter()
                .filter(|&&d| d > 0)
                .flat_map(|&d| self.rows_for(d))
                .collect(),
        }
    }
}
