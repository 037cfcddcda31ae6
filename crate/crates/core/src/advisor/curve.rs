use super::AdvisorError;

/// Piecewise-linear interpolation in log2(x). Exact hits return the stored
/// value; anything outside the first/last abscissa is `None`.
fn log2_interpolate(points: &[(f64, f64)], x: f64) -> Option<f64> {
    let (first, last) = (points.first()?, points.last()?);
    if !(x >= first.0 && x <= last.0) {
        return None;
    }
    if let Some(p) = points.iter().find(|p| p.0 == x) {
        return Some(p.1);
    }
    let i = points.partition_point(|p| p.0 < x);
    let (lo, hi) = (points[i - 1], points[i]);
    let t = (x.log2() - lo.0.log2()) / (hi.0.log2() - lo.0.log2());
    Some(lo.1 + t * (hi.1 - lo.1))
}

/// Epochs to converge as a function of global batch size.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochCurve {
    points: Vec<(f64, f64)>,
}

impl EpochCurve {
    /// `(global_batch, epochs)` pairs with strictly increasing batch sizes.
    pub fn new(points: Vec<(u64, f64)>) -> Result<Self, AdvisorError> {
        if points.is_empty() {
            return Err(AdvisorError::Invalid("epoch curve needs at least one point".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(AdvisorError::Invalid(format!(
                    "epoch curve batch sizes must increase strictly ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(b, e)) = points.iter().find(|&&(b, e)| b == 0 || e <= 0.0 || !e.is_finite()) {
            return Err(AdvisorError::Invalid(format!(
                "epoch curve point ({}, {}) needs positive batch and epochs",
                b, e
            )));
        }
        Ok(EpochCurve {
            points: points.into_iter().map(|(b, e)| (b as f64, e)).collect(),
        })
    }

    pub fn points(&self) -> Vec<(u64, f64)> {
        self.points.iter().map(|&(b, e)| (b as u64, e)).collect()
    }

    pub fn min_batch(&self) -> f64 {
        self.points[0].0
    }

    pub fn max_batch(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    pub fn epochs_at(&self, global_batch: f64) -> Result<f64, AdvisorError> {
        log2_interpolate(&self.points, global_batch).ok_or(AdvisorError::OutOfRange {
            batch: global_batch,
            min: self.min_batch(),
            max: self.max_batch(),
        })
    }

    /// Same curve with every epoch count multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        EpochCurve {
            points: self.points.iter().map(|&(b, e)| (b, e * factor)).collect(),
        }
    }
}

/// Data-parallel scaling efficiency as a function of worker count. One
/// worker has no gradient exchange, so its efficiency is always 1.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalingEfficiency {
    Constant(f64),
    /// `(workers, efficiency)` starting at one worker, interpolated in
    /// log2(workers) between entries.
    Table(Vec<(f64, f64)>),
}

impl Default for ScalingEfficiency {
    fn default() -> Self {
        ScalingEfficiency::Constant(1.0)
    }
}

impl ScalingEfficiency {
    pub fn constant(value: f64) -> Result<Self, AdvisorError> {
        check_efficiency(value)?;
        Ok(ScalingEfficiency::Constant(value))
    }

    pub fn table(points: Vec<(u64, f64)>) -> Result<Self, AdvisorError> {
        match points.first() {
            Some(&(1, 1.0)) => {}
            _ => {
                return Err(AdvisorError::Invalid(
                    "scaling efficiency table must start at (1 worker, 1.0)".into(),
                ))
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(AdvisorError::Invalid(format!(
                    "scaling efficiency worker counts must increase strictly ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(_, se) in &points {
            check_efficiency(se)?;
        }
        Ok(ScalingEfficiency::Table(
            points.into_iter().map(|(n, se)| (n as f64, se)).collect(),
        ))
    }

    pub fn at(&self, workers: u64) -> Result<f64, AdvisorError> {
        match self {
            ScalingEfficiency::Constant(_) if workers == 1 => Ok(1.0),
            ScalingEfficiency::Constant(v) => Ok(*v),
            ScalingEfficiency::Table(points) => log2_interpolate(points, workers as f64)
                .ok_or(AdvisorError::EfficiencyOutOfRange { workers }),
        }
    }
}

fn check_efficiency(se: f64) -> Result<(), AdvisorError> {
    if se > 0.0 && se <= 1.0 {
        Ok(())
    } else {
        Err(AdvisorError::Invalid(format!("scaling efficiency {} outside (0,1]", se)))
    }
}
