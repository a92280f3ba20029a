//! Sample generation and filtering to the region where the metric is defined.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::CatalogEntry;
use crate::geometry::{self, GeometryError};
use crate::linalg;
use crate::periods;
use crate::C64;

pub const MIN_POTENTIAL: f64 = 1e-6;
pub const MIN_METRIC_EIGENVALUE: f64 = 1e-8;
/// Random samples default to this fraction of the entry's validity radius.
pub const DEFAULT_RADIUS_FRACTION: f64 = 0.9;
pub const MAX_SAMPLES: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("grid needs {expected} axes (real and imaginary part per coordinate), got {got}")]
    AxisCount { expected: usize, got: usize },
    #[error("axis {axis}: {reason}")]
    BadAxis { axis: usize, reason: &'static str },
    #[error("sample point {index} has {got} coordinates, expected {expected}")]
    PointDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("sampling yields {0} points, more than the limit of {MAX_SAMPLES}")]
    TooManyPoints(usize),
    #[error("invalid radius {0}")]
    BadRadius(f64),
    #[error("no sample point lies in the valid region ({rejected} rejected; first: {first})")]
    EmptyAccepted { rejected: usize, first: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![0.5 * (self.min + self.max)];
        }
        (0..self.count)
            .map(|k| self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Sampling {
    /// Tensor grid over `(Re z₁, Im z₁, Re z₂, …)`.
    Grid { axes: Vec<Axis> },
    /// Uniform in the ball of the given radius.
    Random {
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Points { points: Vec<Vec<C64>> },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Random {
            count: 20,
            radius: None,
            seed: None,
        }
    }
}

/// Uniform samples in the ball `|z| ≤ radius` of `C^n`.
pub fn random_ball(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let g: Vec<f64> = (0..2 * n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let r = radius * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
            (0..n)
                .map(|k| C64::new(g[2 * k], g[2 * k + 1]) * (r / norm))
                .collect()
        })
        .collect()
}

pub fn sample_points(sampling: &Sampling, entry: &CatalogEntry, default_seed: u64) -> Result<Vec<Vec<C64>>, ScanError> {
    let n = entry.n();
    match sampling {
        Sampling::Grid { axes } => {
            if axes.len() != 2 * n {
                return Err(ScanError::AxisCount {
                    expected: 2 * n,
                    got: axes.len(),
                });
            }
            let mut total: usize = 1;
            for (k, a) in axes.iter().enumerate() {
                if a.count == 0 {
                    return Err(ScanError::BadAxis {
                        axis: k,
                        reason: "count must be positive",
                    });
                }
                if !(a.min <= a.max) || !a.min.is_finite() || !a.max.is_finite() {
                    return Err(ScanError::BadAxis {
                        axis: k,
                        reason: "need finite min <= max",
                    });
                }
                total = total.saturating_mul(a.count);
            }
            if total > MAX_SAMPLES {
                return Err(ScanError::TooManyPoints(total));
            }
            let values: Vec<Vec<f64>> = axes.iter().map(Axis::values).collect();
            let mut points = Vec::with_capacity(total);
            let mut idx = vec![0usize; axes.len()];
            for _ in 0..total {
                points.push(
                    (0..n)
                        .map(|k| C64::new(values[2 * k][idx[2 * k]], values[2 * k + 1][idx[2 * k + 1]]))
                        .collect(),
                );
                for a in (0..axes.len()).rev() {
                    idx[a] += 1;
                    if idx[a] < axes[a].count {
                        break;
                    }
                    idx[a] = 0;
                }
            }
            Ok(points)
        }
        Sampling::Random {
            count,
            radius,
            seed,
        } => {
            if *count > MAX_SAMPLES {
                return Err(ScanError::TooManyPoints(*count));
            }
            let r = radius.unwrap_or(DEFAULT_RADIUS_FRACTION * entry.validity_radius);
            if !(r > 0.0) || !r.is_finite() {
                return Err(ScanError::BadRadius(r));
            }
            Ok(random_ball(n, *count, r, seed.unwrap_or(default_seed)))
        }
        Sampling::Points { points } => {
            for (index, p) in points.iter().enumerate() {
                if p.len() != n {
                    return Err(ScanError::PointDimension {
                        index,
                        expected: n,
                        got: p.len(),
                    });
                }
            }
            Ok(points.clone())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rejection {
    NonPositivePotential(f64),
    DegenerateMetric(f64),
    Failed(String),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NonPositivePotential(v) => write!(f, "e^{{-K}} <= 0 (value {v:e})"),
            Rejection::DegenerateMetric(v) => write!(f, "metric degenerate (min eigenvalue {v:e})"),
            Rejection::Failed(msg) => f.write_str(msg),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanResult {
    pub accepted: Vec<Vec<C64>>,
    pub rejected: Vec<(Vec<C64>, Rejection)>,
}

/// Decides whether a single point is usable.
pub fn classify_point(entry: &CatalogEntry, z: &[C64]) -> Result<(), Rejection> {
    let u = entry.prepotential.jet_at(z, 3).map_err(|e| Rejection::Failed(e.to_string()))?;
    let frame = periods::build_period_frame(&u, entry.n()).map_err(|e| Rejection::Failed(e.to_string()))?;
    match geometry::kahler_potential_and_metric(&frame) {
        Ok(b) => {
            let p = b.potential_weight().value().re;
            if p <= MIN_POTENTIAL {
                return Err(Rejection::NonPositivePotential(p));
            }
            let min = linalg::hermitian_eigenvalues(b.h())[0];
            if min <= MIN_METRIC_EIGENVALUE {
                return Err(Rejection::DegenerateMetric(min));
            }
            Ok(())
        }
        Err(GeometryError::NonPositivePotential(v)) => Err(Rejection::NonPositivePotential(v)),
        Err(GeometryError::SingularMetric(c)) => Err(Rejection::DegenerateMetric(1.0 / c)),
        Err(e) => Err(Rejection::Failed(e.to_string())),
    }
}

/// Splits points into accepted and rejected, logging each rejection.
pub fn domain_scan(entry: &CatalogEntry, points: &[Vec<C64>]) -> Result<ScanResult, ScanError> {
    let mut result = ScanResult::default();
    for z in points {
        match classify_point(entry, z) {
            Ok(()) => result.accepted.push(z.clone()),
            Err(reason) => {
                log::info!("rejected sample {z:?}: {reason}");
                result.rejected.push((z.clone(), reason));
            }
        }
    }
    if result.accepted.is_empty() {
        return Err(ScanError::EmptyAccepted {
            rejected: result.rejected.len(),
            first: result
                .rejected
                .first()
                .map(|r| r.1.to_string())
                .unwrap_or_else(|| "no points were sampled".into()),
        });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn grid_keeps_exactly_the_interior() {
        let entry = catalog::quadratic(1).unwrap();
        let axis = Axis {
            min: -1.6,
            max: 1.6,
            count: 9,
        };
        let grid = Sampling::Grid {
            axes: vec![axis.clone(), axis],
        };
        let points = sample_points(&grid, &entry, 0).unwrap();
        assert_eq!(points.len(), 81);
        let scan = domain_scan(&entry, &points).unwrap();
        for z in &scan.accepted {
            assert!(z[0].norm_sqr() < 2.0);
        }
        for (z, _) in &scan.rejected {
            assert!(z[0].norm_sqr() >= 2.0 - 1e-6);
        }
        assert_eq!(scan.accepted.len() + scan.rejected.len(), 81);
    }

    #[test]
    fn point_outside_is_rejected_with_reason() {
        let entry = catalog::quadratic(1).unwrap();
        let r = classify_point(&entry, &[C64::new(2.0, 0.0)]).unwrap_err();
        assert!(matches!(r, Rejection::NonPositivePotential(v) if (v + 2.0).abs() < 1e-12));
        assert!(r.to_string().starts_with("e^{-K} <= 0"));
        let err = domain_scan(&entry, &[vec![C64::new(2.0, 0.0)]]).unwrap_err();
        assert!(matches!(err, ScanError::EmptyAccepted { rejected: 1, .. }));
    }

    #[test]
    fn cubic_disc_is_mostly_valid() {
        let entry = catalog::cubic(0.05).unwrap();
        let pts = sample_points(&Sampling::default(), &entry, 7).unwrap();
        assert!(pts.iter().all(|z| z[0].norm() <= 0.9 + 1e-12));
        assert!(!domain_scan(&entry, &pts).unwrap().accepted.is_empty());
    }

    #[test]
    fn random_samples_are_reproducible() {
        assert_eq!(random_ball(2, 5, 1.0, 3), random_ball(2, 5, 1.0, 3));
        assert_ne!(random_ball(2, 5, 1.0, 3), random_ball(2, 5, 1.0, 4));
    }
}
