//! Special Kähler geometry of horizontal slices in Bryant–Griffiths normal form.
//!
//! A slice is given by a holomorphic prepotential `u`. From exact jets of `u`
//! at a point the crate builds the period vector, the Hodge filtration, the
//! Weil–Petersson and Hodge metrics, the Yukawa coupling and curvature, and
//! checks the associated identities and inequalities at sampled points.

// NaN must fail validation, so `!(x > 0.0)` is deliberate; index loops mirror tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod catalog;
pub mod config;
pub mod curvature;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod periods;
pub mod report;
pub mod scan;
pub mod siegel;
pub mod suite;
pub mod verify;

use thiserror::Error;

pub type C64 = num_complex::Complex64;

pub use catalog::{load_prepotential, CatalogEntry, PrepotentialSource};
pub use config::{parse_config, Format, RunConfig, Suite};
pub use curvature::{CurvatureTensor, RicciTensor, SignConvention};
pub use geometry::{MetricBundle, Yukawa, YukawaJet};
pub use jets::{Jet, JetMatrix, Prepotential};
pub use periods::{build_period_frame, PeriodFrame, SymplecticForm};
pub use siegel::SiegelPoint;
pub use suite::{run_suite, RunReport};
pub use verify::{max_principle_bound, VerificationReport, VerifyOptions};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] jets::JetError),
    #[error(transparent)]
    Period(#[from] periods::PeriodError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Curvature(#[from] curvature::CurvatureError),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
    #[error(transparent)]
    Catalog(#[from] catalog::CatalogError),
    #[error(transparent)]
    Siegel(#[from] siegel::SiegelError),
    #[error(transparent)]
    Scan(#[from] scan::ScanError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
