//! Runs the selected suites for one configuration and assembles the report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{self, CatalogEntry};
use crate::config::{RunConfig, Suite};
use crate::curvature::SignConvention;
use crate::scan::{self, ScanResult};
use crate::siegel;
use crate::verify::{self, PointMargin, VerificationReport, VerifyOptions, TOL_HODGE_RIEMANN};
use crate::{Error, C64};

/// Samples along the ray used for the Siegel degeneration check.
pub const RAY_SAMPLES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub suite: Suite,
    pub claim: String,
    pub paper_anchor: String,
    pub tolerance: f64,
    pub asserted: bool,
    pub pass: bool,
    pub min_margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub points: Vec<PointMargin>,
}

impl SuiteEntry {
    fn from_report(suite: Suite, r: VerificationReport) -> SuiteEntry {
        SuiteEntry {
            suite,
            min_margin: r.min_margin(),
            claim: r.claim,
            paper_anchor: r.paper_anchor,
            tolerance: r.tolerance,
            asserted: r.asserted,
            pass: r.pass,
            seed: r.seed,
            points: r.points,
        }
    }

    pub fn ok(&self) -> bool {
        !self.asserted || self.pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectionRecord {
    pub z: Vec<C64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub entry: String,
    pub description: String,
    pub n: usize,
    pub complete: bool,
    pub accepted_points: usize,
    pub rejected_points: usize,
    pub checks: usize,
    pub asserted_checks: usize,
    pub failed_checks: Vec<String>,
    pub all_pass: bool,
    pub alpha: f64,
    pub siegel_sign: f64,
    pub curvature_convention: SignConvention,
    /// Observed extremes, e.g. `f0_sup` and `nabla_r_sup`.
    pub statistics: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config_echo: RunConfig,
    pub per_suite: Vec<SuiteEntry>,
    pub rejections: Vec<RejectionRecord>,
    pub summary: Summary,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.summary.all_pass
    }

    pub fn entry(&self, claim: &str) -> Option<&SuiteEntry> {
        self.per_suite.iter().find(|e| e.claim == claim)
    }
}

fn options(config: &RunConfig) -> VerifyOptions {
    VerifyOptions {
        order: config.order,
        seed: config.seed,
        directions: config.directions,
        tol_identity: config.tolerances.identity,
        tol_inequality: config.tolerances.inequality,
        scale: C64::new(1.0, 0.0),
    }
}

/// Symmetry and positivity of `τ` at every point, plus degeneration along a ray on the quadratic slice.
pub fn verify_siegel(entry: &CatalogEntry, points: &[Vec<C64>], opts: &VerifyOptions) -> Result<Vec<VerificationReport>, Error> {
    let order = opts.order.min(4);
    let local = VerifyOptions { order, ..*opts };
    let mut sym = Vec::with_capacity(points.len());
    let mut pos = Vec::with_capacity(points.len());
    for z in points {
        let p = siegel::period_matrix(&verify::frame_at(&entry.prepotential, z, &local)?)?;
        sym.push(PointMargin {
            z: z.clone(),
            margin: -p.symmetry_defect(),
        });
        pos.push(PointMargin {
            z: z.clone(),
            margin: p.min_eig_y(),
        });
    }
    let mut out = vec![
        VerificationReport::new("tau-symmetric", "τ = τᵀ", TOL_HODGE_RIEMANN, sym),
        VerificationReport::new("im-tau-positive", "Y = Im τ positive definite", 0.0, pos),
    ];
    if entry.is_quadratic() {
        let n = entry.n();
        let mut ray = Vec::with_capacity(RAY_SAMPLES);
        for k in 0..RAY_SAMPLES {
            let t = entry.validity_radius * k as f64 / RAY_SAMPLES as f64;
            let mut z = vec![C64::new(0.0, 0.0); n];
            z[0] = C64::new(t, 0.0);
            let y = siegel::period_matrix(&verify::frame_at(&entry.prepotential, &z, &local)?)?.min_eig_y();
            ray.push((z, y));
        }
        let margins = ray
            .windows(2)
            .map(|w| PointMargin {
                z: w[1].0.clone(),
                margin: w[0].1 - w[1].1,
            })
            .collect();
        out.push(VerificationReport::new(
            "ray-monotone",
            "min eig Y decreases toward |z|² = 2",
            0.0,
            margins,
        ));
    }
    Ok(out)
}

fn run_one(
    suite: Suite,
    entry: &CatalogEntry,
    points: &[Vec<C64>],
    opts: &VerifyOptions,
) -> Result<Vec<VerificationReport>, Error> {
    let u = &entry.prepotential;
    Ok(match suite {
        Suite::HodgeRiemann => verify::verify_hodge_riemann(u, points, opts)?,
        Suite::Horizontality => vec![verify::verify_horizontality(u, points, opts)?],
        Suite::Theorem12 => verify::verify_theorem12(u, points, opts)?,
        Suite::YukawaEstimates => verify::verify_yukawa_estimates(u, points, entry.complete, opts)?,
        Suite::RicciCrosscheck => vec![verify::cross_check_ricci(u, points, opts)?],
        Suite::CurvatureCrossengine => verify::verify_curvature_engines(u, points, opts)?,
        Suite::ParallelCurvature => vec![verify::verify_parallel_curvature(u, points, entry.complete, opts)?],
        Suite::Siegel => verify_siegel(entry, points, opts)?,
    })
}

/// Loads the prepotential, samples, filters and runs every selected suite.
pub fn run_suite(config: &RunConfig) -> Result<RunReport, Error> {
    config.validate()?;
    let entry = catalog::load_prepotential(&config.prepotential)?;
    let candidates = scan::sample_points(&config.sampling, &entry, config.seed)?;
    let ScanResult { accepted, rejected } = scan::domain_scan(&entry, &candidates)?;
    let opts = options(config);

    let mut per_suite = Vec::new();
    for suite in config.canonical_suites() {
        log::info!("running {} on {} points", suite.name(), accepted.len());
        for r in run_one(suite, &entry, &accepted, &opts)? {
            per_suite.push(SuiteEntry::from_report(suite, r));
        }
    }

    let mut statistics = BTreeMap::new();
    if let Some(e) = per_suite.iter().find(|e| e.claim == "yukawa-sup-bound") {
        statistics.insert("f0_sup".into(), verify::yukawa_sup_bound(entry.n()) - e.min_margin);
        statistics.insert("f0_bound".into(), verify::yukawa_sup_bound(entry.n()));
    }
    if let Some(e) = per_suite.iter().find(|e| e.claim == "parallel-curvature") {
        statistics.insert("nabla_r_sup".into(), -e.min_margin);
    }
    if let Some(e) = per_suite.iter().find(|e| e.claim == "ricci-identity") {
        statistics.insert("ricci_residual_max".into(), -e.min_margin);
    }
    if let Some(e) = per_suite.iter().find(|e| e.claim == "curvature-crossengine") {
        statistics.insert("crossengine_residual_max".into(), -e.min_margin);
    }

    let failed_checks: Vec<String> = per_suite
        .iter()
        .filter(|e| !e.ok())
        .map(|e| e.claim.clone())
        .collect();
    let summary = Summary {
        entry: entry.name.clone(),
        description: entry.description.clone(),
        n: entry.n(),
        complete: entry.complete,
        accepted_points: accepted.len(),
        rejected_points: rejected.len(),
        checks: per_suite.len(),
        asserted_checks: per_suite.iter().filter(|e| e.asserted).count(),
        all_pass: failed_checks.is_empty(),
        failed_checks,
        alpha: verify::alpha(entry.n()),
        siegel_sign: siegel::SIEGEL_SIGN,
        curvature_convention: SignConvention::Standard,
        statistics,
    };
    // where the report is written does not affect its content
    let mut config_echo = config.clone();
    config_echo.output.dir = None;
    Ok(RunReport {
        schema_version: crate::config::SCHEMA_VERSION,
        config_echo,
        per_suite,
        rejections: rejected
            .into_iter()
            .map(|(z, r)| RejectionRecord {
                z,
                reason: r.to_string(),
            })
            .collect(),
        summary,
    })
}
