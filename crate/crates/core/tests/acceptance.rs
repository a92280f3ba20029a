//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest harness
//! so the lines are always printed; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skgeom::catalog::{self, CatalogEntry, PrepotentialSource};
use skgeom::config::{RunConfig, Suite};
use skgeom::curvature::{self, SignConvention};
use skgeom::geometry::{self, MetricBundle};
use skgeom::jets::{finite_difference_jet, Jet, DEFAULT_FD_STEP};
use skgeom::scan::{self, Sampling};
use skgeom::verify::{self, VerifyOptions};
use skgeom::{linalg, report, suite, C64};

const TOL_ZERO: f64 = 1e-10;
const TOL_IDENTITY: f64 = 1e-8;
const TOL_INEQUALITY: f64 = 1e-6;
const TOL_ORACLE: f64 = 1e-6;
const POINTS: usize = 20;
const SEED: u64 = 20240611;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn entries() -> Vec<CatalogEntry> {
    let mut v: Vec<CatalogEntry> = (1..=3).map(|n| catalog::quadratic(n).unwrap()).collect();
    v.push(catalog::cubic(0.1).unwrap());
    for n in 1..=3 {
        v.push(catalog::quartic_perturbed(n, &catalog::default_quartic_extras(n)).unwrap());
    }
    v
}

fn label(e: &CatalogEntry) -> String {
    format!("{}(n={})", e.name, e.n())
}

fn accepted(entry: &CatalogEntry, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let pts = scan::random_ball(entry.n(), count, scan::DEFAULT_RADIUS_FRACTION * entry.validity_radius, seed);
    scan::domain_scan(entry, &pts).expect("non-empty sample").accepted
}

/// Keeps sampling until `count` points are accepted.
fn accepted_exactly(entry: &CatalogEntry, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        out.extend(accepted(entry, count, s));
        s += 1;
    }
    out.truncate(count);
    out
}

fn bundle(entry: &CatalogEntry, z: &[C64]) -> MetricBundle {
    verify::bundle_at(&entry.prepotential, z, &VerifyOptions::default()).unwrap()
}

fn opts() -> VerifyOptions {
    VerifyOptions {
        seed: SEED,
        ..VerifyOptions::default()
    }
}

fn space_form(h: &DMatrix<C64>) -> Vec<C64> {
    let n = h.nrows();
    let mut v = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    v.push(h[(i, j)] * h[(k, l)] + h[(i, l)] * h[(k, j)]);
                }
            }
        }
    }
    v
}

fn quadratic_hodge_is_twice_wp() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let e = catalog::quadratic(n).unwrap();
        for z in accepted(&e, POINTS, SEED + n as u64) {
            let b = bundle(&e, &z);
            let f0 = geometry::covariant_derivative_yukawa(&b).unwrap().f0_value();
            let p = linalg::max_abs(&b.p().unwrap());
            let d = linalg::max_abs(&(b.hodge().unwrap() - b.h() * c(2.0, 0.0)));
            worst = worst.max(f0.abs()).max(p).max(d);
        }
    }
    ensure(worst <= TOL_ZERO, || format!("max of f0, |P|, |hH-2h| = {worst:e}"))?;
    Ok(format!("max of f0, |P|, |hH-2h| over n=1..3 = {worst:.2e}"))
}

fn quadratic_space_form_and_parallel() -> Outcome {
    let mut r_err: f64 = 0.0;
    let mut nabla: f64 = 0.0;
    for n in 1..=3 {
        let e = catalog::quadratic(n).unwrap();
        for z in accepted_exactly(&e, POINTS, SEED + 10 * n as u64) {
            let b = bundle(&e, &z);
            let r = curvature::kahler_curvature_generic(b.metric_jets(), b.inverse_jets())
                .unwrap()
                .in_convention(SignConvention::Strominger);
            let expected = space_form(b.h());
            for (a, x) in r.data().iter().zip(&expected) {
                r_err = r_err.max((a - x).norm());
            }
            nabla = nabla.max(curvature::weil_petersson_curvature_derivative(&b).unwrap().norm);
        }
    }
    ensure(r_err < TOL_IDENTITY, || format!("|R - (hh+hh)| = {r_err:e}"))?;
    ensure(nabla < TOL_IDENTITY, || format!("|nabla R| = {nabla:e}"))?;
    Ok(format!("|R - (hh+hh)| = {r_err:.2e}, |nabla R| = {nabla:.2e}"))
}

fn ricci_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for e in entries().into_iter().filter(|e| e.name != "quartic-perturbed") {
        let r = verify::cross_check_ricci(&e.prepotential, &accepted(&e, POINTS, SEED), &opts()).unwrap();
        ensure(r.pass && -r.min_margin() < TOL_IDENTITY, || {
            format!("{}: residual {:e}", label(&e), -r.min_margin())
        })?;
        worst = worst.max(-r.min_margin());
    }
    let e = catalog::cubic(0.1).unwrap();
    let b = bundle(&e, &[c(0.0, 0.0)]);
    let corrupted = verify::ricci_residual_with(&b, b.yukawa().unwrap().perturbed(0, 0, 0, c(0.1, 0.0))).unwrap();
    ensure(corrupted > 1e-3, || format!("corrupted F residual only {corrupted:e}"))?;
    Ok(format!("max residual {worst:.2e}; corrupted-F control {corrupted:.2e}"))
}

fn engines_agree() -> Outcome {
    let mut worst: f64 = 0.0;
    for e in entries() {
        let pts = accepted_exactly(&e, POINTS, SEED + 1);
        let reports = verify::verify_curvature_engines(&e.prepotential, &pts, &opts()).unwrap();
        for r in &reports {
            ensure(r.pass, || format!("{} {}: {:e}", label(&e), r.claim, r.min_margin()))?;
        }
        worst = worst.max(-reports[0].min_margin());
    }
    ensure(worst < TOL_IDENTITY, || format!("max difference {worst:e}"))?;
    Ok(format!("max relative difference over 7 entries x {POINTS} points = {worst:.2e}"))
}

fn hodge_curvature_bounds() -> Outcome {
    let mut lines = Vec::new();
    let mut list: Vec<CatalogEntry> = (1..=3).map(|n| catalog::quadratic(n).unwrap()).collect();
    list.push(catalog::cubic(0.1).unwrap());
    for e in &list {
        let reports = verify::verify_theorem12(&e.prepotential, &accepted(e, POINTS, SEED), &opts()).unwrap();
        for r in &reports {
            ensure(r.tolerance <= TOL_INEQUALITY && r.pass, || {
                format!("{} {}: min margin {:e}", label(e), r.claim, r.min_margin())
            })?;
        }
        lines.push(format!(
            "{} min margins {:.3}",
            label(e),
            reports.iter().map(|r| r.min_margin()).fold(f64::INFINITY, f64::min)
        ));
    }
    // constant holomorphic sectional curvature −1 of 2h on the one-dimensional quadratic slice
    let e = catalog::quadratic(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut dev: f64 = 0.0;
    for z in accepted(&e, POINTS, SEED + 7) {
        let b = bundle(&e, &z);
        let r = curvature::hodge_curvature(&b).unwrap();
        let hodge = b.hodge().unwrap();
        for _ in 0..8 {
            let xi = verify::random_unit_direction(&mut rng, &hodge).unwrap();
            let s = curvature::sectional_evaluators(&r, &hodge, &xi, &xi).unwrap();
            dev = dev.max((s.holomorphic_sectional + 1.0).abs());
        }
    }
    ensure(dev < TOL_IDENTITY, || format!("|H + 1| = {dev:e}"))?;
    lines.push(format!("quadratic(n=1) |H_H + 1| = {dev:.1e} < 0.8 = 1 - alpha slack"));
    Ok(lines.join("; "))
}

fn yukawa_chain_on_cubic() -> Outcome {
    let e = catalog::cubic(0.1).unwrap();
    let pts = accepted_exactly(&e, 50, SEED);
    let reports = verify::verify_yukawa_estimates(&e.prepotential, &pts, e.complete, &opts()).unwrap();
    for r in &reports[..2] {
        ensure(r.points.len() == 50 && r.tolerance == TOL_INEQUALITY && r.pass, || {
            format!("{}: min margin {:e}", r.claim, r.min_margin())
        })?;
    }
    Ok(format!(
        "50 points: laplacian min margin {:.3e}, gradient min margin {:.3e}",
        reports[0].min_margin(),
        reports[1].min_margin()
    ))
}

fn bound_calculator() -> Outcome {
    let v = verify::max_principle_bound(1.0, 6.0, 0.0, 2.0).unwrap();
    ensure((v - 6f64.sqrt()).abs() <= f64::EPSILON * 6f64.sqrt(), || format!("got {v}"))?;
    ensure((v - verify::yukawa_sup_bound(3)).abs() <= 4.0 * f64::EPSILON, || {
        "does not match sqrt(n(n+3)/3) at n = 3".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..100 {
        let c1 = rng.random_range(0.01..10.0);
        let c2 = rng.random_range(0.0..50.0);
        let c3 = rng.random_range(0.0..50.0);
        let a = rng.random_range(1.01..6.0);
        let d = rng.random_range(0.0..5.0);
        let base = verify::max_principle_bound(c1, c2, c3, a).unwrap();
        let ok = verify::max_principle_bound(c1, c2 + d, c3, a).unwrap() >= base
            && verify::max_principle_bound(c1, c2, c3 + d, a).unwrap() >= base
            && verify::max_principle_bound(c1 + d, c2, c3, a).unwrap() <= base;
        ensure(ok, || format!("monotonicity fails at ({c1}, {c2}, {c3}, {a}) + {d}"))?;
    }
    Ok(format!("bound(1,6,0,2) = {v:.15}; monotone on 100 random triples"))
}

fn hodge_riemann_everywhere() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut min_pos = f64::INFINITY;
    for e in entries() {
        let pts = accepted(&e, POINTS, SEED + 3);
        let mut reports = verify::verify_hodge_riemann(&e.prepotential, &pts, &opts()).unwrap();
        reports.push(verify::verify_horizontality(&e.prepotential, &pts, &opts()).unwrap());
        for r in &reports {
            ensure(r.pass, || format!("{} {}: {:e}", label(&e), r.claim, r.min_margin()))?;
            if r.claim == "weil-positivity" {
                ensure(r.min_margin() > 0.0, || format!("{}: positivity {:e}", label(&e), r.min_margin()))?;
                min_pos = min_pos.min(r.min_margin());
            } else {
                ensure(-r.min_margin() < TOL_ZERO, || format!("{} {}", label(&e), r.claim))?;
                worst = worst.max(-r.min_margin());
            }
        }
    }
    Ok(format!("max relation/horizontality residual {worst:.2e}; min Weil form {min_pos:.3e}"))
}

fn siegel_quadratic() -> Outcome {
    let mut worst_sym: f64 = 0.0;
    let mut min_y = f64::INFINITY;
    for n in 1..=3 {
        let e = catalog::quadratic(n).unwrap();
        let reports = suite::verify_siegel(&e, &accepted(&e, POINTS, SEED + 5), &opts()).unwrap();
        ensure(reports.len() == 3, || "ray check missing".into())?;
        for r in &reports {
            ensure(r.pass, || format!("n={n} {}: {:e}", r.claim, r.min_margin()))?;
        }
        ensure(reports[1].min_margin() > 0.0 && reports[2].min_margin() > 0.0, || {
            format!("n={n}: strict positivity or monotonicity fails")
        })?;
        worst_sym = worst_sym.max(-reports[0].min_margin());
        min_y = min_y.min(reports[1].min_margin());
    }
    ensure(worst_sym < TOL_ZERO, || format!("asymmetry {worst_sym:e}"))?;
    Ok(format!("max |tau - tau^T| = {worst_sym:.2e}; min eig Y = {min_y:.3e}; ray strictly decreasing"))
}

fn relative_error(a: &Jet, b: &Jet) -> f64 {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| (x - y).norm() / x.norm().max(1.0))
        .fold(0.0, f64::max)
}

fn oracle_and_scaling() -> Outcome {
    let mut worst: f64 = 0.0;
    for e in entries() {
        let u = e.prepotential.clone();
        for z in accepted(&e, 3, SEED + 9) {
            let analytic = u.jet_at(&z, 4).unwrap();
            let fd = finite_difference_jet(&|p: &[C64]| u.evaluate(p).unwrap(), &z, 4, DEFAULT_FD_STEP).unwrap();
            worst = worst.max(relative_error(&analytic, &fd));
            // a non-polynomial composite
            let shifted = &analytic + &Jet::constant(&z, 4, c(3.0, 0.5));
            let composite = shifted.reciprocal().unwrap();
            let g = |p: &[C64]| 1.0 / (u.evaluate(p).unwrap() + c(3.0, 0.5));
            let fd = finite_difference_jet(&g, &z, 4, DEFAULT_FD_STEP).unwrap();
            worst = worst.max(relative_error(&composite, &fd));
        }
    }
    ensure(worst < TOL_ORACLE, || format!("jet vs finite differences {worst:e}"))?;

    let lambda = c(2.0, 1.0);
    let scaled = VerifyOptions {
        scale: lambda,
        ..VerifyOptions::default()
    };
    let mut drift: f64 = 0.0;
    for e in entries() {
        for z in accepted(&e, 3, SEED + 11) {
            let a = verify::bundle_at(&e.prepotential, &z, &VerifyOptions::default()).unwrap();
            let b = verify::bundle_at(&e.prepotential, &z, &scaled).unwrap();
            let ya = geometry::covariant_derivative_yukawa(&a).unwrap();
            let yb = geometry::covariant_derivative_yukawa(&b).unwrap();
            let ra = curvature::kahler_curvature_generic(a.metric_jets(), a.inverse_jets()).unwrap();
            let rb = curvature::kahler_curvature_generic(b.metric_jets(), b.inverse_jets()).unwrap();
            let rha = curvature::hodge_curvature(&a).unwrap();
            let rhb = curvature::hodge_curvature(&b).unwrap();
            drift = drift
                .max(linalg::max_abs(&(a.h() - b.h())))
                .max(linalg::max_abs(&(a.p().unwrap() - b.p().unwrap())))
                .max((ya.f0_value() - yb.f0_value()).abs())
                .max((ya.f1_value() - yb.f1_value()).abs())
                .max(ra.max_difference(&rb))
                .max(rha.max_difference(&rhb));
        }
    }
    ensure(drift < TOL_IDENTITY, || format!("scale drift {drift:e}"))?;
    Ok(format!("jet/FD relative error to order 4 = {worst:.2e}; drift under (2+i) rescaling = {drift:.2e}"))
}

fn deterministic_reports() -> Outcome {
    let config = RunConfig {
        sampling: Sampling::Random {
            count: 6,
            radius: None,
            seed: None,
        },
        seed: SEED,
        suites: Suite::ALL.to_vec(),
        ..RunConfig::for_source(PrepotentialSource::catalog("cubic"))
    };
    let a = report::to_json(&suite::run_suite(&config).unwrap()).unwrap();
    let b = report::to_json(&suite::run_suite(&config).unwrap()).unwrap();
    ensure(a.as_bytes() == b.as_bytes(), || "reports differ".into())?;
    let ca = report::to_csv(&suite::run_suite(&config).unwrap()).unwrap();
    let cb = report::to_csv(&suite::run_suite(&config).unwrap()).unwrap();
    ensure(ca == cb, || "csv reports differ".into())?;
    Ok(format!("two runs produce identical {}-byte JSON reports", a.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("quadratic slice: F = 0, P = 0, hH = 2h", quadratic_hodge_is_twice_wp),
        ("quadratic slice: R = hh + hh and parallel", quadratic_space_form_and_parallel),
        ("Ricci identity from both engines", ricci_identity),
        ("generic vs closed curvature formula", engines_agree),
        ("Hodge metric curvature bounds", hodge_curvature_bounds),
        ("Yukawa differential inequality chain", yukawa_chain_on_cubic),
        ("maximum-principle bound calculator", bound_calculator),
        ("Hodge-Riemann relations and horizontality", hodge_riemann_everywhere),
        ("Siegel period matrix", siegel_quadratic),
        ("finite-difference oracle and rescaling", oracle_and_scaling),
        ("deterministic reports", deterministic_reports),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", k + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL [{:>2}] {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
