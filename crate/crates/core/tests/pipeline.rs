use skgeom::catalog::{self, CatalogError, Monomial, PrepotentialSource};
use skgeom::config::{parse_config, ConfigError, RunConfig, Suite};
use skgeom::periods;
use skgeom::report;
use skgeom::scan::Sampling;
use skgeom::suite::{run_suite, RunReport};
use skgeom::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn config(source: PrepotentialSource, suites: Vec<Suite>, count: usize) -> RunConfig {
    RunConfig {
        sampling: Sampling::Random {
            count,
            radius: None,
            seed: None,
        },
        seed: 11,
        suites,
        ..RunConfig::for_source(source)
    }
}

#[test]
fn quadratic_two_dimensional_full_run() {
    let r = run_suite(&config(
        PrepotentialSource::Catalog {
            name: "quadratic".into(),
            n: Some(2),
            c: None,
            extra: None,
        },
        Suite::ALL.to_vec(),
        10,
    ))
    .unwrap();
    assert!(r.all_pass(), "{:?}", r.summary.failed_checks);
    assert_eq!(r.summary.statistics["f0_sup"], 0.0);
    assert!(r.summary.statistics["nabla_r_sup"] < 1e-8);
    assert!(r.entry("yukawa-sup-bound").unwrap().asserted);
    assert!(r.entry("parallel-curvature").unwrap().asserted);
}

#[test]
fn cubic_curvature_is_reported_but_not_asserted() {
    let r = run_suite(&config(
        PrepotentialSource::catalog("cubic"),
        vec![Suite::ParallelCurvature, Suite::YukawaEstimates],
        8,
    ))
    .unwrap();
    let p = r.entry("parallel-curvature").unwrap();
    assert!(!p.asserted);
    assert!(!p.pass);
    assert!(r.summary.statistics["nabla_r_sup"] > 1e-3);
    assert!(r.all_pass());
}

#[test]
fn quartic_perturbed_three_dimensional() {
    let r = run_suite(&config(
        PrepotentialSource::Catalog {
            name: "quartic-perturbed".into(),
            n: Some(3),
            c: None,
            extra: None,
        },
        Suite::ALL.to_vec(),
        5,
    ))
    .unwrap();
    assert!(r.all_pass(), "{:?}", r.summary.failed_checks);
    assert!(r.entry("ray-monotone").is_none());
}

#[test]
fn custom_quartic_extras() {
    let source = PrepotentialSource::Catalog {
        name: "quartic-perturbed".into(),
        n: Some(2),
        c: None,
        extra: Some(vec![Monomial {
            exponent: vec![1, 2],
            coefficient: c(0.0, 0.08),
        }]),
    };
    let r = run_suite(&config(source, vec![Suite::Theorem12, Suite::RicciCrosscheck], 5)).unwrap();
    assert!(r.all_pass(), "{:?}", r.summary.failed_checks);
}

#[test]
fn report_round_trips_through_json() {
    let r = run_suite(&config(PrepotentialSource::catalog("cubic"), vec![Suite::HodgeRiemann], 4)).unwrap();
    let text = report::to_json(&r).unwrap();
    let back: RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn grid_outside_region_is_logged() {
    let text = r#"{
        "prepotential": {"catalog": {"name": "quadratic"}},
        "sampling": {"grid": {"axes": [{"min": -1.6, "max": 1.6, "count": 5}, {"min": 0.0, "max": 0.0, "count": 1}]}},
        "suites": ["hodge-riemann"]
    }"#;
    let r = run_suite(&parse_config(text).unwrap()).unwrap();
    assert_eq!(r.summary.accepted_points, 3);
    assert_eq!(r.summary.rejected_points, 2);
    assert!(r.rejections[0].reason.starts_with("e^{-K} <= 0"));
}

#[test]
fn config_errors_are_positioned() {
    let text = "{\n  \"prepotential\": {\"catalog\": {\"name\": \"quadratic\"}},\n  \"suites\": [\"siegel\", \"riemann\"]\n}";
    match parse_config(text) {
        Err(ConfigError::Parse { line, column, message }) => {
            assert_eq!(line, 3);
            assert!(column > 0);
            assert!(message.contains("unknown variant `riemann`"), "{message}");
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn normalization_failure_aborts_run() {
    let source = PrepotentialSource::Inline {
        n: 1,
        monomials: vec![
            Monomial {
                exponent: vec![0],
                coefficient: c(0.0, -1.0),
            },
            Monomial {
                exponent: vec![1],
                coefficient: c(1.0, 0.0),
            },
            Monomial {
                exponent: vec![2],
                coefficient: c(0.0, 0.5),
            },
        ],
        radius: None,
    };
    match run_suite(&config(source, vec![Suite::HodgeRiemann], 3)) {
        Err(skgeom::Error::Catalog(CatalogError::Normalization(f))) => assert_eq!(f.len(), 1),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn swapped_frame_fails_horizontality() {
    let u = catalog::cubic(0.1).unwrap().prepotential;
    let frame = periods::build_period_frame(&u.jet_at(&[c(0.2, 0.1)], 4).unwrap(), 1).unwrap();
    assert!(periods::check_horizontality(&frame).unwrap().passes(1e-10));
    let bad = frame.with_swapped_components(0, 1);
    assert!(!periods::check_horizontality(&bad).unwrap().passes(1e-10));
}
