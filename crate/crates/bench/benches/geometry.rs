use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use skgeom::catalog;
use skgeom::curvature;
use skgeom::geometry::{self, MetricBundle};
use skgeom::jets::Jet;
use skgeom::periods::build_period_frame;
use skgeom::verify::{self, VerifyOptions};
use skgeom::C64;

fn point(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::new(0.2 + 0.1 * k as f64, -0.15)).collect()
}

fn jet_products(c: &mut Criterion) {
    for (nvars, order) in [(2, 5), (4, 5), (6, 5)] {
        let base = vec![C64::new(0.1, 0.2); nvars];
        let mut a = Jet::constant(&base, order, C64::new(2.0, 0.0));
        let mut b = Jet::constant(&base, order, C64::new(1.0, -1.0));
        for v in 0..nvars {
            a = &a + &Jet::variable(&base, order, v).scale(C64::new(0.3, v as f64));
            b = &b + &Jet::variable(&base, order, v).scale(C64::new(-0.7, 0.1));
        }
        c.bench_function(&format!("jet mul {nvars} vars order {order}"), |bench| {
            bench.iter(|| black_box(&a) * black_box(&b))
        });
    }
}

fn bundles(c: &mut Criterion) {
    for n in 1..=3 {
        let entry = catalog::quartic_perturbed(n, &catalog::default_quartic_extras(n)).unwrap();
        let z = point(n);
        let frame = build_period_frame(&entry.prepotential.jet_at(&z, 6).unwrap(), n).unwrap();
        c.bench_function(&format!("metric bundle n={n}"), |bench| {
            bench.iter(|| MetricBundle::from_frame(black_box(&frame)).unwrap())
        });
        let bundle = MetricBundle::from_frame(&frame).unwrap();
        c.bench_function(&format!("yukawa derivatives n={n}"), |bench| {
            bench.iter(|| geometry::covariant_derivative_yukawa(black_box(&bundle)).unwrap())
        });
        c.bench_function(&format!("hodge curvature n={n}"), |bench| {
            bench.iter(|| curvature::hodge_curvature(black_box(&bundle)).unwrap())
        });
    }
}

fn sweeps(c: &mut Criterion) {
    let entry = catalog::cubic(0.1).unwrap();
    let points = skgeom::scan::random_ball(1, 20, 0.9, 1);
    let opts = VerifyOptions::default();
    c.bench_function("hodge metric sweep cubic 20 points", |bench| {
        bench.iter(|| verify::verify_theorem12(&entry.prepotential, black_box(&points), &opts).unwrap())
    });
}

criterion_group!(benches, jet_products, bundles, sweeps);
criterion_main!(benches);
