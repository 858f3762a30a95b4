use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use ustar_bench::entry;
use ustar_core::probe::{parallel_transport, survey_loop, SurveyOptions};
use ustar_core::qk2ustar::{ModifiedConnection, QkData};

fn transport(c: &mut Criterion) {
    let e = entry("bergman");
    let base: Vec<f64> = e.ranges.iter().map(|(a, b)| 0.5 * (a + b)).collect();
    let d = QkData::new(e.metric.clone(), e.killing.clone().unwrap(), e.orientation).unwrap();
    let (d, _) = d.calibrate(&e.sample(10, 1)).unwrap();
    let conn = ModifiedConnection::new(d);
    let opts = SurveyOptions::default();
    let lp = survey_loop(&base, 0, &opts).unwrap();
    let mut g = c.benchmark_group("transport");
    g.sample_size(10);
    g.bench_function("bergman_loop", |b| b.iter(|| parallel_transport(&conn, black_box(&lp), opts.tol).unwrap()));
    g.finish();
}

criterion_group!(benches, transport);
criterion_main!(benches);
