use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use mdbspline::bspline::OpenKnotVector;
use mdbspline::sample;
use mdbspline::{ExtractionOperator, MdSpace};

// A longer chain of alternating-degree segments so the basis is wide enough
// for the per-point work to dominate.
fn wide_space(segments: usize) -> MdSpace {
    let mut kvs = Vec::with_capacity(segments);
    let mut continuity = Vec::new();
    for i in 0..segments {
        let p = 3 + (i % 3);
        let mut knots = vec![0.0; p + 1];
        knots.push(0.5);
        knots.push(1.5);
        knots.extend(vec![2.0; p + 1]);
        kvs.push(OpenKnotVector::new(knots, p).unwrap());
        if i > 0 {
            continuity.push(2);
        }
    }
    MdSpace::new(kvs, continuity, 0.0, None).unwrap()
}

fn bench_sampling(c: &mut Criterion) {
    let op = ExtractionOperator::build(wide_space(24)).unwrap();
    let mut group = c.benchmark_group("basis_sampling");
    for &points in &[2_000usize, 20_000] {
        let grid = sample::domain_grid(&op, points);
        group.throughput(Throughput::Elements(points as u64));
        group.bench_with_input(BenchmarkId::new("sequential", points), &grid, |b, grid| {
            b.iter(|| sample::sample_basis_seq(&op, grid, 1).unwrap());
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", points), &grid, |b, grid| {
            b.iter(|| sample::sample_basis_par(&op, grid, 1).unwrap());
        });
    }
    group.finish();
}

fn bench_extraction(c: &mut Criterion) {
    c.bench_function("extraction_build_24_segments", |b| {
        b.iter(|| ExtractionOperator::build(wide_space(24)).unwrap());
    });
}

criterion_group!(benches, bench_sampling, bench_extraction);
criterion_main!(benches);
