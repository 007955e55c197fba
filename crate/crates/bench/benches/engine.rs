use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use boundaryk::ktheory::{eta_matrix, kernel_eta, kernel_tau, MembershipEngine};
use boundaryk::zlinalg::{snf, IntMatrix};
use boundaryk::{DepthFunction, GroupSpec, RelationSpec};

fn bench_eta_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_eta");
    group.sample_size(10);
    for (d, n) in [(2, 3), (2, 5), (3, 3), (3, 4)] {
        let spec = GroupSpec::new(d).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("d{d}_n{n}")), &n, |b, &n| {
            b.iter(|| kernel_eta(&spec, n).unwrap())
        });
    }
    group.finish();
}

fn bench_eta_matrix(c: &mut Criterion) {
    let spec = GroupSpec::new(3).unwrap();
    c.bench_function("eta_matrix_d3_n4", |b| b.iter(|| eta_matrix(&spec, black_box(4)).unwrap()));
}

fn bench_tau_kernel(c: &mut Criterion) {
    let spec = GroupSpec::new(3).unwrap();
    let rel = RelationSpec::new(spec, [0]).unwrap();
    let mut group = c.benchmark_group("kernel_tau");
    group.sample_size(10);
    group.bench_function("d3_a_n4", |b| b.iter(|| kernel_tau(&rel, 4).unwrap()));
    group.finish();
}

fn bench_membership(c: &mut Criterion) {
    let spec = GroupSpec::new(3).unwrap();
    let rel = RelationSpec::full(spec);
    let qa = DepthFunction::indicator_q(&spec, &spec.generator(0).unwrap()).unwrap();
    let qb = DepthFunction::indicator_q(&spec, &spec.generator(1).unwrap()).unwrap();
    let target = qa.sub(&qb).unwrap();
    c.bench_function("membership_d3_qa_minus_qb", |b| {
        b.iter(|| MembershipEngine::new(spec).im_tau_membership(&rel, &target, 4).unwrap())
    });
}

fn bench_snf(c: &mut Criterion) {
    let rows: Vec<Vec<BigInt>> = (0..6)
        .map(|i| (0..6).map(|j| BigInt::from(((i * 7 + j * 3) % 11) as i64 - 5)).collect())
        .collect();
    let m = IntMatrix::from_rows(&rows).unwrap();
    c.bench_function("snf_6x6", |b| b.iter(|| snf(black_box(&m))));
}

criterion_group!(benches, bench_eta_kernel, bench_eta_matrix, bench_tau_kernel, bench_membership, bench_snf);
criterion_main!(benches);
