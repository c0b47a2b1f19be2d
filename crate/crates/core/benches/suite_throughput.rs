//! Throughput of the suite sample sweeps: the rayon pool against the
//! sequential fallback, on two representative workloads (a cheap algebraic
//! identity and an expensive factorization-backed cross-check). The two paths
//! produce bit-identical reports; this measures what the parallel default
//! buys on each.

use bowtie_core::algebra::join_pair;
use bowtie_core::batch::{sweep_max, sweep_max_seq};
use bowtie_core::groups::{random_t2g, t2g_dist, T2gElement};
use bowtie_core::instances;
use bowtie_core::kernel::Coords;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

fn bench_algebra_axioms(c: &mut Criterion) {
    let pair = instances::su2k_matched_pair();
    let eval = |rng: &mut rand_chacha::ChaCha8Rng| {
        let rand3 =
            |rng: &mut rand_chacha::ChaCha8Rng| Coords::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let (eta, eta2) = (rand3(rng), rand3(rng));
        let (xi, xi2) = (rand3(rng), rand3(rng));
        let axioms = pair.matched_axiom_residual(&eta, &eta2, &xi, &xi2);
        let u = join_pair(&rand3(rng), &rand3(rng));
        let v = join_pair(&rand3(rng), &rand3(rng));
        let w = join_pair(&rand3(rng), &rand3(rng));
        (
            axioms.max(pair.dcs_jacobi_residual(&u, &v, &w)),
            serde_json::Value::Null,
        )
    };
    let mut group = c.benchmark_group("algebra_axioms_sweep");
    for samples in [1_000u64, 10_000] {
        group.bench_with_input(BenchmarkId::new("parallel", samples), &samples, |b, &n| {
            b.iter(|| sweep_max(n, 42, eval))
        });
        group.bench_with_input(
            BenchmarkId::new("sequential", samples),
            &samples,
            |b, &n| b.iter(|| sweep_max_seq(n, 42, eval)),
        );
    }
    group.finish();
}

fn bench_t2_actions(c: &mut Criterion) {
    let pair = instances::su2k_group_pair();
    let eval = |rng: &mut rand_chacha::ChaCha8Rng| {
        let hjet = T2gElement {
            g: pair.h.random_element(rng),
            xi: pair.h.random_algebra_vec(rng),
            xidot: pair.h.random_algebra_vec(rng),
        };
        let gjet = random_t2g(&pair.g, rng);
        let res = pair
            .t2_actions_closed_form(&hjet, &gjet)
            .and_then(|(l1, r1)| {
                pair.t2_actions_factorized(&hjet, &gjet)
                    .map(|(l2, r2)| t2g_dist(&l1, &l2).max(t2g_dist(&r1, &r2)))
            })
            .unwrap_or(f64::INFINITY);
        (res, serde_json::Value::Null)
    };
    let mut group = c.benchmark_group("t2_actions_sweep");
    group.sample_size(10);
    for samples in [50u64, 200] {
        group.bench_with_input(BenchmarkId::new("parallel", samples), &samples, |b, &n| {
            b.iter(|| sweep_max(n, 42, eval))
        });
        group.bench_with_input(
            BenchmarkId::new("sequential", samples),
            &samples,
            |b, &n| b.iter(|| sweep_max_seq(n, 42, eval)),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_algebra_axioms, bench_t2_actions);
criterion_main!(benches);
