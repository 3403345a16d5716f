use almkit_core::asp::parse_program;
use almkit_core::solve::{ground, solve_reference_with, GroundProgram, Strategy};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

/// `k` independent even loops with a constraint forbidding adjacent `a`s:
/// 2k undecided atoms.
fn even_loops(k: usize) -> GroundProgram {
    let src = format!(
        "n(1..{k}).\n\
         a(I) :- n(I), not b(I).\n\
         b(I) :- n(I), not a(I).\n\
         :- a(I), a(I+1).\n"
    );
    ground(&parse_program(&src).unwrap()).unwrap().simplified()
}

fn bench_reference(c: &mut Criterion) {
    let mut group = c.benchmark_group("reference_solver");
    group.sample_size(10);
    for k in [8, 10, 12] {
        let g = even_loops(k);
        let a = solve_reference_with(&g, usize::MAX, Strategy::Sequential).unwrap();
        let b = solve_reference_with(&g, usize::MAX, Strategy::Parallel).unwrap();
        assert_eq!(a, b);
        for (name, s) in [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, 2 * k), &g, |bench, g| {
                bench.iter(|| solve_reference_with(g, usize::MAX, s).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_reference);
criterion_main!(benches);
