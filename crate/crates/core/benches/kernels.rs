use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hwlab::indecomp::commutant;
use hwlab::intertwine::{zero_case_operators, Intertwiner, IntertwinerSpec};
use hwlab::irreps::{build, restrict_to_hw, Family};
use hwlab::suite::{run, Command, RunConfig};
use hwlab::Exec;

const PATHS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn assemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("intertwiner_assemble");
    group.sample_size(10);
    for (l, m) in [(1.0, 2.0), (-1.0, 3.0)] {
        let spec = IntertwinerSpec::new(l, m, 12, 64).unwrap();
        for (name, exec) in PATHS {
            group.bench_with_input(BenchmarkId::new(name, format!("({l},{m})")), &spec, |b, &spec| {
                b.iter(|| Intertwiner::assemble(spec, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn zero_case(c: &mut Criterion) {
    let mut group = c.benchmark_group("zero_case");
    group.sample_size(10);
    for (name, exec) in PATHS {
        group.bench_function(name, |b| b.iter(|| zero_case_operators(1.0, 12, 64, exec).unwrap()));
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    for command in [Command::Intertwine, Command::All] {
        let config = RunConfig {
            command,
            ..RunConfig::default()
        };
        for (name, exec) in PATHS {
            group.bench_with_input(BenchmarkId::new(name, command), &config, |b, config| {
                b.iter(|| {
                    Intertwiner::clear_cache();
                    run(config, exec).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn commutant_solve(c: &mut Criterion) {
    let gens = restrict_to_hw(&build(Family::Sym { k: 3 }, 1).unwrap()).unwrap();
    c.bench_function("commutant_sym3", |b| b.iter(|| commutant(&gens).unwrap()));
}

criterion_group!(benches, assemble, zero_case, suites, commutant_solve);
criterion_main!(benches);
