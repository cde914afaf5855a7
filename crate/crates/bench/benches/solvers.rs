use std::hint::black_box;

use bregflow_core::{
    BregmanState1D, BregmanState2D, Grid1D, Grid2D, Mode, Model, Model2D, OperatorSet1D, OperatorSet2D, Preset,
    Scheme, Solver1D, Solver2D, SolverConfig1D, SolverConfig2D,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn operators_1d(c: &mut Criterion) {
    let mut group = c.benchmark_group("operators_1d");
    for n in [50, 100, 200] {
        for scheme in [Scheme::ApproxJ, Scheme::ExactH] {
            group.bench_with_input(BenchmarkId::new(scheme.as_str(), n), &n, |b, &n| {
                b.iter(|| OperatorSet1D::new(Grid1D::new(black_box(n)).unwrap(), scheme).unwrap())
            });
        }
    }
    group.finish();
}

fn flow_step_1d(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_step_1d");
    for n in [100, 200] {
        let grid = Grid1D::new(n).unwrap();
        let ops = OperatorSet1D::new(grid, Scheme::ApproxJ).unwrap();
        let cfg = SolverConfig1D::scaled(&grid, 1.0, 5.0, Model::Tv, Scheme::ApproxJ, Mode::Flow).unwrap();
        let solver = Solver1D::new(&ops, cfg).unwrap();
        let u0 = Preset::Cos1d.initial_1d(&grid).unwrap();
        let mut state = BregmanState1D::new(&ops, &u0).unwrap();
        group.bench_function(BenchmarkId::from_parameter(n), |b| b.iter(|| solver.flow_step(black_box(&mut state))));
    }
    group.finish();
}

fn osv_1d(c: &mut Criterion) {
    let grid = Grid1D::new(100).unwrap();
    let ops = OperatorSet1D::new(grid, Scheme::ExactH).unwrap();
    let cfg = SolverConfig1D::scaled(&grid, 1.0, 5.0, Model::Tv, Scheme::ExactH, Mode::Osv).unwrap();
    let solver = Solver1D::new(&ops, cfg).unwrap();
    let f = Preset::Cubic1d.initial_1d(&grid).unwrap();
    c.bench_function("osv_1d/100", |b| b.iter(|| solver.solve_osv(black_box(&f)).unwrap()));
}

fn operators_2d(c: &mut Criterion) {
    let mut group = c.benchmark_group("operators_2d");
    group.sample_size(10);
    for n in [10, 20] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| OperatorSet2D::new(Grid2D::square(black_box(n)).unwrap(), Scheme::ApproxJ).unwrap())
        });
    }
    group.finish();
}

fn flow_step_2d(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_step_2d");
    let grid = Grid2D::square(20).unwrap();
    let ops = OperatorSet2D::new(grid, Scheme::ApproxJ).unwrap();
    let u0 = Preset::Poly2d.initial_2d(&grid).unwrap();
    for model in [Model2D::Isotropic, Model2D::Anisotropic] {
        let cfg = SolverConfig2D::scaled(&grid, 5.0, 20.0, model, Mode::Flow).unwrap();
        let solver = Solver2D::new(&ops, cfg).unwrap();
        let mut state = BregmanState2D::new(&ops, &u0).unwrap();
        group.bench_function(model.name(), |b| b.iter(|| solver.flow_step(black_box(&mut state))));
    }
    group.finish();
}

criterion_group!(benches, operators_1d, flow_step_1d, osv_1d, operators_2d, flow_step_2d);
criterion_main!(benches);
