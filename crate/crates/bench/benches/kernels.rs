use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ncg_spectra::dirac::{dirac_density, DiracSign};
use ncg_spectra::free_energy::solve_ansatz;
use ncg_spectra::montecarlo::{metropolis_sweep, ChainState};
use ncg_spectra::self_consistent::{BranchTracker, Formulation, ResidualSystem};
use ncg_spectra::{Ansatz, CandidateParams, EigenvalueConfig, GeometryModel, McConfig, McInit};

fn residuals(c: &mut Criterion) {
    let sol = solve_ansatz(GeometryModel::Plus, -4.0, Ansatz::Asym2Cut).unwrap();
    let sys = ResidualSystem::new(GeometryModel::Plus, -4.0, Ansatz::Asym2Cut, Formulation::Full).unwrap();
    let params = CandidateParams { ansatz: sol.ansatz, support: sol.support, moments: sol.moments };
    let x = sys.pack(&params).unwrap();
    c.bench_function("residuals asym2 full", |b| b.iter(|| sys.residuals(black_box(&x)).unwrap()));
}

fn solves(c: &mut Criterion) {
    c.bench_function("solve sym2 g=-7", |b| {
        b.iter(|| solve_ansatz(GeometryModel::Minus, black_box(-7.0), Ansatz::Sym2Cut).unwrap())
    });
    c.bench_function("track broken branch to g=-3.18", |b| {
        b.iter(|| BranchTracker::broken_branch().unwrap().solve_at(black_box(-3.18)).unwrap())
    });
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("metropolis sweep N=128");
    for (model, g) in [(GeometryModel::Plus, -4.0), (GeometryModel::Minus, -7.0)] {
        let mut cfg = McConfig::new(model, g, 128, 2, 1);
        let ansatz = if model == GeometryModel::Plus { Ansatz::Asym2Cut } else { Ansatz::Sym2Cut };
        cfg.init = McInit::FromDensity(solve_ansatz(model, g, ansatz).unwrap().density);
        let values = cfg.initial_eigenvalues().unwrap();
        let start = EigenvalueConfig::new(values, model, g).unwrap();
        let mut state = ChainState::new(start, 0.05, ChaCha8Rng::seed_from_u64(1)).unwrap();
        group.bench_function(model.to_string(), |b| b.iter(|| metropolis_sweep(&mut state)));
    }
    group.finish();
}

fn dirac(c: &mut Criterion) {
    let rho = solve_ansatz(GeometryModel::Minus, -7.0, Ansatz::Sym2Cut).unwrap().density;
    c.bench_function("dirac density 4096", |b| {
        b.iter(|| dirac_density(black_box(&rho), DiracSign::Plus, 4096).unwrap())
    });
}

criterion_group!(kernels, residuals, solves, sweeps, dirac);
criterion_main!(kernels);
