use ncg_spectra::dirac::{dirac_density, dirac_sample, DiracSign};
use ncg_spectra::free_energy::solve_ansatz;
use ncg_spectra::montecarlo::{batch_mean_error, empirical_density, run_chain, BinSpec};
use ncg_spectra::{Ansatz, GeometryModel, McConfig, McInit};

#[test]
fn gue_second_moment_is_one() {
    let mut c = McConfig::new(GeometryModel::GaussianBaseline, 0.0, 64, 20_000, 21);
    c.sample_every = 1;
    let run = run_chain(&c).unwrap();
    let m2: Vec<f64> = run.trace.samples.iter().map(|s| s.m2).collect();
    let (mean, se) = batch_mean_error(&m2, 20).unwrap();
    assert!((mean - 1.0).abs() < 3.0 * se, "{mean} ± {se}");
    assert!((0.3..=0.5).contains(&run.trace.acceptance_rate), "{}", run.trace.acceptance_rate);
}

#[test]
fn broken_phase_chain_keeps_its_order_parameter() {
    let theory = solve_ansatz(GeometryModel::Plus, -4.0, Ansatz::Asym2Cut).unwrap();
    let mut c = McConfig::new(GeometryModel::Plus, -4.0, 128, 20_000, 4);
    c.init = McInit::FromDensity(theory.density.clone());
    let run = run_chain(&c).unwrap();
    let min_m = run.trace.samples.iter().map(|s| s.order_parameter.abs()).fold(f64::INFINITY, f64::min);
    assert!(min_m > 0.2, "{min_m}");
    assert!((run.trace.mean_order_parameter() - theory.moments.m1).abs() < 0.05);
}

#[test]
fn energy_bookkeeping_survives_a_million_sweeps() {
    let mut c = McConfig::new(GeometryModel::Minus, -7.0, 8, 1_000_000, 6);
    c.sample_every = 1000;
    let run = run_chain(&c).unwrap();
    assert!(run.trace.max_energy_drift < 1e-6, "{}", run.trace.max_energy_drift);
    assert!(run.trace.final_eigenvalues.iter().sum::<f64>().abs() < 1e-12);
}

#[test]
fn dirac_sample_matches_convolved_theory() {
    let theory = solve_ansatz(GeometryModel::Minus, -7.0, Ansatz::Sym2Cut).unwrap().density;
    let mut c = McConfig::new(GeometryModel::Minus, -7.0, 128, 5_000, 8);
    c.sample_every = 100;
    c.init = McInit::FromDensity(theory.clone());
    let run = run_chain(&c).unwrap();
    for sign in [DiracSign::Plus, DiracSign::Minus] {
        let predicted = dirac_density(&theory, sign, 4096).unwrap();
        let sampled: Vec<f64> = run.pooled.chunks_exact(128).flat_map(|s| dirac_sample(s, sign)).collect();
        let hist = empirical_density(&sampled, BinSpec::default()).unwrap();
        let l1 = hist.l1_distance(|s| predicted.eval(s));
        assert!(l1 < 0.02, "{sign}: {l1}");
    }
}
