use ncg_spectra::closed_form::G_SYMMETRIC_CRITICAL;
use ncg_spectra::free_energy::{
    candidates_at, locate_critical, phase_report, select_equilibrium, solve_ansatz,
};
use ncg_spectra::self_consistent::{branch_scan, BranchTracker};
use ncg_spectra::{Ansatz, Error, GeometryModel};

#[test]
fn minus_phase_report_switches_at_branch_point() {
    let grid: Vec<f64> = (0..=20).map(|k| -8.0 + 0.25 * k as f64).collect();
    let r = phase_report(GeometryModel::Minus, &grid).unwrap();
    assert_eq!(r.points.len(), grid.len());
    assert_eq!(r.critical, vec![G_SYMMETRIC_CRITICAL]);
    for p in &r.points {
        let expected = if p.g < G_SYMMETRIC_CRITICAL { Ansatz::Sym2Cut } else { Ansatz::Sym1Cut };
        assert_eq!(p.chosen, expected, "g = {}", p.g);
        assert_eq!(p.energies.len(), 1);
    }
}

#[test]
fn plus_phase_report_finds_first_order_transition() {
    let grid: Vec<f64> = (0..=8).map(|k| -3.4 + 0.05 * k as f64).collect();
    let r = phase_report(GeometryModel::Plus, &grid).unwrap();
    assert_eq!(r.critical.len(), 1);
    assert!((-3.20..=-3.17).contains(&r.critical[0]), "{:?}", r.critical);
    let below = r.points.iter().find(|p| p.g < -3.2).unwrap();
    let above = r.points.iter().rev().find(|p| p.g > -3.15).unwrap();
    assert_eq!(below.chosen, Ansatz::Asym2Cut);
    assert!(below.moments.m1 > 0.3);
    assert_eq!(above.chosen, Ansatz::Sym1Cut);
    assert_eq!(above.moments.m1, 0.0);
}

#[test]
fn bracket_without_crossing_reports_no_sign_change() {
    assert!(matches!(
        locate_critical(GeometryModel::Plus, -6.0, -5.0),
        Err(Error::NoSignChange { .. })
    ));
    assert!(matches!(
        locate_critical(GeometryModel::Minus, -3.0, -1.0),
        Err(Error::NoSignChange { .. })
    ));
    assert!(matches!(
        locate_critical(GeometryModel::Plus, -3.0, -3.4),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn mirrored_broken_solutions_are_degenerate() {
    let mut tracker = BranchTracker::broken_branch().unwrap();
    let g = -5.0;
    let mut c = candidates_at(GeometryModel::Plus, g, Some(&mut tracker));
    let broken = c.iter().find(|s| s.ansatz == Ansatz::Asym2Cut).unwrap().clone();
    c.push(broken.mirrored());
    let sel = select_equilibrium(GeometryModel::Plus, g, c).unwrap();
    assert!(sel.degenerate);
    assert_eq!(sel.winner.ansatz, Ansatz::Asym2Cut);
    let mean = sel.mean_density.unwrap();
    assert!(mean.moment(1).abs() < 1e-12);
    assert!((mean.moment(0) - 1.0).abs() < 1e-10);
    assert!((mean.eval(0.7) - mean.eval(-0.7)).abs() < 1e-14);
}

#[test]
fn symmetric_solutions_of_both_models_coincide() {
    // with m1 = m3 = 0 the two effective potentials are equal
    for (g, a) in [(-2.0, Ansatz::Sym1Cut), (-7.0, Ansatz::Sym2Cut)] {
        let p = solve_ansatz(GeometryModel::Plus, g, a).unwrap();
        let m = solve_ansatz(GeometryModel::Minus, g, a).unwrap();
        assert_eq!(p.support, m.support);
        assert!((p.free_energy - m.free_energy).abs() < 1e-12);
    }
}

#[test]
fn fixed_ansatz_domains() {
    assert!(matches!(
        solve_ansatz(GeometryModel::Minus, -3.0, Ansatz::Sym2Cut),
        Err(Error::OutOfBranch { .. })
    ));
    assert!(matches!(
        solve_ansatz(GeometryModel::Minus, -7.0, Ansatz::Sym1Cut),
        Err(Error::OutOfBranch { .. })
    ));
    assert!(matches!(
        solve_ansatz(GeometryModel::Minus, -7.0, Ansatz::Asym2Cut),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        solve_ansatz(GeometryModel::Plus, -2.0, Ansatz::Asym2Cut),
        Err(Error::OutOfBranch { .. })
    ));
    let s = solve_ansatz(GeometryModel::Plus, -6.0, Ansatz::Asym2Cut).unwrap();
    assert!(s.moments.m1 > 0.0 && s.is_closed());
}

#[test]
fn broken_branch_scan_ends_at_fold() {
    let scan = branch_scan(GeometryModel::Plus, Ansatz::Asym2Cut, -4.0, -2.5, 0.05).unwrap();
    let end = scan.end.expect("branch ends before -2.5");
    // last grid point before the fold near -3.156
    assert!((end - -3.2).abs() < 1e-9, "{end}");
    assert!(scan.solutions.iter().all(|s| s.moments.m1 > 0.0 && s.is_closed()));
    // energy crosses the symmetric one along the way
    let first = &scan.solutions[0];
    let sym = solve_ansatz(GeometryModel::Plus, first.g, Ansatz::Sym1Cut).unwrap();
    assert!(first.free_energy < sym.free_energy);
}
