use gmelab::criteria::{negativity, Verdict};
use gmelab::distance::*;
use gmelab::partitions::Bipartition;
use gmelab::states::{
    basis_state, ghz, isotropic_state, max_entangled_qubit, star_pen, IsotropicVisibility,
};
use gmelab::tensor::{DensityMatrix, SubsystemLayout};

fn cut2() -> Bipartition {
    Bipartition::new(&[1], 2).unwrap()
}

fn bell_and_zero() -> DensityMatrix {
    let zero = basis_state(SubsystemLayout::qubits(1), &[0]).unwrap();
    let joined = max_entangled_qubit().kron(&zero);
    joined.with_layout(SubsystemLayout::qubits(3)).unwrap()
}

fn star(n: usize, p: f64) -> DensityMatrix {
    star_pen(n, IsotropicVisibility::new(p).unwrap()).unwrap()
}

#[test]
fn ppt_relaxation_matches_closed_form() {
    for (p, want) in [(1.0, 0.5), (2.0 / 3.0, 0.25), (1.0 / 3.0, 0.0), (0.2, 0.0)] {
        let t = t_ppt_lower_bound(&isotropic_state(p).unwrap(), &cut2()).unwrap();
        assert!((t - want).abs() < 1e-6, "p={p}: {t}");
    }
}

#[test]
fn gilbert_examples() {
    let opts = GilbertOptions::default();
    let g = gilbert_upper_bound(&isotropic_state(0.0).unwrap(), &cut2(), &opts).unwrap();
    assert_eq!(g.iterations, 0);
    assert!(g.frobenius < 1e-15);

    let g = gilbert_upper_bound(&isotropic_state(1.0 / 3.0).unwrap(), &cut2(), &opts).unwrap();
    assert!(
        g.frobenius <= 1e-3,
        "{} after {}",
        g.frobenius,
        g.iterations
    );

    let phi = max_entangled_qubit();
    let g = gilbert_upper_bound(&phi, &cut2(), &opts).unwrap();
    let t = t_ppt_lower_bound(&phi, &cut2()).unwrap();
    assert!(g.upper_bound >= t - 1e-6);
    assert!(g.mixture.is_valid(1e-10));
}

#[test]
fn sum_criterion_on_ghz() {
    assert_eq!(sum_threshold(3), 2.0);
    assert_eq!(sum_threshold(5), 14.0);
    let r = sum_criterion(&ghz(3).unwrap()).unwrap();
    assert!((r.sum - 1.5).abs() < 1e-3, "{}", r.sum);
    assert_eq!(r.verdict, SumVerdict::NoViolation);
}

#[test]
fn witness_examples() {
    let g = ppt_mixture_witness(&ghz(3).unwrap()).unwrap();
    assert!(g.value < -0.1, "{}", g.value);
    assert_eq!(g.status, GmeStatus::GmeCertified);
    assert!(g.audit.passed);

    let mixed = DensityMatrix::maximally_mixed(SubsystemLayout::qubits(3));
    let g = ppt_mixture_witness(&mixed).unwrap();
    assert!(g.value >= -1e-6);
    assert_eq!(g.status, GmeStatus::NoViolation);

    let g = ppt_mixture_witness(&bell_and_zero()).unwrap();
    assert!(g.value >= -1e-6, "{}", g.value);
}

#[test]
fn activatability_examples() {
    let c = activatable_via_npt(&star(3, 0.4)).unwrap();
    assert_eq!(c.verdict, ActivatabilityVerdict::ActivatableCertified);
    let c = activatable_via_npt(&star(3, 0.2)).unwrap();
    assert_eq!(c.verdict, ActivatabilityVerdict::NotActivatableCertified);
    for cut in &c.cuts {
        assert_eq!(
            cut.evidence.as_ref().unwrap().verdict(),
            Verdict::SeparableCertified
        );
    }
    let c = activatable_via_npt(&bell_and_zero()).unwrap();
    assert_eq!(c.verdict, ActivatabilityVerdict::NotActivatableCertified);
}

#[test]
fn random_biseparable_is_deterministic() {
    let a = random_biseparable(3, 7).unwrap();
    let b = random_biseparable(3, 7).unwrap();
    assert_eq!(a.matrix().data(), b.matrix().data());
    for seed in 0..10 {
        let r = random_biseparable(2, seed).unwrap();
        assert!(negativity(&r, &cut2()).unwrap() <= 1e-10);
    }
}

#[test]
fn sum_criterion_over_copies() {
    let tol = gmelab::Tolerances::DEFAULT;
    let s = sum_criterion_copies(&isotropic_state(0.5).unwrap(), 3, &tol).unwrap();
    assert_eq!(s.first_firing, Some(1));
    assert_eq!(s.reports.len(), 1);

    let s = sum_criterion_copies(&ghz(3).unwrap(), 1, &tol).unwrap();
    assert_eq!(s.first_firing, None);
    assert!(s.stopped.is_none());

    let small = gmelab::Tolerances {
        dimension_cap: 16,
        ..tol
    };
    let s = sum_criterion_copies(&isotropic_state(0.3).unwrap(), 5, &small).unwrap();
    assert_eq!(s.first_firing, None);
    assert_eq!(s.reports.len(), 2);
    assert!(s.stopped.is_some());
}
