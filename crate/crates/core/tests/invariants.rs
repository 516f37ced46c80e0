use gmelab::criteria::{gb_ball_separable, negativity, ppt_min_eig, Verdict};
use gmelab::distance::{
    gilbert_upper_bound, random_biseparable, t_ppt_lower_bound, GilbertOptions,
};
use gmelab::partitions::Bipartition;
use gmelab::states::{isotropic_state, random_density};
use gmelab::tensor::{DensityMatrix, SubsystemLayout};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cut2() -> Bipartition {
    Bipartition::new(&[1], 2).unwrap()
}

fn two_qubit(seed: u64) -> DensityMatrix {
    random_density(
        SubsystemLayout::qubits(2),
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

fn noisy(seed: u64, t: f64) -> DensityMatrix {
    let r = two_qubit(seed);
    let mixed = DensityMatrix::maximally_mixed(SubsystemLayout::qubits(2));
    DensityMatrix::mixture(&[(t, &r), (1.0 - t, &mixed)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isotropic_ppt_eigenvalue(p in 0.0f64..=1.0) {
        let v = ppt_min_eig(&isotropic_state(p).unwrap(), &cut2()).unwrap();
        prop_assert!((v.value - (1.0 - 3.0 * p) / 4.0).abs() <= 1e-12);
        prop_assert_eq!(v.verdict == Verdict::EntangledCertified, 1.0 - 3.0 * p < -1e-9);
    }

    #[test]
    fn product_mixtures_have_no_negativity(seed in any::<u64>()) {
        let rho = random_biseparable(2, seed).unwrap();
        prop_assert!(negativity(&rho, &cut2()).unwrap() <= 1e-10);
    }

    #[test]
    fn ball_never_certifies_npt(seed in any::<u64>(), t in 0.0f64..1.0) {
        let rho = noisy(seed, t);
        let gb = gb_ball_separable(&rho, &cut2()).unwrap();
        let ppt = ppt_min_eig(&rho, &cut2()).unwrap();
        if gb.verdict == Verdict::SeparableCertified {
            prop_assert!(ppt.value >= -1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lower_bound_below_upper_bound(seed in any::<u64>(), t in 0.0f64..1.0) {
        let rho = noisy(seed, t);
        let lower = t_ppt_lower_bound(&rho, &cut2()).unwrap();
        let upper = gilbert_upper_bound(&rho, &cut2(), &GilbertOptions::default()).unwrap();
        prop_assert!(lower <= upper.upper_bound + 1e-6, "{} > {}", lower, upper.upper_bound);
    }

    #[test]
    fn ppt_distance_is_convex(a in any::<u64>(), b in any::<u64>(), lambda in 0.0f64..=1.0) {
        let (x, y) = (two_qubit(a), two_qubit(b));
        let mix = DensityMatrix::mixture(&[(lambda, &x), (1.0 - lambda, &y)]).unwrap();
        let tx = t_ppt_lower_bound(&x, &cut2()).unwrap();
        let ty = t_ppt_lower_bound(&y, &cut2()).unwrap();
        let tm = t_ppt_lower_bound(&mix, &cut2()).unwrap();
        prop_assert!(tm <= lambda * tx + (1.0 - lambda) * ty + 1e-6);
    }

    #[test]
    fn mixing_with_noise_shrinks_distance(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let rho = two_qubit(seed);
        let t = t_ppt_lower_bound(&rho, &cut2()).unwrap();
        let mixed = t_ppt_lower_bound(&noisy(seed, lambda), &cut2()).unwrap();
        prop_assert!(mixed <= lambda * t + 1e-6);
    }
}
