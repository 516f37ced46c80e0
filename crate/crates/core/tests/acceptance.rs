//! End-to-end acceptance checks. Each prints one PASS/FAIL line with its
//! wall time; the process exits non-zero if any check fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gmelab::activation::{
    build_biseparable_certificate, p0, p0_bisection, run_activation, star_copies,
    verify_certificate, PHatOptions,
};
use gmelab::criteria::{ppt_min_eig, projector_fidelity, Verdict};
use gmelab::distance::{
    activatable_via_npt, ppt_mixture_witness, random_biseparable, sum_criterion, sum_threshold,
    t_ppt_lower_bound, ActivatabilityVerdict, GmeCertificate,
};
use gmelab::partitions::Bipartition;
use gmelab::sdp::{solve, Constraint, SdpProblem, SolveStatus, SparseHermitian};
use gmelab::states::{
    copies, ghz, isotropic_state, max_entangled_qubit, star_pen, IsotropicVisibility,
};
use gmelab::tensor::{
    hermitian_eig, hermitian_eigenvalues, trace_norm, ComplexMatrix, DensityMatrix, C64,
};
use gmelab::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: Tolerances = Tolerances::DEFAULT;

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cut2() -> Bipartition {
    Bipartition::new(&[1], 2).unwrap()
}

fn iso(p: f64) -> DensityMatrix {
    isotropic_state(p).unwrap()
}

fn isotropic_threshold() -> Check {
    let mut prev: Option<bool> = None;
    for i in 0..=100 {
        let p = i as f64 / 100.0;
        let v = ppt_min_eig(&iso(p), &cut2()).map_err(|e| e.to_string())?;
        let want = (1.0 - 3.0 * p) / 4.0;
        ensure((v.value - want).abs() <= 1e-10, || {
            format!("p={p}: {} vs {want}", v.value)
        })?;
        let entangled = v.verdict == Verdict::EntangledCertified;
        ensure(entangled == (p > 1.0 / 3.0), || {
            format!("p={p}: verdict {:?}", v.verdict)
        })?;
        if let Some(was) = prev {
            ensure(!was || entangled, || {
                format!("verdict flipped back at p={p}")
            })?;
        }
        prev = Some(entangled);
    }
    // the grid point p = 1/3 is not representable; probe both sides of it
    let at = ppt_min_eig(&iso(1.0 / 3.0), &cut2()).map_err(|e| e.to_string())?;
    let above = ppt_min_eig(&iso(1.0 / 3.0 + 1e-6), &cut2()).map_err(|e| e.to_string())?;
    ensure(
        at.verdict != Verdict::EntangledCertified && above.verdict == Verdict::EntangledCertified,
        || format!("flip not at 1/3: {:?} / {:?}", at.verdict, above.verdict),
    )
}

/// `T ≥ ⟨φ⁺|ρ|φ⁺⟩ − ½` since PPT states have singlet fraction at most ½, and
/// `ρ(1/3)` is a PPT point at distance `(3p−1)/4`.
fn exact_distance_values() -> Check {
    let phi = max_entangled_qubit();
    let anchor = iso(1.0 / 3.0);
    ensure(
        ppt_min_eig(&anchor, &cut2()).unwrap().value >= -1e-12,
        || "anchor not PPT".into(),
    )?;
    for p in [1.0 / 3.0, 2.0 / 3.0, 1.0] {
        let rho = iso(p);
        let got = t_ppt_lower_bound(&rho, &cut2()).map_err(|e| e.to_string())?;
        let witness = (projector_fidelity(&rho, &phi).unwrap() - 0.5).max(0.0);
        let mut diff = rho.matrix().clone();
        diff.add_scaled(-1.0, anchor.matrix());
        let feasible = 0.5 * trace_norm(&diff).unwrap();
        ensure((witness - feasible).abs() <= 1e-12, || {
            format!("p={p}: oracle gap {witness} vs {feasible}")
        })?;
        ensure((got - witness).abs() <= 1e-5, || {
            format!("p={p}: {got} vs {witness}")
        })?;
    }
    Ok(())
}

fn sum_criterion_threshold() -> Check {
    ensure(sum_threshold(3) == 2.0, || {
        format!("threshold {}", sum_threshold(3))
    })?;
    for seed in 0..200 {
        let rho = random_biseparable(3, seed).map_err(|e| e.to_string())?;
        let r = sum_criterion(&rho).map_err(|e| e.to_string())?;
        ensure(r.sum <= 2.0 + 1e-6, || {
            format!("seed {seed}: sum {}", r.sum)
        })?;
    }
    let r = sum_criterion(&ghz(3).unwrap()).map_err(|e| e.to_string())?;
    ensure((r.sum - 1.5).abs() <= 5e-3, || format!("GHZ sum {}", r.sum))
}

/// Partial transpose of every factor owned by a party in `parties`.
fn party_transpose(m: &ComplexMatrix, rho: &DensityMatrix, parties: &[usize]) -> ComplexMatrix {
    let factors = rho.layout().factors();
    let d = m.dim();
    let digits = |mut i: usize| {
        let mut out = vec![0; factors.len()];
        for (f, slot) in factors.iter().zip(out.iter_mut()).rev() {
            *slot = i % f.dimension;
            i /= f.dimension;
        }
        out
    };
    let index = |ds: &[usize]| {
        ds.iter()
            .zip(factors)
            .fold(0, |acc, (&x, f)| acc * f.dimension + x)
    };
    ComplexMatrix::from_fn(d, d, |i, j| {
        let (mut a, mut b) = (digits(i), digits(j));
        for (k, f) in factors.iter().enumerate() {
            if parties.contains(&f.party) {
                std::mem::swap(&mut a[k], &mut b[k]);
            }
        }
        m.data()[index(&a) * d + index(&b)]
    })
}

fn independent_audit(cert: &GmeCertificate, rho: &DensityMatrix, n: usize) -> Check {
    ensure(cert.audit.passed, || {
        format!("library audit failed: {:?}", cert.audit)
    })?;
    ensure(cert.decompositions.len() == (1 << (n - 1)) - 1, || {
        "missing cuts".into()
    })?;
    let w = &cert.witness;
    ensure(w.hermitian_deviation() <= 1e-9, || {
        "witness not Hermitian".into()
    })?;
    let value = w.trace_product(rho.matrix()).re;
    ensure((value - cert.value).abs() <= 1e-7, || {
        format!("value {value} vs reported {}", cert.value)
    })?;
    for dec in &cert.decompositions {
        let mut r = dec.p.clone();
        r.add_scaled(1.0, &party_transpose(&dec.q, rho, dec.cut.parties()));
        r.add_scaled(-1.0, w);
        ensure(r.max_abs() <= 1e-6, || {
            format!("cut {}: residual {}", dec.cut, r.max_abs())
        })?;
        for m in [&dec.p, &dec.q] {
            let ev = hermitian_eigenvalues(m).unwrap();
            ensure(
                ev.iter().all(|&e| (-1e-7..=1.0 + 1e-7).contains(&e)),
                || format!("cut {}: spectrum {ev:?}", dec.cut),
            )?;
        }
    }
    Ok(())
}

fn ppt_mixture_witness_check() -> Check {
    for seed in 0..100 {
        let rho = random_biseparable(3, 1000 + seed).map_err(|e| e.to_string())?;
        let g = ppt_mixture_witness(&rho).map_err(|e| e.to_string())?;
        ensure(g.value >= -1e-6, || {
            format!("seed {seed}: value {}", g.value)
        })?;
    }
    let sigma = star_pen(3, IsotropicVisibility::new(1.0).unwrap()).unwrap();
    for (name, rho) in [("GHZ", ghz(3).unwrap()), ("star(1)", sigma)] {
        let g = ppt_mixture_witness(&rho).map_err(|e| e.to_string())?;
        ensure(g.value < -0.1, || format!("{name}: value {}", g.value))?;
        independent_audit(&g, &rho, 3).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

/// Largest p with f/((n−1) − (n−2)f) ≤ f_k(1/3), f = 1 − (1−p)^k.
fn p0_oracle(n: usize, k: usize) -> f64 {
    let f = |p: f64| 1.0 - (1.0 - p).powi(k as i32);
    let target = f(1.0 / 3.0);
    let (mut lo, mut hi) = (1.0 / 3.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let ratio = f(mid) / ((n - 1) as f64 - (n - 2) as f64 * f(mid));
        if ratio <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn p0_scalars() -> Check {
    for (n, k, want) in [
        (3, 1, 0.5),
        (3, 2, 1.0 - (2.0f64 / 7.0).sqrt()),
        (4, 1, 0.6),
    ] {
        let got = p0(n, k).map_err(|e| e.to_string())?;
        ensure((got - want).abs() <= 1e-10, || {
            format!("p0({n},{k}) = {got}, want {want}")
        })?;
        ensure((got - p0_oracle(n, k)).abs() <= 1e-10, || {
            format!("p0({n},{k}) disagrees with bisection")
        })?;
    }
    for n in 3..=5 {
        let mut prev = f64::INFINITY;
        for k in 1..=12 {
            let v = p0(n, k).map_err(|e| e.to_string())?;
            ensure(v < prev, || format!("p0({n},{k}) = {v} not below {prev}"))?;
            ensure((v - p0_bisection(n, k).unwrap()).abs() <= 1e-10, || {
                format!("p0({n},{k}) bisection mismatch")
            })?;
            ensure((v - p0_oracle(n, k)).abs() <= 1e-10, || {
                format!("p0({n},{k}) oracle mismatch")
            })?;
            prev = v;
        }
    }
    Ok(())
}

fn biseparable_certificate() -> Check {
    for k in [1, 2] {
        let r =
            run_activation(3, k, None, &PHatOptions::default(), &TOL).map_err(|e| e.to_string())?;
        if k == 1 {
            ensure(r.p_hat == 0.5, || format!("k=1: p_hat {}", r.p_hat))?;
        } else {
            ensure(r.p_hat > 1.0 / 3.0, || format!("k=2: p_hat {}", r.p_hat))?;
        }
        let cert = build_biseparable_certificate(3, k, r.p_hat).map_err(|e| e.to_string())?;
        let target = star_copies(3, r.p_hat, k).map_err(|e| e.to_string())?;
        let v = verify_certificate(&cert, &target, &TOL).map_err(|e| e.to_string())?;
        ensure(v.passed && v.reconstruction_residual <= 1e-9, || {
            format!("k={k}: verification {v:?}")
        })?;
        ensure(
            v.terms.iter().all(|t| t.psd && t.structure && t.evidence),
            || format!("k={k}: term checks"),
        )?;
        let single = star_pen(3, IsotropicVisibility::new(r.p_hat).unwrap()).unwrap();
        let a = activatable_via_npt(&single).map_err(|e| e.to_string())?;
        ensure(
            a.verdict == ActivatabilityVerdict::ActivatableCertified,
            || format!("k={k}: {:?}", a.verdict),
        )?;
    }
    Ok(())
}

fn distance_growth() -> Check {
    let rho = iso(0.9);
    let mut values = Vec::new();
    for k in 1..=3 {
        let r = copies(&rho, k).map_err(|e| e.to_string())?;
        values.push(t_ppt_lower_bound(&r, &cut2()).map_err(|e| e.to_string())?);
    }
    ensure(values.windows(2).all(|w| w[1] >= w[0]), || {
        format!("not nondecreasing: {values:?}")
    })?;
    ensure(values[2] - values[0] >= 0.05, || {
        format!("increase too small: {values:?}")
    })
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .hermitian_part()
}

fn solver_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..50 {
        let n = if i % 2 == 0 { 8 } else { 16 };
        let c = random_hermitian(n, &mut rng);
        let p = SdpProblem {
            blocks: vec![n],
            objective: vec![SparseHermitian::from_dense(&c)],
            constraints: vec![Constraint {
                coefficients: vec![(0, SparseHermitian::identity(n))],
                rhs: 1.0,
            }],
        };
        let sol = solve(&p).map_err(|e| e.to_string())?;
        ensure(sol.status == SolveStatus::Optimal, || {
            format!("instance {i}: {:?}", sol.status)
        })?;
        let want = *hermitian_eigenvalues(&c).unwrap().last().unwrap();
        ensure((sol.primal_objective - want).abs() <= 1e-7, || {
            format!("instance {i}: {} vs {want}", sol.primal_objective)
        })?;
    }
    for n in [2, 16, 64, 128, 256] {
        let a = random_hermitian(n, &mut rng);
        let e = hermitian_eig(&a).map_err(|e| e.to_string())?;
        let v = &e.eigenvectors;
        let scaled = ComplexMatrix::from_fn(n, n, |r, c| v.data()[r * n + c] * e.eigenvalues[c]);
        let mut res = scaled.matmul(&v.adjoint());
        res.add_scaled(-1.0, &a);
        let rel = res.frobenius_norm() / a.frobenius_norm();
        ensure(rel <= 1e-9, || {
            format!("n={n}: reconstruction residual {rel:e}")
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Check, Duration); 8] = [
        (
            "isotropic threshold",
            isotropic_threshold,
            Duration::from_secs(1),
        ),
        (
            "exact distance values",
            exact_distance_values,
            Duration::from_secs(30),
        ),
        (
            "sum-criterion threshold",
            sum_criterion_threshold,
            Duration::from_secs(600),
        ),
        (
            "PPT-mixture witness",
            ppt_mixture_witness_check,
            Duration::from_secs(600),
        ),
        ("p0 scalars", p0_scalars, Duration::from_secs(1)),
        (
            "biseparable certificate",
            biseparable_certificate,
            Duration::from_secs(900),
        ),
        (
            "distance growth with copies",
            distance_growth,
            Duration::from_secs(1800),
        ),
        ("solver unit suite", solver_suite, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|_| {
            ensure(elapsed <= *budget, || {
                format!("took {elapsed:.2?}, budget {budget:?}")
            })
        });
        match outcome {
            Ok(()) => println!("PASS {} {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name} ({elapsed:.2?}): {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
