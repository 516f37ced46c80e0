//! Genuine multipartite entanglement tests: the distance-sum criterion, the
//! PPT-mixture witness, and NPT activatability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criteria::negativity_with;
use crate::distance::evidence::{separability_evidence, EvidenceOptions, SeparabilityEvidence};
use crate::distance::tppt::t_ppt_factors;
use crate::error::{Error, Result};
use crate::partitions::{cut_factors, enumerate_bipartitions, Bipartition};
use crate::sdp::{AffineExpr, LmiBuilder};
use crate::states::{copies_with_cap, random_density};
use crate::tensor::{hermitian_eigenvalues_with, ComplexMatrix, DensityMatrix, SubsystemLayout};
use crate::tolerance::Tolerances;

/// Largest state dimension accepted by the PPT-mixture witness.
pub const WITNESS_DIMENSION_CAP: usize = 64;

/// `2^{n−1} − 2`, the largest distance sum a biseparable state can reach.
pub fn sum_threshold(n: usize) -> f64 {
    ((1u64 << (n - 1)) - 2) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumVerdict {
    GmeCertified,
    NoViolation,
    /// At least one cut failed; the sum covers only the cuts that succeeded.
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumCutEntry {
    pub cut: Bipartition,
    pub lower: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumCriterionReport {
    pub cuts: Vec<SumCutEntry>,
    pub sum: f64,
    pub threshold: f64,
    pub verdict: SumVerdict,
}

fn party_count(rho: &DensityMatrix) -> Result<usize> {
    let n = rho.layout().party_count();
    if n < 2 {
        return Err(Error::InvalidLayout(format!(
            "need at least two parties, got {n}"
        )));
    }
    Ok(n)
}

pub fn sum_criterion(rho: &DensityMatrix) -> Result<SumCriterionReport> {
    sum_criterion_with(rho, &Tolerances::DEFAULT)
}

/// Sum of PPT lower bounds on `T_M` over all cuts; exceeding `2^{n−1}−2`
/// rules out biseparability.
pub fn sum_criterion_with(rho: &DensityMatrix, tol: &Tolerances) -> Result<SumCriterionReport> {
    let n = party_count(rho)?;
    let threshold = sum_threshold(n);
    let mut cuts = Vec::new();
    let mut sum = 0.0;
    let mut failed = false;
    for b in enumerate_bipartitions(n)? {
        let (left, _) = cut_factors(&b, rho.layout())?;
        match t_ppt_factors(rho, &left, tol) {
            Ok(t) => {
                sum += t.lower;
                cuts.push(SumCutEntry {
                    cut: b,
                    lower: Some(t.lower),
                    error: None,
                });
            }
            Err(e @ Error::DimensionCap { .. }) => return Err(e),
            Err(e) => {
                failed = true;
                cuts.push(SumCutEntry {
                    cut: b,
                    lower: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    let verdict = if sum > threshold + tol.sum_margin {
        SumVerdict::GmeCertified
    } else if failed {
        SumVerdict::Partial
    } else {
        SumVerdict::NoViolation
    };
    Ok(SumCriterionReport {
        cuts,
        sum,
        threshold,
        verdict,
    })
}

/// Sum criterion on `ρ^{⊗k}` for `k = 1, 2, …` up to a cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopiesScan {
    /// One report per copy count tried, starting at `k = 1`.
    pub reports: Vec<SumCriterionReport>,
    /// Smallest tried `k` at which the criterion certified GME. Not claimed
    /// minimal over all `k`: bounds at smaller `k` are relaxations.
    pub first_firing: Option<usize>,
    /// Why the scan stopped before `k_max`, if it did.
    pub stopped: Option<String>,
}

/// Run the sum criterion on growing numbers of copies until it fires, the
/// copy cap is reached, or the state outgrows the solver.
pub fn sum_criterion_copies(
    rho: &DensityMatrix,
    k_max: usize,
    tol: &Tolerances,
) -> Result<CopiesScan> {
    let mut scan = CopiesScan {
        reports: Vec::new(),
        first_firing: None,
        stopped: None,
    };
    for k in 1..=k_max {
        let state = match copies_with_cap(rho, k, tol.dimension_cap) {
            Ok(s) => s,
            Err(e @ Error::DimensionCap { .. }) => {
                scan.stopped = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        let report = match sum_criterion_with(&state, tol) {
            Ok(r) => r,
            Err(e @ Error::DimensionCap { .. }) => {
                scan.stopped = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        let fired = report.verdict == SumVerdict::GmeCertified;
        scan.reports.push(report);
        if fired {
            scan.first_firing = Some(k);
            break;
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GmeStatus {
    GmeCertified,
    NoViolation,
}

/// `W = P_M + Q_M^{T_M}` for one cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutDecomposition {
    pub cut: Bipartition,
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessAudit {
    /// Largest `‖W − P_M − Q_M^{T_M}‖_F`.
    pub decomposition_residual: f64,
    /// Smallest eigenvalue over all `P_M`, `Q_M`.
    pub min_eigenvalue: f64,
    /// Largest eigenvalue over all `P_M`, `Q_M`.
    pub max_eigenvalue: f64,
    /// `Tr(Wρ)` recomputed from the stored witness.
    pub value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmeCertificate {
    pub witness: ComplexMatrix,
    pub decompositions: Vec<CutDecomposition>,
    pub value: f64,
    pub status: GmeStatus,
    pub audit: WitnessAudit,
    pub sdp_iterations: usize,
}

/// `mp[i]` is the part of index `i` carried by the listed factors.
fn factor_part(dims: &[usize], factors: &[usize]) -> Vec<usize> {
    let d: usize = dims.iter().product();
    let mut strides = vec![1; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * dims[f + 1];
    }
    (0..d)
        .map(|i| {
            factors
                .iter()
                .map(|&f| (i / strides[f]) % dims[f] * strides[f])
                .sum()
        })
        .collect()
}

fn transpose_map(dims: &[usize], factors: &[usize]) -> impl Fn(usize, usize) -> (usize, usize) {
    let mp = factor_part(dims, factors);
    move |r, c| (r - mp[r] + mp[c], c - mp[c] + mp[r])
}

pub fn ppt_mixture_witness(rho: &DensityMatrix) -> Result<GmeCertificate> {
    ppt_mixture_witness_with(rho, &Tolerances::DEFAULT)
}

/// Minimise `Tr(Wρ)` over witnesses with `W = P_M + Q_M^{T_M}` and
/// `0 ⪯ P_M, Q_M ⪯ I` for every cut. A negative value certifies GME.
pub fn ppt_mixture_witness_with(rho: &DensityMatrix, tol: &Tolerances) -> Result<GmeCertificate> {
    let n = party_count(rho)?;
    let d = rho.dim();
    if d > WITNESS_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim: d,
            cap: WITNESS_DIMENSION_CAP,
        });
    }
    let dims = rho.layout().dims();
    let real = rho.matrix().is_real();
    let cuts = enumerate_bipartitions(n)?;
    let id = ComplexMatrix::identity(d);
    let mut lmi = LmiBuilder::new();
    let w = lmi.hermitian(d, real);
    lmi.objective_trace(&w, -1.0, rho.matrix());
    let mut qs = Vec::new();
    for b in &cuts {
        let (left, _) = cut_factors(b, rho.layout())?;
        let q = lmi.hermitian(d, real);
        let qt = AffineExpr::zero(d)
            .add_var(1.0, &q)
            .map_units(transpose_map(&dims, &left));
        let p = AffineExpr::zero(d).add_var(1.0, &w).add_expr(-1.0, &qt);
        lmi.lmi(p.clone());
        lmi.lmi(AffineExpr::constant(&id).add_expr(-1.0, &p));
        lmi.lmi(AffineExpr::zero(d).add_var(1.0, &q));
        lmi.lmi(AffineExpr::constant(&id).add_var(-1.0, &q));
        qs.push((q, left));
    }
    let sol = lmi.solve(tol)?;
    sol.sdp.ensure_optimal()?;
    let witness = w.value(&sol.y).hermitian_part();
    let mut decompositions = Vec::new();
    for (b, (q, left)) in cuts.iter().zip(&qs) {
        let qm = q.value(&sol.y).hermitian_part();
        let qt = crate::tensor::ops::partial_transpose_dims(&qm, &dims, left)?;
        let p = (&witness - &qt).hermitian_part();
        decompositions.push(CutDecomposition {
            cut: b.clone(),
            p,
            q: qm,
        });
    }
    let audit = audit_witness(rho, &witness, &decompositions, tol)?;
    let status = if audit.passed && audit.value < -tol.witness {
        GmeStatus::GmeCertified
    } else {
        GmeStatus::NoViolation
    };
    Ok(GmeCertificate {
        value: audit.value,
        witness,
        decompositions,
        status,
        audit,
        sdp_iterations: sol.sdp.iterations,
    })
}

/// Check a witness decomposition from scratch: every `P_M`, `Q_M` between
/// `0` and `I`, `W = P_M + Q_M^{T_M}`, and `Tr(Wρ)` recomputed.
pub fn audit_witness(
    rho: &DensityMatrix,
    witness: &ComplexMatrix,
    decompositions: &[CutDecomposition],
    tol: &Tolerances,
) -> Result<WitnessAudit> {
    let n = party_count(rho)?;
    let dims = rho.layout().dims();
    let mut residual: f64 = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut seen: Vec<Bipartition> = Vec::new();
    for dec in decompositions {
        let (left, _) = cut_factors(&dec.cut, rho.layout())?;
        let qt = crate::tensor::ops::partial_transpose_dims(&dec.q, &dims, &left)?;
        let r = (&(witness - &dec.p) - &qt).frobenius_norm();
        residual = residual.max(r);
        for m in [&dec.p, &dec.q] {
            let ev = hermitian_eigenvalues_with(m, tol)?;
            hi = hi.max(ev[0]);
            lo = lo.min(*ev.last().expect("nonempty"));
        }
        seen.push(dec.cut.clone());
    }
    seen.sort();
    let all = enumerate_bipartitions(n)?;
    let z = witness.trace_product(rho.matrix());
    let value = z.re;
    const AUDIT: f64 = 1e-7;
    let passed = seen == all
        && residual <= 1e-6
        && lo >= -AUDIT
        && hi <= 1.0 + AUDIT
        && z.im.abs() <= 1e-9
        && witness.hermitian_deviation() <= 1e-12;
    Ok(WitnessAudit {
        decomposition_residual: residual,
        min_eigenvalue: lo,
        max_eigenvalue: hi,
        value,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivatabilityVerdict {
    ActivatableCertified,
    NotActivatableCertified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutActivation {
    pub cut: Bipartition,
    pub negativity: f64,
    /// Separability evidence, gathered for cuts without detectable negativity.
    pub evidence: Option<SeparabilityEvidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivatabilityCertificate {
    pub cuts: Vec<CutActivation>,
    pub verdict: ActivatabilityVerdict,
}

pub fn activatable_via_npt(rho: &DensityMatrix) -> Result<ActivatabilityCertificate> {
    activatable_via_npt_with(rho, &EvidenceOptions::default(), &Tolerances::DEFAULT)
}

/// Negativity on every cut: NPT everywhere means `ρ` is not partially
/// separable for any cut, so some tensor power is GME. A separable cut rules
/// that out.
pub fn activatable_via_npt_with(
    rho: &DensityMatrix,
    opts: &EvidenceOptions,
    tol: &Tolerances,
) -> Result<ActivatabilityCertificate> {
    let n = party_count(rho)?;
    let mut cuts = Vec::new();
    for b in enumerate_bipartitions(n)? {
        let negativity = negativity_with(rho, &b, tol)?;
        let evidence = if negativity > tol.npt_activation {
            None
        } else {
            let (left, _) = cut_factors(&b, rho.layout())?;
            Some(separability_evidence(rho, &left, opts, tol)?)
        };
        cuts.push(CutActivation {
            cut: b,
            negativity,
            evidence,
        });
    }
    let all_npt = cuts.iter().all(|c| c.negativity > tol.npt_activation);
    let some_separable = cuts.iter().any(|c| {
        c.evidence
            .as_ref()
            .is_some_and(|e| e.is_certified_separable())
    });
    let verdict = if all_npt {
        ActivatabilityVerdict::ActivatableCertified
    } else if some_separable {
        ActivatabilityVerdict::NotActivatableCertified
    } else {
        ActivatabilityVerdict::Inconclusive
    };
    Ok(ActivatabilityCertificate { cuts, verdict })
}

/// Random `n`-qubit biseparable state: Dirichlet weights over the cuts, each
/// term a product of random mixed states across its cut.
pub fn random_biseparable(n: usize, seed: u64) -> Result<DensityMatrix> {
    if !(2..=8).contains(&n) {
        return Err(Error::Domain(format!(
            "random biseparable states support 2..=8 qubits, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cuts = enumerate_bipartitions(n)?;
    let raw: Vec<f64> = cuts
        .iter()
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    let layout = SubsystemLayout::qubits(n);
    let mut acc = ComplexMatrix::zeros(1 << n, 1 << n);
    for (b, w) in cuts.iter().zip(raw) {
        let (left, right) = cut_factors(b, &layout)?;
        let a = random_density(SubsystemLayout::qubits(left.len()), &mut rng);
        let c = random_density(SubsystemLayout::qubits(right.len()), &mut rng);
        let order: Vec<usize> = left.iter().chain(&right).copied().collect();
        // new factor j is the kron factor holding qubit j
        let perm: Vec<usize> = (0..n)
            .map(|j| order.iter().position(|&f| f == j).expect("covers"))
            .collect();
        let term = a
            .kron(&c)
            .with_layout(SubsystemLayout::qubits(n))?
            .permute_factors(&perm)?;
        acc.add_scaled(w / total, term.matrix());
    }
    DensityMatrix::new(acc.hermitian_part(), layout)
}
