//! Two-sided bounds on the distance to partially separable states, and GME tests.
//!
//! The trace distance `T_M(ρ) = ½ min_σ ‖ρ − σ‖₁` to the states separable
//! across a cut `M|M̄` is bracketed from below by the PPT relaxation and from
//! above by an explicit product mixture found with Gilbert's algorithm.

mod evidence;
mod gilbert;
mod gme;
mod tppt;

pub use evidence::{
    separability_evidence, tensor_components, verify_evidence, ComponentEvidence, EvidenceOptions,
    SeparabilityEvidence, GILBERT_DIMENSION_CAP,
};
pub use gilbert::{gilbert_frame, GilbertOptions, GilbertResult, ProductAtom, ProductMixture};
pub use gme::{
    activatable_via_npt, activatable_via_npt_with, audit_witness, ppt_mixture_witness,
    ppt_mixture_witness_with, random_biseparable, sum_criterion, sum_criterion_copies,
    sum_criterion_with, sum_threshold, ActivatabilityCertificate, ActivatabilityVerdict,
    CopiesScan, CutActivation, CutDecomposition, GmeCertificate, GmeStatus, SumCriterionReport,
    SumCutEntry, SumVerdict, WitnessAudit, WITNESS_DIMENSION_CAP,
};
pub use tppt::{t_ppt_frame, TpptBound, TPPT_COMPLEX_CAP, TPPT_REAL_CAP};

pub(crate) use evidence::CutFrame;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::partitions::{cut_factors, Bipartition};
use crate::tensor::DensityMatrix;
use crate::tolerance::Tolerances;

/// Interval `[lower, upper]` containing `T_M(ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBounds {
    pub cut: Bipartition,
    pub lower: f64,
    pub upper: f64,
    pub sdp_iterations: usize,
    pub sdp_primal_residual: f64,
    pub sdp_dual_residual: f64,
    pub gilbert_iterations: usize,
    pub gilbert_frobenius: f64,
    pub gilbert_converged: bool,
}

pub fn t_ppt_lower_bound(rho: &DensityMatrix, b: &Bipartition) -> Result<f64> {
    Ok(t_ppt_with(rho, b, &Tolerances::DEFAULT)?.lower)
}

/// PPT relaxation across `b`, with solver diagnostics.
pub fn t_ppt_with(rho: &DensityMatrix, b: &Bipartition, tol: &Tolerances) -> Result<TpptBound> {
    let (left, _) = cut_factors(b, rho.layout())?;
    tppt::t_ppt_factors(rho, &left, tol)
}

/// Product mixture close to `rho` across `b`; its distance bounds `T_M` from above.
pub fn gilbert_upper_bound(
    rho: &DensityMatrix,
    b: &Bipartition,
    opts: &GilbertOptions,
) -> Result<GilbertResult> {
    let (left, _) = cut_factors(b, rho.layout())?;
    let frame = CutFrame::new(rho, &left)?;
    gilbert_frame(&frame.matrix, frame.dl, frame.dr, opts)
}

pub fn distance_bounds(
    rho: &DensityMatrix,
    b: &Bipartition,
    opts: &GilbertOptions,
    tol: &Tolerances,
) -> Result<DistanceBounds> {
    let lower = t_ppt_with(rho, b, tol)?;
    let upper = gilbert_upper_bound(rho, b, opts)?;
    Ok(DistanceBounds {
        cut: b.clone(),
        lower: lower.lower,
        upper: upper.upper_bound,
        sdp_iterations: lower.iterations,
        sdp_primal_residual: lower.primal_residual,
        sdp_dual_residual: lower.dual_residual,
        gilbert_iterations: upper.iterations,
        gilbert_frobenius: upper.frobenius,
        gilbert_converged: upper.converged,
    })
}
