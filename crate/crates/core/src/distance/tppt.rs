//! Lower bound on the trace distance to the separable set from the PPT relaxation.

use serde::{Deserialize, Serialize};

use crate::distance::evidence::CutFrame;
use crate::error::{Error, Result};
use crate::sdp::{AffineExpr, LmiBuilder, SolveStatus};
use crate::tensor::{ComplexMatrix, DensityMatrix};
use crate::tolerance::Tolerances;

/// Largest state dimension for the relaxation with real data.
pub const TPPT_REAL_CAP: usize = 64;
/// Largest state dimension for the relaxation with complex data.
pub const TPPT_COMPLEX_CAP: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpptBound {
    /// Certified lower bound on the distance.
    pub lower: f64,
    /// Value attained by the feasible separable-candidate `σ`.
    pub attained: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub status: SolveStatus,
}

/// Unit map `|r⟩⟨c| ↦ (|r⟩⟨c|)^{T_L}` for a state whose left `dl`-dimensional
/// side comes first.
pub(crate) fn frame_transpose(dl: usize, dr: usize) -> impl Fn(usize, usize) -> (usize, usize) {
    move |r, c| {
        let (ri, rk) = (r / dr, r % dr);
        let (ci, ck) = (c / dr, c % dr);
        debug_assert!(ri < dl && ci < dl);
        (ci * dr + rk, ri * dr + ck)
    }
}

/// `min ½‖ρ − σ‖₁` over PPT states `σ`, solved as
/// `min Tr B` with `B ⪰ 0`, `B + ρ − σ ⪰ 0`, `σ ⪰ 0`, `σ^{T_L} ⪰ 0`, `Tr σ = 1`.
pub fn t_ppt_frame(
    rho: &ComplexMatrix,
    dl: usize,
    dr: usize,
    tol: &Tolerances,
) -> Result<TpptBound> {
    let d = dl * dr;
    let real = rho.is_real();
    let cap = if real {
        TPPT_REAL_CAP
    } else {
        TPPT_COMPLEX_CAP
    };
    if d > cap {
        return Err(Error::DimensionCap { dim: d, cap });
    }
    let mut lmi = LmiBuilder::new();
    let s = lmi.traceless(d, real);
    let b = lmi.hermitian(d, real);
    lmi.objective_trace(&b, -1.0, &ComplexMatrix::identity(d));
    let sigma = AffineExpr::constant(&ComplexMatrix::maximally_mixed(d)).add_var(1.0, &s);
    lmi.lmi(sigma.clone());
    lmi.lmi(sigma.map_units(frame_transpose(dl, dr)));
    lmi.lmi(AffineExpr::zero(d).add_var(1.0, &b));
    lmi.lmi(
        AffineExpr::constant(rho)
            .add_var(1.0, &b)
            .add_expr(-1.0, &sigma),
    );
    let sol = lmi.solve(tol)?;
    if sol.sdp.status != SolveStatus::Optimal {
        return Err(Error::Solver(format!(
            "PPT relaxation ended with {:?} after {} iterations (pinf {:.2e}, dinf {:.2e}, gap {:.2e})",
            sol.sdp.status, sol.sdp.iterations, sol.sdp.primal_residual, sol.sdp.dual_residual, sol.sdp.gap
        )));
    }
    Ok(TpptBound {
        lower: (-sol.upper_bound).max(0.0),
        attained: (-sol.value).max(0.0),
        iterations: sol.sdp.iterations,
        primal_residual: sol.sdp.primal_residual,
        dual_residual: sol.sdp.dual_residual,
        gap: sol.sdp.gap,
        status: sol.sdp.status,
    })
}

pub(crate) fn t_ppt_factors(
    rho: &DensityMatrix,
    left: &[usize],
    tol: &Tolerances,
) -> Result<TpptBound> {
    let frame = CutFrame::new(rho, left)?;
    t_ppt_frame(&frame.matrix, frame.dl, frame.dr, tol)
}
