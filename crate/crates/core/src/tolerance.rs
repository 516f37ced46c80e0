//! Numeric tolerances used across the toolkit.
//!
//! Every comparison against a threshold reads its value from a [`Tolerances`]
//! record. [`Tolerances::DEFAULT`] carries the stock values; the CLI can
//! override individual fields.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max entrywise deviation from Hermiticity for a density matrix.
    pub hermitian: f64,
    /// Hermiticity tolerance accepted by the eigensolver.
    pub eig_hermitian: f64,
    /// Allowed deviation of the trace from 1.
    pub trace: f64,
    /// Most negative eigenvalue tolerated in a density matrix.
    pub psd: f64,
    /// Jacobi stops when off-diagonal Frobenius mass drops below this times ‖A‖_F.
    pub jacobi_offdiag: f64,
    pub jacobi_max_sweeps: usize,
    /// A partial-transpose eigenvalue below `-ppt` certifies entanglement.
    pub ppt: f64,
    /// Negativities below this are clipped to zero.
    pub negativity_clip: f64,
    /// Slack on the purity-ball bound `Tr ρ² ≤ 1/(d-1)`.
    pub purity_ball: f64,
    /// A cut counts as NPT when its negativity exceeds this.
    pub npt_activation: f64,
    /// Witness values below `-witness` certify GME.
    pub witness: f64,
    /// Margin added to the biseparable sum bound before declaring violation.
    pub sum_margin: f64,
    /// SDP: primal/dual residual and relative gap targets.
    pub sdp_feasibility: f64,
    pub sdp_gap: f64,
    pub sdp_max_iterations: usize,
    /// Gilbert iterations stop once the Frobenius residual is below this.
    pub gilbert_converged: f64,
    pub gilbert_max_iterations: usize,
    pub gilbert_restarts: usize,
    /// Certificate checks.
    pub weights_sum: f64,
    pub term_psd: f64,
    pub reconstruction: f64,
    pub product_structure: f64,
    /// Largest total Hilbert-space dimension handled by dense algebra.
    pub dimension_cap: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        eig_hermitian: 1e-10,
        trace: 1e-10,
        psd: 1e-10,
        jacobi_offdiag: 1e-13,
        jacobi_max_sweeps: 100,
        ppt: 1e-10,
        negativity_clip: 1e-12,
        purity_ball: 1e-14,
        npt_activation: 1e-8,
        witness: 1e-6,
        sum_margin: 1e-6,
        sdp_feasibility: 1e-7,
        sdp_gap: 1e-7,
        sdp_max_iterations: 200,
        gilbert_converged: 1e-6,
        gilbert_max_iterations: 10_000,
        gilbert_restarts: 5,
        weights_sum: 1e-10,
        term_psd: 1e-9,
        reconstruction: 1e-9,
        product_structure: 1e-10,
        dimension_cap: 256,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
