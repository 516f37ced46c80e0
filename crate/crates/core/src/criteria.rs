//! Spectral separability tests across a bipartition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{cut_dimensions, cut_factors, Bipartition};
use crate::tensor::{hermitian_eigenvalues_with, trace_norm, ComplexMatrix, DensityMatrix};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EntangledCertified,
    SeparableCertified,
    /// Converged numerical evidence of separability without a proof.
    NumericallySeparable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub name: String,
    pub value: f64,
    pub verdict: Verdict,
    pub cut: Option<Bipartition>,
}

/// `ρ^{T_M}`, transposing every factor on the `M` side.
pub fn cut_transpose(rho: &DensityMatrix, b: &Bipartition) -> Result<ComplexMatrix> {
    let (left, _) = cut_factors(b, rho.layout())?;
    rho.partial_transpose(&left)
}

pub fn ppt_min_eig(rho: &DensityMatrix, b: &Bipartition) -> Result<CriterionVerdict> {
    ppt_min_eig_with(rho, b, &Tolerances::DEFAULT)
}

/// Minimum eigenvalue of the partial transpose; decisive only for 2×2 and 2×3 cuts.
pub fn ppt_min_eig_with(
    rho: &DensityMatrix,
    b: &Bipartition,
    tol: &Tolerances,
) -> Result<CriterionVerdict> {
    let pt = cut_transpose(rho, b)?;
    let value = *hermitian_eigenvalues_with(&pt, tol)?
        .last()
        .expect("nonempty");
    let (dl, dr) = cut_dimensions(b, rho.layout())?;
    let verdict = if value < -tol.ppt {
        Verdict::EntangledCertified
    } else if dl * dr <= 6 {
        Verdict::SeparableCertified
    } else {
        Verdict::Inconclusive
    };
    Ok(CriterionVerdict {
        name: "ppt".into(),
        value,
        verdict,
        cut: Some(b.clone()),
    })
}

pub fn negativity(rho: &DensityMatrix, b: &Bipartition) -> Result<f64> {
    negativity_with(rho, b, &Tolerances::DEFAULT)
}

/// `(‖ρ^{T_M}‖₁ − 1)/2`, with values below the clipping threshold reported as 0.
pub fn negativity_with(rho: &DensityMatrix, b: &Bipartition, tol: &Tolerances) -> Result<f64> {
    let n = (trace_norm(&cut_transpose(rho, b)?)? - 1.0) / 2.0;
    Ok(if n < tol.negativity_clip { 0.0 } else { n })
}

pub fn gb_ball_separable(rho: &DensityMatrix, b: &Bipartition) -> Result<CriterionVerdict> {
    gb_ball_separable_with(rho, b, &Tolerances::DEFAULT)
}

/// Purity test `Tr ρ² ≤ 1/(d−1)`: states this close to `I/d` are separable
/// across every cut.
pub fn gb_ball_separable_with(
    rho: &DensityMatrix,
    b: &Bipartition,
    tol: &Tolerances,
) -> Result<CriterionVerdict> {
    cut_factors(b, rho.layout())?;
    let value = rho.purity();
    let verdict = if in_purity_ball(value, rho.dim(), tol) {
        Verdict::SeparableCertified
    } else {
        Verdict::Inconclusive
    };
    Ok(CriterionVerdict {
        name: "gb".into(),
        value,
        verdict,
        cut: Some(b.clone()),
    })
}

pub(crate) fn in_purity_ball(purity: f64, d: usize, tol: &Tolerances) -> bool {
    d >= 2 && purity <= 1.0 / (d as f64 - 1.0) + tol.purity_ball
}

/// `Tr(ρ ψ)` for a rank-one projector `ψ`.
pub fn projector_fidelity(rho: &DensityMatrix, psi: &DensityMatrix) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), psi.dim()));
    }
    if (psi.purity() - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "projector has purity {}",
            psi.purity()
        )));
    }
    let z = rho.matrix().trace_product(psi.matrix());
    if z.im.abs() > 1e-12 {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{basis_state, isotropic_state, max_entangled_qubit};
    use crate::tensor::SubsystemLayout;

    fn cut() -> Bipartition {
        Bipartition::new(&[1], 2).unwrap()
    }

    #[test]
    fn ppt_examples() {
        let v = ppt_min_eig(&isotropic_state(0.5).unwrap(), &cut()).unwrap();
        assert!((v.value + 0.125).abs() < 1e-12);
        assert_eq!(v.verdict, Verdict::EntangledCertified);
        let v = ppt_min_eig(&isotropic_state(1.0 / 3.0).unwrap(), &cut()).unwrap();
        assert!(v.value.abs() < 1e-12);
        assert_eq!(v.verdict, Verdict::SeparableCertified);
        let prod = basis_state(SubsystemLayout::qubits(2), &[0, 1]).unwrap();
        assert_eq!(
            ppt_min_eig(&prod, &cut()).unwrap().verdict,
            Verdict::SeparableCertified
        );
    }

    #[test]
    fn negativity_examples() {
        for (p, want) in [(1.0, 0.5), (2.0 / 3.0, 0.25), (0.3, 0.0), (1.0 / 3.0, 0.0)] {
            let n = negativity(&isotropic_state(p).unwrap(), &cut()).unwrap();
            assert!((n - want).abs() < 1e-12, "p={p}: {n}");
        }
    }

    #[test]
    fn purity_ball_examples() {
        let mixed = DensityMatrix::maximally_mixed(SubsystemLayout::qubits(2));
        let v = gb_ball_separable(&mixed, &cut()).unwrap();
        assert!((v.value - 0.25).abs() < 1e-15);
        assert_eq!(v.verdict, Verdict::SeparableCertified);
        let v = gb_ball_separable(&isotropic_state(1.0 / 3.0).unwrap(), &cut()).unwrap();
        assert_eq!(v.verdict, Verdict::SeparableCertified);
        let v = gb_ball_separable(&max_entangled_qubit(), &cut()).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn fidelity_examples() {
        let phi = max_entangled_qubit();
        for p in [0.0, 0.4, 1.0] {
            let f = projector_fidelity(&isotropic_state(p).unwrap(), &phi).unwrap();
            assert!((f - (1.0 + 3.0 * p) / 4.0).abs() < 1e-12);
        }
        let a = basis_state(SubsystemLayout::qubits(2), &[0, 1]).unwrap();
        let b = basis_state(SubsystemLayout::qubits(2), &[1, 0]).unwrap();
        assert!(projector_fidelity(&a, &b).unwrap().abs() < 1e-15);
        assert!(projector_fidelity(&phi, &isotropic_state(0.5).unwrap()).is_err());
    }
}
