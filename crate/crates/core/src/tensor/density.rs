use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::eig::hermitian_eigenvalues_with;
use crate::tensor::layout::SubsystemLayout;
use crate::tensor::matrix::{kron_unchecked, ComplexMatrix};
use crate::tensor::ops;
use crate::tolerance::Tolerances;

/// A Hermitian, positive semidefinite, unit-trace matrix bound to a layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    layout: SubsystemLayout,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant.
    pub fn new(matrix: ComplexMatrix, layout: SubsystemLayout) -> Result<Self> {
        Self::new_with(matrix, layout, &Tolerances::DEFAULT)
    }

    pub fn new_with(
        matrix: ComplexMatrix,
        layout: SubsystemLayout,
        tol: &Tolerances,
    ) -> Result<Self> {
        matrix.ensure_square()?;
        if matrix.dim() != layout.total_dimension() {
            return Err(Error::DimensionMismatch(
                matrix.dim(),
                layout.total_dimension(),
            ));
        }
        if matrix
            .data()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let dev = matrix.hermitian_deviation();
        if dev > tol.hermitian {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = *hermitian_eigenvalues_with(&matrix, tol)?
            .last()
            .expect("nonempty");
        if min < -tol.psd {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix, layout })
    }

    /// For matrices that are valid by construction (tensor products,
    /// partial traces, convex mixtures of valid states).
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, layout: SubsystemLayout) -> Self {
        debug_assert_eq!(matrix.dim(), layout.total_dimension());
        Self { matrix, layout }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn into_parts(self) -> (ComplexMatrix, SubsystemLayout) {
        (self.matrix, self.layout)
    }

    pub fn with_layout(self, layout: SubsystemLayout) -> Result<Self> {
        if layout.total_dimension() != self.dim() || layout.dims() != self.layout.dims() {
            return Err(Error::InvalidLayout(
                "relabelled layout must keep factor dimensions".into(),
            ));
        }
        Ok(Self {
            matrix: self.matrix,
            layout,
        })
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn partial_transpose(&self, factors: &[usize]) -> Result<ComplexMatrix> {
        ops::partial_transpose_dims(&self.matrix, &self.layout.dims(), factors)
    }

    pub fn partial_trace(&self, traced: &[usize]) -> Result<DensityMatrix> {
        let m = ops::partial_trace_dims(&self.matrix, &self.layout.dims(), traced)?;
        let kept: Vec<usize> = (0..self.layout.len())
            .filter(|i| !traced.contains(i))
            .collect();
        Ok(Self::new_unchecked(m, self.layout.select(&kept)?))
    }

    /// Keep only the listed factors (trace out the rest), in layout order.
    pub fn reduce_to(&self, kept: &[usize]) -> Result<DensityMatrix> {
        for &k in kept {
            self.layout.check_index(k)?;
        }
        let traced: Vec<usize> = (0..self.layout.len())
            .filter(|i| !kept.contains(i))
            .collect();
        if traced.is_empty() {
            return Ok(self.clone());
        }
        self.partial_trace(&traced)
    }

    /// New factor `j` is old factor `perm[j]`; layout labels follow.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let m = ops::permute_factors_dims(&self.matrix, &self.layout.dims(), perm)?;
        Ok(Self::new_unchecked(m, self.layout.select(perm)?))
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::new_unchecked(
            kron_unchecked(&self.matrix, &other.matrix),
            self.layout.concat(&other.layout),
        )
    }

    /// Convex combination `Σ w_i ρ_i`; all states must share one layout.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Domain("empty mixture".into()))?
            .1;
        let mut m = ComplexMatrix::zeros(first.dim(), first.dim());
        let mut total = 0.0;
        for (w, rho) in terms {
            if *w < 0.0 {
                return Err(Error::Domain(format!("negative mixture weight {w}")));
            }
            if rho.layout.dims() != first.layout.dims() {
                return Err(Error::DimensionMismatch(rho.dim(), first.dim()));
            }
            m.add_scaled(*w, &rho.matrix);
            total += w;
        }
        if (total - 1.0).abs() > Tolerances::DEFAULT.trace {
            return Err(Error::InvalidTrace(total));
        }
        Ok(Self::new_unchecked(m, first.layout.clone()))
    }

    /// Maximally mixed state on a layout.
    pub fn maximally_mixed(layout: SubsystemLayout) -> DensityMatrix {
        Self::new_unchecked(
            ComplexMatrix::maximally_mixed(layout.total_dimension()),
            layout,
        )
    }

    /// Normalise a positive semidefinite matrix by its trace.
    pub(crate) fn normalized(m: ComplexMatrix, layout: SubsystemLayout) -> Result<DensityMatrix> {
        let tr = m.trace().re;
        if tr <= 1e-300 {
            return Err(Error::Domain("cannot normalise a traceless matrix".into()));
        }
        Ok(Self::new_unchecked(m.scale(1.0 / tr), layout))
    }
}
