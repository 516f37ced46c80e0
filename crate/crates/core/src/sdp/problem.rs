use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64};

/// Sparse Hermitian matrix stored by its upper triangle: an entry `z` at
/// `(r, c)` with `r < c` implies `conj(z)` at `(c, r)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseHermitian {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseHermitian {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::new(dim);
        for i in 0..dim {
            m.add(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Add `z` at `(r, c)` and its conjugate at `(c, r)`. Diagonal entries
    /// keep only the real part.
    pub fn add(&mut self, r: usize, c: usize, z: C64) {
        assert!(
            r < self.dim && c < self.dim,
            "entry ({r}, {c}) outside {}",
            self.dim
        );
        if r == c {
            self.entries.push((r, r, C64::new(z.re, 0.0)));
        } else if r < c {
            self.entries.push((r, c, z));
        } else {
            self.entries.push((c, r, z.conj()));
        }
    }

    /// Keep only the Hermitian part of a dense matrix's upper triangle.
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut s = Self::new(n);
        for r in 0..n {
            for c in r..n {
                let z = if r == c {
                    m[(r, c)]
                } else {
                    (m[(r, c)] + m[(c, r)].conj()) * 0.5
                };
                if z.norm() != 0.0 {
                    s.add(r, c, z);
                }
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Merge duplicates and drop zeros.
    pub fn canonical(&self) -> Vec<(usize, usize, C64)> {
        let mut e = self.entries.clone();
        e.sort_by_key(|&(r, c, _)| (r, c));
        let mut out: Vec<(usize, usize, C64)> = Vec::with_capacity(e.len());
        for (r, c, z) in e {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += z,
                _ => out.push((r, c, z)),
            }
        }
        out.retain(|&(_, _, z)| z.norm() != 0.0);
        out
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for &(r, c, z) in &self.entries {
            m[(r, c)] += z;
            if r != c {
                m[(c, r)] += z.conj();
            }
        }
        m
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.2.im == 0.0)
    }
}

/// One linear equality `Σ_blocks Tr(A_b X_b) = rhs`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Constraint {
    pub coefficients: Vec<(usize, SparseHermitian)>,
    pub rhs: f64,
}

/// `minimise Σ Tr(C_b X_b)` subject to the constraints and `X_b ⪰ 0`.
/// The dual is `maximise bᵀy` subject to `C - Σ yᵢ Aᵢ ⪰ 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: Vec<SparseHermitian>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::Solver("no blocks".into()));
        }
        if self.blocks.iter().any(|&d| d == 0) {
            return Err(Error::Solver("block dimension 0".into()));
        }
        if self.objective.len() != self.blocks.len() {
            return Err(Error::Solver(
                "one objective matrix per block required".into(),
            ));
        }
        for (c, &d) in self.objective.iter().zip(&self.blocks) {
            if c.dim() != d {
                return Err(Error::DimensionMismatch(c.dim(), d));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::Solver(format!("constraint {i} has non-finite rhs")));
            }
            for (b, a) in &con.coefficients {
                let d = *self
                    .blocks
                    .get(*b)
                    .ok_or_else(|| Error::Solver(format!("constraint {i} names block {b}")))?;
                if a.dim() != d {
                    return Err(Error::DimensionMismatch(a.dim(), d));
                }
            }
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.objective.iter().all(SparseHermitian::is_real)
            && self
                .constraints
                .iter()
                .all(|c| c.coefficients.iter().all(|(_, a)| a.is_real()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

/// Per-iteration record kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub mu: f64,
    pub step_primal: f64,
    pub step_dual: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Primal blocks as Hermitian matrices.
    pub primal: Vec<ComplexMatrix>,
    /// Dual slack blocks `C - Σ yᵢ Aᵢ`.
    pub slack: Vec<ComplexMatrix>,
    pub dual: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|p - d| / (1 + |p| + |d|)`.
    pub gap: f64,
    /// `‖b - A(X)‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// `‖C - S - A*(y)‖_F / (1 + ‖C‖_F)`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    /// Number of Schur pivots that needed regularisation.
    pub regularized_pivots: usize,
    pub real_arithmetic: bool,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn ensure_optimal(&self) -> Result<()> {
        if self.is_optimal() {
            Ok(())
        } else {
            Err(Error::Solver(format!(
                "status {:?} after {} iterations (pinf {:.2e}, dinf {:.2e}, gap {:.2e})",
                self.status, self.iterations, self.primal_residual, self.dual_residual, self.gap
            )))
        }
    }
}
