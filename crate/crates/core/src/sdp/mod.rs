//! Dense semidefinite programming over Hermitian blocks.
//!
//! [`SdpProblem`] is the standard primal form. Most callers find it easier to
//! write linear matrix inequalities in real parameters with [`LmiBuilder`],
//! which maps them onto the dual side of an [`SdpProblem`].

pub(crate) mod linalg;
mod problem;
mod solver;

pub use problem::{
    Constraint, IterationRecord, SdpProblem, SdpSolution, SolveStatus, SparseHermitian,
};
pub use solver::{solve, solve_embedded, solve_with};

use crate::error::Result;
use crate::tensor::{ComplexMatrix, C64};
use crate::tolerance::Tolerances;

/// A Hermitian matrix variable expressed through consecutive real parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianVar {
    offset: usize,
    dim: usize,
    real: bool,
    traceless: bool,
}

impl HermitianVar {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_count(&self) -> usize {
        let d = self.dim;
        let off = d * (d - 1) / 2;
        let diag = if self.traceless { d - 1 } else { d };
        if self.real {
            diag + off
        } else {
            diag + 2 * off
        }
    }

    pub fn params(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.param_count()
    }

    /// Basis matrices as `(parameter, upper-triangle entries)`.
    pub fn basis(&self) -> Vec<(usize, Vec<(usize, usize, C64)>)> {
        let d = self.dim;
        let mut out = Vec::with_capacity(self.param_count());
        let mut k = self.offset;
        let one = C64::new(1.0, 0.0);
        let diag = if self.traceless { d - 1 } else { d };
        for a in 0..diag {
            let mut e = vec![(a, a, one)];
            if self.traceless {
                e.push((d - 1, d - 1, -one));
            }
            out.push((k, e));
            k += 1;
        }
        for a in 0..d {
            for b in (a + 1)..d {
                out.push((k, vec![(a, b, one)]));
                k += 1;
                if !self.real {
                    out.push((k, vec![(a, b, C64::new(0.0, 1.0))]));
                    k += 1;
                }
            }
        }
        out
    }

    /// The matrix represented by a parameter vector.
    pub fn value(&self, y: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (k, entries) in self.basis() {
            for (r, c, z) in entries {
                m[(r, c)] += z * y[k];
                if r != c {
                    m[(c, r)] += z.conj() * y[k];
                }
            }
        }
        m
    }
}

/// Affine Hermitian expression `F₀ + Σ yᵢ Fᵢ`.
#[derive(Debug, Clone)]
pub struct AffineExpr {
    dim: usize,
    constant: ComplexMatrix,
    terms: Vec<(usize, Vec<(usize, usize, C64)>)>,
}

impl AffineExpr {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            constant: ComplexMatrix::zeros(dim, dim),
            terms: Vec::new(),
        }
    }

    pub fn constant(c: &ComplexMatrix) -> Self {
        Self {
            dim: c.dim(),
            constant: c.hermitian_part(),
            terms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_constant(mut self, scale: f64, c: &ComplexMatrix) -> Self {
        self.constant.add_scaled(scale, &c.hermitian_part());
        self
    }

    pub fn add_var(mut self, scale: f64, v: &HermitianVar) -> Self {
        assert_eq!(v.dim, self.dim, "variable dimension");
        for (k, e) in v.basis() {
            self.terms.push((
                k,
                e.into_iter().map(|(r, c, z)| (r, c, z * scale)).collect(),
            ));
        }
        self
    }

    pub fn add_expr(mut self, scale: f64, other: &AffineExpr) -> Self {
        assert_eq!(other.dim, self.dim, "expression dimension");
        self.constant.add_scaled(scale, &other.constant);
        for (k, e) in &other.terms {
            self.terms
                .push((*k, e.iter().map(|&(r, c, z)| (r, c, z * scale)).collect()));
        }
        self
    }

    /// Apply a linear map sending each matrix unit `|r⟩⟨c|` to another unit,
    /// such as a partial transpose.
    pub fn map_units(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> Self {
        let d = self.dim;
        let mut constant = ComplexMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                let (r2, c2) = f(r, c);
                constant[(r2, c2)] = self.constant[(r, c)];
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, e)| {
                let mapped = e
                    .iter()
                    .map(|&(r, c, z)| {
                        let (r2, c2) = f(r, c);
                        if r2 <= c2 {
                            (r2, c2, z)
                        } else {
                            (c2, r2, z.conj())
                        }
                    })
                    .collect();
                (*k, mapped)
            })
            .collect();
        Self {
            dim: d,
            constant,
            terms,
        }
    }

    /// Evaluate at a parameter vector.
    pub fn value(&self, y: &[f64]) -> ComplexMatrix {
        let mut m = self.constant.clone();
        for (k, e) in &self.terms {
            for &(r, c, z) in e {
                m[(r, c)] += z * y[*k];
                if r != c {
                    m[(c, r)] += z.conj() * y[*k];
                }
            }
        }
        m
    }
}

/// Builder for `maximise bᵀy` subject to `F₀ + Σ yᵢ Fᵢ ⪰ 0` per block.
#[derive(Debug, Clone, Default)]
pub struct LmiBuilder {
    params: usize,
    objective: Vec<f64>,
    lmis: Vec<AffineExpr>,
}

/// Solution of an [`LmiBuilder`] problem.
#[derive(Debug, Clone)]
pub struct LmiSolution {
    pub y: Vec<f64>,
    /// `bᵀy` at the returned parameters.
    pub value: f64,
    /// Objective of the associated minimisation; an upper bound on the
    /// maximum whenever its residuals are small.
    pub upper_bound: f64,
    pub sdp: SdpSolution,
}

impl LmiBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn param_count(&self) -> usize {
        self.params
    }

    pub fn hermitian(&mut self, dim: usize, real: bool) -> HermitianVar {
        self.var(dim, real, false)
    }

    /// Hermitian variable of trace zero.
    pub fn traceless(&mut self, dim: usize, real: bool) -> HermitianVar {
        self.var(dim, real, true)
    }

    fn var(&mut self, dim: usize, real: bool, traceless: bool) -> HermitianVar {
        let v = HermitianVar {
            offset: self.params,
            dim,
            real,
            traceless,
        };
        self.params += v.param_count();
        self.objective.resize(self.params, 0.0);
        v
    }

    /// Add `scale · Tr(M v)` to the objective.
    pub fn objective_trace(&mut self, v: &HermitianVar, scale: f64, m: &ComplexMatrix) {
        for (k, e) in v.basis() {
            let mut s = 0.0;
            for (r, c, z) in e {
                // Tr(M B) with B = z|r⟩⟨c| + conj(z)|c⟩⟨r|
                s += if r == c {
                    (m[(r, r)] * z).re
                } else {
                    (m[(c, r)] * z + m[(r, c)] * z.conj()).re
                };
            }
            self.objective[k] += scale * s;
        }
    }

    pub fn lmi(&mut self, e: AffineExpr) {
        self.lmis.push(e);
    }

    pub fn build(&self) -> SdpProblem {
        let blocks: Vec<usize> = self.lmis.iter().map(|e| e.dim).collect();
        let objective = self
            .lmis
            .iter()
            .map(|e| SparseHermitian::from_dense(&e.constant))
            .collect();
        let mut constraints: Vec<Constraint> = self
            .objective
            .iter()
            .map(|&b| Constraint {
                coefficients: Vec::new(),
                rhs: b,
            })
            .collect();
        for (bk, e) in self.lmis.iter().enumerate() {
            let mut per: std::collections::BTreeMap<usize, SparseHermitian> = Default::default();
            for (k, entries) in &e.terms {
                let a = per.entry(*k).or_insert_with(|| SparseHermitian::new(e.dim));
                for &(r, c, z) in entries {
                    a.add(r, c, -z);
                }
            }
            for (k, a) in per {
                constraints[k].coefficients.push((bk, a));
            }
        }
        SdpProblem {
            blocks,
            objective,
            constraints,
        }
    }

    pub fn solve(&self, tol: &Tolerances) -> Result<LmiSolution> {
        let sdp = solve_with(&self.build(), tol)?;
        Ok(LmiSolution {
            value: sdp.dual_objective,
            upper_bound: sdp.primal_objective,
            y: sdp.dual.clone(),
            sdp,
        })
    }
}
