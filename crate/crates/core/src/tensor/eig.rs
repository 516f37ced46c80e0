//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation removes the phase of the pivot `a_pq = |a_pq| e^{iφ}` and then
//! applies the classical real rotation, so a single step zeroes the pair
//! `(p, q)` while keeping the diagonal real.

use crate::error::{Error, Result};
use crate::tensor::matrix::{ComplexMatrix, C64, ZERO};
use crate::tolerance::Tolerances;

/// Eigenvalues in descending order with matching unitary eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
    pub sweeps: usize,
}

impl HermitianEigen {
    /// Column `i` of the eigenvector matrix.
    pub fn vector(&self, i: usize) -> Vec<C64> {
        let n = self.eigenvectors.rows();
        (0..n).map(|r| self.eigenvectors[(r, i)]).collect()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| v[(r, k)] * self.eigenvalues[k] * v[(c, k)].conj())
                .sum()
        })
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    hermitian_eig_with(a, &Tolerances::DEFAULT)
}

pub fn hermitian_eig_with(a: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    check_hermitian(a, tol)?;
    let (vals, vecs, sweeps) = jacobi(a, true, tol);
    let vecs = vecs.expect("vectors requested");
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let eigenvalues = order.iter().map(|&i| vals[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| vecs[r * n + order[c]]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigenvalues_with(a, &Tolerances::DEFAULT)
}

pub fn hermitian_eigenvalues_with(a: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    check_hermitian(a, tol)?;
    let (mut vals, _, _) = jacobi(a, false, tol);
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(*hermitian_eigenvalues(a)?.last().expect("nonempty matrix"))
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|x| x.abs()).sum())
}

fn check_hermitian(a: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    a.ensure_square()?;
    if a.data()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonFinite);
    }
    let dev = a.hermitian_deviation();
    if dev > tol.eig_hermitian {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

fn off_diagonal_mass(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[r * n + c].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(
    m: &ComplexMatrix,
    want_vectors: bool,
    tol: &Tolerances,
) -> (Vec<f64>, Option<Vec<C64>>, usize) {
    let n = m.dim();
    let mut a: Vec<C64> = m.hermitian_part().into_data();
    for i in 0..n {
        a[i * n + i].im = 0.0;
    }
    let mut v: Option<Vec<C64>> = want_vectors.then(|| ComplexMatrix::identity(n).into_data());
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = tol.jacobi_offdiag * norm;
    let skip = 1e-18 * norm;
    let mut sweeps = 0;
    while sweeps < tol.jacobi_max_sweeps {
        if off_diagonal_mass(&a, n) <= target {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = apq.norm();
                if g <= skip || g == 0.0 {
                    continue;
                }
                let e = apq / g;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let se = e * s;
                let sec = se.conj();
                // A <- A J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - sec * akq;
                    a[k * n + q] = se * akp + akq * c;
                }
                // A <- J^† A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - se * aqk;
                    a[q * n + k] = sec * apk + aqk * c;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(app - t * g, 0.0);
                a[q * n + q] = C64::new(aqq + t * g, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * c - sec * vkq;
                        v[k * n + q] = se * vkp + vkq * c;
                    }
                }
            }
        }
    }
    let vals = (0..n).map(|i| a[i * n + i].re).collect();
    (vals, v, sweeps)
}

/// Eigenvector of the largest eigenvalue.
pub fn top_eigenvector(a: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let e = hermitian_eig(a)?;
    Ok((e.eigenvalues[0], e.vector(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell_projector() -> ComplexMatrix {
        let h = 0.5;
        ComplexMatrix::from_real(
            4,
            4,
            &[h, 0., 0., h, 0., 0., 0., 0., 0., 0., 0., 0., h, 0., 0., h],
        )
        .unwrap()
    }

    #[test]
    fn rank_one_projector() {
        let e = hermitian_eig(&bell_projector()).unwrap();
        let expect = [1.0, 0.0, 0.0, 0.0];
        for (a, b) in e.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_sorted_descending() {
        let e = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn trace_norm_of_shifted_bell() {
        // phi+ - I/4 has eigenvalues 3/4 and -1/4 (x3)
        let a = &bell_projector() - &ComplexMatrix::maximally_mixed(4);
        assert!((trace_norm(&a).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_unitarity_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 3, 7, 16, 33] {
            let a = random_hermitian(n, &mut rng);
            let e = hermitian_eig(&a).unwrap();
            let res = (&e.reconstruct() - &a).frobenius_norm() / a.frobenius_norm();
            assert!(res < 1e-12, "n={n} residual {res}");
            let vv = e.eigenvectors.adjoint().matmul(&e.eigenvectors);
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eigenvalues_only_match_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(12, &mut rng);
        let full = hermitian_eig(&a).unwrap().eigenvalues;
        let vals = hermitian_eigenvalues(&a).unwrap();
        for (x, y) in full.iter().zip(&vals) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
