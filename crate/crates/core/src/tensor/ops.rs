//! Index gymnastics on matrices over a list of tensor-factor dimensions.
//!
//! These act on plain matrices plus a dimension list so that witnesses and
//! other non-state operators can use them; [`DensityMatrix`](super::DensityMatrix)
//! wraps them with layout bookkeeping.

use crate::error::{Error, Result};
use crate::tensor::matrix::{ComplexMatrix, ZERO};

/// Mixed-radix digits of `index` (factor 0 most significant).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn compose(d: &[usize], dims: &[usize]) -> usize {
    d.iter().zip(dims).fold(0, |acc, (&x, &n)| acc * n + x)
}

fn check_dims(a: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    a.ensure_square()?;
    let total: usize = dims.iter().product();
    if total != a.dim() {
        return Err(Error::DimensionMismatch(a.dim(), total));
    }
    Ok(())
}

fn check_indices(indices: &[usize], count: usize) -> Result<()> {
    for &i in indices {
        if i >= count {
            return Err(Error::FactorOutOfRange { index: i, count });
        }
    }
    Ok(())
}

/// Transpose on the listed factors. Involutive and entrywise exact.
pub fn partial_transpose_dims(
    a: &ComplexMatrix,
    dims: &[usize],
    factors: &[usize],
) -> Result<ComplexMatrix> {
    check_dims(a, dims)?;
    check_indices(factors, dims.len())?;
    let mut mask = vec![false; dims.len()];
    for &f in factors {
        mask[f] = true;
    }
    let n = a.dim();
    let k = dims.len();
    let mut rd = vec![0; k];
    let mut cd = vec![0; k];
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        digits(r, dims, &mut rd);
        for c in 0..n {
            digits(c, dims, &mut cd);
            for j in 0..k {
                if mask[j] {
                    std::mem::swap(&mut rd[j], &mut cd[j]);
                }
            }
            out[(r, c)] = a[(compose(&rd, dims), compose(&cd, dims))];
            for j in 0..k {
                if mask[j] {
                    std::mem::swap(&mut rd[j], &mut cd[j]);
                }
            }
        }
    }
    Ok(out)
}

/// Trace out the listed factors; the remaining ones keep their order.
pub fn partial_trace_dims(
    a: &ComplexMatrix,
    dims: &[usize],
    traced: &[usize],
) -> Result<ComplexMatrix> {
    check_dims(a, dims)?;
    check_indices(traced, dims.len())?;
    let mut mask = vec![false; dims.len()];
    for &f in traced {
        mask[f] = true;
    }
    if mask.iter().all(|&m| m) {
        return Err(Error::InvalidLayout("cannot trace out every factor".into()));
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|&i| !mask[i]).collect();
    let gone: Vec<usize> = (0..dims.len()).filter(|&i| mask[i]).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let gone_dims: Vec<usize> = gone.iter().map(|&i| dims[i]).collect();
    let nk: usize = kept_dims.iter().product();
    let ng: usize = gone_dims.iter().product();
    let strides = strides(dims);
    // offset of each kept / traced multi-index in the full index
    let kept_off: Vec<usize> = (0..nk)
        .map(|x| offset(x, &kept, &kept_dims, &strides))
        .collect();
    let gone_off: Vec<usize> = (0..ng)
        .map(|x| offset(x, &gone, &gone_dims, &strides))
        .collect();
    let mut out = ComplexMatrix::zeros(nk, nk);
    for r in 0..nk {
        for c in 0..nk {
            let mut acc = ZERO;
            for &g in &gone_off {
                acc += a[(kept_off[r] + g, kept_off[c] + g)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn offset(x: usize, which: &[usize], sub_dims: &[usize], strides: &[usize]) -> usize {
    let mut d = vec![0; sub_dims.len()];
    digits(x, sub_dims, &mut d);
    which.iter().zip(&d).map(|(&f, &v)| v * strides[f]).sum()
}

/// Validate that `perm` is a permutation of `0..n`.
pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {} factors",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Reorder factors: new factor `j` is old factor `perm[j]`.
pub fn permute_factors_dims(
    a: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix> {
    check_dims(a, dims)?;
    check_permutation(perm, dims.len())?;
    let n = a.dim();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides = strides(dims);
    // map new flat index -> old flat index
    let mut d = vec![0; dims.len()];
    let map: Vec<usize> = (0..n)
        .map(|x| {
            digits(x, &new_dims, &mut d);
            perm.iter().zip(&d).map(|(&p, &v)| v * old_strides[p]).sum()
        })
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| a[(map[r], map[c])]))
}

/// Permute the amplitudes of a state vector the same way.
pub fn permute_vector_dims<T: Copy>(v: &[T], dims: &[usize], perm: &[usize]) -> Result<Vec<T>> {
    check_permutation(perm, dims.len())?;
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let old_strides = strides(dims);
    let mut d = vec![0; dims.len()];
    Ok((0..v.len())
        .map(|x| {
            digits(x, &new_dims, &mut d);
            v[perm
                .iter()
                .zip(&d)
                .map(|(&p, &v)| v * old_strides[p])
                .sum::<usize>()]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::matrix::{kron, C64};

    fn ket_bra(i: usize, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(i, i)] = C64::new(1.0, 0.0);
        m
    }

    #[test]
    fn transpose_of_diagonal_is_identity_map() {
        let d = ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4, 0.0, 0.0, 0.0, 0.0]);
        for set in [vec![], vec![0], vec![1, 2], vec![0, 1, 2]] {
            assert_eq!(partial_transpose_dims(&d, &[2, 2, 2], &set).unwrap(), d);
        }
    }

    #[test]
    fn full_transpose_matches() {
        let a = ComplexMatrix::from_fn(6, 6, |r, c| C64::new(r as f64, c as f64 * 0.5));
        assert_eq!(
            partial_transpose_dims(&a, &[2, 3], &[0, 1]).unwrap(),
            a.transpose()
        );
    }

    #[test]
    fn trace_of_product() {
        let a = ComplexMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        let b = ComplexMatrix::from_real(3, 3, &[0.5, 0., 0., 0., 0.25, 0., 0., 0., 0.25]).unwrap();
        let ab = kron(&a, &b).unwrap();
        assert!(
            partial_trace_dims(&ab, &[2, 3], &[1])
                .unwrap()
                .max_abs_diff(&a)
                < 1e-15
        );
        assert!(
            partial_trace_dims(&ab, &[2, 3], &[0])
                .unwrap()
                .max_abs_diff(&b)
                < 1e-15
        );
    }

    #[test]
    fn trace_everything_rejected() {
        let a = ComplexMatrix::identity(4);
        assert!(partial_trace_dims(&a, &[2, 2], &[0, 1]).is_err());
    }

    #[test]
    fn swap_product_state() {
        let a = kron(&ket_bra(0, 2), &ket_bra(1, 2)).unwrap();
        let b = kron(&ket_bra(1, 2), &ket_bra(0, 2)).unwrap();
        assert_eq!(permute_factors_dims(&a, &[2, 2], &[1, 0]).unwrap(), b);
    }

    #[test]
    fn bad_permutation() {
        let a = ComplexMatrix::identity(4);
        assert!(matches!(
            permute_factors_dims(&a, &[2, 2], &[0, 0]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(partial_transpose_dims(&a, &[2, 2], &[2]).is_err());
    }

    #[test]
    fn uneven_dims_permutation() {
        let a = ComplexMatrix::from_fn(2, 2, |r, c| C64::new((r * 2 + c) as f64, 0.0));
        let b = ComplexMatrix::from_fn(3, 3, |r, c| C64::new((r * 3 + c) as f64, 1.0));
        let ab = kron(&a, &b).unwrap();
        let ba = kron(&b, &a).unwrap();
        assert_eq!(permute_factors_dims(&ab, &[2, 3], &[1, 0]).unwrap(), ba);
    }
}
