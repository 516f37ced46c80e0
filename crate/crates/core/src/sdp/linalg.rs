//! Dense real kernels for the interior-point solver: row-major square
//! matrices, Cholesky, triangular solves and a symmetric eigensolver
//! (Householder tridiagonalisation followed by implicit QL).

/// Row-major square matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::identity(n);
        m.a.iter_mut().for_each(|x| *x *= s);
        m
    }

    #[cfg(test)]
    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.a[i * d.len() + i] = x;
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.n + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.a[r * self.n..(r + 1) * self.n]
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut t = Mat::zeros(n);
        for r in 0..n {
            for c in 0..n {
                t.a[c * n + r] = self.a[r * n + c];
            }
        }
        t
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for r in 0..n {
            for c in (r + 1)..n {
                let v = 0.5 * (self.a[r * n + c] + self.a[c * n + r]);
                self.a[r * n + c] = v;
                self.a[c * n + r] = v;
            }
        }
    }

    pub fn matmul(&self, b: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for r in 0..n {
            let orow = &mut out.a[r * n..(r + 1) * n];
            for k in 0..n {
                let x = self.a[r * n + k];
                if x == 0.0 {
                    continue;
                }
                let brow = &b.a[k * n..(k + 1) * n];
                for (o, y) in orow.iter_mut().zip(brow) {
                    *o += x * y;
                }
            }
        }
        out
    }

    /// `self · bᵀ`.
    pub fn matmul_t(&self, b: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.a[r * n + c] = dot(self.row(r), b.row(c));
            }
        }
        out
    }

    /// `selfᵀ · b`.
    pub fn t_matmul(&self, b: &Mat) -> Mat {
        self.transpose().matmul(b)
    }

    pub fn add_scaled(&mut self, s: f64, other: &Mat) {
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += s * y;
        }
    }

    pub fn inner(&self, other: &Mat) -> f64 {
        dot(&self.a, &other.a)
    }

    pub fn frobenius(&self) -> f64 {
        dot(&self.a, &self.a).sqrt()
    }
}

/// Dot product with independent accumulators so the loop vectorises.
#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    let (x, y) = (&x[..n], &y[..n]);
    let mut acc = [0.0f64; 8];
    let xc = x.chunks_exact(8);
    let yc = y.chunks_exact(8);
    let (xr, yr) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        for k in 0..8 {
            acc[k] += a[k] * b[k];
        }
    }
    let mut s = (acc[0] + acc[4]) + (acc[1] + acc[5]) + (acc[2] + acc[6]) + (acc[3] + acc[7]);
    for (a, b) in xr.iter().zip(yr) {
        s += a * b;
    }
    s
}

/// Lower Cholesky factor in place (upper triangle zeroed). Pivots that fall
/// below `floor` are replaced by `floor` and counted.
pub fn cholesky_in_place(m: &mut Mat, floor: f64) -> Result<usize, usize> {
    const BLOCK: usize = 64;
    let n = m.n;
    let mut regularized = 0;
    let a = &mut m.a;
    let mut jb = 0;
    while jb < n {
        let je = (jb + BLOCK).min(n);
        // left-looking panel update with columns 0..jb
        if jb > 0 {
            for i in jb..n {
                let (head, tail) = a.split_at_mut(i * n);
                let ri = &mut tail[..n];
                for j in jb..je.min(i + 1) {
                    let rj = if j == i {
                        None
                    } else {
                        Some(&head[j * n..j * n + jb])
                    };
                    let d = match rj {
                        Some(rj) => dot(&ri[..jb], rj),
                        None => dot(&ri[..jb], &ri[..jb]),
                    };
                    ri[j] -= d;
                }
            }
        }
        // factor the panel columns jb..je for all rows below
        for j in jb..je {
            let mut d = a[j * n + j];
            for k in jb..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            if !d.is_finite() {
                return Err(j);
            }
            if d <= floor {
                regularized += 1;
                d = floor.max(f64::MIN_POSITIVE);
            }
            let ljj = d.sqrt();
            a[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut s = a[i * n + j];
                for k in jb..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / ljj;
            }
        }
        jb = je;
    }
    for r in 0..n {
        for c in (r + 1)..n {
            a[r * n + c] = 0.0;
        }
    }
    Ok(regularized)
}

/// Cholesky of a symmetric positive definite matrix, `None` if not PD.
pub fn cholesky(m: &Mat) -> Option<Mat> {
    let mut l = m.clone();
    match cholesky_in_place(&mut l, 0.0) {
        Ok(0) => Some(l),
        _ => None,
    }
}

/// Solve `L Lᵀ x = b` given the lower factor.
pub fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.n;
    let mut x = b.to_vec();
    for i in 0..n {
        let s = dot(&l.a[i * n..i * n + i], &x[..i]);
        x[i] = (x[i] - s) / l.a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l.a[k * n + i] * x[k];
        }
        x[i] = s / l.a[i * n + i];
    }
    x
}

/// `L⁻¹ B` for lower-triangular `L`.
pub fn lower_solve_mat(l: &Mat, b: &Mat) -> Mat {
    let n = l.n;
    let mut x = b.clone();
    for i in 0..n {
        for k in 0..i {
            let lik = l.a[i * n + k];
            if lik != 0.0 {
                let (head, tail) = x.a.split_at_mut(i * n);
                let xk = &head[k * n..(k + 1) * n];
                for (xi, v) in tail[..n].iter_mut().zip(xk) {
                    *xi -= lik * v;
                }
            }
        }
        let d = l.a[i * n + i];
        x.a[i * n..(i + 1) * n].iter_mut().for_each(|v| *v /= d);
    }
    x
}

/// `L⁻¹ A L⁻ᵀ` for symmetric `A`.
pub fn congruence_inverse(l: &Mat, a: &Mat) -> Mat {
    let y = lower_solve_mat(l, a); // L⁻¹ A
    let mut z = lower_solve_mat(l, &y.transpose()); // L⁻¹ (L⁻¹ A)ᵀ = L⁻¹ A L⁻ᵀ
    z.symmetrize();
    z
}

/// Symmetric eigendecomposition: ascending eigenvalues and column eigenvectors.
pub fn sym_eig(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.n;
    // column-major work array for the classical routines: v[i][j] = V(i, j)
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e);
    let mut vecs = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            vecs.a[i * n + j] = v[i][j];
        }
    }
    (d, vecs)
}

// Householder reduction to tridiagonal form (after the public-domain JAMA port
// of EISPACK tred2).
fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n == 0 {
        return;
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal form; sorts eigenpairs ascending.
fn tql2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n == 0 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in (l + 2)..n {
                    d[i] -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[k][i + 1];
                        v[k][i + 1] = s * v[k][i] + c * h;
                        v[k][i] = c * v[k][i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || iter > 60 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in v.iter_mut() {
                row.swap(i, k);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut impl Rng) -> Mat {
        let mut g = Mat::zeros(n);
        g.a.iter_mut()
            .for_each(|x| *x = rng.random_range(-1.0..1.0));
        let mut s = g.matmul_t(&g);
        for i in 0..n {
            s.a[i * n + i] += 0.1;
        }
        s
    }

    #[test]
    fn cholesky_reconstructs_across_block_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 5, 63, 64, 65, 150] {
            let s = random_spd(n, &mut rng);
            let l = cholesky(&s).unwrap();
            let r = l.matmul_t(&l);
            let err =
                r.a.iter()
                    .zip(&s.a)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
            assert!(err < 1e-10 * s.frobenius(), "n={n} err={err}");
            let b: Vec<f64> = (0..n).map(|i| i as f64).collect();
            let x = cholesky_solve(&l, &b);
            for i in 0..n {
                let ax: f64 = (0..n).map(|k| s.at(i, k) * x[k]).sum();
                assert!((ax - b[i]).abs() < 1e-8 * (1.0 + b[i].abs()));
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = Mat::from_diag(&[1.0, -1.0]);
        assert!(cholesky(&m).is_none());
    }

    #[test]
    fn eig_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1, 2, 9, 40] {
            let mut a = Mat::zeros(n);
            a.a.iter_mut()
                .for_each(|x| *x = rng.random_range(-1.0..1.0));
            a.symmetrize();
            let (d, v) = sym_eig(&a);
            assert!(d.windows(2).all(|w| w[0] <= w[1]));
            let vd = v.matmul(&Mat::from_diag(&d));
            let r = vd.matmul_t(&v);
            let err =
                r.a.iter()
                    .zip(&a.a)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n} err={err}");
        }
    }

    #[test]
    fn congruence_matches_explicit_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_spd(7, &mut rng);
        let l = cholesky(&s).unwrap();
        let mut a = Mat::zeros(7);
        a.a.iter_mut()
            .for_each(|x| *x = rng.random_range(-1.0..1.0));
        a.symmetrize();
        let z = congruence_inverse(&l, &a);
        // L Z Lᵀ should give back A
        let back = l.matmul(&z).matmul_t(&l);
        let err = back
            .a
            .iter()
            .zip(&a.a)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10);
    }
}
