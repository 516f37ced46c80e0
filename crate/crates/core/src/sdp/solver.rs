//! Infeasible-start primal-dual interior point method with Nesterov–Todd
//! scaling and Mehrotra predictor-corrector steps.
//!
//! Hermitian blocks with any non-real data are embedded as real symmetric
//! blocks `[[Re, -Im], [Im, Re]] / 2`; the halving keeps inner products and the
//! dual vector identical to the complex problem. Problems with purely real
//! data run on real blocks of the original size.

use crate::error::{Error, Result};
use crate::sdp::linalg::{
    cholesky, cholesky_in_place, cholesky_solve, congruence_inverse, dot, sym_eig, Mat,
};
use crate::sdp::problem::{IterationRecord, SdpProblem, SdpSolution, SolveStatus, SparseHermitian};
use crate::tensor::{ComplexMatrix, C64};
use crate::tolerance::Tolerances;

const STEP_FRACTION: f64 = 0.98;
const MAX_CONSTRAINTS: usize = 20_000;
const MAX_BLOCK: usize = 512;
/// Iteration stops early once every measure is this far below the tolerance.
const TARGET_FACTOR: f64 = 0.1;

/// Symmetric sparse matrix listing both `(a, b)` and `(b, a)`.
#[derive(Debug, Clone, Default)]
struct RealSparse {
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl RealSparse {
    fn push(&mut self, r: usize, c: usize, v: f64) {
        if v != 0.0 {
            self.rows.push(r as u32);
            self.cols.push(c as u32);
            self.vals.push(v);
        }
    }

    fn push_sym(&mut self, r: usize, c: usize, v: f64) {
        self.push(r, c, v);
        if r != c {
            self.push(c, r, v);
        }
    }

    fn len(&self) -> usize {
        self.vals.len()
    }

    fn inner(&self, m: &Mat) -> f64 {
        let n = m.n;
        let mut s = 0.0;
        for k in 0..self.len() {
            s += self.vals[k] * m.a[self.rows[k] as usize * n + self.cols[k] as usize];
        }
        s
    }

    fn scatter(&self, scale: f64, m: &mut Mat) {
        let n = m.n;
        for k in 0..self.len() {
            m.a[self.rows[k] as usize * n + self.cols[k] as usize] += scale * self.vals[k];
        }
    }

    fn frobenius(&self) -> f64 {
        self.vals.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn embed(h: &SparseHermitian, complex: bool) -> RealSparse {
    let mut out = RealSparse::default();
    let d = h.dim();
    for (r, c, z) in h.canonical() {
        if !complex {
            out.push_sym(r, c, z.re);
        } else {
            let (re, im) = (0.5 * z.re, 0.5 * z.im);
            out.push_sym(r, c, re);
            out.push_sym(r + d, c + d, re);
            if r != c {
                out.push_sym(r, c + d, -im);
                out.push_sym(r + d, c, im);
            }
        }
    }
    out
}

struct Internal {
    dims: Vec<usize>,
    c: Vec<Mat>,
    /// Constraint parts grouped by block: (constraint index, matrix).
    by_block: Vec<Vec<(usize, RealSparse)>>,
    b: Vec<f64>,
    m: usize,
}

impl Internal {
    fn new(p: &SdpProblem, complex: bool) -> Self {
        let dims: Vec<usize> = p
            .blocks
            .iter()
            .map(|&d| if complex { 2 * d } else { d })
            .collect();
        let c = p
            .objective
            .iter()
            .zip(&dims)
            .map(|(h, &n)| {
                let mut m = Mat::zeros(n);
                embed(h, complex).scatter(1.0, &mut m);
                m
            })
            .collect();
        let mut by_block: Vec<Vec<(usize, RealSparse)>> = vec![Vec::new(); dims.len()];
        for (i, con) in p.constraints.iter().enumerate() {
            // merge parts naming the same block
            let mut merged: Vec<Option<SparseHermitian>> = vec![None; dims.len()];
            for (bk, a) in &con.coefficients {
                let slot = merged[*bk].get_or_insert_with(|| SparseHermitian::new(a.dim()));
                for (r, c, z) in a.canonical() {
                    slot.add(r, c, z);
                }
            }
            for (bk, h) in merged.into_iter().enumerate() {
                if let Some(h) = h {
                    let e = embed(&h, complex);
                    if e.len() > 0 {
                        by_block[bk].push((i, e));
                    }
                }
            }
        }
        let b = p.constraints.iter().map(|c| c.rhs).collect();
        Self {
            dims,
            c,
            by_block,
            b,
            m: p.constraints.len(),
        }
    }

    fn apply(&self, x: &[Mat]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (bk, parts) in self.by_block.iter().enumerate() {
            for (i, e) in parts {
                out[*i] += e.inner(&x[bk]);
            }
        }
        out
    }

    fn adjoint(&self, y: &[f64]) -> Vec<Mat> {
        let mut out: Vec<Mat> = self.dims.iter().map(|&n| Mat::zeros(n)).collect();
        for (bk, parts) in self.by_block.iter().enumerate() {
            for (i, e) in parts {
                if y[*i] != 0.0 {
                    e.scatter(y[*i], &mut out[bk]);
                }
            }
        }
        out
    }

    /// `M_ij = Σ_b Tr(A_i W_b A_j W_b)`.
    fn schur(&self, w: &[Mat]) -> Mat {
        let m = self.m;
        let mut out = Mat::zeros(m);
        for (bk, parts) in self.by_block.iter().enumerate() {
            let wb = &w[bk];
            let n = wb.n;
            for (p, (i, ep)) in parts.iter().enumerate() {
                if ep.len() > 16 {
                    let g = sandwich(wb, ep);
                    for (j, eq) in &parts[p..] {
                        let v = eq.inner(&g);
                        out.a[i * m + j] += v;
                    }
                } else {
                    for (j, eq) in &parts[p..] {
                        let mut v = 0.0;
                        for k in 0..ep.len() {
                            let (a, b, x) = (ep.rows[k] as usize, ep.cols[k] as usize, ep.vals[k]);
                            let wb_row = &wb.a[b * n..(b + 1) * n];
                            let wa_row = &wb.a[a * n..(a + 1) * n];
                            let mut s = 0.0;
                            for l in 0..eq.len() {
                                let (c, d) = (eq.rows[l] as usize, eq.cols[l] as usize);
                                s += eq.vals[l] * wb_row[c] * wa_row[d];
                            }
                            v += x * s;
                        }
                        out.a[i * m + j] += v;
                    }
                }
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                let v = out.a[i * m + j] + if i == j { 0.0 } else { out.a[j * m + i] };
                out.a[i * m + j] = v;
                out.a[j * m + i] = v;
            }
        }
        out
    }
}

/// `W E W` for sparse symmetric `E`.
fn sandwich(w: &Mat, e: &RealSparse) -> Mat {
    let n = w.n;
    let mut g = Mat::zeros(n);
    for k in 0..e.len() {
        let (a, b, v) = (e.rows[k] as usize, e.cols[k] as usize, e.vals[k]);
        // g += v * W[:, a] W[b, :]
        let wb = &w.a[b * n..(b + 1) * n];
        for r in 0..n {
            let s = v * w.a[r * n + a];
            if s != 0.0 {
                let row = &mut g.a[r * n..(r + 1) * n];
                for (x, y) in row.iter_mut().zip(wb) {
                    *x += s * y;
                }
            }
        }
    }
    g
}

/// Nesterov–Todd scaling data for one block: `W = G Gᵀ`, `Gᵀ S G = G⁻¹ X G⁻ᵀ = diag(λ)`.
struct Scaling {
    l: Mat,
    v: Mat,
    lambda: Vec<f64>,
    g: Mat,
    w: Mat,
}

fn nt_scaling(x: &Mat, s: &Mat) -> Option<Scaling> {
    let l = cholesky(x)?;
    let mut lsl = l.t_matmul(s).matmul(&l);
    lsl.symmetrize();
    let (ev, v) = sym_eig(&lsl);
    if ev.iter().any(|&e| !(e > 0.0)) {
        return None;
    }
    let lambda: Vec<f64> = ev.iter().map(|e| e.sqrt()).collect();
    let inv_sqrt: Vec<f64> = lambda.iter().map(|x| 1.0 / x.sqrt()).collect();
    let lv = l.matmul(&v);
    let n = x.n;
    let mut g = lv;
    for r in 0..n {
        for c in 0..n {
            g.a[r * n + c] *= inv_sqrt[c];
        }
    }
    let mut w = g.matmul_t(&g);
    w.symmetrize();
    Some(Scaling { l, v, lambda, g, w })
}

impl Scaling {
    /// `G⁻¹ A G⁻ᵀ = Λ^{1/2} Vᵀ (L⁻¹ A L⁻ᵀ) V Λ^{1/2}`; also returns `L⁻¹ A L⁻ᵀ`.
    fn scale_primal(&self, a: &Mat) -> (Mat, Mat) {
        let p = congruence_inverse(&self.l, a);
        let mut q = self.v.t_matmul(&p).matmul(&self.v);
        let n = a.n;
        for r in 0..n {
            for c in 0..n {
                q.a[r * n + c] *= (self.lambda[r] * self.lambda[c]).sqrt();
            }
        }
        q.symmetrize();
        (q, p)
    }

    /// `Gᵀ A G`.
    fn scale_dual(&self, a: &Mat) -> Mat {
        let mut q = self.g.t_matmul(a).matmul(&self.g);
        q.symmetrize();
        q
    }

    /// `W A W`.
    fn sandwich_dense(&self, a: &Mat) -> Mat {
        let mut q = self.w.matmul(a).matmul(&self.w);
        q.symmetrize();
        q
    }

    /// `G Z Gᵀ`.
    fn unscale(&self, z: &Mat) -> Mat {
        let mut q = self.g.matmul(z).matmul_t(&self.g);
        q.symmetrize();
        q
    }
}

fn max_step(min_eig: f64) -> f64 {
    if min_eig < 0.0 {
        -1.0 / min_eig
    } else {
        f64::INFINITY
    }
}

/// Largest `α` keeping `Λ + α D ⪰ 0`, from `Λ^{-1/2} D Λ^{-1/2}`.
fn scaled_step(lambda: &[f64], d: &Mat) -> f64 {
    let n = d.n;
    let mut q = d.clone();
    for r in 0..n {
        for c in 0..n {
            q.a[r * n + c] /= (lambda[r] * lambda[c]).sqrt();
        }
    }
    q.symmetrize();
    max_step(sym_eig(&q).0[0])
}

fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn blocks_inner(a: &[Mat], b: &[Mat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y)).sum()
}

fn blocks_frobenius(a: &[Mat]) -> f64 {
    a.iter().map(|x| x.inner(x)).sum::<f64>().sqrt()
}

struct Direction {
    dx: Vec<Mat>,
    ds: Vec<Mat>,
    dy: Vec<f64>,
}

/// Solve the Newton system for a given complementarity right-hand side `R_c`
/// (unscaled: `ΔX + W ΔS W = R_c`).
fn direction(
    prob: &Internal,
    chol: &Mat,
    scal: &[Scaling],
    rp: &[f64],
    rd: &[Mat],
    w_rd_w: &[Mat],
    rc: &[Mat],
) -> Direction {
    let a_rc = prob.apply(rc);
    let a_wrdw = prob.apply(w_rd_w);
    let rhs: Vec<f64> = (0..prob.m).map(|i| rp[i] - a_rc[i] + a_wrdw[i]).collect();
    let dy = cholesky_solve(chol, &rhs);
    let aty = prob.adjoint(&dy);
    let mut ds = Vec::with_capacity(rd.len());
    let mut dx = Vec::with_capacity(rd.len());
    for (k, sc) in scal.iter().enumerate() {
        let mut s = rd[k].clone();
        s.add_scaled(-1.0, &aty[k]);
        s.symmetrize();
        let mut x = rc[k].clone();
        x.add_scaled(-1.0, &sc.sandwich_dense(&s));
        x.symmetrize();
        ds.push(s);
        dx.push(x);
    }
    Direction { dx, ds, dy }
}

/// Solve a semidefinite program with the default tolerances.
pub fn solve(p: &SdpProblem) -> Result<SdpSolution> {
    solve_with(p, &Tolerances::DEFAULT)
}

pub fn solve_with(p: &SdpProblem, tol: &Tolerances) -> Result<SdpSolution> {
    p.validate()?;
    let complex = !p.is_real();
    solve_internal(p, tol, complex)
}

/// Force the real-symmetric embedding even for real data.
pub fn solve_embedded(p: &SdpProblem, tol: &Tolerances) -> Result<SdpSolution> {
    p.validate()?;
    solve_internal(p, tol, true)
}

fn solve_internal(p: &SdpProblem, tol: &Tolerances, complex: bool) -> Result<SdpSolution> {
    if p.constraints.len() > MAX_CONSTRAINTS {
        return Err(Error::DimensionCap {
            dim: p.constraints.len(),
            cap: MAX_CONSTRAINTS,
        });
    }
    let prob = Internal::new(p, complex);
    if let Some(&big) = prob.dims.iter().find(|&&n| n > MAX_BLOCK) {
        return Err(Error::DimensionCap {
            dim: big,
            cap: MAX_BLOCK,
        });
    }
    let m = prob.m;
    let total_dim: usize = prob.dims.iter().sum();
    let norm_b = norm2(&prob.b);
    let norm_c = blocks_frobenius(&prob.c);

    // starting point
    let mut x = Vec::new();
    let mut s = Vec::new();
    for (bk, &n) in prob.dims.iter().enumerate() {
        let nf = n as f64;
        let mut zeta: f64 = 10f64.max(nf.sqrt());
        let mut eta: f64 = 10f64.max(nf.sqrt()).max(prob.c[bk].frobenius());
        for (i, e) in &prob.by_block[bk] {
            let fa = e.frobenius();
            zeta = zeta.max(nf * (1.0 + prob.b[*i].abs()) / (1.0 + fa));
            eta = eta.max(fa);
        }
        x.push(Mat::scaled_identity(n, zeta));
        s.push(Mat::scaled_identity(n, eta));
    }
    let mut y = vec![0.0; m];

    let target_feas = tol.sdp_feasibility * TARGET_FACTOR;
    let target_gap = tol.sdp_gap * TARGET_FACTOR;
    let mut history = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut regularized_pivots = 0;
    let mut stalled = 0;
    let mut iterations = 0;

    let measures = |x: &[Mat], s: &[Mat], y: &[f64]| {
        let ax = prob.apply(x);
        let rp: Vec<f64> = (0..m).map(|i| prob.b[i] - ax[i]).collect();
        let aty = prob.adjoint(y);
        let rd: Vec<Mat> = (0..prob.dims.len())
            .map(|k| {
                let mut r = prob.c[k].clone();
                r.add_scaled(-1.0, &s[k]);
                r.add_scaled(-1.0, &aty[k]);
                r
            })
            .collect();
        let pobj = blocks_inner(&prob.c, x);
        let dobj = dot(&prob.b, y);
        let pinf = norm2(&rp) / (1.0 + norm_b);
        let dinf = blocks_frobenius(&rd) / (1.0 + norm_c);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        (rp, rd, pobj, dobj, pinf, dinf, gap)
    };

    for iter in 0..tol.sdp_max_iterations {
        let (rp, rd, pobj, dobj, pinf, dinf, gap) = measures(&x, &s, &y);
        let mu = blocks_inner(&x, &s) / total_dim as f64;
        if !(pobj.is_finite() && dobj.is_finite() && mu.is_finite()) {
            break;
        }
        if pinf <= target_feas && dinf <= target_feas && gap <= target_gap {
            status = SolveStatus::Optimal;
            break;
        }
        // divergence of one side signals infeasibility of the other
        if dobj > 1e10 * (1.0 + pobj.abs().min(1e10)) && dinf <= tol.sdp_feasibility {
            status = SolveStatus::Infeasible;
            break;
        }
        if pobj < -1e10 && pinf <= tol.sdp_feasibility {
            status = SolveStatus::Infeasible;
            break;
        }
        iterations = iter + 1;

        let mut scal = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            match nt_scaling(&x[k], &s[k]) {
                Some(sc) => scal.push(sc),
                None => break,
            }
        }
        if scal.len() != x.len() {
            break;
        }
        let w: Vec<Mat> = scal.iter().map(|sc| sc.w.clone()).collect();
        let mut schur = prob.schur(&w);
        let max_diag = (0..m)
            .map(|i| schur.a[i * m + i])
            .fold(0.0, f64::max)
            .max(1.0);
        match cholesky_in_place(&mut schur, 1e-12 * max_diag) {
            Ok(r) => regularized_pivots += r,
            Err(_) => break,
        }
        let w_rd_w: Vec<Mat> = scal
            .iter()
            .zip(&rd)
            .map(|(sc, r)| sc.sandwich_dense(r))
            .collect();

        // predictor
        let rc_aff: Vec<Mat> = x
            .iter()
            .map(|xk| {
                let mut r = xk.clone();
                r.a.iter_mut().for_each(|v| *v = -*v);
                r
            })
            .collect();
        let aff = direction(&prob, &schur, &scal, &rp, &rd, &w_rd_w, &rc_aff);
        let mut ap: f64 = 1.0;
        let mut ad: f64 = 1.0;
        let mut scaled_dx = Vec::with_capacity(x.len());
        let mut scaled_ds = Vec::with_capacity(x.len());
        for (k, sc) in scal.iter().enumerate() {
            let (dxs, _) = sc.scale_primal(&aff.dx[k]);
            let dss = sc.scale_dual(&aff.ds[k]);
            ap = ap.min(scaled_step(&sc.lambda, &dxs));
            ad = ad.min(scaled_step(&sc.lambda, &dss));
            scaled_dx.push(dxs);
            scaled_ds.push(dss);
        }
        let mut mu_aff = 0.0;
        for k in 0..x.len() {
            let mut xa = x[k].clone();
            xa.add_scaled(ap, &aff.dx[k]);
            let mut sa = s[k].clone();
            sa.add_scaled(ad, &aff.ds[k]);
            mu_aff += xa.inner(&sa);
        }
        mu_aff /= total_dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector: L_λ⁻¹(2σμI - 2Λ² - (ΔX̃ΔS̃ + ΔS̃ΔX̃)), mapped back by G
        let rc: Vec<Mat> = scal
            .iter()
            .enumerate()
            .map(|(k, sc)| {
                let n = sc.lambda.len();
                let xs = scaled_dx[k].matmul(&scaled_ds[k]);
                let mut z = Mat::zeros(n);
                for r in 0..n {
                    for c in 0..n {
                        let mut v = -(xs.a[r * n + c] + xs.a[c * n + r]);
                        if r == c {
                            v += 2.0 * sigma * mu - 2.0 * sc.lambda[r] * sc.lambda[r];
                        }
                        z.a[r * n + c] = v / (sc.lambda[r] + sc.lambda[c]);
                    }
                }
                sc.unscale(&z)
            })
            .collect();
        let dir = direction(&prob, &schur, &scal, &rp, &rd, &w_rd_w, &rc);
        let mut ap_max: f64 = f64::INFINITY;
        let mut ad_max: f64 = f64::INFINITY;
        for (k, sc) in scal.iter().enumerate() {
            let (dxs, _) = sc.scale_primal(&dir.dx[k]);
            let dss = sc.scale_dual(&dir.ds[k]);
            ap_max = ap_max.min(scaled_step(&sc.lambda, &dxs));
            ad_max = ad_max.min(scaled_step(&sc.lambda, &dss));
        }
        let ap = (STEP_FRACTION * ap_max).min(1.0);
        let ad = (STEP_FRACTION * ad_max).min(1.0);
        if !(ap.is_finite() && ad.is_finite()) {
            break;
        }
        for k in 0..x.len() {
            x[k].add_scaled(ap, &dir.dx[k]);
            x[k].symmetrize();
            s[k].add_scaled(ad, &dir.ds[k]);
            s[k].symmetrize();
        }
        for i in 0..m {
            y[i] += ad * dir.dy[i];
        }
        history.push(IterationRecord {
            primal_objective: pobj,
            dual_objective: dobj,
            primal_residual: pinf,
            dual_residual: dinf,
            mu,
            step_primal: ap,
            step_dual: ad,
        });
        if ap < 1e-10 && ad < 1e-10 {
            stalled += 1;
            if stalled >= 3 {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    let (_, _, pobj, dobj, pinf, dinf, gap) = measures(&x, &s, &y);
    if status == SolveStatus::MaxIterations
        && pinf <= tol.sdp_feasibility
        && dinf <= tol.sdp_feasibility
        && gap <= tol.sdp_gap
    {
        status = SolveStatus::Optimal;
    }
    let primal = x
        .iter()
        .zip(&p.blocks)
        .map(|(xk, &d)| project(xk, d, complex))
        .collect();
    let slack = p
        .objective
        .iter()
        .enumerate()
        .map(|(bk, c)| {
            let mut sl = c.to_dense();
            for (i, con) in p.constraints.iter().enumerate() {
                for (b2, a) in &con.coefficients {
                    if *b2 == bk && y[i] != 0.0 {
                        for (r, cc, z) in a.canonical() {
                            sl[(r, cc)] -= z * y[i];
                            if r != cc {
                                sl[(cc, r)] -= z.conj() * y[i];
                            }
                        }
                    }
                }
            }
            sl
        })
        .collect();
    Ok(SdpSolution {
        status,
        primal,
        slack,
        dual: y,
        primal_objective: pobj,
        dual_objective: dobj,
        gap,
        primal_residual: pinf,
        dual_residual: dinf,
        iterations,
        history,
        regularized_pivots,
        real_arithmetic: !complex,
    })
}

/// Back-project an embedded block to the Hermitian matrix it represents.
fn project(x: &Mat, d: usize, complex: bool) -> ComplexMatrix {
    if !complex {
        return ComplexMatrix::from_fn(d, d, |r, c| C64::new(x.at(r, c), 0.0));
    }
    ComplexMatrix::from_fn(d, d, |r, c| {
        let re = 0.5 * (x.at(r, c) + x.at(r + d, c + d));
        let im = 0.5 * (x.at(r + d, c) - x.at(r, c + d));
        C64::new(re, im)
    })
}
