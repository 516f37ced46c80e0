//! Gilbert's algorithm: approximate `ρ` from inside the convex hull of
//! product states across a cut.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::states::random_pure_vector;
use crate::tensor::{top_eigenvector, trace_norm, ComplexMatrix, C64};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GilbertOptions {
    pub max_iterations: usize,
    pub restarts: usize,
    /// Stop once the Frobenius distance falls below this.
    pub target: f64,
    pub seed: u64,
}

impl GilbertOptions {
    pub fn from_tolerances(tol: &Tolerances, seed: u64) -> Self {
        Self {
            max_iterations: tol.gilbert_max_iterations,
            restarts: tol.gilbert_restarts,
            target: tol.gilbert_converged,
            seed,
        }
    }
}

impl Default for GilbertOptions {
    fn default() -> Self {
        Self::from_tolerances(&Tolerances::DEFAULT, 0)
    }
}

/// A weighted pure product state `|a⟩⟨a| ⊗ |b⟩⟨b|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductAtom {
    pub weight: f64,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
}

/// Separable approximation `σ = w₀ I/d + Σ wᵢ |aᵢbᵢ⟩⟨aᵢbᵢ|` in the frame
/// where the left side's factors come first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductMixture {
    pub left_dim: usize,
    pub right_dim: usize,
    pub mixed_weight: f64,
    pub atoms: Vec<ProductAtom>,
}

impl ProductMixture {
    pub fn dim(&self) -> usize {
        self.left_dim * self.right_dim
    }

    pub fn weight_sum(&self) -> f64 {
        self.mixed_weight + self.atoms.iter().map(|a| a.weight).sum::<f64>()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::maximally_mixed(d).scale(self.mixed_weight);
        for atom in &self.atoms {
            let v = product_vector(&atom.a, &atom.b);
            add_projector(&mut m, atom.weight, &v);
        }
        m
    }

    /// Every weight nonnegative and each vector normalised.
    pub fn is_valid(&self, tol: f64) -> bool {
        let unit = |v: &[C64]| (v.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() <= tol;
        self.mixed_weight >= 0.0
            && (self.weight_sum() - 1.0).abs() <= tol
            && self.atoms.iter().all(|a| {
                a.weight >= 0.0
                    && a.a.len() == self.left_dim
                    && a.b.len() == self.right_dim
                    && unit(&a.a)
                    && unit(&a.b)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GilbertResult {
    pub mixture: ProductMixture,
    /// `‖ρ − σ‖_F` at the final iterate.
    pub frobenius: f64,
    /// `min(√d ‖ρ−σ‖_F, ‖ρ−σ‖₁)/2`, an upper bound on the trace distance to
    /// the separable set.
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn product_vector(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

fn add_projector(m: &mut ComplexMatrix, w: f64, v: &[C64]) {
    let d = v.len();
    let data = m.data_mut();
    for r in 0..d {
        let vr = v[r] * w;
        for c in 0..d {
            data[r * d + c] += vr * v[c].conj();
        }
    }
}

/// `⟨a⊗b| D |a⊗b⟩` maximised by alternating top-eigenvector updates.
struct Oracle<'a> {
    d: &'a ComplexMatrix,
    dl: usize,
    dr: usize,
}

impl Oracle<'_> {
    /// `(I ⊗ b)† D (I ⊗ b)`.
    fn left_operator(&self, b: &[C64]) -> ComplexMatrix {
        let (dl, dr) = (self.dl, self.dr);
        let data = self.d.data();
        let n = dl * dr;
        ComplexMatrix::from_fn(dl, dl, |i, j| {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..dr {
                let row = &data[(i * dr + k) * n + j * dr..(i * dr + k) * n + (j + 1) * dr];
                let mut t = C64::new(0.0, 0.0);
                for (x, bl) in row.iter().zip(b) {
                    t += x * bl;
                }
                s += b[k].conj() * t;
            }
            s
        })
    }

    /// `(a ⊗ I)† D (a ⊗ I)`.
    fn right_operator(&self, a: &[C64]) -> ComplexMatrix {
        let (dl, dr) = (self.dl, self.dr);
        let data = self.d.data();
        let n = dl * dr;
        let mut out = ComplexMatrix::zeros(dr, dr);
        for i in 0..dl {
            for j in 0..dl {
                let w = a[i].conj() * a[j];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..dr {
                    let row = &data[(i * dr + k) * n + j * dr..(i * dr + k) * n + (j + 1) * dr];
                    for (l, x) in row.iter().enumerate() {
                        out[(k, l)] += w * x;
                    }
                }
            }
        }
        out
    }

    fn climb(&self, mut b: Vec<C64>) -> Result<(f64, Vec<C64>, Vec<C64>)> {
        let mut best = f64::NEG_INFINITY;
        let mut a = Vec::new();
        for _ in 0..100 {
            let (_, a_new) = top_eigenvector(&self.left_operator(&b).hermitian_part())?;
            a = a_new;
            let (val, b_new) = top_eigenvector(&self.right_operator(&a).hermitian_part())?;
            b = b_new;
            if val - best <= 1e-13 * (1.0 + val.abs()) {
                best = best.max(val);
                break;
            }
            best = val;
        }
        Ok((best, a, b))
    }
}

struct Active {
    weight: f64,
    a: Vec<C64>,
    b: Vec<C64>,
    v: Vec<C64>,
}

fn overlap(x: &[C64], y: &[C64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(p, q)| p.conj() * q)
        .sum::<C64>()
        .norm_sqr()
}

/// Run Gilbert's algorithm on `rho` written with its `dl`-dimensional left
/// side first.
///
/// Each step asks the oracle for the product state most aligned with
/// `ρ − σ` and moves weight onto it from the currently least aligned atom of
/// `σ` (or from `I/d`), with the step length chosen by exact line search on
/// `‖ρ − σ‖_F²`.
pub fn gilbert_frame(
    rho: &ComplexMatrix,
    dl: usize,
    dr: usize,
    opts: &GilbertOptions,
) -> Result<GilbertResult> {
    let d = dl * dr;
    let inv_d = 1.0 / d as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut mixed_weight = 1.0;
    let mut atoms: Vec<Active> = Vec::new();
    let rebuild = |mixed_weight: f64, atoms: &[Active]| {
        let mut m = ComplexMatrix::maximally_mixed(d).scale(mixed_weight);
        for x in atoms {
            add_projector(&mut m, x.weight, &x.v);
        }
        m
    };
    let mut sigma = rebuild(mixed_weight, &atoms);
    let mut diff = rho - &sigma;
    let mut dist = diff.frobenius_norm();
    let mut iterations = 0;
    let mut warm: Option<Vec<C64>> = None;
    while dist > opts.target && iterations < opts.max_iterations {
        iterations += 1;
        let oracle = Oracle { d: &diff, dl, dr };
        let mut best: Option<(f64, Vec<C64>, Vec<C64>)> = None;
        for r in 0..opts.restarts.max(1) {
            let b0 = match (&warm, r) {
                (Some(w), 0) => w.clone(),
                _ => random_pure_vector(dr, &mut rng),
            };
            let cand = oracle.climb(b0)?;
            if best.as_ref().is_none_or(|b| cand.0 > b.0) {
                best = Some(cand);
            }
        }
        let (g_new, a, b) = best.expect("at least one restart");
        warm = Some(b.clone());
        let v = product_vector(&a, &b);
        // ⟨D, σ⟩ = 0 at an exact optimum over the hull
        if g_new - diff.trace_product(&sigma).re <= 1e-15 {
            break;
        }
        // away vertex: the mixed state (⟨D, I/d⟩ = Tr D / d = 0) or the least aligned atom
        let mut away: Option<usize> = None;
        let mut g_away = if mixed_weight > 0.0 {
            diff.trace().re * inv_d
        } else {
            f64::INFINITY
        };
        for (i, x) in atoms.iter().enumerate() {
            let g = diff.expectation(&x.v).re;
            if g < g_away {
                g_away = g;
                away = Some(i);
            }
        }
        let (w_away, den) = match away {
            None => (mixed_weight, 1.0 - inv_d),
            Some(i) => (atoms[i].weight, 2.0 - 2.0 * overlap(&atoms[i].v, &v)),
        };
        let num = g_new - g_away;
        if num <= 0.0 || den <= 1e-300 {
            break;
        }
        let gamma = (num / den).min(w_away);
        match away {
            None => {
                mixed_weight -= gamma;
                let data = sigma.data_mut();
                for i in 0..d {
                    data[i * d + i] -= C64::new(gamma * inv_d, 0.0);
                }
            }
            Some(i) => {
                add_projector(&mut sigma, -gamma, &atoms[i].v);
                atoms[i].weight -= gamma;
            }
        }
        add_projector(&mut sigma, gamma, &v);
        match atoms.iter_mut().find(|x| overlap(&x.v, &v) > 1.0 - 1e-14) {
            Some(x) => x.weight += gamma,
            None => atoms.push(Active {
                weight: gamma,
                a,
                b,
                v,
            }),
        }
        if gamma >= w_away {
            match away {
                None => mixed_weight = 0.0,
                Some(i) => {
                    atoms.swap_remove(i);
                }
            }
        }
        if iterations % 500 == 0 {
            sigma = rebuild(mixed_weight, &atoms);
        }
        diff = rho - &sigma;
        dist = diff.frobenius_norm();
    }
    sigma = rebuild(mixed_weight, &atoms);
    diff = rho - &sigma;
    dist = diff.frobenius_norm();
    let tn = trace_norm(&diff.hermitian_part())?;
    let upper_bound = ((d as f64).sqrt() * dist).min(tn) / 2.0;
    let mixture = ProductMixture {
        left_dim: dl,
        right_dim: dr,
        mixed_weight,
        atoms: atoms
            .into_iter()
            .map(|x| ProductAtom {
                weight: x.weight,
                a: x.a,
                b: x.b,
            })
            .collect(),
    };
    Ok(GilbertResult {
        mixture,
        frobenius: dist,
        upper_bound,
        iterations,
        converged: dist <= opts.target,
    })
}
