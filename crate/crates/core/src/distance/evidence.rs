//! Separability evidence across a cut, with independent re-verification.

use serde::{Deserialize, Serialize};

use crate::criteria::{in_purity_ball, Verdict};
use crate::distance::gilbert::{gilbert_frame, GilbertOptions, ProductMixture};
use crate::error::{Error, Result};
use crate::tensor::{hermitian_eigenvalues_with, kron, ComplexMatrix, DensityMatrix};
use crate::tolerance::Tolerances;

/// Largest state dimension handed to Gilbert's algorithm.
pub const GILBERT_DIMENSION_CAP: usize = 64;

/// A state with its factors split into a left and a right side.
pub(crate) struct CutFrame {
    pub left: Vec<usize>,
    pub dl: usize,
    pub dr: usize,
    /// The state with the left factors first.
    pub matrix: ComplexMatrix,
}

impl CutFrame {
    pub fn new(rho: &DensityMatrix, left: &[usize]) -> Result<Self> {
        let n = rho.layout().len();
        let mut left = left.to_vec();
        left.sort_unstable();
        left.dedup();
        if left.is_empty() || left.len() >= n || left.iter().any(|&i| i >= n) {
            return Err(Error::InvalidBipartition(format!(
                "factor set {left:?} is not a proper cut of {n} factors"
            )));
        }
        let right: Vec<usize> = (0..n).filter(|i| !left.contains(i)).collect();
        let perm: Vec<usize> = left.iter().chain(&right).copied().collect();
        let dims = rho.layout().dims();
        let dl = left.iter().map(|&i| dims[i]).product();
        let dr = right.iter().map(|&i| dims[i]).product();
        let matrix = rho.permute_factors(&perm)?.into_parts().0;
        Ok(Self {
            left,
            dl,
            dr,
            matrix,
        })
    }
}

/// How one tensor component of a state relates to the cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentEvidence {
    pub factors: Vec<usize>,
    /// Factor positions, within the component, that lie on the left side.
    pub left: Vec<usize>,
    /// Present when the component straddles the cut.
    pub evidence: Option<Box<SeparabilityEvidence>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeparabilityEvidence {
    /// Negative partial transpose: entangled across the cut.
    Npt {
        min_eig: f64,
    },
    /// Positive partial transpose on a 2×2 or 2×3 cut.
    PptDecisive {
        min_eig: f64,
        left_dim: usize,
        right_dim: usize,
    },
    /// `Tr ρ² ≤ 1/(d−1)`.
    PurityBall {
        purity: f64,
        bound: f64,
    },
    /// The state is a tensor product of components; those that straddle the
    /// cut carry their own evidence.
    ProductComponents {
        components: Vec<ComponentEvidence>,
    },
    /// `ρ_ε = I/d + (1+ε)(ρ − I/d)` lies within `ε·r` of a product mixture
    /// `σ` in Frobenius norm, `r` the purity-ball radius. Then
    /// `ρ = σ/(1+ε) + ε/(1+ε)·(I/d + (ρ_ε−σ)/ε)` with the second state inside
    /// the ball.
    DilatedGilbert {
        epsilon: f64,
        radius: f64,
        residual: f64,
        mixture: ProductMixture,
    },
    /// Gilbert converged without a proof of separability.
    GilbertNumerical {
        residual: f64,
        iterations: usize,
    },
    Inconclusive {
        reason: String,
    },
}

impl SeparabilityEvidence {
    pub fn verdict(&self) -> Verdict {
        match self {
            Self::Npt { .. } => Verdict::EntangledCertified,
            Self::PptDecisive { .. } | Self::PurityBall { .. } | Self::DilatedGilbert { .. } => {
                Verdict::SeparableCertified
            }
            Self::ProductComponents { components } => {
                let mut v = Verdict::SeparableCertified;
                for c in components {
                    match c.evidence.as_ref().map(|e| e.verdict()) {
                        None | Some(Verdict::SeparableCertified) => {}
                        Some(Verdict::EntangledCertified) => return Verdict::EntangledCertified,
                        Some(Verdict::NumericallySeparable) if v == Verdict::SeparableCertified => {
                            v = Verdict::NumericallySeparable
                        }
                        Some(_) => v = Verdict::Inconclusive,
                    }
                }
                v
            }
            Self::GilbertNumerical { .. } => Verdict::NumericallySeparable,
            Self::Inconclusive { .. } => Verdict::Inconclusive,
        }
    }

    pub fn is_certified_separable(&self) -> bool {
        self.verdict() == Verdict::SeparableCertified
    }

    /// Compact name for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Npt { .. } => "npt",
            Self::PptDecisive { .. } => "ppt-decisive",
            Self::PurityBall { .. } => "purity-ball",
            Self::ProductComponents { .. } => "product-components",
            Self::DilatedGilbert { .. } => "dilated-gilbert",
            Self::GilbertNumerical { .. } => "gilbert-numerical",
            Self::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceOptions {
    pub gilbert: GilbertOptions,
    /// Largest dimension on which Gilbert's algorithm is attempted.
    pub gilbert_dimension_cap: usize,
    /// Search for a tensor-product factorisation first.
    pub components: bool,
}

impl Default for EvidenceOptions {
    fn default() -> Self {
        Self {
            gilbert: GilbertOptions::default(),
            gilbert_dimension_cap: GILBERT_DIMENSION_CAP,
            components: true,
        }
    }
}

fn min_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    Ok(*hermitian_eigenvalues_with(m, tol)?
        .last()
        .expect("nonempty"))
}

/// Split `rho` into the finest tensor product of factor groups found by a
/// subset search; groups are listed by their smallest factor.
pub fn tensor_components(rho: &DensityMatrix, tol: &Tolerances) -> Result<Vec<Vec<usize>>> {
    let n = rho.layout().len();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let first = remaining[0];
        let rest: Vec<usize> = remaining[1..].to_vec();
        let current = rho.reduce_to(&remaining)?;
        let mut found = remaining.clone();
        'search: for size in 0..rest.len() {
            for mask in 0u64..(1u64 << rest.len()) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let mut group = vec![first];
                group.extend(
                    rest.iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &f)| f),
                );
                group.sort_unstable();
                if is_product_split(&current, &remaining, &group, tol)? {
                    found = group;
                    break 'search;
                }
            }
        }
        remaining.retain(|f| !found.contains(f));
        out.push(found);
    }
    Ok(out)
}

/// Whether `state` (on factors `support`) equals `ρ_group ⊗ ρ_rest`.
fn is_product_split(
    state: &DensityMatrix,
    support: &[usize],
    group: &[usize],
    tol: &Tolerances,
) -> Result<bool> {
    let local = |fs: &[usize]| -> Vec<usize> {
        fs.iter()
            .map(|f| support.iter().position(|s| s == f).unwrap())
            .collect()
    };
    let g = local(group);
    let r: Vec<usize> = (0..support.len()).filter(|i| !g.contains(i)).collect();
    let frame = CutFrame::new(state, &g)?;
    let a = state.reduce_to(&g)?;
    let b = state.reduce_to(&r)?;
    let prod = kron(a.matrix(), b.matrix())?;
    Ok(prod.max_abs_diff(&frame.matrix) <= tol.product_structure)
}

/// Collect separability evidence for `rho` across the cut that puts factors
/// `left` on one side.
pub fn separability_evidence(
    rho: &DensityMatrix,
    left: &[usize],
    opts: &EvidenceOptions,
    tol: &Tolerances,
) -> Result<SeparabilityEvidence> {
    let frame = CutFrame::new(rho, left)?;
    let pt = rho.partial_transpose(&frame.left)?;
    let pt_min = min_eig(&pt, tol)?;
    if pt_min < -tol.ppt {
        return Ok(SeparabilityEvidence::Npt { min_eig: pt_min });
    }
    if frame.dl * frame.dr <= 6 {
        return Ok(SeparabilityEvidence::PptDecisive {
            min_eig: pt_min,
            left_dim: frame.dl,
            right_dim: frame.dr,
        });
    }
    let purity = rho.purity();
    let d = rho.dim();
    if in_purity_ball(purity, d, tol) {
        return Ok(SeparabilityEvidence::PurityBall {
            purity,
            bound: 1.0 / (d as f64 - 1.0),
        });
    }
    if opts.components && rho.layout().len() > 2 {
        let groups = tensor_components(rho, tol)?;
        if groups.len() > 1 {
            let mut components = Vec::new();
            for g in groups {
                let local_left: Vec<usize> = (0..g.len())
                    .filter(|&i| frame.left.contains(&g[i]))
                    .collect();
                let evidence = if local_left.is_empty() || local_left.len() == g.len() {
                    None
                } else {
                    let sub = rho.reduce_to(&g)?;
                    Some(Box::new(separability_evidence(
                        &sub,
                        &local_left,
                        opts,
                        tol,
                    )?))
                };
                components.push(ComponentEvidence {
                    factors: g,
                    left: local_left,
                    evidence,
                });
            }
            return Ok(SeparabilityEvidence::ProductComponents { components });
        }
    }
    if d > opts.gilbert_dimension_cap {
        return Ok(SeparabilityEvidence::Inconclusive {
            reason: format!("dimension {d} above the Gilbert cap"),
        });
    }
    dilated_gilbert(rho, &frame, &pt, opts, tol)
}

/// Dilate `rho` away from `I/d` by half the margin that keeps it PSD and PPT,
/// then look for a product mixture close enough to the dilated point.
fn dilated_gilbert(
    rho: &DensityMatrix,
    frame: &CutFrame,
    pt: &ComplexMatrix,
    opts: &EvidenceOptions,
    tol: &Tolerances,
) -> Result<SeparabilityEvidence> {
    let d = rho.dim();
    let inv_d = 1.0 / d as f64;
    let lo = min_eig(rho.matrix(), tol)?.min(min_eig(pt, tol)?);
    // I/d + (1+t)(ρ − I/d) stays PSD and PPT while (1+t)(inv_d − lo) ≤ inv_d
    let t_max = if lo >= inv_d {
        f64::INFINITY
    } else {
        inv_d / (inv_d - lo) - 1.0
    };
    let epsilon = (t_max / 2.0).min(1.0);
    let radius = 1.0 / ((d * (d - 1)) as f64).sqrt();
    if epsilon > 1e-9 {
        let dilated = dilate(&frame.matrix, epsilon);
        let mut gopts = opts.gilbert;
        gopts.target = gopts.target.max(epsilon * radius * 0.99);
        let g = gilbert_frame(&dilated, frame.dl, frame.dr, &gopts)?;
        if g.frobenius <= epsilon * radius * (1.0 - 1e-9) {
            return Ok(SeparabilityEvidence::DilatedGilbert {
                epsilon,
                radius,
                residual: g.frobenius,
                mixture: g.mixture,
            });
        }
    }
    let g = gilbert_frame(&frame.matrix, frame.dl, frame.dr, &opts.gilbert)?;
    if g.converged {
        Ok(SeparabilityEvidence::GilbertNumerical {
            residual: g.frobenius,
            iterations: g.iterations,
        })
    } else {
        Ok(SeparabilityEvidence::Inconclusive {
            reason: format!(
                "Gilbert residual {:.3e} after {} iterations",
                g.frobenius, g.iterations
            ),
        })
    }
}

fn dilate(m: &ComplexMatrix, epsilon: f64) -> ComplexMatrix {
    let d = m.dim();
    let mut out = m.scale(1.0 + epsilon);
    out.add_scaled(-epsilon, &ComplexMatrix::maximally_mixed(d));
    out
}

/// Re-check evidence from scratch against `rho` and the cut `left`. Returns
/// `Ok(false)` when the evidence does not support its own verdict.
pub fn verify_evidence(
    rho: &DensityMatrix,
    left: &[usize],
    ev: &SeparabilityEvidence,
    tol: &Tolerances,
) -> Result<bool> {
    let frame = CutFrame::new(rho, left)?;
    Ok(match ev {
        SeparabilityEvidence::Npt { .. } => {
            min_eig(&rho.partial_transpose(&frame.left)?, tol)? < -tol.ppt
        }
        SeparabilityEvidence::PptDecisive { .. } => {
            frame.dl * frame.dr <= 6
                && min_eig(&rho.partial_transpose(&frame.left)?, tol)? >= -tol.ppt
        }
        SeparabilityEvidence::PurityBall { .. } => in_purity_ball(rho.purity(), rho.dim(), tol),
        SeparabilityEvidence::ProductComponents { components } => {
            let mut all: Vec<usize> = components.iter().flat_map(|c| c.factors.clone()).collect();
            all.sort_unstable();
            if all != (0..rho.layout().len()).collect::<Vec<_>>() {
                return Ok(false);
            }
            // ρ must equal the product of its component marginals
            let mut order = Vec::new();
            let mut prod: Option<ComplexMatrix> = None;
            for c in components {
                let sub = rho.reduce_to(&c.factors)?;
                order.extend(&c.factors);
                prod = Some(match prod {
                    None => sub.matrix().clone(),
                    Some(p) => kron(&p, sub.matrix())?,
                });
            }
            let reordered = rho.permute_factors(&order)?;
            if prod.expect("nonempty").max_abs_diff(reordered.matrix()) > tol.product_structure {
                return Ok(false);
            }
            for c in components {
                let expect: Vec<usize> = (0..c.factors.len())
                    .filter(|&i| frame.left.contains(&c.factors[i]))
                    .collect();
                if expect != c.left {
                    return Ok(false);
                }
                let straddles = !expect.is_empty() && expect.len() < c.factors.len();
                match (&c.evidence, straddles) {
                    (None, false) => {}
                    (Some(e), true) => {
                        let sub = rho.reduce_to(&c.factors)?;
                        if !e.is_certified_separable() || !verify_evidence(&sub, &c.left, e, tol)? {
                            return Ok(false);
                        }
                    }
                    _ => return Ok(false),
                }
            }
            true
        }
        SeparabilityEvidence::DilatedGilbert {
            epsilon, mixture, ..
        } => {
            let d = rho.dim();
            if mixture.left_dim != frame.dl || mixture.right_dim != frame.dr || !(*epsilon > 0.0) {
                return Ok(false);
            }
            if !mixture.is_valid(tol.weights_sum) {
                return Ok(false);
            }
            let radius = 1.0 / ((d * (d - 1)) as f64).sqrt();
            let diff = &dilate(&frame.matrix, *epsilon) - &mixture.matrix();
            diff.frobenius_norm() <= epsilon * radius
        }
        SeparabilityEvidence::GilbertNumerical { .. }
        | SeparabilityEvidence::Inconclusive { .. } => false,
    })
}
