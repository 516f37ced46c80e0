//! Activation of genuine multipartite entanglement in star networks of
//! isotropic pairs: scalar thresholds, key states, and explicit biseparable
//! decompositions of `σₙ(p)^{⊗k}` with independent verification.

use serde::{Deserialize, Serialize};

use crate::criteria::Verdict;
use crate::distance::{
    activatable_via_npt_with, separability_evidence, verify_evidence, ActivatabilityCertificate,
    EvidenceOptions, SeparabilityEvidence,
};
use crate::error::{Error, Result};
use crate::partitions::{cut_factors, Bipartition};
use crate::states::{copies, isotropic_state, star_pen, IsotropicVisibility};
use crate::tensor::{hermitian_eigenvalues_with, kron, trace_norm, ComplexMatrix, DensityMatrix};
use crate::tolerance::Tolerances;

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("visibility {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("copy count must be >= 1".into()));
    }
    Ok(())
}

/// `1 − (1−p)^k`: weight of everything but white noise in `ρ(p)^{⊗k}`.
pub fn f_k(p: f64, k: usize) -> Result<f64> {
    check_p(p)?;
    check_k(k)?;
    if k == 1 {
        return Ok(p);
    }
    Ok(1.0 - (1.0 - p).powi(k as i32))
}

/// `Φ(p,k) = [ρ(p)^{⊗k} − (1−p)^k (I/4)^{⊗k}] / f_k(p)` on one edge, with the
/// `k` hub qubits first.
pub fn phi_extract(p: f64, k: usize) -> Result<DensityMatrix> {
    let f = f_k(p, k)?;
    if f <= 1e-12 {
        return Err(Error::Domain(format!(
            "f_k({p}) = {f} is too small to divide by"
        )));
    }
    let rho = copies(&isotropic_state(p)?, k)?;
    let d = rho.dim();
    let mut m = rho.matrix().scale(1.0 / f);
    m.add_scaled(
        -(1.0 - p).powi(k as i32) / f,
        &ComplexMatrix::maximally_mixed(d),
    );
    DensityMatrix::new(m.hermitian_part(), rho.layout().clone())
}

/// Normalised `(f/(n−1))Φ(p,k) + (1−f)(I/4)^{⊗k}`.
pub fn key_state(p: f64, k: usize, n: usize) -> Result<DensityMatrix> {
    if n < 3 {
        return Err(Error::Domain(format!("key state needs n >= 3, got {n}")));
    }
    let f = f_k(p, k)?;
    key_mixture(p, k, f / (n - 1) as f64, 1.0 - f)
}

/// Normalised `a Φ(p,k) + b (I/4)^{⊗k}`.
fn key_mixture(p: f64, k: usize, a: f64, b: f64) -> Result<DensityMatrix> {
    let phi = phi_extract(p, k)?;
    let total = a + b;
    if !(total > 0.0) {
        return Err(Error::Domain("degenerate key-state normalisation".into()));
    }
    let mut m = phi.matrix().scale(a / total);
    m.add_scaled(b / total, &ComplexMatrix::maximally_mixed(phi.dim()));
    DensityMatrix::new(m.hermitian_part(), phi.layout().clone())
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("need n >= 3, got {n}")));
    }
    check_k(k)
}

/// Supremum of `p` with `f_k(p)/((n−1) − (n−2)f_k(p)) < f_k(1/3)`, in closed form.
pub fn p0(n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    let t = (2.0f64 / 3.0).powi(k as i32);
    Ok(1.0 - (t / (1.0 + (n as f64 - 2.0) * (1.0 - t))).powf(1.0 / k as f64))
}

/// The same supremum found by bisection on the defining inequality.
pub fn p0_bisection(n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    let target = f_k(1.0 / 3.0, k)?;
    let g = |p: f64| {
        let f = 1.0 - (1.0 - p).powi(k as i32);
        f / ((n - 1) as f64 - (n - 2) as f64 * f) - target
    };
    let (mut lo, mut hi) = (1.0 / 3.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(α/n) / ((α/n) + (1−α))`: the relative weight of one of `n` equal shares
/// of `α` against the remaining `1−α`.
pub fn mixing_ratio(alpha: f64, n: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) || !(n >= 1.0) {
        return Err(Error::Domain(format!(
            "mixing_ratio needs alpha in [0,1] and n >= 1, got ({alpha}, {n})"
        )));
    }
    let den = alpha / n + (1.0 - alpha);
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::Domain("mixing_ratio denominator vanishes".into()));
    }
    Ok((alpha / n) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PHatOptions {
    /// Grid points strictly between `1/3` and `p₀`, inclusive of `p₀`.
    pub grid_steps: usize,
    pub evidence: EvidenceOptions,
}

impl Default for PHatOptions {
    fn default() -> Self {
        Self {
            grid_steps: 64,
            evidence: EvidenceOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PHatCandidate {
    pub p: f64,
    /// Verdict on the mixture with weights frozen at `p₀`, kept for audit.
    pub fixed_weight_verdict: Verdict,
    pub key_state_verdict: Verdict,
    pub key_state_evidence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PHatSearch {
    pub n: usize,
    pub k: usize,
    pub p0: f64,
    pub p_hat: Option<f64>,
    pub candidates: Vec<PHatCandidate>,
    /// Evidence that `key_state(p̂)` is separable across hub|leaf.
    pub evidence: Option<SeparabilityEvidence>,
    pub failure: Option<String>,
}

/// Descending grid scan from `p₀` for the largest `p̂ > 1/3` whose key state
/// is certified separable across hub|leaf.
pub fn find_p_hat(n: usize, k: usize, opts: &PHatOptions, tol: &Tolerances) -> Result<PHatSearch> {
    let p0v = p0(n, k)?;
    let f0 = f_k(p0v, k)?;
    let step = (p0v - 1.0 / 3.0) / opts.grid_steps.max(1) as f64;
    let mut out = PHatSearch {
        n,
        k,
        p0: p0v,
        p_hat: None,
        candidates: Vec::new(),
        evidence: None,
        failure: None,
    };
    for j in 0..opts.grid_steps {
        let p = p0v - j as f64 * step;
        let key = key_state(p, k, n)?;
        let hub: Vec<usize> = (0..k).collect();
        let ev = separability_evidence(&key, &hub, &opts.evidence, tol)?;
        let verdict = ev.verdict();
        // the defining inequality is strict; accept p₀ itself only on a decisive PPT verdict
        let boundary_ok = j > 0 || matches!(ev, SeparabilityEvidence::PptDecisive { .. });
        let fixed = key_mixture(p, k, f0 / (n - 1) as f64, 1.0 - f0)?;
        let fixed_verdict = if verdict == Verdict::SeparableCertified || j == 0 {
            separability_evidence(&fixed, &hub, &opts.evidence, tol)?.verdict()
        } else {
            Verdict::Inconclusive
        };
        out.candidates.push(PHatCandidate {
            p,
            fixed_weight_verdict: fixed_verdict,
            key_state_verdict: verdict,
            key_state_evidence: ev.kind().to_string(),
        });
        if verdict == Verdict::SeparableCertified && boundary_ok && p > 1.0 / 3.0 {
            out.p_hat = Some(p);
            out.evidence = Some(ev);
            return Ok(out);
        }
    }
    out.failure = Some(if opts.grid_steps == 0 {
        "empty grid".into()
    } else {
        format!("no grid point in (1/3, {p0v}] has a certified separable key state")
    });
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockSide {
    /// Entirely inside `M`.
    Left,
    /// Entirely inside `M̄`.
    Right,
    /// Meets both sides; needs separability evidence.
    Straddling,
}

/// A state on a group of factors inside one decomposition term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermBlock {
    /// Factor indices into the target layout, ascending.
    pub factors: Vec<usize>,
    pub state: DensityMatrix,
    pub side: BlockSide,
    pub evidence: Option<SeparabilityEvidence>,
    pub label: String,
}

/// `weight · ⊗ blocks`, separable across `cut`: each block sits on one side
/// or carries evidence of separability across the part of the cut it meets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub weight: f64,
    pub cut: Bipartition,
    pub blocks: Vec<TermBlock>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiseparableCertificate {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub target_description: String,
    pub terms: Vec<DecompositionTerm>,
    /// `½‖Σ terms − target‖₁` at construction time.
    pub reconstruction_residual: f64,
    /// False for `p ≤ 1/3`, where every edge is already separable.
    pub activation_relevant: bool,
    /// All straddling blocks carry certified evidence.
    pub evidence_complete: bool,
}

impl DecompositionTerm {
    /// The term's state on the full layout.
    pub fn matrix(&self, total_factors: usize) -> Result<ComplexMatrix> {
        let mut order: Vec<usize> = Vec::new();
        let mut acc: Option<DensityMatrix> = None;
        for b in &self.blocks {
            order.extend(&b.factors);
            acc = Some(match acc {
                None => b.state.clone(),
                Some(a) => a.kron(&b.state),
            });
        }
        let acc = acc.ok_or_else(|| Error::Domain("term without blocks".into()))?;
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..total_factors).collect::<Vec<_>>() {
            return Err(Error::InvalidLayout(
                "term blocks do not tile the layout".into(),
            ));
        }
        // new factor j is the block factor holding target factor j
        let perm: Vec<usize> = (0..total_factors)
            .map(|j| order.iter().position(|&f| f == j).expect("tiles"))
            .collect();
        Ok(acc.permute_factors(&perm)?.into_parts().0)
    }
}

/// Factor indices of the edge `(1, i)` of a star network with `k` copies,
/// hub factors first.
fn edge_factors(target: &DensityMatrix, leaf: usize) -> Vec<usize> {
    let fs = target.layout().factors();
    let mut hub: Vec<usize> = (0..fs.len())
        .filter(|&j| fs[j].party == 1 && fs[j].slot == leaf)
        .collect();
    let mut tip: Vec<usize> = (0..fs.len()).filter(|&j| fs[j].party == leaf).collect();
    hub.sort_by_key(|&j| fs[j].copy);
    tip.sort_by_key(|&j| fs[j].copy);
    hub.extend(tip);
    hub
}

fn block(
    target: &DensityMatrix,
    factors: Vec<usize>,
    state: DensityMatrix,
    cut: &Bipartition,
    label: String,
    opts: &EvidenceOptions,
    tol: &Tolerances,
) -> Result<TermBlock> {
    let fs = target.layout().factors();
    let local_left: Vec<usize> = (0..factors.len())
        .filter(|&i| cut.contains(fs[factors[i]].party))
        .collect();
    let state = state.with_layout(target.layout().select(&factors)?)?;
    let (side, evidence) = if local_left.len() == factors.len() {
        (BlockSide::Left, None)
    } else if local_left.is_empty() {
        (BlockSide::Right, None)
    } else {
        (
            BlockSide::Straddling,
            Some(separability_evidence(&state, &local_left, opts, tol)?),
        )
    };
    Ok(TermBlock {
        factors,
        state,
        side,
        evidence,
        label,
    })
}

/// `σₙ(p)^{⊗k}`, party-major.
pub fn star_copies(n: usize, p: f64, k: usize) -> Result<DensityMatrix> {
    copies(&star_pen(n, IsotropicVisibility::new(p)?)?, k)
}

pub fn build_biseparable_certificate(n: usize, k: usize, p: f64) -> Result<BiseparableCertificate> {
    build_biseparable_certificate_with(n, k, p, &EvidenceOptions::default(), &Tolerances::DEFAULT)
}

/// Expand `σₙ(p)^{⊗k} = ⊗ᵢ [f Φ₁ᵢ + (1−f) Ĩ₁ᵢ]` over the edges carrying `Φ`.
/// Terms with at least two noise edges are kept with the cut `{i}|rest`, `i`
/// the first noise edge; the all-`Φ` term is shared equally among the
/// single-noise terms, turning each noise edge into a key state.
pub fn build_biseparable_certificate_with(
    n: usize,
    k: usize,
    p: f64,
    opts: &EvidenceOptions,
    tol: &Tolerances,
) -> Result<BiseparableCertificate> {
    check_nk(n, k)?;
    check_p(p)?;
    let target = star_copies(n, p, k)?;
    let total = target.layout().len();
    let leaves: Vec<usize> = (2..=n).collect();
    let edge: Vec<Vec<usize>> = leaves.iter().map(|&i| edge_factors(&target, i)).collect();
    let mut terms = Vec::new();
    let activation_relevant = p > 1.0 / 3.0;
    if !activation_relevant {
        // every edge is separable on its own: one term across 1|rest
        let cut = Bipartition::new(&[1], n)?;
        let edge_state = copies(&isotropic_state(p)?, k)?;
        let blocks = leaves
            .iter()
            .zip(&edge)
            .map(|(&i, fs)| {
                block(
                    &target,
                    fs.clone(),
                    edge_state.clone(),
                    &cut,
                    format!("rho_1{i}"),
                    opts,
                    tol,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push(DecompositionTerm {
            weight: 1.0,
            cut,
            blocks,
            label: "product of edges".into(),
        });
    } else {
        let f = f_k(p, k)?;
        let phi = phi_extract(p, k)?;
        let noise = DensityMatrix::maximally_mixed(phi.layout().clone());
        let key = key_state(p, k, n)?;
        let half = |fs: &[usize], hub: bool| -> Vec<usize> {
            if hub {
                fs[..k].to_vec()
            } else {
                fs[k..].to_vec()
            }
        };
        let noise_half = DensityMatrix::maximally_mixed(target.layout().select(&edge[0][..k])?);
        for mask in 0u32..(1 << (n - 1)) {
            let phi_slots: Vec<usize> = (0..n - 1).filter(|j| mask & (1 << j) != 0).collect();
            let noise_count = n - 1 - phi_slots.len();
            if noise_count == 0 {
                continue;
            }
            let first_noise = (0..n - 1)
                .find(|j| mask & (1 << j) == 0)
                .expect("has noise");
            let cut = Bipartition::new(&[leaves[first_noise]], n)?;
            let merged = noise_count == 1;
            let weight = if merged {
                f.powi((n - 2) as i32) * (f / (n - 1) as f64 + 1.0 - f)
            } else {
                f.powi(phi_slots.len() as i32) * (1.0 - f).powi(noise_count as i32)
            };
            let mut blocks = Vec::new();
            for j in 0..n - 1 {
                let i = leaves[j];
                if phi_slots.contains(&j) {
                    blocks.push(block(
                        &target,
                        edge[j].clone(),
                        phi.clone(),
                        &cut,
                        format!("Phi_1{i}"),
                        opts,
                        tol,
                    )?);
                } else if merged {
                    blocks.push(block(
                        &target,
                        edge[j].clone(),
                        key.clone(),
                        &cut,
                        format!("key_1{i}"),
                        opts,
                        tol,
                    )?);
                } else if j == first_noise {
                    // white noise splits syntactically across the cut
                    for hub in [true, false] {
                        let fs = half(&edge[j], hub);
                        let st = noise_half
                            .clone()
                            .with_layout(target.layout().select(&fs)?)?;
                        let label = if hub {
                            format!("I_1[{i}]")
                        } else {
                            format!("I_{i}")
                        };
                        blocks.push(block(&target, fs, st, &cut, label, opts, tol)?);
                    }
                } else {
                    blocks.push(block(
                        &target,
                        edge[j].clone(),
                        noise.clone(),
                        &cut,
                        format!("I_1{i}"),
                        opts,
                        tol,
                    )?);
                }
            }
            let label = if merged {
                format!("merged, key state on edge 1-{}", leaves[first_noise])
            } else {
                format!(
                    "Phi on {:?}",
                    phi_slots.iter().map(|&j| leaves[j]).collect::<Vec<_>>()
                )
            };
            terms.push(DecompositionTerm {
                weight,
                cut,
                blocks,
                label,
            });
        }
    }
    let evidence_complete = terms.iter().flat_map(|t| &t.blocks).all(|b| {
        b.side != BlockSide::Straddling
            || b.evidence
                .as_ref()
                .is_some_and(|e| e.is_certified_separable())
    });
    let mut sum = ComplexMatrix::zeros(target.dim(), target.dim());
    for t in &terms {
        sum.add_scaled(t.weight, &t.matrix(total)?);
    }
    let reconstruction_residual = trace_norm(&(&sum - target.matrix()).hermitian_part())? / 2.0;
    Ok(BiseparableCertificate {
        n,
        k,
        p,
        target_description: format!("star network sigma_{n}({p})^(x{k})"),
        terms,
        reconstruction_residual,
        activation_relevant,
        evidence_complete,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermCheck {
    pub index: usize,
    pub weight: f64,
    pub min_eigenvalue: f64,
    pub psd: bool,
    /// Blocks tile the layout and sit on the sides they declare.
    pub structure: bool,
    /// Entrywise `‖term − left ⊗ right‖` when no block straddles the cut.
    pub product_deviation: Option<f64>,
    pub evidence: bool,
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateVerification {
    pub passed: bool,
    pub weight_sum: f64,
    pub weights_ok: bool,
    pub reconstruction_residual: f64,
    pub residual_ok: bool,
    pub terms: Vec<TermCheck>,
}

/// Re-check a certificate against `target` without trusting anything it
/// stores beyond the block states and weights.
pub fn verify_certificate(
    cert: &BiseparableCertificate,
    target: &DensityMatrix,
    tol: &Tolerances,
) -> Result<CertificateVerification> {
    let total = target.layout().len();
    let fs = target.layout().factors();
    let mut checks = Vec::new();
    let mut sum = ComplexMatrix::zeros(target.dim(), target.dim());
    let weight_sum: f64 = cert.terms.iter().map(|t| t.weight).sum();
    let weights_ok =
        cert.terms.iter().all(|t| t.weight >= 0.0) && (weight_sum - 1.0).abs() <= tol.weights_sum;
    for (index, t) in cert.terms.iter().enumerate() {
        let mut messages = Vec::new();
        let m = match t.matrix(total) {
            Ok(m) => m,
            Err(e) => {
                return Err(Error::InvalidLayout(format!("term {index}: {e}")));
            }
        };
        if t.cut.party_count() != target.layout().party_count() {
            return Err(Error::InvalidLayout(format!(
                "term {index} cut has the wrong party count"
            )));
        }
        sum.add_scaled(t.weight, &m);
        let min_eig = *hermitian_eigenvalues_with(&m, tol)?
            .last()
            .expect("nonempty");
        let psd = min_eig >= -tol.term_psd;
        let mut structure = true;
        let mut evidence = true;
        for b in &t.blocks {
            if b.state.layout().dims()
                != b.factors
                    .iter()
                    .map(|&f| fs[f].dimension)
                    .collect::<Vec<_>>()
            {
                structure = false;
                messages.push(format!("block {} has mismatched dimensions", b.label));
                continue;
            }
            let local_left: Vec<usize> = (0..b.factors.len())
                .filter(|&i| t.cut.contains(fs[b.factors[i]].party))
                .collect();
            let actual = if local_left.len() == b.factors.len() {
                BlockSide::Left
            } else if local_left.is_empty() {
                BlockSide::Right
            } else {
                BlockSide::Straddling
            };
            if actual != b.side {
                structure = false;
                messages.push(format!(
                    "block {} declared {:?} but lies {:?} of {}",
                    b.label, b.side, actual, t.cut
                ));
            }
            if actual == BlockSide::Straddling {
                let ok = match &b.evidence {
                    Some(e) => {
                        e.is_certified_separable()
                            && verify_evidence(&b.state, &local_left, e, tol)?
                    }
                    None => false,
                };
                if !ok {
                    evidence = false;
                    messages.push(format!(
                        "block {} lacks valid separability evidence",
                        b.label
                    ));
                }
            }
        }
        let product_deviation = if t.blocks.iter().all(|b| b.side != BlockSide::Straddling) {
            let term =
                DensityMatrix::new_with(m.clone(), target.layout().clone(), &relaxed(tol)).ok();
            match term {
                Some(term) => {
                    let (left, right) = cut_factors(&t.cut, target.layout())?;
                    let a = term.reduce_to(&left)?;
                    let c = term.reduce_to(&right)?;
                    let order: Vec<usize> = left.iter().chain(&right).copied().collect();
                    let reordered = term.permute_factors(&order)?;
                    let dev = kron(a.matrix(), c.matrix())?.max_abs_diff(reordered.matrix());
                    if dev > tol.product_structure {
                        structure = false;
                        messages.push(format!(
                            "term deviates from a product across {} by {dev:.2e}",
                            t.cut
                        ));
                    }
                    Some(dev)
                }
                None => {
                    structure = false;
                    messages.push("term is not a valid state".into());
                    None
                }
            }
        } else {
            None
        };
        checks.push(TermCheck {
            index,
            weight: t.weight,
            min_eigenvalue: min_eig,
            psd,
            structure,
            product_deviation,
            evidence,
            messages,
        });
    }
    let residual = trace_norm(&(&sum - target.matrix()).hermitian_part())? / 2.0;
    let residual_ok = residual <= tol.reconstruction;
    let passed =
        weights_ok && residual_ok && checks.iter().all(|c| c.psd && c.structure && c.evidence);
    Ok(CertificateVerification {
        passed,
        weight_sum,
        weights_ok,
        reconstruction_residual: residual,
        residual_ok,
        terms: checks,
    })
}

fn relaxed(tol: &Tolerances) -> Tolerances {
    Tolerances {
        psd: tol.term_psd,
        ..*tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivationReport {
    pub n: usize,
    pub k: usize,
    pub p0: f64,
    /// Visibility at which the construction ran.
    pub p_hat: f64,
    /// True when `p_hat` came from the grid search rather than the caller.
    pub searched: bool,
    pub search: Option<PHatSearch>,
    pub certificate: BiseparableCertificate,
    pub verification: CertificateVerification,
    /// Activatability of a single copy `σₙ(p̂)`.
    pub activatability: ActivatabilityCertificate,
    pub key_state_evidence: Option<SeparabilityEvidence>,
}

/// Full pipeline: `p₀`, then `p̂` (searched unless given), the certificate
/// for `σₙ(p̂)^{⊗k}`, its verification, and NPT activatability of `σₙ(p̂)`.
pub fn run_activation(
    n: usize,
    k: usize,
    p: Option<f64>,
    opts: &PHatOptions,
    tol: &Tolerances,
) -> Result<ActivationReport> {
    let p0v = p0(n, k)?;
    let (p_hat, search) = match p {
        Some(p) => {
            check_p(p)?;
            (p, None)
        }
        None => {
            let s = find_p_hat(n, k, opts, tol)?;
            match s.p_hat {
                Some(ph) => (ph, Some(s)),
                None => {
                    return Err(Error::Domain(format!(
                        "p-hat search failed: {}",
                        s.failure.unwrap_or_default()
                    )))
                }
            }
        }
    };
    let certificate = build_biseparable_certificate_with(n, k, p_hat, &opts.evidence, tol)?;
    let target = star_copies(n, p_hat, k)?;
    let verification = verify_certificate(&certificate, &target, tol)?;
    let activatability = activatable_via_npt_with(&star_copies(n, p_hat, 1)?, &opts.evidence, tol)?;
    let key_state_evidence = match &search {
        Some(s) => s.evidence.clone(),
        None if p_hat > 1.0 / 3.0 => {
            let hub: Vec<usize> = (0..k).collect();
            Some(separability_evidence(
                &key_state(p_hat, k, n)?,
                &hub,
                &opts.evidence,
                tol,
            )?)
        }
        None => None,
    };
    Ok(ActivationReport {
        n,
        k,
        p0: p0v,
        p_hat,
        searched: search.is_some(),
        search,
        certificate,
        verification,
        activatability,
        key_state_evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_examples() {
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(f_k(p, 1).unwrap(), p);
        }
        assert!((f_k(1.0 / 3.0, 2).unwrap() - 5.0 / 9.0).abs() < 1e-15);
        assert_eq!(f_k(0.0, 7).unwrap(), 0.0);
        assert!(f_k(1.5, 1).is_err());
        assert!(f_k(0.5, 0).is_err());
    }

    #[test]
    fn mixing_ratio_examples() {
        assert_eq!(mixing_ratio(0.0, 3.0).unwrap(), 0.0);
        assert!((mixing_ratio(0.37, 1.0).unwrap() - 0.37).abs() < 1e-15);
        assert!(mixing_ratio(1.0, 2.0).unwrap() == 1.0);
        assert!(mixing_ratio(-0.1, 2.0).is_err());
    }

    #[test]
    fn key_state_single_copy_is_isotropic() {
        let key = key_state(0.5, 1, 3).unwrap();
        let want = isotropic_state(1.0 / 3.0).unwrap();
        assert!(key.matrix().max_abs_diff(want.matrix()) < 1e-15);
    }
}
