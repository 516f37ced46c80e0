//! Constructors for isotropic, GHZ and pair-entangled network states, and the
//! multi-copy regrouping map.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, DensityMatrix, Factor, SubsystemLayout, C64};
use crate::tolerance::Tolerances;

/// Visibility `p ∈ [0, 1]` of an isotropic two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct IsotropicVisibility(f64);

impl IsotropicVisibility {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("visibility {p} outside [0, 1]")));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `|φ⁺⟩⟨φ⁺|` with `|φ⁺⟩ = (|00⟩ + |11⟩)/√2`, parties 1 and 2.
pub fn max_entangled_qubit() -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(r, c)] = C64::new(0.5, 0.0);
    }
    DensityMatrix::new_unchecked(m, SubsystemLayout::qubits(2))
}

/// `ρ(p) = p φ⁺ + (1 - p) I/4`.
pub fn isotropic(p: IsotropicVisibility) -> DensityMatrix {
    let p = p.value();
    let mut m = max_entangled_qubit().matrix().scale(p);
    m.add_scaled(1.0 - p, &ComplexMatrix::maximally_mixed(4));
    DensityMatrix::new_unchecked(m, SubsystemLayout::qubits(2))
}

/// Shorthand for `isotropic(IsotropicVisibility::new(p)?)`.
pub fn isotropic_state(p: f64) -> Result<DensityMatrix> {
    Ok(isotropic(IsotropicVisibility::new(p)?))
}

/// Projector onto `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits, one per party.
pub fn ghz(n: usize) -> Result<DensityMatrix> {
    if !(2..=8).contains(&n) {
        return Err(Error::Domain(format!("GHZ party count {n} outside 2..=8")));
    }
    let d = 1usize << n;
    let mut m = ComplexMatrix::zeros(d, d);
    for (r, c) in [(0, 0), (0, d - 1), (d - 1, 0), (d - 1, d - 1)] {
        m[(r, c)] = C64::new(0.5, 0.0);
    }
    Ok(DensityMatrix::new_unchecked(m, SubsystemLayout::qubits(n)))
}

/// Computational-basis product state `|i₁…i_n⟩⟨i₁…i_n|` on a layout.
pub fn basis_state(layout: SubsystemLayout, digits: &[usize]) -> Result<DensityMatrix> {
    if digits.len() != layout.len() {
        return Err(Error::DimensionMismatch(digits.len(), layout.len()));
    }
    let mut index = 0;
    for (f, &x) in layout.factors().iter().zip(digits) {
        if x >= f.dimension {
            return Err(Error::Domain(format!(
                "basis digit {x} for dimension {}",
                f.dimension
            )));
        }
        index = index * f.dimension + x;
    }
    let d = layout.total_dimension();
    let mut m = ComplexMatrix::zeros(d, d);
    m[(index, index)] = C64::new(1.0, 0.0);
    Ok(DensityMatrix::new_unchecked(m, layout))
}

/// One edge of a pair-entangled network: a two-qubit state shared by `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenEdge {
    pub a: usize,
    pub b: usize,
    pub state: DensityMatrix,
}

/// Graph plus one two-qubit state per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenGraph {
    vertex_count: usize,
    edges: Vec<PenEdge>,
}

impl PenGraph {
    pub fn new(vertex_count: usize, edges: Vec<PenEdge>) -> Result<Self> {
        if vertex_count < 2 {
            return Err(Error::InvalidGraph(format!("{vertex_count} vertices")));
        }
        if edges.is_empty() {
            return Err(Error::InvalidGraph("no edges".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &edges {
            if !(1 <= e.a && e.a < e.b && e.b <= vertex_count) {
                return Err(Error::InvalidGraph(format!("edge ({}, {})", e.a, e.b)));
            }
            if !seen.insert((e.a, e.b)) {
                return Err(Error::InvalidGraph(format!(
                    "repeated edge ({}, {})",
                    e.a, e.b
                )));
            }
            if e.state.layout().dims() != [2, 2] {
                return Err(Error::InvalidGraph(
                    "edge states must be two-qubit states".into(),
                ));
            }
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    /// Edges with isotropic states of the given visibilities.
    pub fn isotropic(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|&(a, b, p)| {
                Ok(PenEdge {
                    a,
                    b,
                    state: isotropic_state(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertex_count, edges)
    }

    /// Star with hub 1 and leaves `2..=n`, every edge at visibility `p`.
    pub fn star(n: usize, p: IsotropicVisibility) -> Result<Self> {
        let edges: Vec<_> = (2..=n).map(|i| (1, i, p.value())).collect();
        Self::isotropic(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[PenEdge] {
        &self.edges
    }
}

/// Tensor product of the edge states, regrouped party-major. A vertex's
/// qubits are ordered by the vertex at the other end of their edge.
pub fn pen_state(g: &PenGraph) -> Result<DensityMatrix> {
    let dim = 1usize << (2 * g.edges.len());
    if dim > Tolerances::DEFAULT.dimension_cap {
        return Err(Error::DimensionCap {
            dim,
            cap: Tolerances::DEFAULT.dimension_cap,
        });
    }
    let mut factors = Vec::new();
    let mut acc: Option<DensityMatrix> = None;
    for e in &g.edges {
        factors.push(Factor::qubit(e.a).with_slot(e.b));
        factors.push(Factor::qubit(e.b).with_slot(e.a));
        acc = Some(match acc {
            None => e.state.clone(),
            Some(s) => s.kron(&e.state),
        });
    }
    let layout = SubsystemLayout::new(factors)?;
    let state = acc
        .expect("at least one edge")
        .with_layout(layout.clone())?;
    let mut perm: Vec<usize> = (0..layout.len()).collect();
    perm.sort_by_key(|&i| {
        let f = layout.factors()[i];
        (f.party, f.slot)
    });
    state.permute_factors(&perm)
}

/// `σₙ(p) = ⊗_{i=2..n} ρ_{1i}(p)`; party 1 holds `n - 1` qubits.
pub fn star_pen(n: usize, p: IsotropicVisibility) -> Result<DensityMatrix> {
    if n < 3 {
        return Err(Error::Domain(format!("star network needs n >= 3, got {n}")));
    }
    pen_state(&PenGraph::star(n, p)?)
}

/// `ρ^{⊗k}` regrouped so each party's factors are adjacent (parties
/// ascending, copies ascending within a party).
pub fn copies(rho: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    copies_with_cap(rho, k, Tolerances::DEFAULT.dimension_cap)
}

pub fn copies_with_cap(rho: &DensityMatrix, k: usize, cap: usize) -> Result<DensityMatrix> {
    if k == 0 {
        return Err(Error::Domain("copy count must be >= 1".into()));
    }
    let dim = (rho.dim() as f64).powi(k as i32);
    if dim > cap as f64 {
        return Err(Error::DimensionCap {
            dim: dim.min(usize::MAX as f64) as usize,
            cap,
        });
    }
    let base = rho.clone().with_layout(rho.layout().relabel_copies(1))?;
    let mut acc = base.clone();
    for j in 2..=k {
        let next = base.clone().with_layout(rho.layout().relabel_copies(j))?;
        acc = acc.kron(&next);
    }
    let layout = acc.layout().clone();
    let per_copy = rho.layout().len();
    let mut perm: Vec<usize> = (0..layout.len()).collect();
    // stable: keeps within-copy order of a party's factors
    perm.sort_by_key(|&i| {
        (
            layout.factors()[i].party,
            layout.factors()[i].copy,
            i % per_copy,
        )
    });
    acc.permute_factors(&perm)
}

/// Ginibre-distributed random mixed state on a layout.
pub fn random_density(layout: SubsystemLayout, rng: &mut impl Rng) -> DensityMatrix {
    let d = layout.total_dimension();
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = g.matmul(&g.adjoint()).hermitian_part();
    DensityMatrix::normalized(m, layout).expect("Ginibre matrix has positive trace")
}

/// Haar-like random pure state vector of dimension `d`.
pub fn random_pure_vector(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::hermitian_eigenvalues;

    #[test]
    fn bell_entries() {
        let phi = max_entangled_qubit();
        for r in 0..4 {
            for c in 0..4 {
                let expect = if [0, 3].contains(&r) && [0, 3].contains(&c) {
                    0.5
                } else {
                    0.0
                };
                assert_eq!(phi.matrix()[(r, c)], C64::new(expect, 0.0));
            }
        }
        assert!((phi.purity() - 1.0).abs() < 1e-15);
        let marginal = phi.partial_trace(&[1]).unwrap();
        assert!(
            marginal
                .matrix()
                .max_abs_diff(&ComplexMatrix::maximally_mixed(2))
                < 1e-15
        );
    }

    #[test]
    fn isotropic_endpoints_and_purity() {
        let p0 = isotropic_state(0.0).unwrap();
        assert!(p0.matrix().max_abs_diff(&ComplexMatrix::maximally_mixed(4)) < 1e-15);
        let p1 = isotropic_state(1.0).unwrap();
        assert!(p1.matrix().max_abs_diff(max_entangled_qubit().matrix()) < 1e-15);
        let third = isotropic_state(1.0 / 3.0).unwrap();
        assert!((third.purity() - 1.0 / 3.0).abs() < 1e-15);
        assert!(IsotropicVisibility::new(1.01).is_err());
        assert!(IsotropicVisibility::new(-0.01).is_err());
    }

    #[test]
    fn ghz_structure() {
        assert_eq!(ghz(2).unwrap().matrix(), max_entangled_qubit().matrix());
        let g3 = ghz(3).unwrap();
        let nonzero: Vec<_> = (0..8)
            .flat_map(|r| (0..8).map(move |c| (r, c)))
            .filter(|&(r, c)| g3.matrix()[(r, c)].norm() > 0.0)
            .collect();
        assert_eq!(nonzero, vec![(0, 0), (0, 7), (7, 0), (7, 7)]);
        for n in 2..=5 {
            let g = ghz(n).unwrap();
            let one = g.reduce_to(&[n - 1]).unwrap();
            assert!(
                one.matrix()
                    .max_abs_diff(&ComplexMatrix::maximally_mixed(2))
                    < 1e-15
            );
        }
        assert!(ghz(1).is_err());
        assert!(ghz(9).is_err());
    }

    #[test]
    fn star_layout_is_party_major() {
        let s = star_pen(3, IsotropicVisibility::new(0.4).unwrap()).unwrap();
        let f = s.layout().factors();
        assert_eq!(
            f.iter().map(|x| (x.party, x.slot)).collect::<Vec<_>>(),
            vec![(1, 2), (1, 3), (2, 1), (3, 1)]
        );
        assert_eq!(s.dim(), 16);
    }

    #[test]
    fn star_endpoints() {
        let s0 = star_pen(3, IsotropicVisibility::new(0.0).unwrap()).unwrap();
        assert!(
            s0.matrix()
                .max_abs_diff(&ComplexMatrix::maximally_mixed(16))
                < 1e-15
        );
        // p = 1: phi+ on (hub-2, leaf 2) and (hub-3, leaf 3); undo the regrouping.
        let s1 = star_pen(3, IsotropicVisibility::new(1.0).unwrap()).unwrap();
        let edge_major = s1.permute_factors(&[0, 2, 1, 3]).unwrap();
        let phi = max_entangled_qubit();
        assert!(edge_major.matrix().max_abs_diff(phi.kron(&phi).matrix()) < 1e-15);
        assert!(star_pen(2, IsotropicVisibility::new(0.5).unwrap()).is_err());
    }

    #[test]
    fn star_edge_marginal_is_isotropic() {
        for p in [0.1, 0.45, 0.9] {
            let s = star_pen(3, IsotropicVisibility::new(p).unwrap()).unwrap();
            // hub qubit paired with 2 is factor 0, party 2 is factor 2
            let edge = s.reduce_to(&[0, 2]).unwrap();
            assert!(
                edge.matrix()
                    .max_abs_diff(isotropic_state(p).unwrap().matrix())
                    < 1e-14
            );
            let hub = s.reduce_to(&[0, 1]).unwrap();
            assert!(
                hub.matrix()
                    .max_abs_diff(&ComplexMatrix::maximally_mixed(4))
                    < 1e-15
            );
        }
    }

    #[test]
    fn single_edge_pen_is_bell() {
        let g = PenGraph::new(
            2,
            vec![PenEdge {
                a: 1,
                b: 2,
                state: max_entangled_qubit(),
            }],
        )
        .unwrap();
        assert_eq!(
            pen_state(&g).unwrap().matrix(),
            max_entangled_qubit().matrix()
        );
    }

    #[test]
    fn malformed_graphs() {
        let e = |a, b| PenEdge {
            a,
            b,
            state: max_entangled_qubit(),
        };
        assert!(PenGraph::new(3, vec![e(1, 2), e(1, 2)]).is_err());
        assert!(PenGraph::new(3, vec![e(2, 1)]).is_err());
        assert!(PenGraph::new(3, vec![e(1, 4)]).is_err());
        assert!(PenGraph::new(1, vec![]).is_err());
        let ghz3 = ghz(3).unwrap();
        assert!(PenGraph::new(
            3,
            vec![PenEdge {
                a: 1,
                b: 2,
                state: ghz3
            }]
        )
        .is_err());
    }

    #[test]
    fn copies_identity_at_one() {
        let s = star_pen(3, IsotropicVisibility::new(0.4).unwrap()).unwrap();
        assert_eq!(copies(&s, 1).unwrap(), s);
    }

    #[test]
    fn copies_of_product_state() {
        let a = basis_state(SubsystemLayout::qubits(2), &[0, 1]).unwrap();
        let two = copies(&a, 2).unwrap();
        // party-major: a a b b = |0 0 1 1>
        let expect = basis_state(SubsystemLayout::qubits(4), &[0, 0, 1, 1]).unwrap();
        assert_eq!(two.matrix(), expect.matrix());
        let labels: Vec<_> = two
            .layout()
            .factors()
            .iter()
            .map(|f| (f.party, f.copy))
            .collect();
        assert_eq!(labels, vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn copies_spectrum_is_pairwise_products() {
        let rho = isotropic_state(0.5).unwrap();
        let base = hermitian_eigenvalues(rho.matrix()).unwrap();
        let mut expect: Vec<f64> = base
            .iter()
            .flat_map(|a| base.iter().map(move |b| a * b))
            .collect();
        expect.sort_by(|a, b| b.total_cmp(a));
        let got = hermitian_eigenvalues(copies(&rho, 2).unwrap().matrix()).unwrap();
        for (x, y) in got.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn copies_respect_cap() {
        let s = star_pen(3, IsotropicVisibility::new(0.4).unwrap()).unwrap();
        assert!(copies(&s, 2).is_ok());
        assert!(matches!(copies(&s, 3), Err(Error::DimensionCap { .. })));
        assert!(copies(&s, 0).is_err());
    }
}
