//! Random fixtures shared by unit tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::tensor::{ComplexMatrix, C64};

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.hermitian_part()
}
