//! Certification of biseparability and genuine multipartite entanglement for
//! small multipartite quantum states.
//!
//! Per-cut criteria live in [`criteria`], two-sided distance bounds and the
//! multipartite tests in [`distance`], and the star-network activation
//! construction in [`activation`]. Every result that claims a certificate can
//! be re-checked by an independent verifier in the same module.

pub mod activation;
pub mod criteria;
pub mod distance;
pub mod error;
pub mod partitions;
pub mod sdp;
pub mod states;
pub mod tensor;
pub mod tolerance;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    pub mod states {}
    #[doc = include_str!("../../../book/src/criteria.md")]
    pub mod criteria {}
    #[doc = include_str!("../../../book/src/distance.md")]
    pub mod distance {}
    #[doc = include_str!("../../../book/src/gme.md")]
    pub mod gme {}
    #[doc = include_str!("../../../book/src/activation.md")]
    pub mod activation {}
}
