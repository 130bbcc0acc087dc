//! Szabó operators of covariant-derivative curvature tensors on
//! pseudo-Euclidean spaces.
//!
//! A tensor `D(x,y,z,w;v)` with the symmetries of the covariant derivative
//! of a curvature tensor defines, for every vector `v`, the Szabó operator
//! `S(v)` by `(S(v)y, z) = D(y,v,v,z;v)`. This crate samples `S` over the
//! unit pseudo-spheres and the null cone, decomposes each `S(v)` into
//! generalized eigenspaces under the indefinite metric, and checks the known
//! vanishing and rank results for tensors whose spectrum or Jordan form is
//! constant. The exact parts (class dimensions, injectivity of the Szabó map,
//! the linear-annihilator system) use integer elimination.
//!
//! ```
//! use szabo::space::PseudoSpace;
//! use szabo::tensor::AcdtTensor;
//! use nalgebra::DVector;
//!
//! let space = PseudoSpace::new(2, 3)?;
//! let r = AcdtTensor::random(space, 7);
//! let v = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0]);
//! let s = r.szabo(&v);
//! assert!(space.is_self_adjoint(s.matrix(), 1e-9).is_self_adjoint);
//! # Ok::<(), szabo::Error>(())
//! ```

pub mod analyzer;
pub mod error;
pub mod exact;
pub mod jordan;
pub mod linalg;
pub mod nullcone;
pub mod report;
pub mod sampling;
pub mod serde_util;
pub mod space;
pub mod spectral;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};

// The book's code listings run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/spaces.md")]
    pub mod spaces {}
    #[doc = include_str!("../../../book/src/tensors.md")]
    pub mod tensors {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    pub mod spectra {}
    #[doc = include_str!("../../../book/src/null-cone.md")]
    pub mod null_cone {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
