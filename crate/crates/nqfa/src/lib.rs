//! Numerical Fourier analysis on finite quantum groups.
//!
//! Every object lives on a single finite-dimensional Hilbert space
//! `ℓ²(G)`, the GNS space of the Haar state. From structure tensors the crate
//! builds the fundamental unitaries, the dual quantum group and its
//! irreducible corepresentations, crossed products by actions, and the
//! correspondence between left ideals of `ℓ¹(G)` and jointly invariant
//! bimodules in `B(ℓ²(G))`. Each construction is paired with a check that
//! measures how far it is from the identity it should satisfy.
//!
//! ```
//! use nqfa::groups::FiniteGroup;
//! use nqfa::qg::FiniteQuantumGroup;
//!
//! let g = FiniteGroup::builtin("s3").unwrap();
//! let q = FiniteQuantumGroup::from_function_algebra(&g).unwrap();
//! assert_eq!(q.dim(), 6);
//! let dims: Vec<usize> = q.irreps().iter().map(|u| u.dim()).collect();
//! assert_eq!(dims, vec![1; 6]);
//! ```

pub mod bimodules;
pub mod dynamics;
pub mod error;
pub mod fubini;
pub mod fourier;
pub mod groups;
pub mod limits;
pub mod numerics;
pub mod qg;
pub mod tolerances;

pub use error::{Error, Result};

// The guide in `book/` is compiled as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quantum-groups.md")]
    mod quantum_groups {}
    #[doc = include_str!("../../../book/src/fourier.md")]
    mod fourier {}
    #[doc = include_str!("../../../book/src/crossed-products.md")]
    mod crossed_products {}
    #[doc = include_str!("../../../book/src/bimodules.md")]
    mod bimodules {}
    #[doc = include_str!("../../../book/src/fubini.md")]
    mod fubini {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
