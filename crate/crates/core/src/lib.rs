//! Exact path homology of finite digraphs.
//!
//! The engine computes `Ω_*` and its homology over `ℤ`, `ℚ` and `ℤ/p`,
//! integral bases of minimal paths, the cellular and Δ-complex shadows of
//! those bases, cup products of forms, and the finite-topological-space
//! reformulations (clique spaces, Čech cohomology, path spaces).
//!
//! Arithmetic is generic over the rings in [`scalar`]; the aliases below fix
//! the arbitrary-precision choices used by the public API.

pub mod bench;
pub mod corpus;
pub mod cup;
pub mod cw;
pub mod digraph;
pub mod error;
pub mod examples;
pub mod finitetop;
pub mod homology;
pub mod linalg;
pub mod minimal;
pub mod paths;
pub mod scalar;

pub use digraph::{
    cartesian_product, check_morphism, one_step_homotopic, parse_digraph, parse_graph, support_subgraph, Digraph,
    DigraphMorphism, Graph, MorphismMode, Vertex,
};
pub use error::{Error, Result};
pub use minimal::{decompose, is_minimal, minimal_basis, minimal_paths_between, MinimalBasis};
pub use paths::{allowed_paths, omega, OmegaModule, PathVector, PrimitivePath};

/// Arbitrary-precision integers.
pub type Int = num_bigint::BigInt;
/// Exact rationals.
pub type Rational = num_rational::BigRational;
pub type IntMatrix = linalg::Matrix<Int>;
pub type RatMatrix = linalg::Matrix<Rational>;
