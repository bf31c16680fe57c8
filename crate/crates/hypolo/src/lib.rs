//! Density-based local outlier detection in the Poincare disk.
//!
//! The crate provides two detector families over 2-d hyperbolic embeddings:
//!
//! * [`detectors::hlof`]: the local outlier factor driven by the Rao
//!   (geodesic) distance of the Poincare disk instead of the Euclidean one.
//! * [`detectors::hloop`]: a local outlier probability whose density model
//!   is an isotropic hyperbolic Gaussian; its radial CDF has a closed form
//!   in terms of `erf`, so probabilistic set distances need no sampling.
//!
//! Supporting modules expose the geometry ([`geometry`]), the hyperbolic
//! Gaussian itself ([`hgauss`]), closed-ball k-NN search with a brute-force
//! and a vantage-point-tree backend ([`neighbors`]), dataset I/O and a toy
//! generator ([`datasets`]), and ROC evaluation ([`eval`]).
//!
//! All scoring is deterministic: results do not depend on thread count or
//! on the order in which points appear in the input.

pub mod datasets;
pub mod detectors;
pub mod eval;
pub mod geometry;
pub mod hgauss;
pub mod neighbors;
pub mod special;
