//! Exact-arithmetic toolkit for toric vector bundles.
//!
//! The crate is organized bottom-up:
//! - [`exact`]: rational/integer linear algebra (rank, kernels, HNF, SNF);
//! - [`matroid`]: linear ideals, their matroids, tropical membership,
//!   apartments and initial matroids;
//! - [`polyhedral`]: rational cones, lattice polytopes, Hilbert bases and
//!   affine monoid membership;
//! - [`toric`]: fans, divisor class lattices, divisor polytopes;
//! - [`bundle`]: the combinatorial bundle data, classification predicates
//!   and positivity (effective / nef / basepoint-free) machinery;
//! - [`nobody`]: Newton-Okounkov bodies and weight quasivaluations;
//! - [`fano`]: anticanonical classes and the diagonal-family Fano
//!   classification;
//! - [`cli`]: the input format and command-line front end.

pub mod bundle;
pub mod cli;
pub mod exact;
pub mod fano;
pub mod matroid;
pub mod nobody;
pub mod polyhedral;
pub mod toric;

#[cfg(test)]
pub mod testdata;
