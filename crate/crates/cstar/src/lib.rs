//! Finite-dimensional operator algebras over the complex matrices.
//!
//! The crate works with concrete *-subalgebras of M_d(C) for d <= 64 and
//! provides, on top of a small dense-matrix kernel:
//!
//! * algebra generation, membership, and Wedderburn block structure,
//! * spectra, joint spectra, and functional calculus for commuting normals,
//! * states, norm-attaining and faithful states, a constructive sequential
//!   Hahn-Banach extension, Gelfand transforms, and extreme-point machinery,
//! * GNS representations,
//! * projection nets, flag sequences, and discrete-family indexing,
//! * exact (rational) finite truncations of the Boolean-string algebra, and
//! * well-founded trees with ranks and budgeted branch search.
//!
//! Every numerically fuzzy decision goes through [`mat::Tol`]; every random
//! choice goes through a caller-seeded generator. Identical inputs, seeds,
//! and tolerances give identical results.

pub mod algebra;
pub mod gns;
pub mod mat;
pub mod optim;
pub mod projections;
pub mod russell;
pub mod spectral;
pub mod states;
pub mod trees;

pub use mat::{CMatrix, Tol};
