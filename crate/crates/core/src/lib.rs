//! Equivariant vortex solutions of the anisotropic Ginzburg-Landau system.
//!
//! The crate minimizes
//!
//! ```text
//! E(u, D_R) = ∫ (1-δ)/2 |∇u|² + δ (div u)² + ¼(1-|u|²)²
//! ```
//!
//! over maps `u: D_R → ℝ²` that are equivariant under the dihedral classes
//! `μ_d^±` (degree `d ≤ -1`, `n = 1-d`), with an `S¹`-valued boundary datum
//! that itself minimizes the circle energy. Around the solver sit the pieces
//! needed to check the results: winding numbers, the isotropic radial
//! profiles, the stress-energy tensor and both Pohozaev identities, explicit
//! multi-vortex comparison maps, and the degree thresholds `δ₀(d)`.
//!
//! Start with the runnable programs in `examples/`; the `anisovortex` binary
//! wraps the same calls behind subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod boundary;
pub mod construction;
pub mod energy;
pub mod error;
pub mod field;
pub mod io;
pub mod optim;
pub mod pohozaev;
pub mod radial;
pub mod solver;
pub mod stress;
pub mod sweep;
pub mod symmetry;

pub use error::{Error, Result};
pub use field::{Layout, PolarField};
pub use symmetry::{GroupElement, Sign, SymmetryClass};

/// 2-vectors are stored as complex numbers `u1 + i u2`.
pub type Vec2 = num_complex::Complex64;
