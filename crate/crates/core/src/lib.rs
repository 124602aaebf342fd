//! Numerical laboratory for ρ-variation operators of approximate identities
//! on weighted spaces over a uniform 1-D grid.
//!
//! The crate computes variation operators and their commutators, Muckenhoupt
//! constants, sparse dominating families over three shifted dyadic lattices,
//! BMO-type oscillation norms and weighted Hardy atoms, and runs batch
//! experiments that measure the constants in the corresponding inequalities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atoms;
pub mod dyadic;
pub mod error;
pub mod grid;
pub mod harness;
pub mod kernel;
pub mod maximal;
pub mod oscillation;
pub mod sparse;
pub mod variation;
pub mod weights;

pub use dyadic::{lattices_for_domain, Cube, DyadicLattice};
pub use error::{Error, Result};
pub use grid::{lp_norm, weak_l1_norm, CellRange, Domain1D, GridFunction};
pub use kernel::{convolve, eval_kernel_dilated, hardy_norm, smooth_maximal, KernelSpec};
pub use maximal::{hl_maximal, m_half};
pub use variation::{
    commutator_variation, kernel_difference_variation, seq_variation_bruteforce, seq_variation_dp,
    variation_operator, ScaleFamily, VariationProfile,
};
pub use weights::{power_weight, Weight, WeightConstants};
