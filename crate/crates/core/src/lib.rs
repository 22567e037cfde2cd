//! Numerical construction of a C¹ symplectic twist map of the annulus with an
//! essential invariant curve that is Lipschitz but has distinct one-sided
//! derivatives along a single orbit, on which the dynamics is a Denjoy
//! counter-example.
//!
//! The pipeline is
//!
//! 1. [`denjoy`]: gap lengths and their placement on the circle,
//! 2. [`base_map`]: the Denjoy diffeomorphism `g` and the marked orbit,
//! 3. [`surgery`]: one-sided slope sequences and the modified homeomorphism `h`,
//! 4. [`twist`]: the kick `phi = h + h^{-1} - 2 Id`, the curve `psi = h - Id` and `f_phi`,
//! 5. [`verify`]: numerical checks of every property of the construction.

// `!(x > y)` rejects NaN along with the ordinary failures.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod base_map;
pub mod build;
pub mod bump;
pub mod circle;
pub mod config;
pub mod denjoy;
pub mod error;
pub mod numeric;
pub mod surgery;
pub mod twist;
pub mod verify;

pub use base_map::{build_orbit, gap_forward, DenjoyMap, GapDynamics, OrbitEntry, OrbitTable, Side};
pub use build::{BuildDocument, Construction, Manifest};
pub use bump::BumpSpec;
pub use circle::{rotate, rotation_order, signed_gap, wrap, CirclePoint, LiftValue};
pub use config::BuildConfig;
pub use denjoy::{length, normalize, FamilyKind, Gap, GapTable, Hit, LengthFamily};
pub use error::{Error, Result};
pub use surgery::{
    build_surgery, fixed_point_plus, phi_m, phi_m_inv, seed_slopes, GapSurgery, ModifiedMap, SeedOffsets, SlopeSeq,
    SurgeryProfile,
};
pub use twist::{CurveSample, JacobianCheck, TwistSystem};
