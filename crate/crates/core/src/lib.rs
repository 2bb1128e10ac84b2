//! Numerical realisation and verification of gradient k-Yamabe solitons
//! conformal to pseudo-Euclidean space.
//!
//! The crate is organised bottom-up:
//!
//! * [`jet`] : second-order forward-mode differentiation.
//! * [`field`] : signatures, scalar fields, 1-D profiles, soliton candidates.
//! * [`tensor`] : Christoffel symbols, Hessian, Ricci, Schouten, `σ_k`, and
//!   the soliton residual of `δ/φ²`.
//! * [`reductions`] : the translation and rotation ansätze and their ODEs.
//! * [`quadrature`] : implicit solutions given as monotone antiderivatives.
//! * [`families`] : solution families and the example catalog.
//! * [`geodesic`] : geodesic integration and completeness probing.
//! * [`sampling`] : reproducible quasi-random point sets.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod field;
pub mod geodesic;
pub mod jet;
pub mod quadrature;
pub mod reductions;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{AnalyticProfile, Profile, ScalarField, Signature, SolitonSpec};
pub use jet::{Jet, Jet1, Real, MAX_DIM};
