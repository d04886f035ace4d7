//! Detection and computer-assisted proof of cusp bifurcations of equilibria
//! of two-parameter vector fields.
//!
//! The pipeline triangulates the equilibrium manifold ([`continuation`]),
//! flags triangles whose boundary carries a nonzero index of the map
//! `g = (sigma_n, w_n^T D_xx f(v_n, v_n))` ([`detect`]), and certifies each
//! candidate with a Newton-Kantorovich argument in interval arithmetic
//! ([`prove`]).

// `!(x < y)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod continuation;
pub mod detect;
pub mod interval;
pub mod jet;
pub mod linalg;
pub mod model;
pub mod prove;
pub mod scalar;
pub mod svd_path;
