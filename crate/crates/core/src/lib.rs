//! Numerical toolkit for generalized nonexpansive maps in finite-dimensional
//! ℓ_p spaces.
//!
//! * [`spaces`]: norms, nearest points, Hausdorff distance.
//! * [`maps`]: single- and multivalued self-maps built from tagged rules,
//!   including the classic discontinuous examples.
//! * [`conditions`]: sampled checks of condition (C), (C_λ), (E_μ) and
//!   nonexpansiveness, with reproducible violation witnesses.
//! * [`iteration`]: Krasnoselskii-type averaged iterations, the Goebel–Kirk
//!   trace property, and fixed-point-set approximation.
//! * [`asymptotic`]: tail-window asymptotic radius and center.
//! * [`solver`]: common fixed points of a commuting single/multivalued pair.
//! * [`cli`]: the `commonfix` command-line harness.

pub mod asymptotic;
pub mod cli;
pub mod conditions;
pub mod config;
pub mod error;
pub mod iteration;
pub mod maps;
pub mod reproduce;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
