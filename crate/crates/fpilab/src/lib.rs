//! fpilab: a desk-scale numerical laboratory for weighted fractional
//! Poincaré–Sobolev inequalities.
//!
//! The crate discretizes cubes into cell-centered lattices and provides, on
//! top of them:
//!
//! * Muckenhoupt A_1/A_p weight constants and the A_p characterization
//!   inequalities ([`weights`]);
//! * centered, non-centered, local and weighted maximal operators plus Riesz
//!   potentials, each with a summed-area fast path and a brute-force oracle
//!   that agree bit for bit ([`maximal`]);
//! * Gagliardo and Sobolev seminorms, weak (Marcinkiewicz) quasinorms,
//!   Kolmogorov's inequality and the pointwise representation bounds
//!   ([`seminorm`]);
//! * a verification harness that evaluates each inequality as
//!   `LHS <= C(n) * K * RHS` with the explicit K factored out, sweeps
//!   parameters and runs grid-convergence studies ([`verify`]).
//!
//! Dimensional constants `C(n)` are unknowable numerically; every check
//! reports the core ratio `rho = LHS / (K * RHS)` and asserts finiteness,
//! grid stability and sweep spreads, never `rho <= 1`.
//!
//! The `fpilab` binary exposes the same machinery as `eval`, `verify`,
//! `sweep`, `converge` and `catalog` subcommands; see the crate examples for
//! library-level usage.

pub mod cli;
pub mod error;
pub mod lattice;
pub mod maximal;
pub mod prefix;
pub mod seminorm;
pub mod sum;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
