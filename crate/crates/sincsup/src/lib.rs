//! Suprema of random linear combinations of shifted sinc kernels.
//!
//! The central object is the random signal f(t) = Σₖ aₖ·sinc(t − k) with
//! coefficients drawn from a configurable ensemble. The crate provides:
//!
//! - certified enclosures of sup_t |f(t)| via interval branch-and-bound
//!   ([`supbound::certified_supremum`]), plus a fast refined grid heuristic;
//! - contrast signal families (a uniformly bounded orthonormal Fourier system
//!   on [0,1], and an integrable Gaussian-bump kernel) whose suprema scale
//!   differently in n;
//! - discrete companions: harmonic-weighted coefficient sums X = Y + Z whose
//!   maxima track the sinc supremum, truncation/tail bounds for them, and
//!   exact conditional sign-pattern expectations;
//! - deterministic coefficient ensembles (Gaussian, Rademacher, bounded
//!   symmetric laws) driven by a counter-based splitmix64 generator;
//! - sweep/fit/export machinery for measuring how E sup|f| grows with n and
//!   classifying the growth law (√log n vs log log n vs √(n log n) vs
//!   constant).
//!
//! Everything is deterministic given (ensemble, n, seed): sweeps re-run to
//! byte-identical exports regardless of thread count.

pub mod discrete;
pub mod ensembles;
pub mod error;
mod fftconv;
pub mod experiments;
pub mod kernel;
pub mod selfcheck;
pub mod signal;
pub mod supbound;

pub use error::{Error, Result};
