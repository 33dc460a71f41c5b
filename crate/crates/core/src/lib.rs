//! Critical parameters of frog models with geometric lifetimes on directed
//! regular trees.
//!
//! The crate is organised bottom-up:
//!
//! * [`distributions`]: the inter-arrival law with hazard `h_k = c q^k`,
//!   its defect mass and the q-Pochhammer product.
//! * [`renewal`]: renewal probabilities, the generating function of the
//!   inter-arrival law and the renewal convergence rate.
//! * [`critical`]: the critical-parameter equation, its closed-form bounds
//!   and the derived bounds for cone percolation and three frog variants.
//! * [`simulator`]: seeded Monte Carlo engines for the frog model on the
//!   directed tree and for the firework process on the half-line.
//!
//! Replicates and table rows run on rayon when the `parallel` feature is
//! enabled (the default); see [`exec`].

pub mod critical;
pub mod distributions;
mod error;
pub mod exec;
pub mod renewal;
mod roots;
pub mod simulator;

pub use error::{Error, Result};
