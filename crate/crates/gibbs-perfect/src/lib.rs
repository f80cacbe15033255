//! Perfect sampling of the hard-sphere model and of repulsive, finite-range
//! Gibbs point processes on boxes `[0, L)^d`.
//!
//! The sampler repeatedly picks an "incorrect" box, proposes to resample a
//! neighbourhood around it, and gates the proposal with a Bayes filter coin
//! so that the final configuration is an exact draw. Filter coins are built
//! from empty-set coins with Bernoulli factories, so no partition function
//! is ever evaluated inside a run.
//!
//! Modules, bottom up:
//! - [`geometry`]: box lattice, neighbourhoods, point configurations
//! - [`model`]: pair potentials and a brute-force partition-function oracle
//! - [`poisson_gibbs`]: Poisson processes, exact conditional Gibbs draws
//! - [`bernoulli_factory`]: averaging, doubling and ratio factories
//! - [`bayes_filter`]: filter corrections and filter coins
//! - [`sampler`]: the main loop
//! - [`harness`]: goodness-of-fit, baselines, invariants, scaling
//! - [`cli`]: config parsing and the `sample`, `validate`, `bench` commands

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes_filter;
pub mod bernoulli_factory;
pub mod cli;
pub mod geometry;
pub mod harness;
pub mod model;
pub mod poisson_gibbs;
pub mod rng;
pub mod sampler;

pub use geometry::{BoxIndex, BoxLattice, BoxSet, PointConfiguration};
pub use model::{PairPotential, PotentialKind};
pub use rng::RngStream;
