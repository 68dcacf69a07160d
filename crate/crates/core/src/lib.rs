//! Simulation-derived policy priors for sample-efficient policy search.
//!
//! The crate identifies the best latent-conditioned policy for an unseen
//! "real" environment in few real evaluations. It does so in four stages:
//!
//! 1. [`sim`] — a deterministic 2D bounce-to-target environment whose
//!    dynamics depend on latent factors (friction, restitution) plus an
//!    optional drag term that stands in for unmodelled real-world physics.
//! 2. [`policy`] — a latent-lattice policy table trained exhaustively in
//!    simulation; conditioning it at any latent vector yields a ranked
//!    action list per task.
//! 3. [`prior`] — cross-environment performance statistics of conditioned
//!    policies, gathered purely in simulation and filtered for Gaussianity
//!    with a Kolmogorov–Smirnov test.
//! 4. [`bo`] — Expected-Improvement Bayesian optimization over latent
//!    space against a Gaussian process ([`gp`]) whose covariance diagonal
//!    carries the per-point prior variances as heteroscedastic noise.
//!
//! [`baselines`] holds the comparison methods (no-prior BO, domain
//! randomization, trajectory-matching latent estimation) and [`harness`]
//! the reproducible multi-seed experiment protocol behind the CLI.

pub mod baselines;
pub mod bo;
pub mod gp;
pub mod harness;
pub mod policy;
pub mod prior;
pub mod rng;
pub mod sim;
pub mod stats;
