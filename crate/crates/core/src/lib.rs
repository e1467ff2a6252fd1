//! Gaussian-assumed Bayesian filtering for nonlinear discrete-time systems.
//!
//! The central idea: the per-step posterior mean and covariance of a
//! Gaussian-assumed filter are ratios of parameter-dependent integrals.
//! Those integrals satisfy a first-order linear PDE system (a Pfaffian
//! system) in the step data, so instead of quadrature at every step they
//! can be obtained by transporting a known vector of values along a path
//! in parameter space with an ODE solver. This crate provides
//!
//! * exact multivariate rational-function algebra and an expression
//!   parser ([`ratfun`]),
//! * Pfaffian system loading, validation and moment-coefficient
//!   derivation ([`pfaffian`]),
//! * the path transport solver ([`hgm`]),
//! * state-space models and simulation ([`models`]),
//! * a quadrature ground-truth engine ([`oracle`]),
//! * the transport-based filter plus KF/EKF/UKF/PF baselines ([`filters`]).

pub mod filters;
pub mod hgm;
pub mod models;
pub mod oracle;
pub mod pfaffian;
pub mod ratfun;
