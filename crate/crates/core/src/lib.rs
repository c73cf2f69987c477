//! Genealogy simulation and exact coalescent functionals for Cannings
//! population models with random fitness weights W_i = X_i / (X_1+..+X_N).
//!
//! The crate provides
//! - a catalog of heavy-tailed fitness laws with samplers, exact tails,
//!   Laplace transforms and mixed moments ([`catalog`]),
//! - regular-variation utilities: ell*, the a_N scaling sequence and
//!   Karamata-type numerical checks ([`slowly_varying`]),
//! - set-partition algebra for ancestral lineages ([`partition`]),
//! - a Monte Carlo engine with Rao-Blackwellized estimators ([`sim`]),
//! - deterministic evaluation of the transition functionals
//!   Phi_j^(N)(k_1..k_j) through their Laplace-transform integral
//!   representation ([`moments`]),
//! - the limiting coalescent transition laws ([`limits`]), and
//! - a regime classifier and verification-report generator ([`verifier`]).

pub mod catalog;
pub mod limits;
pub mod moments;
pub mod partition;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod slowly_varying;
pub mod special;
pub mod verifier;

pub use catalog::{Model, ModelError, TailIndex};
pub use limits::{LambdaSpec, PdSpec, Regime};
pub use moments::{MomentResult, QuadratureConfig};
pub use partition::{MergerSpec, Partition};
pub use sim::{EstimateCi, GenealogyPath, WeightVector};
pub use verifier::{RunConfig, VerificationReport};
