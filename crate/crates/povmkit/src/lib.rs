//! # povmkit
//!
//! Distinguishability norms of quantum measurements (POVMs), their zonotope
//! geometry, and randomized sparsification.
//!
//! A discrete POVM `M = (M_i)` on ℂ^d induces the seminorm
//! `‖Δ‖_M = Σ_i |tr(Δ M_i)|` on Hermitian operators: twice the optimal bias
//! of `M` for discriminating two states differing by Δ. This crate provides
//!
//! - dense Hermitian linear algebra and seeded Haar sampling ([`operator`]),
//! - POVMs, sub-POVMs, distinguishability norms, and the correspondence
//!   with probability measures on states ([`povm`]),
//! - symmetric zonotopes whose support functions realize those norms,
//!   including the zonoid tensor product ([`zonoid`]),
//! - Monte Carlo estimation of the uniform-POVM norm
//!   `‖Δ‖_U = d·E|⟨ψ|Δ|ψ⟩|` and the modified Hilbert–Schmidt norms it is
//!   equivalent to, with exact moment identities as oracles ([`uniform`]),
//! - projective t-design verification via symmetric-subspace projectors
//!   ([`designs`]),
//! - random renormalized POVMs, weighted sub-POVM sparsification, local
//!   tensorized sparsification, and empirical norm-ratio certificates
//!   ([`sparsify`]).
//!
//! All randomness flows through explicit [`rng::RngStream`] values, so every
//! computation is bit-reproducible from a 64-bit seed.

pub mod designs;
pub mod error;
pub mod operator;
pub mod povm;
pub mod rng;
pub mod sparsify;
pub mod uniform;
pub mod zonoid;

pub use error::{Error, Result};
pub use operator::{haar_unit_vector, random_direction, DensityState, HermitianOperator, PureState};
pub use povm::{DiscretePovm, ElementSet, StateMeasure, SubPovm};
pub use rng::RngStream;
pub use uniform::NormEstimate;
pub use zonoid::SymmetricZonotope;
