//! Multi-network node embedding.
//!
//! Give the pipeline several networks over one shared node set and it
//! produces one embedding per network plus their concatenation:
//!
//! 1. each adjacency is diffused by random walk with restart into dense
//!    node features ([`diffusion`]),
//! 2. a stack of progressively narrower autoencoders compresses those
//!    features, with must-link / cannot-link pairs exchanged between the
//!    networks steering the hidden layers ([`neural`], [`constraints`],
//!    [`pipeline`]),
//! 3. embedding quality is scored by multi-label node classification under
//!    cross-validation ([`evaluation`]).
//!
//! All numeric kernels are generic over [`scalar::Scalar`] (`f32` or
//! `f64`); the `*64` aliases below pin the common case. Every random
//! decision flows from explicit seeds, so equal inputs give bitwise equal
//! outputs.

pub mod constraints;
pub mod diffusion;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod matrix;
pub mod neural;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix64 = matrix::Matrix<f64>;
pub type Matrix32 = matrix::Matrix<f32>;
pub type TransitionMatrix64 = diffusion::TransitionMatrix<f64>;
pub type DiffusionMatrix64 = diffusion::DiffusionMatrix<f64>;
pub type AutoencoderPair64 = neural::AutoencoderPair<f64>;
pub type TrainedAutoencoder64 = neural::TrainedAutoencoder<f64>;
pub type EmbeddingSet64 = pipeline::EmbeddingSet<f64>;
