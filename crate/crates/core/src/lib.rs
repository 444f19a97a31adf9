//! Hidden Markov Hawkes Process: a marked point process on a follower network
//! where each event's topic depends on the topic of the event that triggered it.
//!
//! Most types are generic over the scalar type (`f32` or `f64`, default `f64`);
//! the `*F32` aliases name the single-precision variants.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evaluation;
pub mod generator;
pub mod io;
pub mod likelihood;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod topic_analysis;

pub use error::{Error, Result};
pub use model::{
    exp_kernel, impulse_response, validate_dataset, Dataset, EdgeGroupKey, EdgeGrouping, EdgeGroups, Event, EventId,
    GroupLabel, Hyperparameters, ModelParameters, Network, NodeId, ObservationWindow, Parent, Table, Violation,
};
pub use sampler::{run_gibbs, InferenceResult, SamplerConfig, SamplerMode};
pub use scalar::Scalar;

pub type DatasetF32 = Dataset<f32>;
pub type EventF32 = Event<f32>;
pub type HyperparametersF32 = Hyperparameters<f32>;
pub type ModelParametersF32 = ModelParameters<f32>;
pub type SamplerConfigF32 = SamplerConfig<f32>;
pub type InferenceResultF32 = InferenceResult<f32>;
