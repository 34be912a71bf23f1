//! LSTM classifiers for single-channel EEG, written from scratch: tensors,
//! layers with hand-derived backward passes, Adam, the Bonn dataset loader,
//! stratified fold splitting and a multi-fold experiment harness.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`). The aliases
//! at the crate root fix it to `f64`; the `*F32` aliases use single precision.

pub mod checkpoint;
pub mod data;
pub mod error;
pub mod gradcheck;
pub mod harness;
pub mod nn;
pub mod optim;
pub mod scalar;
pub mod seed;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Real = f64;

pub type Matrix = tensor::Matrix<Real>;
pub type Vector = tensor::Vector<Real>;
pub type LstmLayerParams = nn::LstmLayerParams<Real>;
pub type DenseParams = nn::DenseParams<Real>;
pub type ModelParams = nn::ModelParams<Real>;
pub type Model = nn::Model<Real>;
pub type AdamState = optim::AdamState<Real>;

pub type MatrixF32 = tensor::Matrix<f32>;
pub type VectorF32 = tensor::Vector<f32>;
pub type ModelParamsF32 = nn::ModelParams<f32>;
pub type ModelF32 = nn::Model<f32>;
pub type AdamStateF32 = optim::AdamState<f32>;
