//! Constructions that turn low-order data into structured tensors or their
//! TT/QTT representations: plain folding, Toeplitz/Hankel tensors, Löwner
//! matrices, the quantized convolution tensor, closed-form sinusoid trains,
//! and derivative tensors of generalized characteristic functions.

pub mod conv_qtt;
pub mod error;
pub mod fold;
pub mod gcf;
pub mod sinusoid;
pub mod structured;

pub use conv_qtt::{
    convolution_tensor_dense, convolution_tensor_qtt, elementary_core_tensor,
    generator_to_qtt, toeplitz_from_qtt, ConvTensorQTT,
};
pub use error::{Result, TensorizeError};
pub use fold::{fold, unfold};
pub use gcf::{cumulant, derivative_stack, gcf_derivative, GcfDerivativeTensor};
pub use sinusoid::{sinusoid_samples, sinusoid_tt, SinusoidKind, SinusoidTT};
pub use structured::{
    hankel_generator, hankel_tensor, loewner_matrix, toeplitz_generator, toeplitz_tensor,
};
