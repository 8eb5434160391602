//! Functional and cycle-level model of RejSCore, a rejection-sampling
//! accelerator for the QR-UOV signature scheme.
//!
//! * [`params`]: parameter sets and memory address counts.
//! * [`aesprg`]: AES-128 and the CTR-mode keystream generator.
//! * [`sampler`]: the golden rejection-sampling model.
//! * [`hwsim`]: the cycle-level coprocessor model.
//! * [`fom`]: area-delay and power-delay figures of merit.
//! * [`kat`]: known-answer test files.

pub mod aesprg;
pub mod error;
pub mod fom;
pub mod hwsim;
pub mod kat;
pub mod params;
pub mod sampler;

pub use aesprg::{AesKey128, Iv};
pub use error::{FomError, ParamsError, PrgError, SampleError};
pub use params::{builtin_params, ParameterSet, SecLevel};
pub use sampler::{rej_samp, rej_samp_prg, FieldVector};
