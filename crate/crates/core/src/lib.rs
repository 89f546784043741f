// SPDX-License-Identifier: Apache-2.0

//! Statevector simulation and training of Hartley-basis quantum generative models.
//!
//! The crate provides the full pipeline for building quantum models over the
//! orthonormal Hartley kernel basis:
//!
//! * [`statevector`] — dense statevector simulation: gate application,
//!   projector expectations, post-selection and seeded shot sampling.
//! * [`circuit`] / [`circuits`] — parameterized circuit values and builders
//!   for the quantum Fourier transform, the quantum Hartley transform (QHT),
//!   Hartley/phase feature maps, real-amplitude and hardware-efficient
//!   ansätze, the bivariate correlation circuit and the bitstring network.
//! * [`model`] — quantum models `p(x) = alpha * <O> + beta` with analytic
//!   parameter-shift differentiation in both the feature variable and the
//!   trainable angles.
//! * [`targets`] — closed-form target densities (Ornstein-Uhlenbeck,
//!   geometric Brownian motion, exponential, binormal) and differential
//!   equation residuals.
//! * [`train`] — MSE losses, training grids, a deterministic Adam optimizer
//!   and the distribution / differential-equation / bivariate training loops.
//! * [`sample`] — sampling circuits (plain, extended-register fine sampling,
//!   bivariate), bitstring decoding, histograms and total variation distance.
//!
//! All numerical code is generic over the scalar type through the [`Real`]
//! trait; `f64` aliases for the main types are exported at the crate root.

pub mod circuit;
pub mod circuits;
pub mod dense;
mod error;
pub mod model;
mod real;
pub mod sample;
pub mod statevector;
pub mod targets;
pub mod train;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` statevector.
pub type StateVector64 = statevector::StateVector<f64>;
/// `f64` circuit.
pub type Circuit64 = circuit::Circuit<f64>;
/// `f64` quantum model.
pub type QuantumModel64 = model::QuantumModel<f64>;
/// `f64` target specification.
pub type TargetSpec64 = targets::TargetSpec<f64>;
/// `f64` training configuration.
pub type TrainConfig64 = train::TrainConfig<f64>;
/// `f64` training report.
pub type TrainReport64 = train::TrainReport<f64>;

/// Identifier of the pseudo-random generator used everywhere shots or
/// initial angles are drawn. Recorded in output files so that runs can be
/// reproduced bit-for-bit.
pub const RNG_ALGORITHM: &str = "chacha12";

/// Hard cap on simulated qubits (2^24 amplitudes, 256 MiB of complex64).
pub const MAX_QUBITS: usize = 24;

/// Cap on qubits for dense-matrix extraction; the dense form is a test and
/// verification oracle, never part of the simulation path.
pub const MAX_DENSE_QUBITS: usize = 10;
