// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by simulation, model evaluation, training and sampling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside the supported range 1..={1}")]
    InvalidQubitCount(usize, usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate matrix is not unitary (deviation {0:.3e})")]
    NonUnitaryGate(f64),

    #[error("target qubit {0} also appears in the control set")]
    ControlTargetOverlap(usize),

    #[error("permutation is not a bijection on the qubit subset")]
    NonBijectivePermutation,

    #[error("post-selection branch has zero probability")]
    ZeroProbabilityBranch,

    #[error("state is not normalized (|norm^2 - 1| = {0:.3e})")]
    UnnormalizedState(f64),

    #[error("basis index {index} out of range for dimension {dim}")]
    BasisIndexOutOfRange { index: usize, dim: usize },

    #[error("dense matrix extraction limited to {limit} qubits, got {got}")]
    TooManyQubitsForDense { got: usize, limit: usize },

    #[error("expected {expected} trainable parameters, got {got}")]
    ParameterCountMismatch { expected: usize, got: usize },

    #[error("unknown rotation scheme `{0}`")]
    UnknownScheme(String),

    #[error("circuit requires feature variable {0} but none was bound")]
    UnboundFeature(usize),

    #[error("feature value {value} outside the model domain [0, {upper})")]
    DomainViolation { value: f64, upper: f64 },

    #[error("unknown differentiation method `{0}`")]
    UnknownMethod(String),

    #[error("invalid target parameter: {0}")]
    InvalidTarget(String),

    #[error("model feature kind `{got}` not usable here (expected {expected})")]
    FeatureKindMismatch { expected: String, got: String },

    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("gradient self-check failed: |shift - central| = {deviation:.3e} at slot {slot}")]
    GradientCheckFailed { slot: usize, deviation: f64 },

    #[error("bitstring length {got} does not match readout length {expected}")]
    BitStringLength { expected: usize, got: usize },

    #[error("empty sample batch")]
    EmptyBatch,

    #[error("histogram supports differ ({0} vs {1} bins)")]
    BinningMismatch(usize, usize),

    #[error("post-processing cannot split {0} remaining bits into equal register halves")]
    AmbiguousRegisterSplit(usize),

    #[error("extension size {0} unsupported for the chosen bitstring network")]
    UnsupportedExtension(usize),

    #[error("malformed circuit line {line}: {reason}")]
    CircuitParse { line: usize, reason: String },

    #[error("model file error: {0}")]
    ModelFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
