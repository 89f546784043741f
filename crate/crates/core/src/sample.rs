// SPDX-License-Identifier: Apache-2.0

//! Sampling circuits, bitstring decoding and histogram metrics.
//!
//! Plain sampling applies the adjoint trained ansatz followed by the adjoint
//! QHT, so computational-basis measurements draw from the trained model's
//! latent distribution. Fine sampling widens the transform with an
//! S-qubit extension: the extended inverse QHT interpolates to a grid 2^S
//! times denser, and for S = 1 the bitstring network (a CNOT ladder
//! controlled on the least significant readout qubit) reorders the odd
//! half-frequency components onto a monotone coordinate map.

use std::collections::BTreeMap;

use crate::circuit::Circuit;
use crate::circuits::{
    build_bitstring_network, build_iqft, build_qft, build_qht_inverse,
};
use crate::model::{FeatureKind, QuantumModel};
use crate::statevector::{BitString, StateVector};
use crate::{Error, Real, Result};

/// Fine-sampling circuit family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FineVariant {
    /// Extended inverse QHT followed by the bitstring network.
    BitstringNetwork,
    /// Inverse QHT, QFT, then an extended inverse QFT.
    QftChain,
}

impl FineVariant {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "bitstring-network" => FineVariant::BitstringNetwork,
            "qft-chain" => FineVariant::QftChain,
            other => return Err(Error::UnknownMethod(other.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            FineVariant::BitstringNetwork => "bitstring-network",
            FineVariant::QftChain => "qft-chain",
        }
    }
}

fn require_hartley<T: Real>(model: &QuantumModel<T>, expected: FeatureKind) -> Result<()> {
    if model.feature_kind() != expected {
        return Err(Error::FeatureKindMismatch {
            expected: expected.name().into(),
            got: model.feature_kind().name().into(),
        });
    }
    Ok(())
}

/// Plain sampling circuit over n + 1 qubits:
/// |psi> = QHT^dag (I (x) V^dag) |0_a o>.
pub fn build_sampling_circuit<T: Real>(model: &QuantumModel<T>) -> Result<Circuit<T>> {
    require_hartley(model, FeatureKind::Hartley)?;
    let n = model.n();
    let mut c = Circuit::new(n + 1);
    c.append(&model.post_circuit().adjoint())?;
    c.append(&build_qht_inverse(n)?)?;
    Ok(c)
}

/// Fine sampling circuit over n + 1 + s qubits; see [`FineVariant`].
pub fn build_fine_sampling_circuit<T: Real>(
    model: &QuantumModel<T>,
    s: usize,
    variant: FineVariant,
) -> Result<Circuit<T>> {
    require_hartley(model, FeatureKind::Hartley)?;
    if s == 0 {
        return Err(Error::UnsupportedExtension(0));
    }
    let n = model.n();
    let total = n + 1 + s;
    let mut c = Circuit::new(total);
    // adjoint ansatz on the model block (original ancilla at position s)
    let block: Vec<usize> = (s..total).collect();
    c.append_mapped(&model.post_circuit().adjoint(), &block, 0, &[])?;
    match variant {
        FineVariant::BitstringNetwork => {
            c.append(&build_qht_inverse(n + s)?)?;
            c.append(&build_bitstring_network(s, total)?)?;
        }
        FineVariant::QftChain => {
            c.append_mapped(&build_qht_inverse(n)?, &block, 0, &[])?;
            c.append_mapped(&build_qft(n + 1)?, &block, 0, &[])?;
            c.append(&build_iqft(total)?)?;
        }
    }
    Ok(c)
}

/// Bivariate sampling circuit over 2 (n + 1 + s) qubits: adjoint ansätze and
/// correlation circuit, then per-register extended inverse QHT and bitstring
/// network in parallel.
pub fn build_bivariate_sampling_circuit<T: Real>(
    model: &QuantumModel<T>,
    s: usize,
) -> Result<Circuit<T>> {
    build_bivariate_sampling_circuit_variant(model, s, FineVariant::BitstringNetwork)
}

/// Bivariate sampling with an explicit per-register transform variant.
pub fn build_bivariate_sampling_circuit_variant<T: Real>(
    model: &QuantumModel<T>,
    s: usize,
    variant: FineVariant,
) -> Result<Circuit<T>> {
    require_hartley(model, FeatureKind::BivariateHartley)?;
    if s == 0 {
        return Err(Error::UnsupportedExtension(0));
    }
    let n = model.n();
    let block = n + 1 + s;
    let total = 2 * block;
    let mut c = Circuit::new(total);
    // adjoint of (correlation then both ansätze), remapped from the training
    // layout [a_x, rx.., a_y, ry..] into the extended readout layout
    let mut map = Vec::with_capacity(2 * n + 2);
    map.push(s); // a_x
    map.extend((1..=n).map(|q| s + q)); // rx
    map.push(block + s); // a_y
    map.extend((1..=n).map(|q| block + s + q)); // ry
    c.append_mapped(&model.post_circuit().adjoint(), &map, 0, &[])?;

    for reg in 0..2 {
        let offset = reg * block;
        let qubits: Vec<usize> = (offset..offset + block).collect();
        match variant {
            FineVariant::BitstringNetwork => {
                c.append_mapped(&build_qht_inverse(n + s)?, &qubits, 0, &[])?;
                c.append_mapped(&build_bitstring_network(s, block)?, &qubits, 0, &[])?;
            }
            FineVariant::QftChain => {
                let inner: Vec<usize> = (offset + s..offset + block).collect();
                c.append_mapped(&build_qht_inverse(n)?, &inner, 0, &[])?;
                c.append_mapped(&build_qft(n + 1)?, &inner, 0, &[])?;
                c.append_mapped(&build_iqft(block)?, &qubits, 0, &[])?;
            }
        }
    }
    Ok(c)
}

/// Linear readout decode: the string read as an unsigned integer v maps to
/// v (2^{n+1} - 1) / (2^{n+1+s} - 1), covering [0, 2^{n+1} - 1] at
/// half-integer resolution for s = 1 and halving the spacing again per
/// additional extension qubit. For s = 0 this is the identity on basis
/// values, so ancilla-0 strings decode to the integer x_j directly.
pub fn decode_bitstring<T: Real>(bits: &BitString, n: usize, s: usize) -> Result<T> {
    let expected = n + 1 + s;
    if bits.len() != expected {
        return Err(Error::BitStringLength {
            expected,
            got: bits.len(),
        });
    }
    let v = bits.value();
    let num = T::of_usize((1usize << (n + 1)) - 1);
    let den = T::of_usize((1usize << (n + 1 + s)) - 1);
    Ok(T::of_usize(v) * num / den)
}

/// A batch of measured readout strings with its decoding metadata.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub counts: BTreeMap<BitString, u64>,
    /// Model register width.
    pub n: usize,
    /// Extension qubits per transform block.
    pub s: usize,
    /// Total measured qubits per shot.
    pub readout_len: usize,
    pub shots: u64,
    pub seed: u64,
}

impl SampleBatch {
    /// Runs `circuit` with the model's trained angles and measures `shots`
    /// samples in the computational basis.
    pub fn collect<T: Real>(
        circuit: &Circuit<T>,
        theta: &[T],
        shots: u64,
        seed: u64,
        n: usize,
        s: usize,
    ) -> Result<SampleBatch> {
        let mut state = StateVector::zero(circuit.n_qubits())?;
        circuit.apply_to(&mut state, &[], theta)?;
        let counts = state.sample_counts(shots, seed)?;
        Ok(SampleBatch {
            counts,
            n,
            s,
            readout_len: circuit.n_qubits(),
            shots,
            seed,
        })
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Normalized probability over every basis value of the readout
    /// register (dense, including never-observed strings).
    pub fn probabilities<T: Real>(&self) -> Vec<T> {
        let bins = 1usize << self.readout_len;
        let mut probs = vec![T::zero(); bins];
        if self.shots == 0 {
            return probs;
        }
        let total = T::of(self.shots as f64);
        for (bits, &count) in &self.counts {
            probs[bits.value()] = T::of(count as f64) / total;
        }
        probs
    }

    /// Decoded histogram rows (coordinate, probability) over all readout
    /// values, for a univariate batch.
    pub fn decoded_histogram<T: Real>(&self) -> Result<Vec<(T, T)>> {
        let probs = self.probabilities::<T>();
        let mut rows = Vec::with_capacity(probs.len());
        for (v, &p) in probs.iter().enumerate() {
            let bits = BitString::from_value(v, self.readout_len);
            rows.push((decode_bitstring(&bits, self.n, self.s)?, p));
        }
        Ok(rows)
    }

    /// Fraction of shots whose decoded coordinate falls outside
    /// [0, upper]; reported as a diagnostic, never clipped away.
    pub fn out_of_support_mass<T: Real>(&self, upper: T) -> Result<T> {
        let mut mass = T::zero();
        for (coord, p) in self.decoded_histogram::<T>()? {
            if coord > upper {
                mass += p;
            }
        }
        Ok(mass)
    }
}

/// Normalized 2D histogram with per-axis decoded coordinates.
#[derive(Clone, Debug)]
pub struct Histogram2D<T: Real> {
    pub x_coords: Vec<T>,
    pub y_coords: Vec<T>,
    /// probs[i][j] is the mass at (x_coords[i], y_coords[j]).
    pub probs: Vec<Vec<T>>,
}

impl<T: Real> Histogram2D<T> {
    pub fn flat(&self) -> Vec<T> {
        self.probs.iter().flatten().copied().collect()
    }

    /// Marginal over x (summing out y).
    pub fn marginal_x(&self) -> Vec<T> {
        self.probs.iter().map(|row| row.iter().copied().sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.y_coords.len()];
        for row in &self.probs {
            for (j, &p) in row.iter().enumerate() {
                out[j] += p;
            }
        }
        out
    }
}

/// Classical post-processing of a bivariate batch: drops the bit positions
/// that are constant zero across all observed strings (the extension bits
/// after the bitstring network), splits the remainder into the x- and
/// y-register halves, decodes each half and bins into a normalized 2D
/// histogram.
pub fn postprocess_bivariate<T: Real>(batch: &SampleBatch) -> Result<Histogram2D<T>> {
    if batch.counts.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let len = batch.readout_len;
    let block = len / 2;
    let mut constant_zero = vec![true; len];
    for bits in batch.counts.keys() {
        if bits.len() != len {
            return Err(Error::BitStringLength {
                expected: len,
                got: bits.len(),
            });
        }
        for (i, &b) in bits.0.iter().enumerate() {
            if b {
                constant_zero[i] = false;
            }
        }
    }
    let kept: Vec<usize> = (0..len).filter(|&i| !constant_zero[i]).collect();
    let kept_x: Vec<usize> = kept.iter().copied().filter(|&i| i < block).collect();
    let kept_y: Vec<usize> = kept.iter().copied().filter(|&i| i >= block).collect();
    if kept_x.len() != kept_y.len() {
        return Err(Error::AmbiguousRegisterSplit(kept.len()));
    }

    // reinsert the dropped zeros so each half decodes with the original map
    let rebuild_half = |bits: &BitString, positions: &[usize], offset: usize| -> BitString {
        let mut full = vec![false; block];
        for &pos in positions {
            full[pos - offset] = bits.0[pos];
        }
        BitString(full)
    };

    let bins = 1usize << (batch.n + 1);
    let spacing = T::of_usize((1usize << (batch.n + 1)) - 1)
        / T::of_usize((1usize << (batch.n + 1 + batch.s)) - 1);
    let coords: Vec<T> = (0..bins).map(|v| T::of_usize(v) * spacing).collect();
    let mut probs = vec![vec![T::zero(); bins]; bins];
    let total = T::of(batch.total_counts() as f64);
    for (bits, &count) in &batch.counts {
        let hx = rebuild_half(bits, &kept_x, 0);
        let hy = rebuild_half(bits, &kept_y, block);
        let vx = hx.value();
        let vy = hy.value();
        if vx >= bins || vy >= bins {
            // mass outside the decoded domain (extension bit measured 1);
            // kept out of the histogram and visible through normalization
            continue;
        }
        probs[vx][vy] += T::of(count as f64) / total;
    }
    Ok(Histogram2D {
        x_coords: coords.clone(),
        y_coords: coords,
        probs,
    })
}

/// Total variation distance (1/2) sum |a - b| over a common binning.
pub fn tvd<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::BinningMismatch(a.len(), b.len()));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .sum::<T>()
        / T::of(2.0))
}

/// Normalizes a nonnegative vector to unit mass.
pub fn normalize<T: Real>(values: &[T]) -> Vec<T> {
    let total: T = values.iter().copied().sum();
    if total <= T::zero() {
        return values.to_vec();
    }
    values.iter().map(|&v| v / total).collect()
}

/// Pearson correlation coefficient of two equally sized samples.
pub fn pearson<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::BinningMismatch(a.len(), b.len()));
    }
    let m = T::of_usize(a.len());
    let mean_a = a.iter().copied().sum::<T>() / m;
    let mean_b = b.iter().copied().sum::<T>() / m;
    let mut cov = T::zero();
    let mut var_a = T::zero();
    let mut var_b = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    Ok(cov / (var_a.sqrt() * var_b.sqrt()))
}
