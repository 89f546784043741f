// SPDX-License-Identifier: Apache-2.0

//! Dense statevector simulation.
//!
//! Qubit 0 is the top wire of the circuit diagrams and the most significant
//! bit of a basis index, so an ancilla on the top line prefixes the register
//! value. Gates are applied in place over amplitude pairs with stride
//! arithmetic; no dense matrix is ever formed here.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::{Error, Real, Result, MAX_QUBITS};

/// Readout string, most significant bit first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    /// Bits of `value`, most significant first, padded to `len`.
    pub fn from_value(value: usize, len: usize) -> Self {
        BitString((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect())
    }

    /// The string read as an unsigned integer.
    pub fn value(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Dense complex amplitude vector over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

/// The all-zeros product state on `n` qubits.
pub fn zero_state<T: Real>(n: usize) -> Result<StateVector<T>> {
    StateVector::zero(n)
}

impl<T: Real> StateVector<T> {
    /// |0...0> on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n, MAX_QUBITS));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(StateVector { n_qubits: n, amps })
    }

    /// Computational basis state |index> on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut state = Self::zero(n)?;
        if index >= state.dim() {
            return Err(Error::BasisIndexOutOfRange {
                index,
                dim: state.dim(),
            });
        }
        state.amps[0] = Complex::new(T::zero(), T::zero());
        state.amps[index] = Complex::new(T::one(), T::zero());
        Ok(state)
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n, MAX_QUBITS));
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// Sum of squared magnitudes.
    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// <self|other>.
    pub fn inner_product(&self, other: &StateVector<T>) -> Complex<T> {
        let mut ip = Complex::new(T::zero(), T::zero());
        for (a, b) in self.amps.iter().zip(&other.amps) {
            ip += a.conj() * *b;
        }
        ip
    }

    /// Bit mask selecting `qubit` inside a basis index (qubit 0 = MSB).
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Applies a single-qubit unitary, optionally conditioned on control
    /// qubits. A control pair `(q, true)` asserts on |1>, `(q, false)` on |0>.
    pub fn apply_gate(
        &mut self,
        gate: &[[Complex<T>; 2]; 2],
        target: usize,
        controls: &[(usize, bool)],
    ) -> Result<()> {
        self.check_qubit(target)?;
        for &(c, _) in controls {
            self.check_qubit(c)?;
            if c == target {
                return Err(Error::ControlTargetOverlap(target));
            }
        }
        check_unitary(gate)?;

        let tmask = self.mask(target);
        let (cmask, cvalue) = self.control_masks(controls);
        for i in 0..self.amps.len() {
            if i & tmask != 0 || i & cmask != cvalue {
                continue;
            }
            let j = i | tmask;
            let a = self.amps[i];
            let b = self.amps[j];
            self.amps[i] = gate[0][0] * a + gate[0][1] * b;
            self.amps[j] = gate[1][0] * a + gate[1][1] * b;
        }
        Ok(())
    }

    fn control_masks(&self, controls: &[(usize, bool)]) -> (usize, usize) {
        let mut cmask = 0;
        let mut cvalue = 0;
        for &(c, polarity) in controls {
            let m = self.mask(c);
            cmask |= m;
            if polarity {
                cvalue |= m;
            }
        }
        (cmask, cvalue)
    }

    /// Reorders amplitudes by a bijection `perm` on the basis values of the
    /// qubit subset `qubits` (subset value read most-significant-first in the
    /// order given), on basis states satisfying the controls.
    pub fn apply_permutation(
        &mut self,
        perm: &[usize],
        qubits: &[usize],
        controls: &[(usize, bool)],
    ) -> Result<()> {
        let subdim = 1usize << qubits.len();
        if perm.len() != subdim {
            return Err(Error::NonBijectivePermutation);
        }
        let mut seen = vec![false; subdim];
        for &p in perm {
            if p >= subdim || seen[p] {
                return Err(Error::NonBijectivePermutation);
            }
            seen[p] = true;
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        for &(c, _) in controls {
            self.check_qubit(c)?;
            if qubits.contains(&c) {
                return Err(Error::ControlTargetOverlap(c));
            }
        }

        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let (cmask, cvalue) = self.control_masks(controls);
        let mut out = self.amps.clone();
        for i in 0..self.amps.len() {
            if i & cmask != cvalue {
                continue;
            }
            let mut v = 0;
            for (b, &m) in masks.iter().enumerate() {
                if i & m != 0 {
                    v |= subdim >> (b + 1);
                }
            }
            let w = perm[v];
            if w == v {
                continue;
            }
            let mut j = i;
            for (b, &m) in masks.iter().enumerate() {
                if w & (subdim >> (b + 1)) != 0 {
                    j |= m;
                } else {
                    j &= !m;
                }
            }
            out[j] = self.amps[i];
        }
        self.amps = out;
        Ok(())
    }

    /// Probability of the basis outcome `basis_index`, i.e. |amps[i]|^2.
    pub fn projector_expectation(&self, basis_index: usize) -> Result<T> {
        if basis_index >= self.dim() {
            return Err(Error::BasisIndexOutOfRange {
                index: basis_index,
                dim: self.dim(),
            });
        }
        Ok(self.amps[basis_index].norm_sqr())
    }

    /// Marginal probability of reading `outcome` on `qubit`.
    pub fn outcome_probability(&self, qubit: usize, outcome: bool) -> Result<T> {
        self.check_qubit(qubit)?;
        let m = self.mask(qubit);
        let mut p = T::zero();
        for (i, a) in self.amps.iter().enumerate() {
            if (i & m != 0) == outcome {
                p += a.norm_sqr();
            }
        }
        Ok(p)
    }

    /// Conditions on measuring `outcome` on `qubit` and renormalizes. The
    /// measured qubit is removed from the returned state. Also returns the
    /// probability of the branch so callers can fold it into model scaling.
    pub fn post_select(&self, qubit: usize, outcome: bool) -> Result<(StateVector<T>, T)> {
        self.check_qubit(qubit)?;
        let p = self.outcome_probability(qubit, outcome)?;
        if p.as_f64() < 1e-300 {
            return Err(Error::ZeroProbabilityBranch);
        }
        let m = self.mask(qubit);
        let low = m - 1; // bits below the measured qubit
        let scale = T::one() / p.sqrt();
        let mut amps = vec![Complex::new(T::zero(), T::zero()); self.dim() / 2];
        for (i, a) in self.amps.iter().enumerate() {
            if (i & m != 0) == outcome {
                let j = (i & low) | ((i >> 1) & !low);
                amps[j] = a.scale(scale);
            }
        }
        Ok((
            StateVector {
                n_qubits: self.n_qubits - 1,
                amps,
            },
            p,
        ))
    }

    /// Multinomial shot sampling over |amps|^2 with a seeded chacha12 stream.
    /// Deterministic for a fixed seed; counts sum to `shots`.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Result<BTreeMap<BitString, u64>> {
        let norm = self.norm_sqr().as_f64();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::UnnormalizedState((norm - 1.0).abs()));
        }
        // cumulative distribution in f64, independent of T
        let mut cdf = Vec::with_capacity(self.dim());
        let mut acc = 0.0f64;
        for a in &self.amps {
            acc += a.norm_sqr().as_f64();
            cdf.push(acc);
        }
        let total = acc;

        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<BitString, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(self.dim() - 1);
            *counts
                .entry(BitString::from_value(idx, self.n_qubits))
                .or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Fails if `g` deviates from unitarity by more than 1e-10 (widened to a
/// few ulps for scalars coarser than f64).
fn check_unitary<T: Real>(g: &[[Complex<T>; 2]; 2]) -> Result<()> {
    // rows of g^dagger g minus identity
    let mut dev = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut s = Complex::new(T::zero(), T::zero());
            for row in g {
                s += row[i].conj() * row[j];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((s.re.as_f64() - expect).abs()).max(s.im.as_f64().abs());
        }
    }
    let tolerance = (T::epsilon().as_f64() * 100.0).max(1e-10);
    if dev > tolerance {
        return Err(Error::NonUnitaryGate(dev));
    }
    Ok(())
}
