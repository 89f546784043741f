// SPDX-License-Identifier: Apache-2.0

//! Fourier and Hartley transform circuits.
//!
//! The quantum Hartley transform is realized as a one-ancilla linear
//! combination of unitaries over the QFT: with F the DFT matrix and
//! R = F^2 the reflection permutation, DHT = (e^{-i pi/4} F + e^{i pi/4} R F) / sqrt(2).
//! Sandwiching a controlled reflection pair around an adjoint sqrt(X) on the
//! ancilla implements exactly this combination, and the closing reflection
//! and Hadamard return the ancilla to |0> for every register input.

use crate::circuit::{Angle, Circuit, PermKind};
use crate::dense::DenseMat;
use crate::{Error, Real, Result};

/// How the controlled reflection block is realized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReflectionStyle {
    /// Single controlled basis permutation (direct amplitude reorder).
    #[default]
    Permutation,
    /// Ancilla-controlled X ladder (bitwise complement) followed by a
    /// controlled cyclic increment.
    GateLevel,
}

/// QHT builder knobs. The defaults build the standard transform; the
/// others exist for negative-control tests and decomposition checks.
#[derive(Clone, Copy, Debug)]
pub struct QhtOptions {
    pub reflection: ReflectionStyle,
    /// Apply the adjoint sqrt(X) on the ancilla. Skipping it corrupts the
    /// transform and is used as a negative control by the verify command.
    pub include_sqrt_x: bool,
    /// Trailing ancilla P(pi/2); fixes the phase of the (never populated)
    /// ancilla-1 block so the whole circuit matrix squares to the identity.
    pub include_phase_fix: bool,
}

impl Default for QhtOptions {
    fn default() -> Self {
        QhtOptions {
            reflection: ReflectionStyle::Permutation,
            include_sqrt_x: true,
            include_phase_fix: true,
        }
    }
}

/// Quantum Fourier transform over `n` qubits. The dense matrix equals the
/// DFT matrix F with entries 2^{-n/2} exp(i 2 pi k j / 2^n); terminal swaps
/// are included so no implicit bit reversal remains.
pub fn build_qft<T: Real>(n: usize) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n, crate::MAX_QUBITS));
    }
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.h(q)?;
        for t in (q + 1)..n {
            // standard phase shift P(2 pi / 2^{t-q+1}) controlled by the
            // lower-significance qubit
            let phi = T::of(2.0) * T::PI() / T::of_usize(1 << (t - q + 1));
            c.cp(Angle::Constant(phi), t, q)?;
        }
    }
    for q in 0..n / 2 {
        swap(&mut c, q, n - 1 - q)?;
    }
    Ok(c)
}

/// Inverse QFT (adjoint of [`build_qft`]).
pub fn build_iqft<T: Real>(n: usize) -> Result<Circuit<T>> {
    Ok(build_qft::<T>(n)?.adjoint())
}

fn swap<T: Real>(c: &mut Circuit<T>, a: usize, b: usize) -> Result<()> {
    c.cnot(a, b)?;
    c.cnot(b, a)?;
    c.cnot(a, b)?;
    Ok(())
}

/// Controlled reflection over `n + 1` qubits: identity when the ancilla
/// (qubit 0) is |0>, and x -> (2^n - x) mod 2^n on the register when |1>.
/// This is the controlled F^2 block of the QHT.
pub fn build_controlled_reflection<T: Real>(
    n: usize,
    style: ReflectionStyle,
) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n, crate::MAX_QUBITS));
    }
    let mut c = Circuit::new(n + 1);
    let register: Vec<usize> = (1..=n).collect();
    match style {
        ReflectionStyle::Permutation => {
            c.permutation(PermKind::Reflection, &register, &[(0, true)])?;
        }
        ReflectionStyle::GateLevel => {
            // bitwise complement: CNOT ladder fanned out from the ancilla
            for &q in &register {
                c.cnot(0, q)?;
            }
            // controlled cyclic increment: ripple of multi-controlled X,
            // most significant register bit first
            for (i, &q) in register.iter().enumerate() {
                let mut controls: Vec<(usize, bool)> = vec![(0, true)];
                controls.extend(register[i + 1..].iter().map(|&r| (r, true)));
                c.gate(
                    crate::circuit::GateKind::X,
                    Angle::Constant(T::zero()),
                    q,
                    &controls,
                )?;
            }
        }
    }
    Ok(c)
}

/// Quantum Hartley transform over `n + 1` qubits (qubit 0 = ancilla).
/// Applied to |0_a x_j> it yields |0_a> (x) DHT_n |x_j>.
pub fn build_qht<T: Real>(n: usize) -> Result<Circuit<T>> {
    build_qht_opts(n, QhtOptions::default())
}

/// QHT with explicit options; see [`QhtOptions`].
pub fn build_qht_opts<T: Real>(n: usize, opts: QhtOptions) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n, crate::MAX_QUBITS));
    }
    let mut c = Circuit::new(n + 1);
    c.h(0)?;
    let qft = build_qft::<T>(n)?;
    let register: Vec<usize> = (1..=n).collect();
    c.append_mapped(&qft, &register, 0, &[])?;
    let reflect = build_controlled_reflection::<T>(n, opts.reflection)?;
    c.append(&reflect)?;
    if opts.include_sqrt_x {
        c.sxdg(0)?;
    }
    c.append(&reflect.adjoint())?;
    c.h(0)?;
    if opts.include_phase_fix {
        c.p(Angle::Constant(T::FRAC_PI_2()), 0)?;
    }
    Ok(c)
}

/// Adjoint QHT circuit. Its matrix equals the forward transform (the QHT is
/// involutory) but the gate list is the honest adjoint.
pub fn build_qht_inverse<T: Real>(n: usize) -> Result<Circuit<T>> {
    Ok(build_qht::<T>(n)?.adjoint())
}

/// Bitstring network over `total_qubits` readout qubits for an `s`-qubit
/// extension. For `s = 1` this is the CNOT ladder that folds the ancilla's
/// periodic signal into a monotone coordinate map: controlled on the least
/// significant qubit, every bit of the transform block except the extension
/// is complemented. `s = 0` is empty; `s >= 2` defaults to the identity and
/// is treated as configuration.
pub fn build_bitstring_network<T: Real>(s: usize, total_qubits: usize) -> Result<Circuit<T>> {
    if total_qubits == 0 || s >= total_qubits {
        return Err(Error::InvalidQubitCount(total_qubits, crate::MAX_QUBITS));
    }
    let mut c = Circuit::new(total_qubits);
    if s == 1 {
        let control = total_qubits - 1;
        for target in s..total_qubits - 1 {
            c.cnot(control, target)?;
        }
    }
    Ok(c)
}

/// DHT matrix with entries 2^{-n/2} cas(2 pi k j / 2^n); its own inverse.
pub fn dht_matrix<T: Real>(n: usize) -> DenseMat<T> {
    let dim = 1usize << n;
    let scale = T::one() / T::of_usize(dim).sqrt();
    DenseMat::from_fn(dim, |k, j| {
        let ang = T::of(2.0) * T::PI() * T::of_usize(k * j) / T::of_usize(dim);
        num_complex::Complex::new(scale * (ang.cos() + ang.sin()), T::zero())
    })
}

/// DFT matrix with entries 2^{-n/2} exp(i 2 pi k j / 2^n).
pub fn dft_matrix<T: Real>(n: usize) -> DenseMat<T> {
    let dim = 1usize << n;
    let scale = T::one() / T::of_usize(dim).sqrt();
    DenseMat::from_fn(dim, |k, j| {
        let ang = T::of(2.0) * T::PI() * T::of_usize(k * j) / T::of_usize(dim);
        num_complex::Complex::from_polar(scale, ang)
    })
}
