// SPDX-License-Identifier: Apache-2.0

//! Variational ansätze: the hardware-efficient real-amplitude ansatz (HERA),
//! general hardware-efficient ansätze (HEA) with rotation-pair schemes, and
//! the bivariate correlation circuit.
//!
//! Entangling layers follow the modular pattern CNOT[l, (l + m) mod N] in
//! block m. Offsets cycle through 1..N-1 so a block never degenerates into
//! self-loops when the depth reaches the qubit count.

use crate::circuit::{Angle, Circuit};
use crate::{Error, Real, Result};

/// Rotation content of one HEA layer element, in matrix multiplication
/// order (the right gate is applied first).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationScheme {
    RyRx,
    RzRy,
    RxRz,
    Rx,
    Ry,
    Rz,
}

impl RotationScheme {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "ry-rx" => RotationScheme::RyRx,
            "rz-ry" => RotationScheme::RzRy,
            "rx-rz" => RotationScheme::RxRz,
            "rx" => RotationScheme::Rx,
            "ry" => RotationScheme::Ry,
            "rz" => RotationScheme::Rz,
            other => return Err(Error::UnknownScheme(other.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            RotationScheme::RyRx => "ry-rx",
            RotationScheme::RzRy => "rz-ry",
            RotationScheme::RxRz => "rx-rz",
            RotationScheme::Rx => "rx",
            RotationScheme::Ry => "ry",
            RotationScheme::Rz => "rz",
        }
    }

    /// Rotations per qubit per layer.
    pub fn rotations(self) -> usize {
        match self {
            RotationScheme::RyRx | RotationScheme::RzRy | RotationScheme::RxRz => 2,
            _ => 1,
        }
    }

    /// Gate kinds in application order (first applied first).
    fn kinds(self) -> Vec<crate::circuit::GateKind> {
        use crate::circuit::GateKind::{Rx, Ry, Rz};
        match self {
            RotationScheme::RyRx => vec![Rx, Ry],
            RotationScheme::RzRy => vec![Ry, Rz],
            RotationScheme::RxRz => vec![Rz, Rx],
            RotationScheme::Rx => vec![Rx],
            RotationScheme::Ry => vec![Ry],
            RotationScheme::Rz => vec![Rz],
        }
    }
}

/// Trainable slot count of the HERA: N (d + 1).
pub fn hera_param_count(n: usize, depth: usize) -> usize {
    n * (depth + 1)
}

/// Trainable slot count of an HEA with the given scheme.
pub fn hea_param_count(n: usize, depth: usize, scheme: RotationScheme) -> usize {
    scheme.rotations() * n * (depth + 1)
}

/// Trainable slot count of the correlation circuit: 6 N.
pub fn correlation_param_count(n: usize) -> usize {
    6 * n
}

fn cnot_cascade<T: Real>(c: &mut Circuit<T>, qubits: &[usize], block: usize) -> Result<()> {
    let n = qubits.len();
    if n < 2 {
        return Ok(());
    }
    // offsets cycle 1..n-1 over blocks
    let offset = (block - 1) % (n - 1) + 1;
    for l in 0..n {
        c.cnot(qubits[l], qubits[(l + offset) % n])?;
    }
    Ok(())
}

/// Hardware-efficient real-amplitude ansatz over `n` qubits: an initial RY
/// layer followed by `depth` blocks of a CNOT cascade and an RY layer.
/// Acting on a real-amplitude state the output amplitudes stay real.
pub fn build_hera<T: Real>(n: usize, depth: usize) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n, crate::MAX_QUBITS));
    }
    let mut c = Circuit::new(n);
    let mut slot = 0;
    for q in 0..n {
        c.ry(Angle::trainable(slot), q)?;
        slot += 1;
    }
    let qubits: Vec<usize> = (0..n).collect();
    for block in 1..=depth {
        cnot_cascade(&mut c, &qubits, block)?;
        for q in 0..n {
            c.ry(Angle::trainable(slot), q)?;
            slot += 1;
        }
    }
    Ok(c)
}

/// Hardware-efficient ansatz with the same entangling layout as the HERA
/// and one or two adjustable rotations per qubit per layer.
pub fn build_hea<T: Real>(n: usize, depth: usize, scheme: RotationScheme) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n, crate::MAX_QUBITS));
    }
    let kinds = scheme.kinds();
    let mut c = Circuit::new(n);
    let mut slot = 0;
    let layer = |c: &mut Circuit<T>, slot: &mut usize| -> Result<()> {
        for q in 0..n {
            for &k in &kinds {
                c.gate(k, Angle::trainable(*slot), q, &[])?;
                *slot += 1;
            }
        }
        Ok(())
    };
    layer(&mut c, &mut slot)?;
    let qubits: Vec<usize> = (0..n).collect();
    for block in 1..=depth {
        cnot_cascade(&mut c, &qubits, block)?;
        layer(&mut c, &mut slot)?;
    }
    Ok(c)
}

/// Correlation circuit over `2n + 2` qubits (two ancilla-topped registers):
/// three RY layers on the 2n non-ancilla qubits interleaved with CZ layers
/// on odd then even subsequent pairs, closed by CZ gates joining equal qubit
/// indices of the two registers. Real amplitudes are preserved.
pub fn build_correlation_circuit<T: Real>(n: usize) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n, crate::MAX_QUBITS));
    }
    let total = 2 * n + 2;
    let mut c = Circuit::new(total);
    // non-ancilla chain: register x (qubits 1..=n), register y (n+2..=2n+1)
    let chain: Vec<usize> = (1..=n).chain(n + 2..=2 * n + 1).collect();
    let mut slot = 0;
    let ry_layer = |c: &mut Circuit<T>, slot: &mut usize| -> Result<()> {
        for &q in &chain {
            c.ry(Angle::trainable(*slot), q)?;
            *slot += 1;
        }
        Ok(())
    };

    ry_layer(&mut c, &mut slot)?;
    let mut i = 0;
    while i + 1 < chain.len() {
        c.cz(chain[i], chain[i + 1])?;
        i += 2;
    }
    ry_layer(&mut c, &mut slot)?;
    let mut i = 1;
    while i + 1 < chain.len() {
        c.cz(chain[i], chain[i + 1])?;
        i += 2;
    }
    ry_layer(&mut c, &mut slot)?;
    for i in 0..n {
        c.cz(chain[i], chain[n + i])?;
    }
    Ok(c)
}
