// SPDX-License-Identifier: Apache-2.0

//! Phase (Fourier) and Hartley feature maps.
//!
//! The Hartley map embeds cas-kernel amplitudes through a one-ancilla LCU:
//! a phase feature map distributes e^{+i theta_k}, ancilla-controlled inverse
//! double phases supply e^{-i theta_k}, and the ancilla rotations
//! RZ(pi/2) RZ(2 pi x) delay the cosine argument so that the |0>-branch
//! coefficient of |k> is exactly cas[(2 pi k / 2^n - pi) x] / (sqrt(2) 2^{n/2}).

use crate::circuit::{Angle, Circuit};
use crate::{Error, Real, Result};

/// Phase feature map over `n` qubits: H on every qubit, then the scaled
/// phase gate P_l(x) = diag{1, exp(i 2 pi x / 2^l)} on qubit l (1-based from
/// the top). At integer x the output is a Fourier basis state.
pub fn build_phase_feature_map<T: Real>(n: usize) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n, crate::MAX_QUBITS));
    }
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.h(q)?;
    }
    for q in 0..n {
        let scale = T::of(2.0) * T::PI() / T::of_usize(1 << (q + 1));
        c.p(Angle::feature(0, scale), q)?;
    }
    Ok(c)
}

/// Knobs for the Hartley feature map.
#[derive(Clone, Copy, Debug)]
pub struct HartleyMapOptions {
    /// Which feature variable the angles read (0 for univariate models).
    pub feature_var: usize,
    /// Include the x-dependent ancilla RZ(2 pi x). Removing it is the
    /// overlap-regularization negative control.
    pub include_ancilla_rz: bool,
}

impl Default for HartleyMapOptions {
    fn default() -> Self {
        HartleyMapOptions {
            feature_var: 0,
            include_ancilla_rz: true,
        }
    }
}

/// Hartley feature map over `n + 1` qubits (qubit 0 = ancilla).
pub fn build_hartley_feature_map<T: Real>(n: usize) -> Result<Circuit<T>> {
    build_hartley_feature_map_opts(n, HartleyMapOptions::default())
}

/// Hartley feature map with explicit options; see [`HartleyMapOptions`].
pub fn build_hartley_feature_map_opts<T: Real>(
    n: usize,
    opts: HartleyMapOptions,
) -> Result<Circuit<T>> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n, crate::MAX_QUBITS));
    }
    let var = opts.feature_var;
    let two_pi = T::of(2.0) * T::PI();
    let mut c = Circuit::new(n + 1);
    c.h(0)?;
    // phase feature map on the register
    for q in 1..=n {
        c.h(q)?;
    }
    for q in 1..=n {
        let scale = two_pi / T::of_usize(1 << q);
        c.p(Angle::feature(var, scale), q)?;
    }
    // controlled inverse double phases P^{-2}_l(x)
    for q in 1..=n {
        let scale = -T::of(2.0) * two_pi / T::of_usize(1 << q);
        c.gate(
            crate::circuit::GateKind::P,
            Angle::feature(var, scale),
            q,
            &[(0, true)],
        )?;
    }
    // constant pi/4 phase delay and the x-dependent ancilla rotation
    c.rz(Angle::Constant(T::FRAC_PI_2()), 0)?;
    if opts.include_ancilla_rz {
        c.rz(Angle::feature(var, two_pi), 0)?;
    }
    c.h(0)?;
    Ok(c)
}

/// The norm of the unnormalized Hartley state,
/// N(x) = sqrt(1 - sin(2 pi x) / 2^n). Equal to one on the integer and
/// half-integer grids.
pub fn hartley_norm_factor<T: Real>(n: usize, x: T) -> T {
    let s = (T::of(2.0) * T::PI() * x).sin();
    (T::one() - s / T::of_usize(1 << n)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn cas(u: f64) -> f64 {
        u.cos() + u.sin()
    }

    #[test]
    fn phase_map_at_zero_is_uniform() {
        let n = 3;
        let c = build_phase_feature_map::<f64>(n).unwrap();
        let s = c.run_on_zero(&[0.0], &[]).unwrap();
        let expect = 1.0 / (1 << n) as f64;
        for a in s.amplitudes() {
            assert!((a.re - expect.sqrt()).abs() < 1e-12);
            assert!(a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn phase_map_gram_is_identity_on_integers() {
        let n = 5;
        let c = build_phase_feature_map::<f64>(n).unwrap();
        let states: Vec<_> = (0..(1 << n))
            .map(|j| c.run_on_zero(&[j as f64], &[]).unwrap())
            .collect();
        for (j, sj) in states.iter().enumerate() {
            for (k, sk) in states.iter().enumerate() {
                let mut ip = Complex::new(0.0, 0.0);
                for (a, b) in sj.amplitudes().iter().zip(sk.amplitudes()) {
                    ip += a.conj() * b;
                }
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (ip.norm() - expect).abs() < 1e-10,
                    "gram[{j}][{k}] = {ip}"
                );
            }
        }
    }

    #[test]
    fn phase_map_alternates_at_half_period() {
        let n = 4;
        let x = (1 << (n - 1)) as f64; // 2^{n-1}
        let c = build_phase_feature_map::<f64>(n).unwrap();
        let s = c.run_on_zero(&[x], &[]).unwrap();
        let scale = 1.0 / ((1 << n) as f64).sqrt();
        for (k, a) in s.amplitudes().iter().enumerate() {
            // phase theta_k = 2 pi k x / 2^n = pi k
            let expect = if k % 2 == 0 { scale } else { -scale };
            assert!((a.re - expect).abs() < 1e-10 && a.im.abs() < 1e-10);
        }
    }

    #[test]
    fn hartley_map_matches_cas_formula() {
        let n = 4;
        let dim = 1usize << n;
        let c = build_hartley_feature_map::<f64>(n).unwrap();
        for &x in &[0.0, 0.25, 1.0, 2.5, 7.75, 13.37] {
            let s = c.run_on_zero(&[x], &[]).unwrap();
            for k in 0..dim {
                let expect = cas((2.0 * std::f64::consts::PI * k as f64 / dim as f64
                    - std::f64::consts::PI)
                    * x)
                    / (2.0f64.sqrt() * (dim as f64).sqrt());
                let got = s.amplitudes()[k];
                assert!(
                    (got.re - expect).abs() < 1e-12 && got.im.abs() < 1e-12,
                    "x = {x}, k = {k}: got {got}, want {expect}"
                );
            }
        }
    }

    #[test]
    fn hartley_map_at_zero_is_flat() {
        let n = 3;
        let c = build_hartley_feature_map::<f64>(n).unwrap();
        let s = c.run_on_zero(&[0.0], &[]).unwrap();
        let expect = 1.0 / (2.0f64.sqrt() * ((1 << n) as f64).sqrt());
        for k in 0..(1 << n) {
            assert!((s.amplitudes()[k] - Complex::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn branch_norm_matches_norm_factor() {
        // n = 2, x = 0.25: N = sqrt(1 - sin(pi/2)/4) = sqrt(0.75)
        let n = 2;
        let c = build_hartley_feature_map::<f64>(n).unwrap();
        let s = c.run_on_zero(&[0.25], &[]).unwrap();
        let p0 = s.outcome_probability(0, false).unwrap();
        let computed = (2.0 * p0).sqrt();
        let expect = 0.75f64.sqrt();
        assert!((computed - expect).abs() < 1e-12);
        assert!((hartley_norm_factor(n, 0.25) - expect).abs() < 1e-15);

        // random points against the closed form
        for i in 0..100 {
            let x = (i as f64 * 0.377) % 3.0;
            let s = c.run_on_zero(&[x], &[]).unwrap();
            let p0 = s.outcome_probability(0, false).unwrap();
            assert!(((2.0 * p0).sqrt() - hartley_norm_factor(n, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn hartley_gram_identity_on_integer_and_half_integer_grids() {
        let n = 4;
        let c = build_hartley_feature_map::<f64>(n).unwrap();
        for offset in [0.0, 0.5] {
            let states: Vec<_> = (0..(1 << n))
                .map(|j| {
                    let s = c.run_on_zero(&[j as f64 + offset], &[]).unwrap();
                    s.post_select(0, false).unwrap().0
                })
                .collect();
            for (j, sj) in states.iter().enumerate() {
                for (k, sk) in states.iter().enumerate() {
                    let mut ip = Complex::new(0.0, 0.0);
                    for (a, b) in sj.amplitudes().iter().zip(sk.amplitudes()) {
                        ip += a.conj() * b;
                    }
                    let expect = if j == k { 1.0 } else { 0.0 };
                    assert!(
                        (ip.norm() - expect).abs() < 1e-10,
                        "offset {offset}: gram[{j}][{k}] = {ip}"
                    );
                }
            }
        }
    }
}
