// SPDX-License-Identifier: Apache-2.0

//! 2x2 gate matrices.
//!
//! Conventions are pinned here once: P(phi) = diag{1, e^{i phi}},
//! RZ(phi) = diag{e^{-i phi/2}, e^{i phi/2}}, and SqrtXDagger equals
//! RZ(pi/2) P(-pi/2) RX(-pi/2) as a matrix product.

use num_complex::Complex;

use crate::circuit::GateKind;
use crate::Real;

type M<T> = [[Complex<T>; 2]; 2];

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

fn zero<T: Real>() -> Complex<T> {
    c(T::zero(), T::zero())
}

pub fn h<T: Real>() -> M<T> {
    let s = T::FRAC_1_SQRT_2();
    [[c(s, T::zero()), c(s, T::zero())], [c(s, T::zero()), c(-s, T::zero())]]
}

pub fn x<T: Real>() -> M<T> {
    let one = c(T::one(), T::zero());
    [[zero(), one], [one, zero()]]
}

pub fn z<T: Real>() -> M<T> {
    let one = c(T::one(), T::zero());
    [[one, zero()], [zero(), -one]]
}

pub fn p<T: Real>(phi: T) -> M<T> {
    [[c(T::one(), T::zero()), zero()], [zero(), Complex::from_polar(T::one(), phi)]]
}

pub fn rz<T: Real>(phi: T) -> M<T> {
    let half = phi / T::of(2.0);
    [
        [Complex::from_polar(T::one(), -half), zero()],
        [zero(), Complex::from_polar(T::one(), half)],
    ]
}

pub fn ry<T: Real>(phi: T) -> M<T> {
    let half = phi / T::of(2.0);
    let (s, co) = (half.sin(), half.cos());
    [
        [c(co, T::zero()), c(-s, T::zero())],
        [c(s, T::zero()), c(co, T::zero())],
    ]
}

pub fn rx<T: Real>(phi: T) -> M<T> {
    let half = phi / T::of(2.0);
    let (s, co) = (half.sin(), half.cos());
    [
        [c(co, T::zero()), c(T::zero(), -s)],
        [c(T::zero(), -s), c(co, T::zero())],
    ]
}

/// Adjoint square root of X: (1/2) [[1-i, 1+i], [1+i, 1-i]].
pub fn sqrt_x_dagger<T: Real>() -> M<T> {
    let half = T::of(0.5);
    [
        [c(half, -half), c(half, half)],
        [c(half, half), c(half, -half)],
    ]
}

/// Resolves a gate kind and angle into its matrix. `Cnot` maps to X and
/// `Cz` to Z; their controls live in the placement.
pub fn matrix<T: Real>(kind: GateKind, theta: T) -> M<T> {
    match kind {
        GateKind::H => h(),
        GateKind::X | GateKind::Cnot => x(),
        GateKind::Cz => z(),
        GateKind::P => p(theta),
        GateKind::Rz => rz(theta),
        GateKind::Ry => ry(theta),
        GateKind::Rx => rx(theta),
        GateKind::SqrtXDagger => sqrt_x_dagger(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul<T: Real>(a: &M<T>, b: &M<T>) -> M<T> {
        let mut out = [[zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    #[test]
    fn sqrt_x_dagger_matches_its_decomposition() {
        let half = std::f64::consts::FRAC_PI_2;
        let prod = mul(&rz(half), &mul(&p(-half), &rx(-half)));
        let direct = sqrt_x_dagger::<f64>();
        for i in 0..2 {
            for j in 0..2 {
                assert!((prod[i][j] - direct[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn sqrt_x_dagger_squares_to_x_dagger() {
        let sq = mul(&sqrt_x_dagger::<f64>(), &sqrt_x_dagger::<f64>());
        // X^dagger = X
        for i in 0..2 {
            for j in 0..2 {
                assert!((sq[i][j] - x::<f64>()[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rotation_conventions() {
        let m = rz(std::f64::consts::PI);
        assert!((m[0][0] - Complex::new(0.0, -1.0)).norm() < 1e-15);
        assert!((m[1][1] - Complex::new(0.0, 1.0)).norm() < 1e-15);

        let m = p(std::f64::consts::FRAC_PI_2);
        assert!((m[1][1] - Complex::new(0.0, 1.0)).norm() < 1e-15);

        let m = ry(std::f64::consts::PI);
        assert!((m[1][0].re - 1.0).abs() < 1e-15);
        assert!((m[0][1].re + 1.0).abs() < 1e-15);
    }
}
