// SPDX-License-Identifier: Apache-2.0

//! Small dense complex matrices.
//!
//! Used as the verification oracle for circuits (explicit embeddings and
//! matrix products, O(8^n) per gate) and by the verify command. Simulation
//! never touches this representation.

use num_complex::Complex;

use crate::Real;

/// Row-major dense complex matrix of dimension 2^n.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMat<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMat<T> {
    pub fn zeros_dim(dim: usize) -> Self {
        DenseMat {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    /// Identity over `n` qubits.
    pub fn identity(n: usize) -> Self {
        let dim = 1 << n;
        let mut m = Self::zeros_dim(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    /// Builds entries from a closure over (row, column).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros_dim(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex<T>) {
        self.data[row * self.dim + col] = v;
    }

    /// self * rhs.
    pub fn mul(&self, rhs: &DenseMat<T>) -> DenseMat<T> {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = Self::zeros_dim(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..d {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * rhs.get(k, j));
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> DenseMat<T> {
        let d = self.dim;
        Self::from_fn(d, |r, c| self.get(c, r).conj())
    }

    /// Largest entrywise absolute deviation from `other`.
    pub fn max_abs_diff(&self, other: &DenseMat<T>) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut worst = 0.0f64;
        for i in 0..self.data.len() {
            worst = worst.max((self.data[i] - other.data[i]).norm().as_f64());
        }
        worst
    }

    /// Applies `self` to a vector.
    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                let mut s = Complex::new(T::zero(), T::zero());
                for (c, &x) in v.iter().enumerate() {
                    s += self.get(r, c) * x;
                }
                s
            })
            .collect()
    }

    /// Dense embedding of a controlled single-qubit gate over `n` qubits
    /// (qubit 0 = most significant bit).
    pub fn embed_gate(
        n: usize,
        gate: &[[Complex<T>; 2]; 2],
        target: usize,
        controls: &[(usize, bool)],
    ) -> DenseMat<T> {
        let dim = 1usize << n;
        let tmask = 1usize << (n - 1 - target);
        let mut cmask = 0usize;
        let mut cvalue = 0usize;
        for &(c, pol) in controls {
            let m = 1usize << (n - 1 - c);
            cmask |= m;
            if pol {
                cvalue |= m;
            }
        }
        Self::from_fn(dim, |r, c| {
            if c & cmask != cvalue {
                // control not asserted: identity column
                return if r == c {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                };
            }
            if (r & !tmask) != (c & !tmask) {
                return Complex::new(T::zero(), T::zero());
            }
            let rb = usize::from(r & tmask != 0);
            let cb = usize::from(c & tmask != 0);
            gate[rb][cb]
        })
    }

    /// Dense embedding of a controlled permutation on a qubit subset.
    pub fn embed_permutation(
        n: usize,
        table: &[usize],
        qubits: &[usize],
        controls: &[(usize, bool)],
    ) -> DenseMat<T> {
        let dim = 1usize << n;
        let subdim = 1usize << qubits.len();
        let masks: Vec<usize> = qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
        let mut cmask = 0usize;
        let mut cvalue = 0usize;
        for &(c, pol) in controls {
            let m = 1usize << (n - 1 - c);
            cmask |= m;
            if pol {
                cvalue |= m;
            }
        }
        let mut m = Self::zeros_dim(dim);
        for col in 0..dim {
            let row = if col & cmask == cvalue {
                let mut v = 0usize;
                for (b, &msk) in masks.iter().enumerate() {
                    if col & msk != 0 {
                        v |= subdim >> (b + 1);
                    }
                }
                let w = table[v];
                let mut row = col;
                for (b, &msk) in masks.iter().enumerate() {
                    if w & (subdim >> (b + 1)) != 0 {
                        row |= msk;
                    } else {
                        row &= !msk;
                    }
                }
                row
            } else {
                col
            };
            m.set(row, col, Complex::new(T::one(), T::zero()));
        }
        m
    }
}
