//! Density matrices on a handful of qubits, used for two-pair circuits.
//!
//! Qubit 0 is the most significant bit of a basis index.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

pub(crate) struct Register {
    qubits: usize,
    rho: DMatrix<Complex64>,
}

impl Register {
    /// `a ⊗ b` on four qubits ordered (a0, a1, b0, b1).
    pub fn pair_product(a: &Matrix4<Complex64>, b: &Matrix4<Complex64>) -> Self {
        let mut rho = DMatrix::zeros(16, 16);
        for i in 0..4 {
            for j in 0..4 {
                let aij = a[(i, j)];
                if aij == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..4 {
                    for l in 0..4 {
                        rho[(i * 4 + k, j * 4 + l)] = aij * b[(k, l)];
                    }
                }
            }
        }
        Self { qubits: 4, rho }
    }

    fn bit(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.qubits - 1 - qubit)) & 1
    }

    fn with_bit(&self, index: usize, qubit: usize, value: usize) -> usize {
        let shift = self.qubits - 1 - qubit;
        (index & !(1 << shift)) | (value << shift)
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let dim = self.rho.nrows();
        let map: Vec<usize> = (0..dim)
            .map(|i| {
                if self.bit(i, control) == 1 {
                    i ^ (1 << (self.qubits - 1 - target))
                } else {
                    i
                }
            })
            .collect();
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                out[(map[i], map[j])] = self.rho[(i, j)];
            }
        }
        self.rho = out;
    }

    /// `F'ρ + (1−F')/4 · Tr_S{ρ} ⊗ 𝟙_S` on the qubit pair `S = {q1, q2}`.
    pub fn depolarize_pair(&mut self, q1: usize, q2: usize, f_prime: f64) {
        if f_prime == 1.0 {
            return;
        }
        let dim = self.rho.nrows();
        let mut out = self.rho.scale(f_prime);
        let w = (1.0 - f_prime) / 4.0;
        for i in 0..dim {
            for j in 0..dim {
                if self.bit(i, q1) != self.bit(j, q1) || self.bit(i, q2) != self.bit(j, q2) {
                    continue;
                }
                let mut reduced = Complex64::new(0.0, 0.0);
                for s1 in 0..2 {
                    for s2 in 0..2 {
                        let ii = self.with_bit(self.with_bit(i, q1, s1), q2, s2);
                        let jj = self.with_bit(self.with_bit(j, q1, s1), q2, s2);
                        reduced += self.rho[(ii, jj)];
                    }
                }
                out[(i, j)] += reduced * w;
            }
        }
        self.rho = out;
    }

    /// Unnormalized state of qubits (0, 1) after measuring qubits (2, 3) in
    /// the computational basis and keeping the listed outcome patterns.
    pub fn postselect_last_pair(&self, accepted: &[(usize, usize)]) -> Matrix4<Complex64> {
        debug_assert_eq!(self.qubits, 4);
        let mut out = Matrix4::zeros();
        for &(ma, mb) in accepted {
            let tail = ma * 2 + mb;
            for i in 0..4 {
                for j in 0..4 {
                    out[(i, j)] += self.rho[(i * 4 + tail, j * 4 + tail)];
                }
            }
        }
        out
    }
}
