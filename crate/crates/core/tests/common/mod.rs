//! Brute-force 16×16 two-pair computations built from explicit gates,
//! Pauli-sum noise and projective measurements.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use repeater_core::config::PurificationVariant;
use repeater_core::gates::GateModel;
use repeater_core::states::{Mat4, TwoQubitState};

type M = DMatrix<Complex64>;

#[allow(dead_code)]
pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn pauli() -> [Matrix2<Complex64>; 4] {
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::identity(),
        Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0)),
        Matrix2::new(c(0.0), -i, i, c(0.0)),
        Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0)),
    ]
}

fn hadamard() -> Matrix2<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix2::new(c(s), c(s), c(s), c(-s))
}

fn proj(bit: usize) -> Matrix2<Complex64> {
    let mut p = Matrix2::zeros();
    p[(bit, bit)] = c(1.0);
    p
}

/// `ops[0] ⊗ ops[1] ⊗ …`, qubit 0 most significant.
fn kron_all(ops: &[Matrix2<Complex64>]) -> M {
    let mut out = M::from_element(1, 1, c(1.0));
    for op in ops {
        let o = M::from_fn(2, 2, |i, j| op[(i, j)]);
        out = out.kronecker(&o);
    }
    out
}

/// Operator `op` on `qubit` of four.
fn on(qubit: usize, op: Matrix2<Complex64>) -> M {
    let mut ops = [Matrix2::identity(); 4];
    ops[qubit] = op;
    kron_all(&ops)
}

fn cnot(control: usize, target: usize) -> M {
    let x = pauli()[1];
    let mut ops0 = [Matrix2::identity(); 4];
    ops0[control] = proj(0);
    let mut ops1 = [Matrix2::identity(); 4];
    ops1[control] = proj(1);
    ops1[target] = x;
    kron_all(&ops0) + kron_all(&ops1)
}

/// `F'ρ + (1−F')/16 Σ_{P,Q} (P⊗Q) ρ (P⊗Q)†` on qubits `a`, `b`.
fn depolarize(rho: &M, a: usize, b: usize, f_prime: f64) -> M {
    let mut acc = M::zeros(16, 16);
    for p in pauli() {
        for q in pauli() {
            let k = on(a, p) * on(b, q);
            acc += &k * rho * k.adjoint();
        }
    }
    rho * c(f_prime) + acc * c((1.0 - f_prime) / 16.0)
}

fn embed(a: &Mat4, b: &Mat4) -> M {
    let a = M::from_fn(4, 4, |i, j| a[(i, j)]);
    let b = M::from_fn(4, 4, |i, j| b[(i, j)]);
    a.kronecker(&b)
}

/// Partial trace over qubits 1 and 2 (keeping 0 and 3).
fn keep_outer(rho: &M) -> Mat4 {
    let mut out = Mat4::zeros();
    for a in 0..2 {
        for d in 0..2 {
            for a2 in 0..2 {
                for d2 in 0..2 {
                    let mut s = c(0.0);
                    for b in 0..2 {
                        for cc in 0..2 {
                            let i = a * 8 + b * 4 + cc * 2 + d;
                            let j = a2 * 8 + b * 4 + cc * 2 + d2;
                            s += rho[(i, j)];
                        }
                    }
                    out[(a * 2 + d, a2 * 2 + d2)] = s;
                }
            }
        }
    }
    out
}

/// Partial trace over qubits 2 and 3.
fn keep_first(rho: &M) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = c(0.0);
            for t in 0..4 {
                s += rho[(i * 4 + t, j * 4 + t)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

fn f_prime(g: &GateModel) -> f64 {
    (4.0 * g.channel_fidelity() - 1.0) / 3.0
}

/// Bell measurement on the inner qubits by CNOT and Hadamard, outcome-wise
/// Pauli correction `X^{m_c} Z^{m_b}` on the last qubit.
pub fn brute_swap(left: &TwoQubitState, right: &TwoQubitState, gate: &GateModel) -> Mat4 {
    let rho = embed(left.matrix(), right.matrix());
    let u = cnot(1, 2);
    let rho = &u * rho * u.adjoint();
    let rho = depolarize(&rho, 1, 2, f_prime(gate));
    let h = on(1, hadamard());
    let rho = &h * rho * h.adjoint();
    let [id, x, _, z] = pauli();
    let mut out = M::zeros(16, 16);
    for mb in 0..2 {
        for mc in 0..2 {
            let p = on(1, proj(mb)) * on(2, proj(mc));
            let xc = if mc == 1 { x } else { id };
            let zc = if mb == 1 { z } else { id };
            let corr = on(3, xc * zc);
            let k = corr * p;
            out += &k * &rho * k.adjoint();
        }
    }
    keep_outer(&out)
}

pub fn brute_purify(
    keep: &TwoQubitState,
    fresh: &TwoQubitState,
    gate: &GateModel,
    variant: PurificationVariant,
) -> (Mat4, f64) {
    let fp = f_prime(gate);
    let mut rho = embed(keep.matrix(), fresh.matrix());
    for (ctl, tgt) in [(0, 2), (1, 3)] {
        let u = cnot(ctl, tgt);
        rho = &u * rho * u.adjoint();
        rho = depolarize(&rho, ctl, tgt, fp);
    }
    let patterns: &[(usize, usize)] = match variant {
        PurificationVariant::Standard => &[(0, 0), (1, 1)],
        PurificationVariant::Modified => &[(1, 1)],
    };
    let mut kept = M::zeros(16, 16);
    for &(ma, mb) in patterns {
        let p = on(2, proj(ma)) * on(3, proj(mb));
        kept += &p * &rho * &p;
    }
    let kept = keep_first(&kept);
    let herald = kept.trace().re;
    (
        kept / c(herald),
        herald * gate.success_prob * gate.success_prob,
    )
}
