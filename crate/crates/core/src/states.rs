//! Two-qubit density matrices and the operations a repeater applies to them.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩`; the first qubit is the most
//! significant bit. All downstream code targets `|Φ⁺⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::config::PurificationVariant;
use crate::error::{Error, Result};
use crate::gates::GateModel;
use crate::register::Register;

pub type Mat4 = Matrix4<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Amplitudes in the computational basis.
    pub fn amplitudes(self) -> [f64; 4] {
        let s = FRAC_1_SQRT_2;
        match self {
            BellState::PhiPlus => [s, 0.0, 0.0, s],
            BellState::PhiMinus => [s, 0.0, 0.0, -s],
            BellState::PsiPlus => [0.0, s, s, 0.0],
            BellState::PsiMinus => [0.0, s, -s, 0.0],
        }
    }

    pub fn projector(self) -> Mat4 {
        let a = self.amplitudes();
        Mat4::from_fn(|i, j| c(a[i] * a[j]))
    }

    /// Pauli correction on the second qubit taking this state to `|Φ⁺⟩`.
    fn correction(self) -> Matrix2<Complex64> {
        let x = Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0));
        let z = Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0));
        match self {
            BellState::PhiPlus => Matrix2::identity(),
            BellState::PhiMinus => z,
            BellState::PsiPlus => x,
            BellState::PsiMinus => z * x,
        }
    }
}

/// Weights of a state on the four Bell states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellDecomposition {
    pub p_phi_plus: f64,
    pub p_phi_minus: f64,
    pub p_psi_plus: f64,
    pub p_psi_minus: f64,
    /// `1 −` the sum of the four weights (zero up to rounding, since the Bell
    /// states form a basis).
    pub residual: f64,
    /// Frobenius norm of the Bell-basis coherences; zero for Bell-diagonal
    /// states.
    pub coherence: f64,
}

impl BellDecomposition {
    pub fn weights(&self) -> [f64; 4] {
        [
            self.p_phi_plus,
            self.p_phi_minus,
            self.p_psi_plus,
            self.p_psi_minus,
        ]
    }
}

/// A validated two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    matrix: Mat4,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: Mat4) -> Result<Self> {
        let state = Self { matrix };
        state.validate()?;
        Ok(state)
    }

    /// Hermitian-symmetrizes and renormalizes an operator that is a density
    /// matrix up to rounding.
    pub(crate) fn from_unnormalized(matrix: Mat4) -> Result<Self> {
        let sym = (matrix + matrix.adjoint()) * c(0.5);
        let tr = sym.trace().re;
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(Error::InvalidState(format!(
                "trace {tr} cannot be normalized"
            )));
        }
        Ok(Self {
            matrix: sym / c(tr),
        })
    }

    pub fn bell(target: BellState) -> Self {
        Self {
            matrix: target.projector(),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Mat4::identity() * c(0.25),
        }
    }

    /// Weight `F` on `|Φ⁺⟩` and `(1−F)/3` on each other Bell state.
    pub fn werner(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::Parameter(format!(
                "Werner fidelity {fidelity} outside [0,1]"
            )));
        }
        let rest = (1.0 - fidelity) / 3.0;
        Self::bell_diagonal([fidelity, rest, rest, rest])
    }

    /// Mixture of Bell states with weights in [`BellState::ALL`] order.
    pub fn bell_diagonal(weights: [f64; 4]) -> Result<Self> {
        let m = BellState::ALL
            .iter()
            .zip(weights)
            .fold(Mat4::zeros(), |acc, (b, w)| acc + b.projector() * c(w));
        Self::new(m)
    }

    /// Bell-diagonal part plus weights on the product states
    /// `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn bell_and_product_mixture(bell: [f64; 4], product: [f64; 4]) -> Result<Self> {
        let mut m = BellState::ALL
            .iter()
            .zip(bell)
            .fold(Mat4::zeros(), |acc, (b, w)| acc + b.projector() * c(w));
        for (i, w) in product.into_iter().enumerate() {
            m[(i, i)] += c(w);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite matrix entry".into()));
        }
        let asym = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {asym:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.matrix + self.matrix.adjoint()) * c(0.5);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `⟨target|ρ|target⟩`.
    pub fn bell_fidelity(&self, target: BellState) -> f64 {
        let a = target.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += self.matrix[(i, j)] * (a[i] * a[j]);
            }
        }
        acc.re.clamp(0.0, 1.0)
    }

    /// Shorthand for the `|Φ⁺⟩` weight.
    pub fn fidelity(&self) -> f64 {
        self.bell_fidelity(BellState::PhiPlus)
    }

    pub fn bell_decomposition(&self) -> BellDecomposition {
        let w = BellState::ALL.map(|b| self.bell_fidelity(b));
        let mut coherence = 0.0;
        for (i, bi) in BellState::ALL.iter().enumerate() {
            for (j, bj) in BellState::ALL.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (ai, aj) = (bi.amplitudes(), bj.amplitudes());
                let mut z = Complex64::new(0.0, 0.0);
                for (k, a) in ai.iter().enumerate() {
                    for (l, b) in aj.iter().enumerate() {
                        z += self.matrix[(k, l)] * (a * b);
                    }
                }
                coherence += z.norm_sqr();
            }
        }
        BellDecomposition {
            p_phi_plus: w[0],
            p_phi_minus: w[1],
            p_psi_plus: w[2],
            p_psi_minus: w[3],
            residual: 1.0 - w.iter().sum::<f64>(),
            coherence: coherence.sqrt(),
        }
    }

    /// The Werner state with the same `|Φ⁺⟩` weight.
    pub fn to_werner(&self) -> TwoQubitState {
        let f = self.fidelity();
        let rest = (1.0 - f) / 3.0;
        let m = BellState::ALL
            .iter()
            .zip([f, rest, rest, rest])
            .fold(Mat4::zeros(), |acc, (b, w)| acc + b.projector() * c(w));
        TwoQubitState { matrix: m }
    }

    /// Depolarizing gate noise: `F'ρ + (1−F')𝟙/4` with `F = F' + (1−F')/4`.
    pub fn depolarize(&self, gate_fidelity: f64) -> Result<TwoQubitState> {
        let f_prime = depolarizing_weight(gate_fidelity)?;
        let m = self.matrix * c(f_prime) + Mat4::identity() * c((1.0 - f_prime) / 4.0);
        Self::from_unnormalized(m)
    }

    /// `UρU†` followed by depolarizing noise of the given gate fidelity.
    pub fn apply_noisy_gate(&self, unitary: &Mat4, gate_fidelity: f64) -> Result<TwoQubitState> {
        let rotated = Self::from_unnormalized(unitary * self.matrix * unitary.adjoint())?;
        rotated.depolarize(gate_fidelity)
    }

    /// Exact single-qubit rotation on qubit 0 or 1.
    pub fn apply_local(&self, qubit: usize, op: &Matrix2<Complex64>) -> TwoQubitState {
        let id = Matrix2::<Complex64>::identity();
        let u: Mat4 = if qubit == 0 {
            op.kronecker(&id)
        } else {
            id.kronecker(op)
        };
        TwoQubitState {
            matrix: u * self.matrix * u.adjoint(),
        }
    }

    /// Bit flip on the second qubit, mapping `|Ψ⁺⟩` to `|Φ⁺⟩`.
    pub fn relabel_psi_to_phi(&self) -> TwoQubitState {
        let x = Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0));
        self.apply_local(1, &x)
    }

    /// Reduced state of qubit 0 or 1.
    pub fn reduced(&self, qubit: usize) -> Matrix2<Complex64> {
        Matrix2::from_fn(|i, j| {
            (0..2)
                .map(|k| {
                    let (a, b) = if qubit == 0 {
                        (i * 2 + k, j * 2 + k)
                    } else {
                        (k * 2 + i, k * 2 + j)
                    };
                    self.matrix[(a, b)]
                })
                .sum()
        })
    }
}

/// Weight `F'` of the unitary part for a gate of fidelity `F = F' + (1−F')/4`.
pub fn depolarizing_weight(gate_fidelity: f64) -> Result<f64> {
    if !(0.25..=1.0).contains(&gate_fidelity) {
        return Err(Error::Parameter(format!(
            "gate fidelity {gate_fidelity} outside [1/4, 1]"
        )));
    }
    Ok((4.0 * gate_fidelity - 1.0) / 3.0)
}

pub fn bell_fidelity(state: &TwoQubitState, target: BellState) -> f64 {
    state.bell_fidelity(target)
}

pub fn to_werner(state: &TwoQubitState) -> TwoQubitState {
    state.to_werner()
}

pub fn depolarize(state: &TwoQubitState, gate_fidelity: f64) -> Result<TwoQubitState> {
    state.depolarize(gate_fidelity)
}

/// Swap `left = (A,B)` and `right = (C,D)` by a Bell measurement of `(B,C)`.
///
/// The gate's depolarizing noise acts on `B, C`; every outcome is corrected
/// on `D` so the returned `(A,D)` state is the outcome average. The second
/// value is the gate's success probability.
pub fn entanglement_swap(
    left: &TwoQubitState,
    right: &TwoQubitState,
    gate: &GateModel,
) -> Result<(TwoQubitState, f64)> {
    left.validate()?;
    right.validate()?;
    let f_prime = depolarizing_weight(gate.channel_fidelity())?;
    let l = left.matrix();
    let r = right.matrix();

    let mut ideal = Mat4::zeros();
    for outcome in BellState::ALL {
        let beta = outcome.amplitudes();
        // σ[(a,d),(a',d')] = Σ β(b,c) β(b',c') ρL[(a,b),(a',b')] ρR[(c,d),(c',d')]
        let mut sigma = Mat4::zeros();
        for a in 0..2 {
            for d in 0..2 {
                for a2 in 0..2 {
                    for d2 in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for b in 0..2 {
                            for cc in 0..2 {
                                let w1 = beta[b * 2 + cc];
                                if w1 == 0.0 {
                                    continue;
                                }
                                for b2 in 0..2 {
                                    for c2 in 0..2 {
                                        let w2 = beta[b2 * 2 + c2];
                                        if w2 == 0.0 {
                                            continue;
                                        }
                                        acc += l[(a * 2 + b, a2 * 2 + b2)]
                                            * r[(cc * 2 + d, c2 * 2 + d2)]
                                            * (w1 * w2);
                                    }
                                }
                            }
                        }
                        sigma[(a * 2 + d, a2 * 2 + d2)] = acc;
                    }
                }
            }
        }
        let id = Matrix2::<Complex64>::identity();
        let u: Mat4 = id.kronecker(&outcome.correction());
        ideal += u * sigma * u.adjoint();
    }

    // The depolarized part gives uniformly random outcomes; after the Pauli
    // corrections it leaves ρ_A ⊗ 𝟙/2.
    let noise = left
        .reduced(0)
        .kronecker(&(Matrix2::<Complex64>::identity() * c(0.5)));
    let out = ideal * c(f_prime) + noise * c(1.0 - f_prime);
    Ok((TwoQubitState::from_unnormalized(out)?, gate.success_prob))
}

/// One entanglement-pumping round.
///
/// `keep` controls and `fresh` is the target of a bilateral CNOT (one noisy
/// gate per station); the target pair is measured and the round succeeds on
/// the accepted patterns. Returns the renormalized kept pair and the total
/// success probability (heralding × gate success²).
pub fn purify(
    keep: &TwoQubitState,
    fresh: &TwoQubitState,
    gate: &GateModel,
    variant: PurificationVariant,
) -> Result<(TwoQubitState, f64)> {
    keep.validate()?;
    fresh.validate()?;
    let f_prime = depolarizing_weight(gate.channel_fidelity())?;
    // qubits: 0 = A keep, 1 = B keep, 2 = A fresh, 3 = B fresh
    let mut reg = Register::pair_product(keep.matrix(), fresh.matrix());
    reg.apply_cnot(0, 2);
    reg.depolarize_pair(0, 2, f_prime);
    reg.apply_cnot(1, 3);
    reg.depolarize_pair(1, 3, f_prime);
    let accepted: &[(usize, usize)] = match variant {
        PurificationVariant::Standard => &[(0, 0), (1, 1)],
        PurificationVariant::Modified => &[(1, 1)],
    };
    let kept = reg.postselect_last_pair(accepted);
    let herald = kept.trace().re;
    if herald.is_nan() || herald <= 1e-300 {
        return Err(Error::DegeneratePurification);
    }
    let state = TwoQubitState::from_unnormalized(kept)?;
    Ok((state, herald * gate.success_prob * gate.success_prob))
}
