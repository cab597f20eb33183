//! Heralded entanglement generation over one elementary link.
//!
//! Both schemes place a photon-emitting atom at each end of the link and
//! interfere the photons at a central station. The single-photon scheme
//! weakly excites both atoms and heralds on one click; the two-photon scheme
//! heralds on two clicks. Outputs are rotated so the target is always `|Φ⁺⟩`.

use serde::{Deserialize, Serialize};

use crate::config::{LinkParams, PhysicalParams, Scheme};
use crate::error::{check_probability, param, Error, Result};
use crate::states::TwoQubitState;

/// Relative tolerance for the coefficient-sum vs click-probability check.
const NORMALIZATION_TOL: f64 = 1e-9;

/// Which transcription of the heralded-state coefficients to use.
///
/// `Printed` is the uncorrected transcription, term by term. Its coefficients
/// do not sum to its click probability, so generation with this form
/// fails the normalization check (a consistency error) except in degenerate
/// corners. `Corrected` fixes the offending terms so the coefficients are
/// probabilities conditioned on the herald.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientForm {
    #[default]
    Corrected,
    Printed,
}

/// Output of one heralded generation attempt.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationAttempt {
    /// State conditioned on the herald, rotated to target `|Φ⁺⟩`.
    pub state: TwoQubitState,
    pub success_prob: f64,
    pub window_s: f64,
    /// Excitation probability `ε²` (single-photon scheme only).
    pub eps_sq: Option<f64>,
}

/// Loss and noise figures seen by one heralding event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    pub eta_d: f64,
    pub eta_f: f64,
    /// Probability that an excited emitter puts its photon into the fiber.
    pub p_phot: f64,
    /// Dark-click probability of one detector within the window.
    pub p_dark: f64,
}

impl Channel {
    pub fn eta(&self) -> f64 {
        self.eta_d * self.eta_f
    }

    fn validate(&self) -> Result<()> {
        check_probability("eta_d", self.eta_d)?;
        check_probability("eta_f", self.eta_f)?;
        check_probability("P_phot", self.p_phot)?;
        check_probability("P_dark", self.p_dark)
    }
}

/// Diagonal weights of the single-photon heralded state, before the rotation
/// that maps `|Ψ⁺⟩` to `|Φ⁺⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnePhotonCoefficients {
    /// Weight on `|Ψ⁺⟩`.
    pub f1: f64,
    /// Weight on each of `|Φ⁺⟩`, `|Φ⁻⟩`.
    pub alpha1: f64,
    /// Weight on `|Ψ⁻⟩`.
    pub beta1: f64,
    /// Weight on `|00⟩`.
    pub alpha1_tilde: f64,
    /// Weight on `|11⟩`.
    pub beta1_tilde: f64,
    pub p_click: f64,
}

impl OnePhotonCoefficients {
    pub fn sum(&self) -> f64 {
        self.f1 + 2.0 * self.alpha1 + self.beta1 + self.alpha1_tilde + self.beta1_tilde
    }
}

/// Bell weights of the two-photon heralded state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPhotonCoefficients {
    /// Weight on `|Φ⁺⟩`.
    pub f2: f64,
    /// Weight on each of `|Ψ⁺⟩`, `|Ψ⁻⟩`.
    pub alpha2: f64,
    /// Weight on `|Φ⁻⟩`.
    pub beta2: f64,
    pub p_click: f64,
}

impl TwoPhotonCoefficients {
    pub fn sum(&self) -> f64 {
        self.f2 + 2.0 * self.alpha2 + self.beta2
    }
}

fn check_window(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(param(format!("window T must be positive, got {t}")));
    }
    Ok(())
}

/// Probability that a cavity emitter sends its photon into the cavity mode
/// within the window `T`: `4C/(1+4C)·(1 − e^{−γ(1+4C)T})`.
pub fn photon_emission_prob(physical: &PhysicalParams, t: f64) -> Result<f64> {
    check_window(t)?;
    let c4 = 4.0 * physical.cooperativity;
    Ok(c4 / (1.0 + c4) * -(-physical.gamma_rad_per_s * (1.0 + c4) * t).exp_m1())
}

/// Cavity-free emitter: a fixed collection efficiency times the probability
/// of decay within `T`.
pub fn free_space_emission_prob(physical: &PhysicalParams, t: f64) -> Result<f64> {
    check_window(t)?;
    Ok(physical.free_space_collection * -(-physical.gamma_rad_per_s * t).exp_m1())
}

/// `e^{−L0/(2 L_att)}`: each photon travels half the link.
pub fn fiber_transmission(link: &LinkParams) -> f64 {
    (-link.length_km / (2.0 * link.physical.l_att_km)).exp()
}

/// `1 − e^{−r_dark T}`.
pub fn dark_count_prob(physical: &PhysicalParams, t: f64) -> f64 {
    -(-physical.dark_count_rate_hz * t).exp_m1()
}

/// Single-photon heralded coefficients.
pub fn one_photon_coefficients(
    ch: &Channel,
    eps_sq: f64,
    form: CoefficientForm,
) -> Result<OnePhotonCoefficients> {
    ch.validate()?;
    check_probability("eps_sq", eps_sq)?;
    let (ed, ef, p, pd, e) = (ch.eta_d, ch.eta_f, ch.p_phot, ch.p_dark, eps_sq);
    let eta = ch.eta();
    let dd = pd * (1.0 - pd);
    let pe = p * e;

    let coherent = 2.0 * eta * pe * (1.0 - e) * (1.0 - pd);
    // Both atoms decayed outside the cavity, one dark click. The printed
    // form carries ε² where both excitations require ε⁴.
    let both_decayed = match form {
        CoefficientForm::Corrected => 0.5 * e * e * (1.0 - p).powi(2) * dd,
        CoefficientForm::Printed => 0.5 * e * (1.0 - p).powi(2) * dd,
    };
    let mixed = 2.0 * ef * (1.0 - ed) * pe * (1.0 - e) * dd
        + 0.5 * eta * pe * e * (1.0 - p) * (1.0 - pd)
        + 2.0 * (1.0 - ef) * pe * (1.0 - e) * dd
        + (1.0 - eta) * pe * e * (1.0 - p) * dd
        + (1.0 - e) * e * (1.0 - p) * dd
        + both_decayed;
    let alpha_tilde = 2.0 * (1.0 - e).powi(2) * dd + 2.0 * (1.0 - e) * e * (1.0 - p) * dd;
    let both_emitted_one_click = match form {
        CoefficientForm::Corrected => (2.0 * eta - eta * eta) * pe * pe * (1.0 - pd),
        CoefficientForm::Printed => 2.0 * (1.0 - eta) * eta * pe * pe * (1.0 - pd).powi(2),
    };
    let beta_tilde = eta * pe * e * (1.0 - p) * (1.0 - pd)
        + 2.0 * (1.0 - eta) * pe * e * (1.0 - p) * dd
        + 2.0 * (1.0 - eta).powi(2) * pe * pe * dd
        + both_emitted_one_click;
    let two_photon_term = match form {
        CoefficientForm::Corrected => (2.0 * eta - eta * eta) * pe * pe * (1.0 - pd),
        CoefficientForm::Printed => (2.0 * eta - eta * eta) * pe * pe,
    };
    let p_click = 2.0 * eta * pe * (1.0 - pe) * (1.0 - pd)
        + two_photon_term
        + 2.0 * (1.0 - pe).powi(2) * dd
        + 2.0 * (1.0 - eta).powi(2) * pe * pe * dd
        + 4.0 * (1.0 - eta) * pe * (1.0 - pe) * dd;

    if p_click <= 0.0 {
        // Nothing can click: report the noiseless limit with zero success.
        return Ok(OnePhotonCoefficients {
            f1: 1.0,
            alpha1: 0.0,
            beta1: 0.0,
            alpha1_tilde: 0.0,
            beta1_tilde: 0.0,
            p_click: 0.0,
        });
    }
    Ok(OnePhotonCoefficients {
        f1: (coherent + mixed) / p_click,
        alpha1: both_decayed / p_click,
        beta1: mixed / p_click,
        alpha1_tilde: alpha_tilde / p_click,
        beta1_tilde: beta_tilde / p_click,
        p_click,
    })
}

/// Two-photon heralded coefficients.
pub fn two_photon_coefficients(
    ch: &Channel,
    form: CoefficientForm,
) -> Result<TwoPhotonCoefficients> {
    ch.validate()?;
    let (ed, ef, p, pd) = (ch.eta_d, ch.eta_f, ch.p_phot, ch.p_dark);
    let eta = ch.eta();
    let pd2 = pd * pd;

    let ideal = 0.5 * eta * eta * p * p;
    let symmetric = ed * (1.0 - ef) * ef * pd * p * p
        + pd2 * (1.0 - p).powi(2)
        + eta * pd * p * (1.0 - p)
        + (1.0 - ef).powi(2) * p * p * pd2
        + 2.0 * ef * (1.0 - ed) * (1.0 - ef) * p * p * pd2
        + 2.0 * (1.0 - eta) * p * (1.0 - p) * pd2;
    // Photon lost at a detector while a dark count fires elsewhere.
    let detector_loss =
        ed * (1.0 - ed) * ef * ef * pd * p * p + ef * ef * (1.0 - ed).powi(2) * p * p * pd2;
    let alpha = symmetric + detector_loss;
    let beta = match form {
        CoefficientForm::Corrected => alpha,
        CoefficientForm::Printed => alpha + detector_loss,
    };
    let both_dark = match form {
        CoefficientForm::Corrected => 4.0 * pd2 * (1.0 - p).powi(2),
        CoefficientForm::Printed => 4.0 * pd2 * (1.0 - pd).powi(2),
    };
    let bracket = ideal
        + 4.0 * eta * (1.0 - eta) * pd * p * p
        + both_dark
        + 4.0 * eta * pd * p * (1.0 - p)
        + 4.0 * (1.0 - eta).powi(2) * p * p * pd2
        + 8.0 * (1.0 - eta) * p * (1.0 - p) * pd2;
    let prefactor = (1.0 - pd).powi(2);
    let p_click = prefactor * bracket;
    if bracket <= 0.0 || p_click <= 0.0 {
        return Ok(TwoPhotonCoefficients {
            f2: 1.0,
            alpha2: 0.0,
            beta2: 0.0,
            p_click: 0.0,
        });
    }
    Ok(TwoPhotonCoefficients {
        f2: (ideal + alpha) / bracket,
        alpha2: alpha / bracket,
        beta2: beta / bracket,
        p_click,
    })
}

fn check_normalized(sum: f64, scheme: &str) -> Result<()> {
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Consistency(format!(
            "{scheme} coefficients sum to {sum:.12}, not 1"
        )));
    }
    Ok(())
}

/// Heralded state and success probability of the single-photon scheme for
/// explicit channel figures. The returned state targets `|Φ⁺⟩`.
pub fn one_photon_state(
    ch: &Channel,
    eps_sq: f64,
    form: CoefficientForm,
) -> Result<(TwoQubitState, f64)> {
    let k = one_photon_coefficients(ch, eps_sq, form)?;
    check_normalized(k.sum(), "single-photon")?;
    let raw = TwoQubitState::bell_and_product_mixture(
        [k.alpha1, k.alpha1, k.f1, k.beta1],
        [k.alpha1_tilde, 0.0, 0.0, k.beta1_tilde],
    )
    .or_else(|_| {
        renormalized_mixture(
            [k.alpha1, k.alpha1, k.f1, k.beta1],
            [k.alpha1_tilde, 0.0, 0.0, k.beta1_tilde],
        )
    })?;
    Ok((raw.relabel_psi_to_phi(), k.p_click))
}

/// Heralded state and success probability of the two-photon scheme for
/// explicit channel figures.
pub fn two_photon_state(ch: &Channel, form: CoefficientForm) -> Result<(TwoQubitState, f64)> {
    let k = two_photon_coefficients(ch, form)?;
    check_normalized(k.sum(), "two-photon")?;
    let weights = [k.f2, k.beta2, k.alpha2, k.alpha2];
    let state = TwoQubitState::bell_diagonal(weights)
        .or_else(|_| renormalized_mixture(weights, [0.0; 4]))?;
    Ok((state, k.p_click))
}

/// Accepts weights whose sum is within the normalization tolerance but
/// outside the stricter trace tolerance of a validated state.
fn renormalized_mixture(bell: [f64; 4], product: [f64; 4]) -> Result<TwoQubitState> {
    let total: f64 = bell.iter().chain(product.iter()).sum();
    TwoQubitState::bell_and_product_mixture(bell.map(|w| w / total), product.map(|w| w / total))
}

fn cavity_channel(link: &LinkParams, t: f64) -> Result<Channel> {
    Ok(Channel {
        eta_d: link.physical.eta_d,
        eta_f: fiber_transmission(link),
        p_phot: photon_emission_prob(&link.physical, t)?,
        p_dark: dark_count_prob(&link.physical, t),
    })
}

pub fn generate_one_photon(
    link: &LinkParams,
    eps_sq: f64,
    t: f64,
    form: CoefficientForm,
) -> Result<GenerationAttempt> {
    if !(eps_sq > 0.0 && eps_sq < 1.0) {
        return Err(param(format!(
            "excitation probability must lie in (0,1), got {eps_sq}"
        )));
    }
    let (state, success_prob) = one_photon_state(&cavity_channel(link, t)?, eps_sq, form)?;
    Ok(GenerationAttempt {
        state,
        success_prob,
        window_s: t,
        eps_sq: Some(eps_sq),
    })
}

pub fn generate_two_photon(
    link: &LinkParams,
    t: f64,
    form: CoefficientForm,
) -> Result<GenerationAttempt> {
    let (state, success_prob) = two_photon_state(&cavity_channel(link, t)?, form)?;
    Ok(GenerationAttempt {
        state,
        success_prob,
        window_s: t,
        eps_sq: None,
    })
}

/// Either scheme with the cavity collection factor replaced by the
/// free-space collection efficiency.
pub fn generate_ion_trap(
    link: &LinkParams,
    scheme: Scheme,
    eps_sq: f64,
    t: f64,
    form: CoefficientForm,
) -> Result<GenerationAttempt> {
    let ch = Channel {
        eta_d: link.physical.eta_d,
        eta_f: fiber_transmission(link),
        p_phot: free_space_emission_prob(&link.physical, t)?,
        p_dark: dark_count_prob(&link.physical, t),
    };
    let (state, success_prob, eps) = match scheme {
        Scheme::OnePhoton => {
            if !(eps_sq > 0.0 && eps_sq < 1.0) {
                return Err(param(format!(
                    "excitation probability must lie in (0,1), got {eps_sq}"
                )));
            }
            let (s, p) = one_photon_state(&ch, eps_sq, form)?;
            (s, p, Some(eps_sq))
        }
        Scheme::TwoPhoton => {
            let (s, p) = two_photon_state(&ch, form)?;
            (s, p, None)
        }
    };
    Ok(GenerationAttempt {
        state,
        success_prob,
        window_s: t,
        eps_sq: eps,
    })
}
