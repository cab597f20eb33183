//! Heralded generation states against independent models: an explicit
//! enumeration of emitter and detector events for the single-photon scheme,
//! and the two-photon coefficients written out term by term.

use num_complex::Complex64;
use proptest::prelude::*;
use repeater_core::generation::{
    one_photon_coefficients, one_photon_state, two_photon_coefficients, two_photon_state, Channel,
    CoefficientForm,
};
use repeater_core::states::Mat4;

/// Single-photon scheme by enumeration. Each emitter is either not excited
/// (`|0⟩`, no photon), excited with a cavity photon (`|1⟩`), or excited and
/// decayed to either ground state without a photon. Surviving photons land
/// on the same detector; the herald is exactly one clicking detector.
/// Returns the unnormalized state (before the `Ψ⁺ → Φ⁺` relabelling) and
/// the click probability.
fn one_photon_enumeration(ch: &Channel, e: f64) -> (Mat4, f64) {
    let (ed, ef, p, pd) = (ch.eta_d, ch.eta_f, ch.p_phot, ch.p_dark);
    // (probability, photons, spin, left unexcited)
    let atom = [
        (1.0 - e, 0u32, 0usize, true),
        (e * p, 1, 1, false),
        (e * (1.0 - p) / 2.0, 0, 0, false),
        (e * (1.0 - p) / 2.0, 0, 1, false),
    ];
    let mut coherent = 0.0;
    let mut diag = [0.0; 4];
    for &(pa, na, sa, ea) in &atom {
        for &(pb, nb, sb, eb) in &atom {
            let w = pa * pb;
            let photons = na + nb;
            for surv in 0..=photons {
                let choose = if photons == 2 && surv == 1 { 2.0 } else { 1.0 };
                let ws = choose * ef.powi(surv as i32) * (1.0 - ef).powi((photons - surv) as i32);
                let p_det = if surv == 0 {
                    0.0
                } else {
                    1.0 - (1.0 - ed).powi(surv as i32)
                };
                // photon click with the other detector dark
                let by_photon = w * ws * p_det * (1.0 - pd);
                // no photon click, exactly one dark count
                let by_dark = w * ws * (1.0 - p_det) * 2.0 * pd * (1.0 - pd);
                // only |01⟩ and |10⟩ from one emission next to an unexcited
                // atom interfere; a free-space decay leaves which-path
                // information
                let single_emission = photons == 1 && (ea || eb);
                if single_emission && surv == 1 {
                    coherent += by_photon;
                    diag[sa * 2 + sb] += by_dark;
                } else {
                    diag[sa * 2 + sb] += by_photon + by_dark;
                }
            }
        }
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [0.0, s, s, 0.0];
    let mut rho = Mat4::from_fn(|i, j| Complex64::new(coherent * psi[i] * psi[j], 0.0));
    for (k, d) in diag.iter().enumerate() {
        rho[(k, k)] += Complex64::new(*d, 0.0);
    }
    let total = coherent + diag.iter().sum::<f64>();
    (rho, total)
}

/// `X` on the second qubit.
fn flip_second(m: &Mat4) -> Mat4 {
    let perm = [1, 0, 3, 2];
    Mat4::from_fn(|i, j| m[(perm[i], perm[j])])
}

fn channel() -> impl Strategy<Value = Channel> {
    (0.05f64..=1.0, 0.01f64..=1.0, 0.05f64..=1.0, 0.0f64..1e-2).prop_map(
        |(eta_d, eta_f, p_phot, p_dark)| Channel {
            eta_d,
            eta_f,
            p_phot,
            p_dark,
        },
    )
}

#[test]
fn one_photon_matches_enumeration_at_table_values() {
    let ch = Channel {
        eta_d: 0.5,
        eta_f: (-25.0f64 / 44.0).exp(),
        p_phot: 400.0 / 401.0,
        p_dark: 2.5e-7,
    };
    for e in [1e-4, 1e-3, 0.01, 0.05, 0.2, 0.5] {
        let (rho, total) = one_photon_enumeration(&ch, e);
        let (state, p) = one_photon_state(&ch, e, CoefficientForm::Corrected).unwrap();
        let oracle = flip_second(&rho) / Complex64::new(total, 0.0);
        assert!((state.matrix() - oracle).norm() < 1e-12, "ε²={e}");
        assert!((p - total).abs() <= 1e-12 * total, "ε²={e}: {p} vs {total}");
    }
}

proptest! {
    #[test]
    fn one_photon_matches_enumeration(ch in channel(), e in 1e-4f64..0.9) {
        let (rho, total) = one_photon_enumeration(&ch, e);
        let (state, p) = one_photon_state(&ch, e, CoefficientForm::Corrected).unwrap();
        let oracle = flip_second(&rho) / Complex64::new(total, 0.0);
        prop_assert!((state.matrix() - oracle).norm() < 1e-10);
        prop_assert!((p - total).abs() <= 1e-10 * total);
        let k = one_photon_coefficients(&ch, e, CoefficientForm::Corrected).unwrap();
        prop_assert!((k.f1 - (rho[(1, 1)].re + rho[(1, 2)].re) / total).abs() < 1e-10);
    }

    #[test]
    fn two_photon_matches_term_by_term_expansion(ch in channel()) {
        let (ed, ef, p, pd) = (ch.eta_d, ch.eta_f, ch.p_phot, ch.p_dark);
        let eta = ed * ef;
        let alpha_bracket = ed * (1.0 - ef) * ef * pd * p * p
            + pd * pd * (1.0 - p) * (1.0 - p)
            + ed * ef * pd * p * (1.0 - p)
            + (1.0 - ef) * (1.0 - ef) * p * p * pd * pd
            + 2.0 * ef * (1.0 - ed) * (1.0 - ef) * p * p * pd * pd
            + 2.0 * (1.0 - eta) * p * (1.0 - p) * pd * pd
            + ed * (1.0 - ed) * ef * ef * pd * p * p
            + ef * ef * (1.0 - ed) * (1.0 - ed) * p * p * pd * pd;
        let f_bracket = 0.5 * ed * ed * ef * ef * p * p + alpha_bracket;
        // both detectors dark with both emitters decayed: (1−P)², not (1−P_dark)²
        let click_bracket = 0.5 * ed * ed * ef * ef * p * p
            + 4.0 * eta * (1.0 - eta) * pd * p * p
            + 4.0 * pd * pd * (1.0 - p) * (1.0 - p)
            + 4.0 * eta * pd * p * (1.0 - p)
            + 4.0 * (1.0 - eta) * (1.0 - eta) * p * p * pd * pd
            + 8.0 * (1.0 - eta) * p * (1.0 - p) * pd * pd;
        let pref = (1.0 - pd) * (1.0 - pd);
        let k = two_photon_coefficients(&ch, CoefficientForm::Corrected).unwrap();
        prop_assert!((k.p_click - pref * click_bracket).abs() <= 1e-14 * k.p_click.max(1e-300));
        prop_assert!((k.f2 - f_bracket / click_bracket).abs() < 1e-12);
        prop_assert!((k.alpha2 - alpha_bracket / click_bracket).abs() < 1e-12);
        prop_assert!((k.beta2 - k.alpha2).abs() < 1e-15);
        let (s, _) = two_photon_state(&ch, CoefficientForm::Corrected).unwrap();
        prop_assert!(s.min_eigenvalue() > -1e-12);
        prop_assert!((s.trace() - 1.0).abs() < 1e-12);
    }
}
