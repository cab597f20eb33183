//! Expected waiting times for parallel attempts.
//!
//! `Z_{l;m}(p)` is the mean number of rounds needed to collect at least `l`
//! tails when `m` coins with tail probability `p` are tossed together, tails
//! are kept, and only the heads are tossed again.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{param, Error, Result};

/// Number of independent random streams the oracle splits its trials into.
const ORACLE_PARTITIONS: u64 = 64;

/// `1 − (1−p)^k` without cancellation for small `p`.
fn one_minus_q_pow(p: f64, k: u32) -> f64 {
    -(f64::from(k) * (-p).ln_1p()).exp_m1()
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn check_query(l: u32, m: u32, p: f64) -> Result<()> {
    if m == 0 || l > m {
        return Err(param(format!(
            "waiting-time query needs 0 ≤ l ≤ m, m ≥ 1; got l={l}, m={m}"
        )));
    }
    if p == 0.0 && l > 0 {
        return Err(Error::Divergence(format!(
            "Z_{{{l};{m}}} at success probability 0"
        )));
    }
    if !(p > 0.0 && p <= 1.0) && l > 0 {
        return Err(param(format!("success probability {p} outside (0,1]")));
    }
    Ok(())
}

/// `Z_{l;m}(p)`, exact for every `0 ≤ l ≤ m`.
///
/// Evaluated as the absorption time of the chain whose state is the number
/// of tails collected so far.
pub fn z_factor(l: u32, m: u32, p: f64) -> Result<f64> {
    check_query(l, m, p)?;
    if l == 0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let q = 1.0 - p;
    // expected[t] = rounds still needed once t tails are held
    let mut expected = vec![0.0; l as usize];
    for t in (0..l).rev() {
        let free = m - t;
        let mut acc = 1.0;
        for k in 1..(l - t) {
            let pmf = binomial(free, k) * p.powi(k as i32) * q.powi((free - k) as i32);
            acc += pmf * expected[(t + k) as usize];
        }
        expected[t as usize] = acc / one_minus_q_pow(p, free);
    }
    Ok(expected[0])
}

/// Closed forms, where one exists: `Z_{m;m}` for any `m`,
/// `Z_{1;m}` for `m ≤ 4`, `Z_{2;3}`, `Z_{2;4}` and `Z_{3;4}`.
pub fn z_closed_form(l: u32, m: u32, p: f64) -> Result<Option<f64>> {
    check_query(l, m, p)?;
    if l == 0 {
        return Ok(Some(0.0));
    }
    let value = match (l, m) {
        (1, 1) => 1.0 / p,
        (1, 2) => 1.0 / (2.0 * p - p * p),
        (1, 3) => 1.0 / (3.0 * p - 3.0 * p * p + p.powi(3)),
        (1, 4) => 1.0 / (4.0 * p - 6.0 * p * p + 4.0 * p.powi(3) - p.powi(4)),
        (2, 3) => (5.0 - (7.0 - 3.0 * p) * p) / ((2.0 - p) * p * (3.0 + (p - 3.0) * p)),
        (2, 4) => {
            (-7.0 + p * (15.0 + p * (4.0 * p - 13.0)))
                / ((p - 2.0) * p * (3.0 + (p - 3.0) * p) * (2.0 + (p - 2.0) * p))
        }
        (3, 4) => {
            (-13.0 + p * (33.0 + p * (22.0 * p - 6.0 * p * p - 37.0)))
                / ((p - 2.0) * p * (3.0 + (p - 3.0) * p) * (2.0 + (p - 2.0) * p))
        }
        (l, m) if l == m => (1..=m)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * binomial(m, k) / one_minus_q_pow(p, k)
            })
            .sum(),
        _ => return Ok(None),
    };
    Ok(Some(value))
}

/// Monte Carlo estimate of `Z_{l;m}(p)` by literally tossing coins.
///
/// Returns `(mean, standard error)`. Trials are split into a fixed number of
/// partitions, each driven by its own ChaCha8 stream derived from `seed`, so
/// the result is reproducible regardless of thread count.
pub fn z_oracle(l: u32, m: u32, p: f64, trials: u64, seed: u64) -> Result<(f64, f64)> {
    check_query(l, m, p)?;
    if trials == 0 {
        return Err(param("the waiting-time oracle needs at least one trial"));
    }
    let sums: Vec<(f64, f64)> = (0..ORACLE_PARTITIONS)
        .into_par_iter()
        .map(|part| {
            let count = trials / ORACLE_PARTITIONS + u64::from(part < trials % ORACLE_PARTITIONS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(part);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let rounds = toss_until(&mut rng, l, m, p) as f64;
                s += rounds;
                s2 += rounds * rounds;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = trials as f64;
    let mean = s / n;
    let var = if trials > 1 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok((mean, (var / n).sqrt()))
}

fn toss_until(rng: &mut ChaCha8Rng, l: u32, m: u32, p: f64) -> u64 {
    let mut tails = 0;
    let mut rounds = 0;
    while tails < l {
        rounds += 1;
        let free = m - tails;
        for _ in 0..free {
            if rng.gen::<f64>() < p {
                tails += 1;
            }
        }
    }
    rounds
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn geometric_mean() {
        assert_eq!(z_factor(1, 1, 0.5).unwrap(), 2.0);
    }

    #[test]
    fn closed_forms_match_chain() {
        for &p in &[1e-6, 0.01, 0.05, 0.3, 0.5, 0.9, 1.0] {
            for m in 1..=4 {
                for l in 0..=m {
                    if let Some(cf) = z_closed_form(l, m, p).unwrap() {
                        let z = z_factor(l, m, p).unwrap();
                        assert_relative_eq!(cf, z, max_relative = 1e-9);
                    }
                }
            }
            for m in [8, 16, 32] {
                if p >= 0.01 {
                    let cf = z_closed_form(m, m, p).unwrap().unwrap();
                    assert_relative_eq!(cf, z_factor(m, m, p).unwrap(), max_relative = 1e-6);
                }
            }
        }
    }

    #[test]
    fn small_p_limits() {
        let p = 1e-9;
        assert_relative_eq!(
            z_factor(2, 3, p).unwrap() * p,
            5.0 / 6.0,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            z_factor(3, 4, p).unwrap() * p,
            13.0 / 12.0,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            z_factor(2, 4, p).unwrap() * p,
            7.0 / 12.0,
            max_relative = 1e-6
        );
        assert_relative_eq!(z_factor(2, 2, p).unwrap() * p, 1.5, max_relative = 1e-6);
    }

    #[test]
    fn exact_values_at_half() {
        assert_relative_eq!(
            z_factor(2, 3, 0.5).unwrap(),
            12.0 / 7.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            z_factor(2, 2, 0.5).unwrap(),
            8.0 / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn certain_success_needs_one_round() {
        for m in [1, 2, 4, 8] {
            assert_eq!(z_factor(m, m, 1.0).unwrap(), 1.0);
            assert_eq!(z_closed_form(m, m, 1.0).unwrap(), Some(1.0));
        }
        assert_eq!(z_oracle(2, 2, 1.0, 1000, 3).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn zero_tails_and_bad_queries() {
        assert_eq!(z_factor(0, 3, 0.2).unwrap(), 0.0);
        assert!(matches!(z_factor(1, 2, 0.0), Err(Error::Divergence(_))));
        assert!(matches!(z_factor(3, 2, 0.5), Err(Error::Parameter(_))));
        assert!(matches!(z_factor(1, 2, 1.5), Err(Error::Parameter(_))));
        assert!(z_oracle(1, 1, 0.5, 0, 1).is_err());
    }

    #[test]
    fn oracle_is_reproducible_and_close() {
        let a = z_oracle(1, 1, 0.5, 200_000, 11).unwrap();
        let b = z_oracle(1, 1, 0.5, 200_000, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.0 - 2.0).abs() < 4.0 * a.1);
        let (mean, se) = z_oracle(2, 4, 0.1, 200_000, 5).unwrap();
        assert!((mean - z_factor(2, 4, 0.1).unwrap()).abs() < 4.0 * se);
    }

    proptest! {
        #[test]
        fn monotone_in_p_m_and_l(p in 0.001f64..1.0, dp in 0.0f64..0.5, m in 1u32..8, l in 1u32..8) {
            let l = l.min(m);
            let p2 = (p + dp).min(1.0);
            let z = z_factor(l, m, p).unwrap();
            prop_assert!(z >= 1.0);
            prop_assert!(z_factor(l, m, p2).unwrap() <= z * (1.0 + 1e-12));
            prop_assert!(z_factor(l, m + 1, p).unwrap() <= z * (1.0 + 1e-12));
            if l < m {
                prop_assert!(z_factor(l + 1, m, p).unwrap() >= z * (1.0 - 1e-12));
            }
        }
    }
}
