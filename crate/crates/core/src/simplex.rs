//! Nelder–Mead simplex maximization on a box.
//!
//! Points are clamped into the box before every evaluation, which keeps the
//! search derivative-free and lets optima sit on the boundary.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Stop when the spread of objective values across the simplex falls
    /// below this fraction of the best value.
    pub relative_tolerance: f64,
    /// Initial simplex edge as a fraction of each box width.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            relative_tolerance: 1e-6,
            initial_step: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Objective evaluations, including the initial simplex.
    pub evaluations: usize,
}

fn clamp(x: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
        .collect()
}

/// Maximizes `f` over `[lower, upper]` starting from `start`.
///
/// Non-finite objective values are treated as `−∞`.
pub fn maximize<F>(
    mut f: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    options: &SimplexOptions,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    assert!(dim > 0 && lower.len() == dim && upper.len() == dim);
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let x0 = clamp(start, lower, upper);
    let mut simplex = vec![x0.clone()];
    for i in 0..dim {
        let mut x = x0.clone();
        let step = options.initial_step * (upper[i] - lower[i]);
        // step inward if the start sits on the upper face
        x[i] = if x[i] + step <= upper[i] {
            x[i] + step
        } else {
            x[i] - step
        };
        simplex.push(clamp(&x, lower, upper));
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    while iterations < options.max_iterations {
        // order best (largest) first; ties keep insertion order for determinism
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let worst = values[dim];
        if best.is_finite() && worst.is_finite() {
            let spread = (best - worst).abs();
            if spread <= options.relative_tolerance * best.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|x| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let p: Vec<f64> = (0..dim)
                .map(|k| centroid[k] + t * (simplex[dim][k] - centroid[k]))
                .collect();
            clamp(&p, lower, upper)
        };

        let xr = along(-alpha);
        let fr = eval(&xr);
        if fr > values[0] {
            let xe = along(-gamma);
            let fe = eval(&xe);
            if fe > fr {
                simplex[dim] = xe;
                values[dim] = fe;
            } else {
                simplex[dim] = xr;
                values[dim] = fr;
            }
            continue;
        }
        if fr > values[dim - 1] {
            simplex[dim] = xr;
            values[dim] = fr;
            continue;
        }
        if fr > values[dim] {
            let xc = along(-rho);
            let fc = eval(&xc);
            if fc >= fr {
                simplex[dim] = xc;
                values[dim] = fc;
                continue;
            }
        } else {
            let xc = along(rho);
            let fc = eval(&xc);
            if fc > values[dim] {
                simplex[dim] = xc;
                values[dim] = fc;
                continue;
            }
        }
        // shrink toward the best vertex
        for i in 1..=dim {
            let x: Vec<f64> = (0..dim)
                .map(|k| simplex[0][k] + sigma * (simplex[i][k] - simplex[0][k]))
                .collect();
            simplex[i] = clamp(&x, lower, upper);
            values[i] = eval(&simplex[i]);
        }
    }

    let best = (0..=dim)
        .max_by(|&a, &b| values[a].total_cmp(&values[b]).then(b.cmp(&a)))
        .unwrap();
    SimplexResult {
        point: simplex[best].clone(),
        value: values[best],
        iterations,
        evaluations,
    }
}
