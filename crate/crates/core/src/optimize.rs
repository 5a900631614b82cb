//! Derivative-free simplex descent (Nelder–Mead) with deterministic restarts.
//!
//! The likelihood surfaces minimized here are smooth and low-dimensional
//! (4 or 16 parameters), which is exactly the regime where simplex descent is
//! robust without gradients. A single descent can stagnate on a collapsed
//! simplex, so the driver rebuilds the simplex around the incumbent with a
//! halved edge until one full rebuild cycle improves the objective by less
//! than `improvement_tol`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Stopping parameters for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex around the start point.
    pub initial_step: f64,
    /// Hard cap on objective evaluations for the whole descent.
    pub max_evals: u32,
    /// Converged when a full restart cycle improves the objective by less than this.
    pub improvement_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            max_evals: 100_000,
            improvement_tol: 1e-12,
        }
    }
}

/// Result of one simplex descent.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective at `x`.
    pub value: f64,
    /// Objective evaluations consumed.
    pub evals: u32,
    /// Whether the improvement criterion was met before the evaluation cap.
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` starting from `start`. Fully deterministic: the same
/// function, start, and options always walk the same path.
pub fn nelder_mead<F>(mut f: F, start: &[f64], opts: &SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    assert!(n >= 1, "need at least one parameter");
    let mut evals: u32 = 0;
    let mut best_x = start.to_vec();
    let mut best_f = {
        evals += 1;
        f(&best_x)
    };
    let mut step = opts.initial_step;
    let mut converged = false;

    'restarts: loop {
        let cycle_best = best_f;

        // Fresh simplex around the incumbent.
        let mut points: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        points.push((best_x.clone(), best_f));
        for i in 0..n {
            if evals >= opts.max_evals {
                break 'restarts;
            }
            let mut x = best_x.clone();
            x[i] += step;
            evals += 1;
            let v = f(&x);
            points.push((x, v));
        }

        // Inner descent until the simplex flattens.
        loop {
            if evals >= opts.max_evals {
                break 'restarts;
            }
            points.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("objective values are finite"));
            let f_best = points[0].1;
            let f_second_worst = points[n - 1].1;
            let f_worst = points[n].1;
            if f_worst - f_best <= 1e-14 * (1.0 + f_best.abs()) {
                break;
            }

            let mut centroid = alloc::vec![0.0f64; n];
            for (x, _) in points.iter().take(n) {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi;
                }
            }
            for c in centroid.iter_mut() {
                *c /= n as f64;
            }

            let worst = points[n].0.clone();
            let reflected: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + REFLECT * (c - w))
                .collect();
            evals += 1;
            let f_reflected = f(&reflected);

            if f_reflected < f_best {
                let expanded: Vec<f64> = centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + EXPAND * (c - w))
                    .collect();
                if evals < opts.max_evals {
                    evals += 1;
                    let f_expanded = f(&expanded);
                    if f_expanded < f_reflected {
                        points[n] = (expanded, f_expanded);
                    } else {
                        points[n] = (reflected, f_reflected);
                    }
                } else {
                    points[n] = (reflected, f_reflected);
                }
            } else if f_reflected < f_second_worst {
                points[n] = (reflected, f_reflected);
            } else {
                let (toward, f_toward) = if f_reflected < f_worst {
                    (&reflected, f_reflected)
                } else {
                    (&worst, f_worst)
                };
                let contracted: Vec<f64> = centroid
                    .iter()
                    .zip(toward)
                    .map(|(c, t)| c + CONTRACT * (t - c))
                    .collect();
                evals += 1;
                let f_contracted = f(&contracted);
                if f_contracted < f_toward {
                    points[n] = (contracted, f_contracted);
                } else {
                    // Shrink everything toward the best vertex.
                    let anchor = points[0].0.clone();
                    for entry in points.iter_mut().skip(1) {
                        for (x, a) in entry.0.iter_mut().zip(&anchor) {
                            *x = a + SHRINK * (*x - a);
                        }
                        if evals >= opts.max_evals {
                            break 'restarts;
                        }
                        evals += 1;
                        entry.1 = f(&entry.0);
                    }
                }
            }

            if points[0].1 < best_f {
                best_f = points[0].1;
                best_x = points[0].0.clone();
            }
        }

        points.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("objective values are finite"));
        if points[0].1 < best_f {
            best_f = points[0].1;
            best_x = points[0].0.clone();
        }

        if cycle_best - best_f < opts.improvement_tol {
            converged = true;
            break;
        }
        step *= 0.5;
        if step < 1e-8 {
            step = opts.initial_step * 0.25;
        }
    }

    SimplexOutcome {
        x: best_x,
        value: best_f,
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_shifted_quadratic_bowl() {
        let target = [1.5, -2.0, 0.25, 3.0];
        let f = |x: &[f64]| -> f64 {
            x.iter()
                .zip(&target)
                .map(|(xi, ti)| (xi - ti) * (xi - ti))
                .sum()
        };
        let out = nelder_mead(f, &[0.0; 4], &SimplexOptions::default());
        assert!(out.converged);
        assert!(out.value < 1e-12, "value {:e}", out.value);
        for (xi, ti) in out.x.iter().zip(&target) {
            assert!((xi - ti).abs() < 1e-5);
        }
    }

    #[test]
    fn minimizes_rosenbrock_valley() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = nelder_mead(f, &[-1.2, 1.0], &SimplexOptions::default());
        assert!(out.value < 1e-10, "value {:e}", out.value);
        assert!((out.x[0] - 1.0).abs() < 1e-4);
        assert!((out.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn handles_sixteen_dimensions() {
        let f = |x: &[f64]| -> f64 {
            x.iter()
                .enumerate()
                .map(|(i, xi)| (1.0 + 0.1 * i as f64) * (xi - 0.3).powi(2))
                .sum()
        };
        let out = nelder_mead(f, &[1.0; 16], &SimplexOptions::default());
        assert!(out.converged);
        assert!(out.value < 1e-10, "value {:e}", out.value);
    }

    #[test]
    fn identical_inputs_walk_identical_paths() {
        let f = |x: &[f64]| x[0].powi(4) + (x[1] + 0.3).powi(2) + 0.1 * (x[0] * x[1]).powi(2);
        let a = nelder_mead(f, &[2.0, -1.0], &SimplexOptions::default());
        let b = nelder_mead(f, &[2.0, -1.0], &SimplexOptions::default());
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
        assert_eq!(a.evals, b.evals);
    }

    #[test]
    fn respects_evaluation_cap() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let opts = SimplexOptions {
            max_evals: 40,
            ..Default::default()
        };
        let out = nelder_mead(f, &[5.0; 8], &opts);
        assert!(out.evals <= 40);
        assert!(!out.converged);
    }
}
