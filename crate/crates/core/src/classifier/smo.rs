//! Sequential minimal optimization for the binary C-SVC dual
//!
//! ```text
//! min_a  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j K_ij
//! ```
//!
//! Working pairs are chosen by maximal violation for the first index and
//! second-order gain for the second. The gradient is kept up to date
//! incrementally against a dense Gram matrix.

/// Numerical settings of the solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoConfig {
    /// Stop when the maximal KKT violation `m(a) - M(a)` drops below this.
    pub tolerance: f64,
    /// Consecutive iterations without a meaningful change in `a`, as a
    /// multiple of the problem size, after which the solver gives up.
    pub stall_factor: usize,
    /// Hard cap on iterations.
    pub max_iterations: usize,
}

impl Default for SmoConfig {
    fn default() -> Self {
        SmoConfig {
            tolerance: 1e-3,
            stall_factor: 10,
            max_iterations: 10_000_000,
        }
    }
}

/// Dual solution of one binary problem.
#[derive(Clone, Debug, PartialEq)]
pub struct BinarySolution {
    pub alpha: Vec<f64>,
    /// Offset `b` of the decision function `f(x) = sum_i y_i a_i K(x_i, x) + b`.
    pub bias: f64,
    pub iterations: usize,
    /// Whether the KKT tolerance was reached.
    pub converged: bool,
}

const TAU: f64 = 1e-12;
/// Step sizes below this count as no progress.
const MIN_STEP: f64 = 1e-12;

/// Row-major dense kernel matrix.
pub(crate) struct Gram {
    n: usize,
    values: Vec<f64>,
}

impl Gram {
    pub(crate) fn new(n: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n * n);
        Gram { n, values }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Solves the dual for labels `y` in `{-1, +1}`.
pub(crate) fn solve(gram: &Gram, y: &[f64], c: f64, config: &SmoConfig) -> BinarySolution {
    let n = y.len();
    assert_eq!(gram.n, n);
    let diag: Vec<f64> = (0..n).map(|i| gram.row(i)[i]).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];

    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    let stall_limit = config.stall_factor.max(1) * n.max(1);
    let mut stalled = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        // first index: maximal violation
        let mut g_max = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > g_max {
                    g_max = v;
                    i_sel = Some(t);
                }
            }
        }
        let Some(i) = i_sel else {
            converged = true;
            break;
        };

        // second index: largest second-order decrease
        let k_i = gram.row(i);
        let mut g_min = f64::INFINITY;
        let mut best_obj = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            g_min = g_min.min(v);
            let b = g_max - v;
            if b > 0.0 {
                let mut a = diag[i] + diag[t] - 2.0 * k_i[t];
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj < best_obj {
                    best_obj = obj;
                    j_sel = Some(t);
                }
            }
        }
        if g_max - g_min < config.tolerance {
            converged = true;
            break;
        }
        let Some(j) = j_sel else {
            converged = true;
            break;
        };
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let q_ij = y[i] * y[j] * k_i[j];
        if y[i] != y[j] {
            let mut quad = diag[i] + diag[j] + 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let d_i = alpha[i] - old_i;
        let d_j = alpha[j] - old_j;
        let k_j = gram.row(j);
        let (yi_di, yj_dj) = (y[i] * d_i, y[j] * d_j);
        for t in 0..n {
            grad[t] += y[t] * (k_i[t] * yi_di + k_j[t] * yj_dj);
        }

        if d_i.abs().max(d_j.abs()) < MIN_STEP {
            stalled += 1;
            if stalled >= stall_limit {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    let bias = -rho(&alpha, &grad, y, c);
    BinarySolution {
        alpha,
        bias,
        iterations,
        converged,
    }
}

/// Threshold from the free support vectors, or the midpoint of the feasible
/// interval when every multiplier sits at a bound.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free_count += 1;
            free_sum += yg;
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else {
        (upper + lower) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_gram(xs: &[[f64; 2]]) -> Gram {
        let n = xs.len();
        let mut v = Vec::with_capacity(n * n);
        for a in xs {
            for b in xs {
                v.push(a[0] * b[0] + a[1] * b[1]);
            }
        }
        Gram::new(n, v)
    }

    #[test]
    fn two_point_problem_has_closed_form() {
        // x = +-1 on a line: w = 1, b = 0, a = 1/2 each
        let gram = linear_gram(&[[1.0, 0.0], [-1.0, 0.0]]);
        let sol = solve(&gram, &[1.0, -1.0], 10.0, &SmoConfig::default());
        assert!(sol.converged);
        assert!((sol.alpha[0] - 0.5).abs() < 1e-9);
        assert!((sol.alpha[1] - 0.5).abs() < 1e-9);
        assert!(sol.bias.abs() < 1e-9);
    }

    #[test]
    fn box_and_equality_constraints_hold() {
        let xs: Vec<[f64; 2]> = (0..30)
            .map(|i| {
                let t = i as f64;
                [(t * 1.7).sin() * 3.0, (t * 0.9).cos() * 3.0]
            })
            .collect();
        let y: Vec<f64> = xs
            .iter()
            .map(|x| if x[0] + 0.3 * x[1] > 0.2 { 1.0 } else { -1.0 })
            .collect();
        let c = 0.5;
        let sol = solve(&linear_gram(&xs), &y, c, &SmoConfig::default());
        assert!(sol.converged);
        assert!(sol.alpha.iter().all(|&a| (0.0..=c).contains(&a)));
        let eq: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(eq.abs() <= 1e-6);
    }
}
