//! Moment-adjusting cubic transform `Y = a + bX + cX^2 + dX^3`.
//!
//! The coefficients solve the four equations `E[Y^q] = target_q`,
//! `q = 1..4`. Both the residuals and the Jacobian are polynomials in the
//! raw moments `m_0..m_12` of `X`, so one pass over the data per row is
//! enough; Newton then works on 13 numbers.

use super::raw_moments;

/// Residual threshold on the moment equations.
pub const RESIDUAL_TOL: f64 = 1e-12;
pub const MAX_NEWTON_STEPS: usize = 50;
pub const MAX_HALVINGS: usize = 20;
pub const MAX_LM_STEPS: usize = 200;

const STARTS: [[f64; 4]; 6] = [
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.05],
    [0.0, 1.0, 0.0, -0.05],
    [0.0, 0.9, 0.05, 0.03],
    [0.0, 1.1, -0.05, -0.03],
    [-0.05, 0.95, 0.05, 0.0],
];

/// Coefficients `[a, b, c, d]` of the cubic.
pub type Cubic = [f64; 4];

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Residuals `E[Y^q] - target_q` and Jacobian `d E[Y^q] / d coef_r`.
fn system(coef: &Cubic, m: &[f64; 13], target: &[f64; 4]) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut powers: Vec<Vec<f64>> = vec![vec![1.0]];
    for q in 1..=4 {
        let next = poly_mul(&powers[q - 1], coef);
        powers.push(next);
    }
    let expect = |poly: &[f64], shift: usize| -> f64 {
        poly.iter().enumerate().map(|(j, c)| c * m[j + shift]).sum()
    };
    let mut f = [0.0; 4];
    let mut jac = [[0.0; 4]; 4];
    for q in 1..=4 {
        f[q - 1] = expect(&powers[q], 0) - target[q - 1];
        for r in 0..4 {
            jac[q - 1][r] = q as f64 * expect(&powers[q - 1], r);
        }
    }
    (f, jac)
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let s: f64 = (row + 1..4).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn norm(f: &[f64; 4]) -> f64 {
    f.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn max_abs(f: &[f64; 4]) -> f64 {
    f.iter().fold(0.0f64, |s, v| s.max(v.abs()))
}

fn newton(start: Cubic, m: &[f64; 13], target: &[f64; 4]) -> Option<Cubic> {
    let mut coef = start;
    let (mut f, mut jac) = system(&coef, m, target);
    for _ in 0..MAX_NEWTON_STEPS {
        if max_abs(&f) <= RESIDUAL_TOL {
            return Some(coef);
        }
        let step = solve4(jac, f.map(|v| -v))?;
        let current = norm(&f);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Cubic = std::array::from_fn(|i| coef[i] + lambda * step[i]);
            let (tf, tj) = system(&trial, m, target);
            if norm(&tf) < current && tf.iter().all(|v| v.is_finite()) {
                accepted = Some((trial, tf, tj));
                break;
            }
            lambda *= 0.5;
        }
        let (c, tf, tj) = accepted?;
        coef = c;
        f = tf;
        jac = tj;
    }
    (max_abs(&f) <= RESIDUAL_TOL).then_some(coef)
}

/// Solve for the cubic mapping a standardized row onto the standardized
/// target `(0, 1, skewness, kurtosis)`; `None` signals failure after all
/// restarts.
pub fn fit_cubic(row: &[f64], probs: &[f64], skewness: f64, kurtosis: f64) -> Option<Cubic> {
    let m = raw_moments(row, probs, 12).ok()?;
    let mut all = [0.0; 13];
    all[0] = 1.0;
    all[1..].copy_from_slice(&m);
    let target = [0.0, 1.0, skewness, kurtosis];
    STARTS.iter().find_map(|&s| newton(s, &all, &target))
}

/// Best-effort fit: the exact solution when one exists, otherwise the
/// Levenberg-Marquardt minimizer of the squared moment residuals together
/// with its residual norm. Used inside the matching loop, where an
/// approximate step still moves the row toward the target and the next
/// iteration starts from a better-shaped sample.
pub fn fit_cubic_least_squares(
    row: &[f64],
    probs: &[f64],
    skewness: f64,
    kurtosis: f64,
) -> Option<(Cubic, f64)> {
    if let Some(c) = fit_cubic(row, probs, skewness, kurtosis) {
        return Some((c, 0.0));
    }
    let m = raw_moments(row, probs, 12).ok()?;
    let mut all = [0.0; 13];
    all[0] = 1.0;
    all[1..].copy_from_slice(&m);
    let target = [0.0, 1.0, skewness, kurtosis];
    let mut coef = STARTS[0];
    let (mut f, mut jac) = system(&coef, &all, &target);
    let mut mu = 1e-3;
    for _ in 0..MAX_LM_STEPS {
        let current = norm(&f);
        let mut jtj = [[0.0; 4]; 4];
        let mut g = [0.0; 4];
        for r in 0..4 {
            for c in 0..4 {
                jtj[r][c] = (0..4).map(|q| jac[q][r] * jac[q][c]).sum();
            }
            g[r] = -(0..4).map(|q| jac[q][r] * f[q]).sum::<f64>();
        }
        let mut improved = false;
        while mu < 1e12 {
            let mut a = jtj;
            for (d, row) in a.iter_mut().enumerate() {
                row[d] += mu * (1.0 + jtj[d][d]);
            }
            if let Some(step) = solve4(a, g) {
                let trial: Cubic = std::array::from_fn(|i| coef[i] + step[i]);
                let (tf, tj) = system(&trial, &all, &target);
                if tf.iter().all(|v| v.is_finite()) && norm(&tf) < current {
                    coef = trial;
                    f = tf;
                    jac = tj;
                    mu = (mu * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved || current - norm(&f) <= 1e-15 * current {
            break;
        }
    }
    let res = norm(&f);
    res.is_finite().then_some((coef, res))
}

pub fn apply_cubic(coef: &Cubic, row: &[f64]) -> Vec<f64> {
    let [a, b, c, d] = *coef;
    row.iter().map(|&x| a + x * (b + x * (c + x * d))).collect()
}
