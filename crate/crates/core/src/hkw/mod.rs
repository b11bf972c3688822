//! Moment- and correlation-matching scenario construction.
//!
//! Scenarios are built in standardized space (every row has weighted mean 0
//! and variance 1). Each iteration first maps the rows onto the target
//! correlation with `L_target * L_current^-1`, then pulls every row back to
//! its target skewness and kurtosis with a cubic transform. The loop stops
//! once both the moment and the correlation error are within tolerance; a
//! trial that runs out of iterations or hits a numerical failure is
//! restarted from fresh normal draws. Rows are mapped back to natural units
//! as `mean + std_dev * row` at the end.

mod cubic;

pub use cubic::{apply_cubic, fit_cubic, fit_cubic_least_squares, Cubic};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{check_probabilities, ScenarioMatrix, PROBABILITY_SUM_TOL};
use crate::moments::{CorrelationMatrix, MomentTargets, Moments};
use crate::prng::Pcg32;

#[derive(Debug, Clone, PartialEq)]
pub struct HkwOptions {
    pub scenario_count: usize,
    pub moment_tol: f64,
    pub corr_tol: f64,
    pub max_iterations: usize,
    pub max_trials: usize,
    pub verbosity: u32,
    /// Starting values for the first trial, in natural units.
    pub start_matrix: Option<ScenarioMatrix>,
}

impl Default for HkwOptions {
    fn default() -> Self {
        HkwOptions {
            scenario_count: 100,
            moment_tol: 1e-3,
            corr_tol: 1e-3,
            max_iterations: 100,
            max_trials: 10,
            verbosity: 0,
            start_matrix: None,
        }
    }
}

fn weighted_mean_var(row: &[f64], probs: &[f64]) -> (f64, f64) {
    let mean: f64 = row.iter().zip(probs).map(|(x, p)| p * x).sum();
    let var: f64 = row.iter().zip(probs).map(|(x, p)| p * (x - mean).powi(2)).sum();
    (mean, var)
}

/// Shift and scale `row` to weighted mean 0 and variance 1.
pub fn standardize(row: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if row.len() != probs.len() {
        return Err(Error::Shape(format!(
            "row of {} values with {} probabilities",
            row.len(),
            probs.len()
        )));
    }
    let (mean, var) = weighted_mean_var(row, probs);
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::Degenerate(format!("row variance is {var}")));
    }
    let sd = var.sqrt();
    let mut out: Vec<f64> = row.iter().map(|x| (x - mean) / sd).collect();
    // one refinement pass removes the rounding left by the first
    let (mean2, var2) = weighted_mean_var(&out, probs);
    let sd2 = var2.sqrt();
    for v in &mut out {
        *v = (*v - mean2) / sd2;
    }
    Ok(out)
}

/// Probability-weighted power sums `m_1..m_max_order`.
pub fn raw_moments(row: &[f64], probs: &[f64], max_order: usize) -> Result<Vec<f64>> {
    if max_order > 12 {
        return Err(Error::Argument(format!("moment order {max_order} exceeds 12")));
    }
    if row.len() != probs.len() {
        return Err(Error::Shape("row and probability lengths differ".into()));
    }
    let mut m = vec![0.0; max_order];
    for (&x, &p) in row.iter().zip(probs) {
        let mut pw = p;
        for slot in m.iter_mut() {
            pw *= x;
            *slot += pw;
        }
    }
    Ok(m)
}

/// Map a standardized row onto standardized target moments. `None` means
/// the Newton solve failed from every start; callers treat that as a failed
/// iteration.
pub fn cubic_transform(row: &[f64], probs: &[f64], target: &Moments) -> Option<Vec<f64>> {
    fit_cubic(row, probs, target.skewness, target.kurtosis).map(|c| apply_cubic(&c, row))
}

/// Achieved (mean, std_dev, skewness, kurtosis) of a row.
pub fn achieved_moments(row: &[f64], probs: &[f64]) -> Moments {
    let (mean, var) = weighted_mean_var(row, probs);
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for (&x, &p) in row.iter().zip(probs) {
        let d = x - mean;
        let d2 = d * d;
        m3 += p * d2 * d;
        m4 += p * d2 * d2;
    }
    Moments::new(mean, var.sqrt(), m3 / var.powf(1.5), m4 / (var * var))
}

/// Weighted correlation matrix of the rows of `x` (n x s).
pub fn correlation(x: &DMatrix<f64>, probs: &[f64]) -> DMatrix<f64> {
    let mut z = x.clone();
    for i in 0..z.nrows() {
        let row: Vec<f64> = z.row(i).iter().copied().collect();
        let (mean, var) = weighted_mean_var(&row, probs);
        let sd = var.sqrt();
        for (t, v) in z.row_mut(i).iter_mut().enumerate() {
            *v = (*v - mean) / sd * probs[t].sqrt();
        }
    }
    let mut c = &z * z.transpose();
    // exact symmetry and unit diagonal
    let n = c.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
        c[(i, i)] = 1.0;
    }
    c
}

fn standardize_rows(x: &mut DMatrix<f64>, probs: &[f64]) -> Result<()> {
    for i in 0..x.nrows() {
        let row: Vec<f64> = x.row(i).iter().copied().collect();
        let z = standardize(&row, probs)?;
        for (v, s) in x.row_mut(i).iter_mut().zip(z) {
            *v = s;
        }
    }
    Ok(())
}

/// `X' = L_target L_current^-1 X`, rows renormalized to unit variance.
/// Fails when the current correlation is not positive definite.
pub fn impose_correlation(
    x: &DMatrix<f64>,
    probs: &[f64],
    target: &CorrelationMatrix,
) -> Result<DMatrix<f64>> {
    if x.nrows() != target.dim() || x.ncols() != probs.len() {
        return Err(Error::Shape(format!(
            "{}x{} scenario block against a {}-variable correlation target and {} probabilities",
            x.nrows(),
            x.ncols(),
            target.dim(),
            probs.len()
        )));
    }
    let current = correlation(x, probs);
    let l_cur = current
        .cholesky()
        .ok_or_else(|| Error::Degenerate("current scenario correlation is singular".into()))?
        .unpack();
    let l_tgt = target
        .matrix()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite {
            blocks: "target".into(),
        })?
        .unpack();
    let decorrelated = l_cur
        .solve_lower_triangular(x)
        .ok_or_else(|| Error::Degenerate("triangular solve failed".into()))?;
    let mut out = l_tgt * decorrelated;
    standardize_rows(&mut out, probs)?;
    Ok(out)
}

/// Largest deviations from the targets on the standardized scale.
///
/// The moment error is the maximum over rows of `|mean - mu| / sigma`,
/// `|std - sigma| / sigma`, `|skew - skew*|` and `|kurt - kurt*|`; the
/// correlation error is the maximum off-diagonal `|C_ij - R_ij|`.
pub fn match_errors(
    x: &DMatrix<f64>,
    probs: &[f64],
    targets: &MomentTargets,
    r: &CorrelationMatrix,
) -> (f64, f64) {
    let mut moment_err = 0.0f64;
    for (i, t) in targets.rows.iter().enumerate() {
        let row: Vec<f64> = x.row(i).iter().copied().collect();
        let a = achieved_moments(&row, probs);
        let errs = [
            (a.mean - t.mean).abs() / t.std_dev,
            (a.std_dev - t.std_dev).abs() / t.std_dev,
            (a.skewness - t.skewness).abs(),
            (a.kurtosis - t.kurtosis).abs(),
        ];
        for e in errs {
            // NaN must never read as a match
            moment_err = if e.is_nan() { f64::INFINITY } else { moment_err.max(e) };
        }
    }
    let c = correlation(x, probs);
    let mut corr_err = 0.0f64;
    for i in 0..c.nrows() {
        for j in 0..i {
            let e = (c[(i, j)] - r.get(i, j)).abs();
            corr_err = if e.is_nan() { f64::INFINITY } else { corr_err.max(e) };
        }
    }
    (moment_err, corr_err)
}

pub fn scenario_block(m: &ScenarioMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.variable_count(), m.scenario_count(), m.values())
}

pub fn block_to_scenarios(x: &DMatrix<f64>, probs: Vec<f64>) -> Result<ScenarioMatrix> {
    let values: Vec<f64> = x.transpose().iter().copied().collect();
    ScenarioMatrix::new(x.nrows(), x.ncols(), values, probs)
}

/// Number of realized values below zero.
pub fn count_negative(m: &ScenarioMatrix) -> usize {
    m.values().iter().filter(|v| **v < 0.0).count()
}

enum TrialOutcome {
    Converged(DMatrix<f64>),
    Failed,
}

fn run_trial(
    mut x: DMatrix<f64>,
    probs: &[f64],
    std_targets: &MomentTargets,
    r: &CorrelationMatrix,
    opts: &HkwOptions,
    best: &mut (f64, f64),
    trial: usize,
) -> TrialOutcome {
    if standardize_rows(&mut x, probs).is_err() {
        log::debug!("trial {trial}: degenerate starting row");
        return TrialOutcome::Failed;
    }
    for iter in 0..opts.max_iterations {
        // an approximate cubic step leaves rows slightly off unit scale
        if iter > 0 && standardize_rows(&mut x, probs).is_err() {
            return TrialOutcome::Failed;
        }
        x = match impose_correlation(&x, probs, r) {
            Ok(x) => x,
            Err(e) => {
                log::debug!("trial {trial} iteration {iter}: {e}");
                return TrialOutcome::Failed;
            }
        };
        for (i, t) in std_targets.rows.iter().enumerate() {
            let row: Vec<f64> = x.row(i).iter().copied().collect();
            match fit_cubic_least_squares(&row, probs, t.skewness, t.kurtosis) {
                Some((coef, _)) => {
                    let y = apply_cubic(&coef, &row);
                    for (v, s) in x.row_mut(i).iter_mut().zip(y) {
                        *v = s;
                    }
                }
                None => {
                    log::debug!("trial {trial} iteration {iter}: cubic fit failed on row {}", i + 1);
                    return TrialOutcome::Failed;
                }
            }
        }
        let (me, ce) = match_errors(&x, probs, std_targets, r);
        if me.max(ce) < best.0.max(best.1) {
            *best = (me, ce);
        }
        if opts.verbosity >= 2 {
            log::info!("trial {trial} iteration {iter}: moment error {me:e}, correlation error {ce:e}");
        }
        if me <= opts.moment_tol && ce <= opts.corr_tol {
            return TrialOutcome::Converged(x);
        }
    }
    TrialOutcome::Failed
}

pub fn generate_scenarios(
    targets: &MomentTargets,
    r: &CorrelationMatrix,
    opts: &HkwOptions,
    probs: Option<&[f64]>,
    rng: &mut Pcg32,
) -> Result<ScenarioMatrix> {
    let n = targets.len();
    let s = opts.scenario_count;
    if n == 0 {
        return Err(Error::Argument("no randomized variables".into()));
    }
    if r.dim() != n {
        return Err(Error::Shape(format!(
            "{n} moment targets but a {}x{} correlation target",
            r.dim(),
            r.dim()
        )));
    }
    if s < n + 1 {
        return Err(Error::Rank {
            scenarios: s,
            variables: n,
        });
    }
    let probs: Vec<f64> = match probs {
        Some(p) => {
            check_probabilities(p, s, PROBABILITY_SUM_TOL.max(1e-9))?;
            p.to_vec()
        }
        None => crate::model::equal_probabilities(s),
    };
    if let Some(start) = &opts.start_matrix {
        if (start.variable_count(), start.scenario_count()) != (n, s) {
            return Err(Error::Shape(format!(
                "starting matrix is {}x{}, expected {n}x{s}",
                start.variable_count(),
                start.scenario_count()
            )));
        }
    }
    let std_targets = MomentTargets {
        rows: targets.rows.iter().map(Moments::standardized).collect(),
    };

    let mut best = (f64::INFINITY, f64::INFINITY);
    for trial in 0..opts.max_trials {
        let start = match (&opts.start_matrix, trial) {
            (Some(m), 0) => scenario_block(m),
            _ => {
                // row-major draw order
                let values: Vec<f64> = (0..n * s).map(|_| rng.standard_normal()).collect();
                DMatrix::from_row_slice(n, s, &values)
            }
        };
        if let TrialOutcome::Converged(mut x) =
            run_trial(start, &probs, &std_targets, r, opts, &mut best, trial)
        {
            if opts.verbosity >= 1 {
                log::info!("scenarios matched on trial {}", trial + 1);
            }
            for (i, t) in targets.rows.iter().enumerate() {
                for v in x.row_mut(i).iter_mut() {
                    *v = t.mean + t.std_dev * *v;
                }
            }
            return block_to_scenarios(&x, probs);
        }
    }
    Err(Error::Convergence {
        trials: opts.max_trials,
        moment_error: best.0,
        corr_error: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{uniform_targets, BlockCorrelations};
    use crate::model::{Family, RandomizationSelection};

    fn eq(s: usize) -> Vec<f64> {
        vec![1.0 / s as f64; s]
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(standardize(&[-1.0, 1.0], &[0.5, 0.5]).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(standardize(&[0.0, 2.0], &[0.5, 0.5]).unwrap(), vec![-1.0, 1.0]);
        let p = [0.5, 0.25, 0.25];
        let z = standardize(&[1.0, 2.0, 6.0], &p).unwrap();
        let (m, v) = weighted_mean_var(&z, &p);
        assert!(m.abs() < 1e-14 && (v - 1.0).abs() < 1e-14);
        assert!(matches!(standardize(&[3.0, 3.0], &[0.5, 0.5]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn raw_moments_examples() {
        let m = raw_moments(&[-1.0, 1.0], &[0.5, 0.5], 12).unwrap();
        for (q, v) in m.iter().enumerate() {
            assert_eq!(*v, if (q + 1) % 2 == 0 { 1.0 } else { 0.0 });
        }
        let m = raw_moments(&[2.0], &[1.0], 12).unwrap();
        for (q, v) in m.iter().enumerate() {
            assert_eq!(*v, 2f64.powi(q as i32 + 1));
        }
        assert!(raw_moments(&[1.0], &[1.0], 13).is_err());
    }

    #[test]
    fn raw_moments_against_naive() {
        let mut rng = Pcg32::new(3, 3);
        let row: Vec<f64> = (0..200).map(|_| rng.standard_normal()).collect();
        let probs = eq(200);
        let m = raw_moments(&row, &probs, 12).unwrap();
        for q in 1..=12 {
            let mut naive = 0.0;
            for t in 0..row.len() {
                let mut pw = 1.0;
                for _ in 0..q {
                    pw *= row[t];
                }
                naive += probs[t] * pw;
            }
            assert!((naive - m[q - 1]).abs() <= 1e-14 * naive.abs().max(1.0), "q={q}");
        }
    }

    #[test]
    fn cubic_two_point_is_fixed() {
        let row = [-1.0, 1.0];
        let c = fit_cubic(&row, &[0.5, 0.5], 0.0, 1.0).unwrap();
        assert_eq!(c, [0.0, 1.0, 0.0, 0.0]);
        let y = cubic_transform(&row, &[0.5, 0.5], &Moments::new(0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(y, vec![-1.0, 1.0]);
    }

    #[test]
    fn cubic_fixed_point() {
        let mut rng = Pcg32::new(5, 5);
        let raw: Vec<f64> = (0..50).map(|_| rng.standard_normal()).collect();
        let probs = eq(50);
        let row = standardize(&raw, &probs).unwrap();
        let own = achieved_moments(&row, &probs);
        let c = fit_cubic(&row, &probs, own.skewness, own.kurtosis).unwrap();
        for (got, want) in c.iter().zip([0.0, 1.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn cubic_seven_points_to_uniform_kurtosis() {
        let probs = eq(7);
        let row = standardize(&[-3.0, -1.2, -0.4, 0.0, 0.5, 1.1, 3.0], &probs).unwrap();
        let y = cubic_transform(&row, &probs, &Moments::new(0.0, 1.0, 0.0, 1.8)).unwrap();
        let a = achieved_moments(&y, &probs);
        assert!(a.mean.abs() < 1e-10);
        assert!((a.std_dev - 1.0).abs() < 1e-10);
        assert!(a.skewness.abs() < 1e-10);
        assert!((a.kurtosis - 1.8).abs() < 1e-10);
    }

    fn max_abs_offdiag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        let mut m = 0.0f64;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                m = m.max((a[(i, j)] - b[(i, j)]).abs());
            }
        }
        m
    }

    /// Plain double-loop correlation, independent of `correlation`.
    fn naive_corr(x: &DMatrix<f64>, p: &[f64]) -> DMatrix<f64> {
        let n = x.nrows();
        let s = x.ncols();
        let mut mean = vec![0.0; n];
        for i in 0..n {
            for t in 0..s {
                mean[i] += p[t] * x[(i, t)];
            }
        }
        let mut cov: DMatrix<f64> = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                for t in 0..s {
                    cov[(i, j)] += p[t] * (x[(i, t)] - mean[i]) * (x[(j, t)] - mean[j]);
                }
            }
        }
        DMatrix::from_fn(n, n, |i, j| cov[(i, j)] / (cov[(i, i)] * cov[(j, j)]).sqrt())
    }

    #[test]
    fn impose_correlation_targets() {
        let mut rng = Pcg32::new(8, 8);
        let probs = eq(3);
        let mut x = DMatrix::from_fn(2, 3, |_, _| rng.standard_normal());
        standardize_rows(&mut x, &probs).unwrap();
        let r = CorrelationMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
        let y = impose_correlation(&x, &probs, &r).unwrap();
        assert!((naive_corr(&y, &probs)[(0, 1)] - 0.5).abs() < 1e-10);

        // already at target: unchanged
        let z = impose_correlation(&y, &probs, &r).unwrap();
        assert!(max_abs_offdiag(&y, &z) < 1e-12);

        // identity target decorrelates
        let id = CorrelationMatrix::identity(2);
        let w = impose_correlation(&y, &probs, &id).unwrap();
        assert!(naive_corr(&w, &probs)[(0, 1)].abs() < 1e-10);
    }

    #[test]
    fn impose_correlation_singular_current() {
        let probs = eq(4);
        let x = DMatrix::from_row_slice(2, 4, &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        let r = CorrelationMatrix::identity(2);
        assert!(impose_correlation(&x, &probs, &r).is_err());
    }

    #[test]
    fn match_errors_examples() {
        let probs = eq(2);
        let x = DMatrix::from_row_slice(1, 2, &[-1.0, 1.0]);
        let targets = MomentTargets::new(vec![Moments::new(0.0, 1.0, 0.0, 1.0)]).unwrap();
        let r = CorrelationMatrix::identity(1);
        assert_eq!(match_errors(&x, &probs, &targets, &r), (0.0, 0.0));

        let off = MomentTargets::new(vec![Moments::new(0.0, 1.0, -0.1, 1.01)]).unwrap();
        let (me, _) = match_errors(&x, &probs, &off, &r);
        assert!((me - 0.1).abs() < 1e-15);
    }

    #[test]
    fn two_scenarios_one_variable() {
        let targets = MomentTargets::new(vec![Moments::new(0.0, 1.0, 0.0, 1.0)]).unwrap();
        let opts = HkwOptions {
            scenario_count: 2,
            ..HkwOptions::default()
        };
        let m = generate_scenarios(&targets, &CorrelationMatrix::identity(1), &opts, None, &mut Pcg32::default())
            .unwrap();
        let mut v = m.row(0).to_vec();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12, "{v:?}");
    }

    #[test]
    fn rank_guard() {
        let t = uniform_targets(100.0, 0.25, 0.25).unwrap();
        let targets = MomentTargets::new(vec![t; 5]).unwrap();
        let opts = HkwOptions {
            scenario_count: 5,
            ..HkwOptions::default()
        };
        assert!(matches!(
            generate_scenarios(&targets, &CorrelationMatrix::identity(5), &opts, None, &mut Pcg32::default()),
            Err(Error::Rank { scenarios: 5, variables: 5 })
        ));
    }

    #[test]
    fn uniform_pair_converges() {
        let t = uniform_targets(100.0, 0.25, 0.25).unwrap();
        let targets = MomentTargets::new(vec![t; 2]).unwrap();
        let r = CorrelationMatrix::identity(2);
        let opts = HkwOptions {
            scenario_count: 1000,
            ..HkwOptions::default()
        };
        let m = generate_scenarios(&targets, &r, &opts, None, &mut Pcg32::new(4567, 1234)).unwrap();
        let (me, ce) = match_errors(&scenario_block(&m), m.probabilities(), &targets, &r);
        assert!(me <= 1e-3 && ce <= 1e-3, "{me} {ce}");
    }

    #[test]
    fn correlated_blocks_with_weights() {
        let sel = RandomizationSelection::new(&[Family::Demand, Family::ArcCapacity], 4, 3);
        let blocks = BlockCorrelations::new()
            .with(Family::Demand, Family::Demand, 0.5)
            .unwrap()
            .with(Family::Demand, Family::ArcCapacity, -0.3)
            .unwrap();
        let r = crate::moments::assemble_correlation(&sel, &blocks).unwrap();
        let targets = MomentTargets::new(
            (0..7).map(|i| crate::moments::triangular_targets(10.0 + i as f64, 0.2, 0.4).unwrap()).collect(),
        )
        .unwrap();
        let s = 60;
        let raw: Vec<f64> = (0..s).map(|t| 1.0 + (t % 3) as f64).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let opts = HkwOptions {
            scenario_count: s,
            ..HkwOptions::default()
        };
        let m = generate_scenarios(&targets, &r, &opts, Some(&probs), &mut Pcg32::new(1, 1)).unwrap();
        let (me, ce) = match_errors(&scenario_block(&m), m.probabilities(), &targets, &r);
        assert!(me <= 1e-3 && ce <= 1e-3, "{me} {ce}");
        assert_eq!(m.probabilities(), &probs[..]);
    }

    #[test]
    fn start_matrix_is_used_and_deterministic() {
        let t = uniform_targets(50.0, 0.25, 0.25).unwrap();
        let targets = MomentTargets::new(vec![t; 3]).unwrap();
        let r = CorrelationMatrix::identity(3);
        let opts = HkwOptions {
            scenario_count: 40,
            ..HkwOptions::default()
        };
        let first = generate_scenarios(&targets, &r, &opts, None, &mut Pcg32::new(2, 2)).unwrap();
        let again = generate_scenarios(&targets, &r, &opts, None, &mut Pcg32::new(2, 2)).unwrap();
        assert_eq!(first, again);

        // a converged start matrix stays close and needs no random draws
        let restart = HkwOptions {
            start_matrix: Some(first.clone()),
            ..opts.clone()
        };
        let mut rng = Pcg32::new(9, 9);
        let fed = generate_scenarios(&targets, &r, &restart, None, &mut rng).unwrap();
        assert_eq!(rng, Pcg32::new(9, 9));
        for (a, b) in fed.values().iter().zip(first.values()) {
            assert!((a - b).abs() < 1e-2 * t.std_dev, "{a} vs {b}");
        }

        let bad = HkwOptions {
            start_matrix: Some(ScenarioMatrix::equiprobable(1, 40, vec![1.0; 40]).unwrap()),
            ..opts
        };
        assert!(matches!(
            generate_scenarios(&targets, &r, &bad, None, &mut rng),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn impossible_targets_exhaust_trials() {
        // a 2-point equiprobable row cannot have kurtosis 3
        let targets = MomentTargets::new(vec![Moments::new(0.0, 1.0, 0.0, 3.0)]).unwrap();
        let opts = HkwOptions {
            scenario_count: 2,
            max_trials: 2,
            max_iterations: 3,
            ..HkwOptions::default()
        };
        assert!(matches!(
            generate_scenarios(&targets, &CorrelationMatrix::identity(1), &opts, None, &mut Pcg32::default()),
            Err(Error::Convergence { trials: 2, .. })
        ));
    }
}
