//! Target moments and block correlation matrices.
//!
//! Moments are stored as (mean, standard deviation, skewness, kurtosis) with
//! skewness and kurtosis normalized by the standard deviation, so a normal
//! distribution has kurtosis 3.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{flatten, DetInstance, Family, RandomizationSelection};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl Moments {
    pub const fn new(mean: f64, std_dev: f64, skewness: f64, kurtosis: f64) -> Self {
        Moments {
            mean,
            std_dev,
            skewness,
            kurtosis,
        }
    }

    /// Same shape, zero mean, unit standard deviation.
    pub fn standardized(&self) -> Moments {
        Moments::new(0.0, 1.0, self.skewness, self.kurtosis)
    }

    pub fn is_realizable(&self) -> bool {
        self.std_dev > 0.0
            && self.std_dev.is_finite()
            && self.mean.is_finite()
            && self.skewness.is_finite()
            && self.kurtosis.is_finite()
            && self.kurtosis >= 1.0 + self.skewness * self.skewness - 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTargets {
    pub rows: Vec<Moments>,
}

impl MomentTargets {
    pub fn new(rows: Vec<Moments>) -> Result<Self> {
        if let Some((i, m)) = rows.iter().enumerate().find(|(_, m)| !m.is_realizable()) {
            return Err(Error::Argument(format!(
                "target moments of variable {} are not realizable: {m:?}",
                i + 1
            )));
        }
        Ok(MomentTargets { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
    Triangular,
}

fn check_spread(d: f64, alpha: f64, beta: f64) -> Result<()> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Argument(format!("base value {d} must be positive")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Argument(format!("alpha {alpha} must lie in [0, 1)")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Argument(format!("beta {beta} must be non-negative")));
    }
    if alpha + beta == 0.0 {
        return Err(Error::Degenerate("alpha + beta = 0 gives zero variance".into()));
    }
    Ok(())
}

/// Moments of `uniform(D - alpha D, D + beta D)`.
pub fn uniform_targets(d: f64, alpha: f64, beta: f64) -> Result<Moments> {
    check_spread(d, alpha, beta)?;
    let a = d - alpha * d;
    let b = d + beta * d;
    Ok(Moments::new((a + b) / 2.0, (b - a) / 12f64.sqrt(), 0.0, 1.8))
}

/// Moments of `triangular(D - alpha D, D + beta D, mode D)`.
pub fn triangular_targets(d: f64, alpha: f64, beta: f64) -> Result<Moments> {
    check_spread(d, alpha, beta)?;
    let a = d - alpha * d;
    let b = d + beta * d;
    let c = d;
    let q = a * a + b * b + c * c - a * b - a * c - b * c;
    let skew = 2f64.sqrt() * (a + b - 2.0 * c) * (2.0 * a - b - c) * (a - 2.0 * b + c)
        / (5.0 * q.powf(1.5));
    Ok(Moments::new((a + b + c) / 3.0, (q / 18.0).sqrt(), skew, 2.4))
}

pub fn distribution_targets(dist: Distribution, d: f64, alpha: f64, beta: f64) -> Result<Moments> {
    match dist {
        Distribution::Uniform => uniform_targets(d, alpha, beta),
        Distribution::Triangular => triangular_targets(d, alpha, beta),
    }
}

pub fn assemble_targets(
    base: &DetInstance,
    selection: &RandomizationSelection,
    dist: Distribution,
    alpha: f64,
    beta: f64,
) -> Result<MomentTargets> {
    if selection.is_empty() {
        return Err(Error::Argument("no parameter family selected for randomization".into()));
    }
    let values = flatten(base, selection)?;
    let keys = selection.variable_index();
    let zeros: Vec<String> = values
        .iter()
        .zip(&keys)
        .filter(|(v, _)| **v <= 0.0)
        .map(|(_, k)| k.to_string())
        .collect();
    if !zeros.is_empty() {
        let shown = zeros.iter().take(10).cloned().collect::<Vec<_>>().join(", ");
        let more = if zeros.len() > 10 {
            format!(" and {} more", zeros.len() - 10)
        } else {
            String::new()
        };
        return Err(Error::Argument(format!(
            "zero-valued parameters cannot be randomized: {shown}{more}"
        )));
    }
    let rows = values
        .iter()
        .map(|&d| distribution_targets(dist, d, alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    MomentTargets::new(rows)
}

/// Correlation values shared by whole (family, family) blocks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BlockCorrelations {
    values: BTreeMap<(Family, Family), f64>,
}

impl BlockCorrelations {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(a: Family, b: Family) -> (Family, Family) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn set(&mut self, a: Family, b: Family, value: f64) -> Result<()> {
        if !(value > -1.0 && value < 1.0) {
            return Err(Error::Argument(format!(
                "block correlation {}{} = {value} must lie in (-1, 1)",
                a.code(),
                b.code()
            )));
        }
        self.values.insert(Self::key(a, b), value);
        Ok(())
    }

    pub fn with(mut self, a: Family, b: Family, value: f64) -> Result<Self> {
        self.set(a, b, value)?;
        Ok(self)
    }

    /// Unspecified blocks are zero.
    pub fn get(&self, a: Family, b: Family) -> f64 {
        self.values.get(&Self::key(a, b)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Family, Family, f64)> + '_ {
        self.values.iter().map(|(&(a, b), &v)| (a, b, v))
    }
}

impl fmt::Display for BlockCorrelations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return f.write_str("none");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(a, b, v)| format!("{}{}={v}", a.code(), b.code()))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Symmetric, unit-diagonal, positive definite correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    matrix: DMatrix<f64>,
}

pub const CORR_SYMMETRY_TOL: f64 = 1e-12;

impl CorrelationMatrix {
    /// Validates structure and positive definiteness.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::Shape(format!(
                "correlation matrix must be square and non-empty, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        for i in 0..n {
            if (matrix[(i, i)] - 1.0).abs() > CORR_SYMMETRY_TOL {
                return Err(Error::Argument(format!(
                    "diagonal entry {} is {}, not 1",
                    i + 1,
                    matrix[(i, i)]
                )));
            }
            for j in 0..i {
                let (a, b) = (matrix[(i, j)], matrix[(j, i)]);
                if !a.is_finite() || (a - b).abs() > CORR_SYMMETRY_TOL {
                    return Err(Error::Argument(format!(
                        "entries ({}, {}) and ({}, {}) are not symmetric",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
                if a.abs() > 1.0 {
                    return Err(Error::Argument(format!(
                        "entry ({}, {}) = {a} outside [-1, 1]",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if matrix.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite {
                blocks: "explicit matrix".into(),
            });
        }
        Ok(CorrelationMatrix { matrix })
    }

    pub fn identity(n: usize) -> Self {
        CorrelationMatrix {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }
}

pub fn assemble_correlation(
    selection: &RandomizationSelection,
    blocks: &BlockCorrelations,
) -> Result<CorrelationMatrix> {
    for (a, b, v) in blocks.iter() {
        if !(v > -1.0 && v < 1.0) {
            return Err(Error::Argument(format!(
                "block correlation {}{} = {v} must lie in (-1, 1)",
                a.code(),
                b.code()
            )));
        }
    }
    let fam = selection.variable_families();
    let n = fam.len();
    if n == 0 {
        return Err(Error::Argument("no parameter family selected for randomization".into()));
    }
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            blocks.get(fam[i], fam[j])
        }
    });
    if matrix.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite {
            blocks: blocks.to_string(),
        });
    }
    Ok(CorrelationMatrix { matrix })
}
