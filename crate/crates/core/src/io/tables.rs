//! GRAPH, MOMENTS, CORR, PROBS and HKWMAT files.

use nalgebra::DMatrix;

use super::{mul_add, push_reals, Tokens};
use crate::error::{Error, Result};
use crate::model::{Arc, Graph, ScenarioMatrix, PROBABILITY_SUM_TOL};
use crate::moments::{CorrelationMatrix, MomentTargets, Moments, CORR_SYMMETRY_TOL};

const PROBS_TOL: f64 = 1e-9;

pub fn write_graph(graph: &Graph) -> String {
    let mut out = format!("{} {}\n", graph.node_count, graph.arc_count());
    for a in &graph.arcs {
        out.push_str(&format!("{} {}\n", a.tail + 1, a.head + 1));
    }
    out
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut t = Tokens::new(text);
    let header = t.line();
    let n = t.usize("node count")?;
    let na = t.usize("arc count")?;
    if n == 0 {
        return Err(Error::parse(header, "graph has no nodes"));
    }
    t.require(na.checked_mul(2), "arc list")?;
    let mut g = Graph::new(n);
    for _ in 0..na {
        let line = t.line();
        let tail = t.index("arc tail", n)?;
        let head = t.index("arc head", n)?;
        if tail == head {
            return Err(Error::parse(line, format!("self-loop at node {}", tail + 1)));
        }
        g.arcs.push(Arc { tail, head });
    }
    t.expect_end()?;
    Ok(g)
}

pub fn write_moments(targets: &MomentTargets) -> String {
    let mut out = format!("{} 4\n", targets.len());
    for m in &targets.rows {
        push_reals(&mut out, &[m.mean, m.std_dev, m.skewness, m.kurtosis]);
    }
    out
}

pub fn read_moments(text: &str) -> Result<MomentTargets> {
    let mut t = Tokens::new(text);
    let header = t.line();
    let n = t.usize("variable count")?;
    let four = t.usize("moment count")?;
    if four != 4 {
        return Err(Error::parse(header, format!("moment files have 4 columns, header says {four}")));
    }
    t.require(n.checked_mul(4), "moment table")?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let line = t.line();
        let m = Moments::new(
            t.real("mean")?,
            t.real("standard deviation")?,
            t.real("skewness")?,
            t.real("kurtosis")?,
        );
        if !m.is_realizable() {
            return Err(Error::parse(
                line,
                format!("moments of variable {} are not realizable (need std > 0, kurtosis >= 1 + skewness^2)", i + 1),
            ));
        }
        rows.push(m);
    }
    t.expect_end()?;
    MomentTargets::new(rows)
}

pub fn write_corr(r: &CorrelationMatrix) -> String {
    let n = r.dim();
    let mut out = format!("{n} {n}\n");
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| r.get(i, j)).collect();
        push_reals(&mut out, &row);
    }
    out
}

pub fn read_corr(text: &str) -> Result<CorrelationMatrix> {
    let mut t = Tokens::new(text);
    let header = t.line();
    let n = t.usize("row count")?;
    let m = t.usize("column count")?;
    if n != m || n == 0 {
        return Err(Error::parse(header, format!("correlation matrix must be square and non-empty, got {n}x{m}")));
    }
    t.require(n.checked_mul(n), "correlation matrix")?;
    let mut data = DMatrix::zeros(n, n);
    let mut lines = Vec::with_capacity(n);
    for i in 0..n {
        lines.push(t.line());
        for j in 0..n {
            data[(i, j)] = t.real("correlation")?;
        }
    }
    t.expect_end()?;
    for i in 0..n {
        if (data[(i, i)] - 1.0).abs() > CORR_SYMMETRY_TOL {
            return Err(Error::parse(lines[i], format!("diagonal entry {} is {}, not 1", i + 1, data[(i, i)])));
        }
        for j in 0..i {
            if (data[(i, j)] - data[(j, i)]).abs() > CORR_SYMMETRY_TOL {
                return Err(Error::parse(
                    lines[i],
                    format!("entry ({}, {}) differs from ({}, {})", i + 1, j + 1, j + 1, i + 1),
                ));
            }
        }
    }
    CorrelationMatrix::new(data).map_err(|e| Error::parse(header, e.to_string()))
}

pub fn write_probs(probs: &[f64]) -> String {
    let mut out = format!("{}\n", probs.len());
    for &p in probs {
        push_reals(&mut out, &[p]);
    }
    out
}

/// Probabilities summing to one within 1e-9; sums off by more than
/// rounding are rescaled so they can back a `ScenarioMatrix`.
pub fn read_probs(text: &str) -> Result<Vec<f64>> {
    let mut t = Tokens::new(text);
    let s = t.usize("scenario count")?;
    if s == 0 {
        return Err(Error::parse(1, "probability file declares no scenarios"));
    }
    t.require(Some(s), "probability list")?;
    let mut probs = Vec::with_capacity(s);
    for _ in 0..s {
        probs.push(t.nonneg("probability")?);
    }
    t.expect_end()?;
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROBS_TOL {
        return Err(Error::parse(1, format!("probabilities sum to {total}, not 1")));
    }
    if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(probs)
}

pub fn write_hkwmat(m: &ScenarioMatrix) -> String {
    let mut out = format!("{} {}\n", m.variable_count(), m.scenario_count());
    for i in 0..m.variable_count() {
        push_reals(&mut out, m.row(i));
    }
    out
}

/// Values only; the matrix is equiprobable until a probability file says
/// otherwise.
pub fn read_hkwmat(text: &str) -> Result<ScenarioMatrix> {
    let mut t = Tokens::new(text);
    let header = t.line();
    let n = t.usize("variable count")?;
    let s = t.usize("scenario count")?;
    if n == 0 || s == 0 {
        return Err(Error::parse(header, format!("scenario matrix must be non-empty, got {n}x{s}")));
    }
    t.require(mul_add(n, s, 0), "scenario matrix")?;
    let mut values = Vec::with_capacity(n * s);
    for _ in 0..n * s {
        values.push(t.real("scenario value")?);
    }
    t.expect_end()?;
    ScenarioMatrix::equiprobable(n, s, values)
}
