//! LP (CPLEX-style) and MPS exports of the design model.
//!
//! Variables are `y_<i>_<j>` (binary arc opening) and `x_<i>_<j>_<k>`
//! (flow of commodity `k`), with 1-based node and commodity numbers. A
//! repeated `(i, j)` pair gets `_p<m>` appended to its arc label for the
//! m-th occurrence. Rows are `flow_<i>_<k>` (conservation), `cap_<arc>`
//! (`sum_k x - u y <= 0`) and, with commodity capacities, `bnd_<arc>_<k>`
//! (`x - b y <= 0`).
//!
//! Names can exceed eight characters, so the MPS output is only readable
//! by parsers that split fields on whitespace (free MPS and most fixed
//! readers in practice).

use std::collections::HashMap;
use std::fmt::Write;

use super::fmt_real;
use crate::error::{Error, Result};
use crate::model::{node_balance, validate, DetInstance};

const TERMS_PER_LINE: usize = 8;

fn arc_labels(inst: &DetInstance) -> Vec<String> {
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    inst.graph
        .arcs
        .iter()
        .map(|a| {
            let count = seen.entry((a.tail, a.head)).or_insert(0);
            *count += 1;
            let base = format!("{}_{}", a.tail + 1, a.head + 1);
            if *count == 1 {
                base
            } else {
                format!("{base}_p{count}")
            }
        })
        .collect()
}

/// `(y names, x names)`; x names are arc-major like the cost vectors.
pub fn mps_column_names(inst: &DetInstance) -> (Vec<String>, Vec<String>) {
    let labels = arc_labels(inst);
    let nk = inst.commodity_count();
    let y = labels.iter().map(|l| format!("y_{l}")).collect();
    let x = labels
        .iter()
        .flat_map(|l| (1..=nk).map(move |k| format!("x_{l}_{k}")))
        .collect();
    (y, x)
}

enum Sense {
    Eq,
    Le,
}

struct Row {
    name: String,
    sense: Sense,
    terms: Vec<(usize, f64)>,
    rhs: f64,
}

/// Column order: all y, then all x (arc-major).
struct Model {
    names: Vec<String>,
    objective: Vec<f64>,
    binaries: usize,
    rows: Vec<Row>,
}

fn build(inst: &DetInstance) -> Result<Model> {
    let problems = validate(inst);
    if !problems.is_empty() {
        let list: Vec<String> = problems.iter().map(|v| v.to_string()).collect();
        return Err(Error::Argument(format!("instance is not valid: {}", list.join("; "))));
    }
    let na = inst.arc_count();
    let nk = inst.commodity_count();
    let labels = arc_labels(inst);
    let (ynames, xnames) = mps_column_names(inst);
    let x = |a: usize, k: usize| na + a * nk + k;
    let mut names = ynames;
    names.extend(xnames);
    let mut objective = inst.fixed_cost.clone();
    objective.extend_from_slice(&inst.var_cost);

    let out_arcs = inst.graph.out_arcs();
    let in_arcs = inst.graph.in_arcs();
    let mut rows = Vec::new();
    for k in 0..nk {
        let w = node_balance(inst, k, None)?;
        for i in 0..inst.node_count() {
            let mut terms: Vec<(usize, f64)> = out_arcs[i].iter().map(|&a| (x(a, k), 1.0)).collect();
            terms.extend(in_arcs[i].iter().map(|&a| (x(a, k), -1.0)));
            rows.push(Row {
                name: format!("flow_{}_{}", i + 1, k + 1),
                sense: Sense::Eq,
                terms,
                rhs: w[i],
            });
        }
    }
    for a in 0..na {
        let mut terms: Vec<(usize, f64)> = (0..nk).map(|k| (x(a, k), 1.0)).collect();
        terms.push((a, -inst.capacity[a]));
        rows.push(Row {
            name: format!("cap_{}", labels[a]),
            sense: Sense::Le,
            terms,
            rhs: 0.0,
        });
    }
    if let Some(b) = &inst.com_capacity {
        for a in 0..na {
            for k in 0..nk {
                rows.push(Row {
                    name: format!("bnd_{}_{}", labels[a], k + 1),
                    sense: Sense::Le,
                    terms: vec![(x(a, k), 1.0), (a, -b[a * nk + k])],
                    rhs: 0.0,
                });
            }
        }
    }
    Ok(Model {
        names,
        objective,
        binaries: na,
        rows,
    })
}

fn push_expression(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    if terms.is_empty() {
        // an empty row still needs one term to parse
        match names.first() {
            Some(n) => write!(out, " 0 {n}").unwrap(),
            None => out.push_str(" 0"),
        }
        return;
    }
    for (i, &(j, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { "-" } else { "+" };
        if i == 0 && c >= 0.0 {
            write!(out, " {} {}", fmt_real(c), names[j]).unwrap();
        } else {
            write!(out, " {sign} {} {}", fmt_real(c.abs()), names[j]).unwrap();
        }
    }
}

pub fn write_lp(instance: &DetInstance) -> Result<String> {
    let m = build(instance)?;
    let mut out = String::from("\\ multicommodity capacitated fixed-charge network design\nMinimize\n obj:");
    let obj_terms: Vec<(usize, f64)> = m.objective.iter().copied().enumerate().collect();
    push_expression(&mut out, &obj_terms, &m.names);
    out.push_str("\nSubject To\n");
    for r in &m.rows {
        write!(out, " {}:", r.name).unwrap();
        push_expression(&mut out, &r.terms, &m.names);
        let op = match r.sense {
            Sense::Eq => "=",
            Sense::Le => "<=",
        };
        writeln!(out, " {op} {}", fmt_real(r.rhs)).unwrap();
    }
    out.push_str("Bounds\n");
    for n in &m.names[..m.binaries] {
        writeln!(out, " 0 <= {n} <= 1").unwrap();
    }
    if m.binaries > 0 {
        out.push_str("Binaries\n");
        for n in &m.names[..m.binaries] {
            writeln!(out, " {n}").unwrap();
        }
    }
    out.push_str("End\n");
    Ok(out)
}

pub fn write_mps(instance: &DetInstance) -> Result<String> {
    let m = build(instance)?;
    let mut out = String::from("NAME          MCFNDP\nROWS\n N  obj\n");
    for r in &m.rows {
        let s = match r.sense {
            Sense::Eq => 'E',
            Sense::Le => 'L',
        };
        writeln!(out, " {s}  {}", r.name).unwrap();
    }
    // column-wise entries
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m.names.len()];
    for (ri, r) in m.rows.iter().enumerate() {
        for &(j, c) in &r.terms {
            by_col[j].push((ri, c));
        }
    }
    out.push_str("COLUMNS\n");
    let entry = |out: &mut String, col: &str, row: &str, v: f64| {
        writeln!(out, "    {col:<8}  {row:<8}  {}", fmt_real(v)).unwrap();
    };
    for (j, name) in m.names.iter().enumerate() {
        if j == 0 && m.binaries > 0 {
            out.push_str("    MARKER                 'MARKER'                 'INTORG'\n");
        }
        if j == m.binaries && m.binaries > 0 {
            out.push_str("    MARKER                 'MARKER'                 'INTEND'\n");
        }
        // the objective entry is always written so every column is declared
        entry(&mut out, name, "obj", m.objective[j]);
        for &(ri, c) in &by_col[j] {
            entry(&mut out, name, &m.rows[ri].name, c);
        }
    }
    if m.binaries > 0 && m.binaries == m.names.len() {
        out.push_str("    MARKER                 'MARKER'                 'INTEND'\n");
    }
    out.push_str("RHS\n");
    for r in &m.rows {
        if r.rhs != 0.0 {
            writeln!(out, "    RHS       {:<8}  {}", r.name, fmt_real(r.rhs)).unwrap();
        }
    }
    out.push_str("BOUNDS\n");
    for n in &m.names[..m.binaries] {
        writeln!(out, " UP BND       {n:<8}  1").unwrap();
    }
    out.push_str("ENDATA\n");
    Ok(out)
}
