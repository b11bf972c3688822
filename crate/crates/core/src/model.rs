//! Network design instance data model.
//!
//! A [`DetInstance`] holds everything needed to state the deterministic
//! multicommodity capacitated fixed-charge network design problem: the
//! directed graph, the commodities, and the per-arc / per-(arc, commodity)
//! cost and capacity data. Node indices are 0-based here; the text codecs
//! convert to 1-based at the file boundary.
//!
//! Stochastic instances are described relative to a base instance by a
//! [`RandomizationSelection`], which fixes the canonical flattening of the
//! randomized parameters into a variable vector, and a [`ScenarioMatrix`]
//! holding one column of realized values per scenario.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub node_count: usize,
    pub arcs: Vec<Arc>,
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Graph {
            node_count,
            arcs: Vec::new(),
        }
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn add_arc(&mut self, tail: usize, head: usize) -> usize {
        self.arcs.push(Arc { tail, head });
        self.arcs.len() - 1
    }

    /// Arc indices leaving each node, in arc order.
    pub fn out_arcs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.node_count];
        for (a, arc) in self.arcs.iter().enumerate() {
            if arc.tail < self.node_count {
                out[arc.tail].push(a);
            }
        }
        out
    }

    /// Arc indices entering each node, in arc order.
    pub fn in_arcs(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.node_count];
        for (a, arc) in self.arcs.iter().enumerate() {
            if arc.head < self.node_count {
                inc[arc.head].push(a);
            }
        }
        inc
    }

    pub fn has_parallel_arcs(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.arcs.len());
        !self.arcs.iter().all(|a| seen.insert((a.tail, a.head)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commodity {
    pub origin: usize,
    pub destination: usize,
    pub demand: f64,
}

/// A complete deterministic instance.
///
/// `var_cost` and `com_capacity` are arc-major: the entry for arc `a` and
/// commodity `k` lives at `a * commodity_count + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetInstance {
    pub graph: Graph,
    pub commodities: Vec<Commodity>,
    pub fixed_cost: Vec<f64>,
    pub capacity: Vec<f64>,
    pub var_cost: Vec<f64>,
    /// Commodity-specific capacities; `None` means those constraints are omitted.
    pub com_capacity: Option<Vec<f64>>,
}

impl DetInstance {
    pub fn node_count(&self) -> usize {
        self.graph.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.graph.arcs.len()
    }

    pub fn commodity_count(&self) -> usize {
        self.commodities.len()
    }

    pub fn uses_com_capacity(&self) -> bool {
        self.com_capacity.is_some()
    }

    #[inline]
    pub fn ak(&self, arc: usize, commodity: usize) -> usize {
        arc * self.commodities.len() + commodity
    }
}

/// Net outgoing flow `w` of one commodity at every node.
///
/// `demand_override` replaces the stored demand (used to evaluate a scenario).
pub fn node_balance(
    instance: &DetInstance,
    commodity: usize,
    demand_override: Option<f64>,
) -> Result<Vec<f64>> {
    let com = instance.commodities.get(commodity).ok_or_else(|| {
        Error::Index(format!(
            "commodity {commodity} out of range (instance has {})",
            instance.commodities.len()
        ))
    })?;
    let d = demand_override.unwrap_or(com.demand);
    let mut w = vec![0.0; instance.node_count()];
    w[com.origin] = d;
    w[com.destination] = -d;
    Ok(w)
}

pub fn total_volume(instance: &DetInstance) -> f64 {
    instance.commodities.iter().map(|c| c.demand).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn nonneg_finite(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

/// Reports every structural invariant violation; an empty report means the
/// instance is accepted by every writer and by the feasibility check.
pub fn validate(instance: &DetInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = instance.node_count();
    let na = instance.arc_count();
    let nk = instance.commodity_count();

    if n == 0 {
        out.push(Violation("graph has no nodes".into()));
    }
    for (a, arc) in instance.graph.arcs.iter().enumerate() {
        if arc.tail >= n || arc.head >= n {
            out.push(Violation(format!(
                "arc {a} endpoint out of range ({} -> {}, {n} nodes)",
                arc.tail, arc.head
            )));
        } else if arc.tail == arc.head {
            out.push(Violation(format!("self-loop at arc {a}")));
        }
    }
    for (k, com) in instance.commodities.iter().enumerate() {
        if com.origin >= n || com.destination >= n {
            out.push(Violation(format!("commodity {k} endpoint out of range")));
        } else if com.origin == com.destination {
            out.push(Violation(format!("commodity {k} has origin equal to destination")));
        }
        if !nonneg_finite(com.demand) {
            out.push(Violation(format!("commodity {k} has invalid demand {}", com.demand)));
        }
    }

    let mut check_len = |name: &str, len: usize, want: usize| {
        if len != want {
            out.push(Violation(format!("{name} has {len} entries, expected {want}")));
            false
        } else {
            true
        }
    };
    let fix_ok = check_len("fixed cost", instance.fixed_cost.len(), na);
    let cap_ok = check_len("capacity", instance.capacity.len(), na);
    let var_ok = check_len("variable cost", instance.var_cost.len(), na * nk);
    let bnd_ok = match &instance.com_capacity {
        Some(b) => check_len("commodity capacity", b.len(), na * nk),
        None => false,
    };

    if fix_ok {
        for (a, &f) in instance.fixed_cost.iter().enumerate() {
            if !nonneg_finite(f) {
                out.push(Violation(format!("fixed cost {f} on arc {a} is invalid")));
            }
        }
    }
    if cap_ok {
        for (a, &u) in instance.capacity.iter().enumerate() {
            if !nonneg_finite(u) {
                out.push(Violation(format!("capacity {u} on arc {a} is invalid")));
            }
        }
    }
    if var_ok && nk > 0 {
        for (i, &c) in instance.var_cost.iter().enumerate() {
            if !nonneg_finite(c) {
                out.push(Violation(format!(
                    "variable cost {c} on arc {} commodity {} is invalid",
                    i / nk,
                    i % nk
                )));
            }
        }
    }
    if bnd_ok && nk > 0 {
        for (i, &b) in instance.com_capacity.as_ref().unwrap().iter().enumerate() {
            if !nonneg_finite(b) {
                out.push(Violation(format!(
                    "commodity capacity {b} on arc {} commodity {} is invalid",
                    i / nk,
                    i % nk
                )));
            }
        }
    }
    out
}

/// The five parameter families that may vary across scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Demand,
    ArcCapacity,
    ComCapacity,
    FixedCost,
    VarCost,
}

impl Family {
    /// Canonical order.
    pub const ALL: [Family; 5] = [
        Family::Demand,
        Family::ArcCapacity,
        Family::ComCapacity,
        Family::FixedCost,
        Family::VarCost,
    ];

    pub fn bit(self) -> u32 {
        match self {
            Family::Demand => 1,
            Family::ArcCapacity => 2,
            Family::ComCapacity => 4,
            Family::FixedCost => 8,
            Family::VarCost => 16,
        }
    }

    /// One-letter code used by block-correlation flags.
    pub fn code(self) -> char {
        match self {
            Family::Demand => 'D',
            Family::ArcCapacity => 'A',
            Family::ComCapacity => 'B',
            Family::FixedCost => 'F',
            Family::VarCost => 'C',
        }
    }

    pub fn from_code(c: char) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.code() == c)
    }

    fn cardinality(self, arcs: usize, commodities: usize) -> usize {
        match self {
            Family::Demand => commodities,
            Family::ArcCapacity | Family::FixedCost => arcs,
            Family::ComCapacity | Family::VarCost => arcs * commodities,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Demand => "demand",
            Family::ArcCapacity => "arc capacity",
            Family::ComCapacity => "commodity capacity",
            Family::FixedCost => "fixed cost",
            Family::VarCost => "variable cost",
        };
        f.write_str(s)
    }
}

/// One randomized parameter: its family plus the arc and/or commodity it
/// belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarKey {
    pub family: Family,
    pub arc: Option<usize>,
    pub commodity: Option<usize>,
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if let Some(a) = self.arc {
            write!(f, " arc {}", a + 1)?;
        }
        if let Some(k) = self.commodity {
            write!(f, " commodity {}", k + 1)?;
        }
        Ok(())
    }
}

/// Which parameter families are randomized, sized against a particular
/// instance shape.
///
/// Variables are laid out in canonical order: demands by commodity, arc
/// capacities by arc, commodity capacities by (arc, commodity), fixed costs
/// by arc, variable costs by (arc, commodity).
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationSelection {
    mask: u32,
    arcs: usize,
    commodities: usize,
}

impl RandomizationSelection {
    pub fn new(families: &[Family], arcs: usize, commodities: usize) -> Self {
        let mask = families.iter().fold(0, |m, f| m | f.bit());
        RandomizationSelection {
            mask,
            arcs,
            commodities,
        }
    }

    /// Build from the `1 | 2 | 4 | 8 | 16` bitmask used on the command line.
    pub fn from_mask(mask: u32, arcs: usize, commodities: usize) -> Result<Self> {
        if mask == 0 || mask > 31 {
            return Err(Error::Argument(format!(
                "randomization mask {mask} must be in 1..=31"
            )));
        }
        Ok(RandomizationSelection {
            mask,
            arcs,
            commodities,
        })
    }

    pub fn for_instance(families: &[Family], instance: &DetInstance) -> Self {
        Self::new(families, instance.arc_count(), instance.commodity_count())
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn contains(&self, family: Family) -> bool {
        self.mask & family.bit() != 0
    }

    pub fn families(&self) -> impl Iterator<Item = Family> + '_ {
        Family::ALL.into_iter().filter(|f| self.contains(*f))
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.arcs, self.commodities)
    }

    pub fn variable_count(&self) -> usize {
        self.families()
            .map(|f| f.cardinality(self.arcs, self.commodities))
            .sum()
    }

    /// Family of each variable, in canonical order.
    pub fn variable_families(&self) -> Vec<Family> {
        self.families()
            .flat_map(|f| std::iter::repeat_n(f, f.cardinality(self.arcs, self.commodities)))
            .collect()
    }

    pub fn variable_index(&self) -> Vec<VarKey> {
        let (na, nk) = (self.arcs, self.commodities);
        let mut keys = Vec::with_capacity(self.variable_count());
        for family in self.families() {
            match family {
                Family::Demand => keys.extend((0..nk).map(|k| VarKey {
                    family,
                    arc: None,
                    commodity: Some(k),
                })),
                Family::ArcCapacity | Family::FixedCost => keys.extend((0..na).map(|a| VarKey {
                    family,
                    arc: Some(a),
                    commodity: None,
                })),
                Family::ComCapacity | Family::VarCost => {
                    for a in 0..na {
                        keys.extend((0..nk).map(|k| VarKey {
                            family,
                            arc: Some(a),
                            commodity: Some(k),
                        }))
                    }
                }
            }
        }
        keys
    }

    fn check_shape(&self, instance: &DetInstance) -> Result<()> {
        if (instance.arc_count(), instance.commodity_count()) != (self.arcs, self.commodities) {
            return Err(Error::Shape(format!(
                "selection sized for {} arcs / {} commodities, instance has {} / {}",
                self.arcs,
                self.commodities,
                instance.arc_count(),
                instance.commodity_count()
            )));
        }
        if self.contains(Family::ComCapacity) && !instance.uses_com_capacity() {
            return Err(Error::Config(
                "commodity capacities selected for randomization but the instance has none".into(),
            ));
        }
        Ok(())
    }
}

/// Base values of the selected parameters in canonical order.
pub fn flatten(instance: &DetInstance, selection: &RandomizationSelection) -> Result<Vec<f64>> {
    selection.check_shape(instance)?;
    let mut out = Vec::with_capacity(selection.variable_count());
    for family in selection.families() {
        match family {
            Family::Demand => out.extend(instance.commodities.iter().map(|c| c.demand)),
            Family::ArcCapacity => out.extend_from_slice(&instance.capacity),
            Family::ComCapacity => {
                out.extend_from_slice(instance.com_capacity.as_deref().unwrap_or_default())
            }
            Family::FixedCost => out.extend_from_slice(&instance.fixed_cost),
            Family::VarCost => out.extend_from_slice(&instance.var_cost),
        }
    }
    Ok(out)
}

/// Copy of `base` with the selected parameters overwritten from `values`
/// (inverse of [`flatten`]).
pub fn unflatten(
    base: &DetInstance,
    selection: &RandomizationSelection,
    values: &[f64],
) -> Result<DetInstance> {
    selection.check_shape(base)?;
    if values.len() != selection.variable_count() {
        return Err(Error::Shape(format!(
            "scenario column has {} values, selection has {} variables",
            values.len(),
            selection.variable_count()
        )));
    }
    let mut out = base.clone();
    let mut rest = values;
    let mut take = |len: usize| {
        let (head, tail) = rest.split_at(len);
        rest = tail;
        head
    };
    let (na, nk) = (base.arc_count(), base.commodity_count());
    for family in selection.families() {
        match family {
            Family::Demand => {
                for (c, &d) in out.commodities.iter_mut().zip(take(nk)) {
                    c.demand = d;
                }
            }
            Family::ArcCapacity => out.capacity.copy_from_slice(take(na)),
            Family::ComCapacity => {
                let src = take(na * nk);
                if let Some(b) = out.com_capacity.as_mut() {
                    b.copy_from_slice(src);
                }
            }
            Family::FixedCost => out.fixed_cost.copy_from_slice(take(na)),
            Family::VarCost => out.var_cost.copy_from_slice(take(na * nk)),
        }
    }
    Ok(out)
}

/// Realized values of the randomized variables: row = variable (canonical
/// order), column = scenario. Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    probabilities: Vec<f64>,
}

pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

impl ScenarioMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("scenario matrix needs at least one row and one column".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values for a {rows}x{cols} scenario matrix",
                values.len()
            )));
        }
        check_probabilities(&probabilities, cols, PROBABILITY_SUM_TOL)?;
        Ok(ScenarioMatrix {
            rows,
            cols,
            values,
            probabilities,
        })
    }

    pub fn equiprobable(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(rows, cols, values, equal_probabilities(cols))
    }

    pub fn variable_count(&self) -> usize {
        self.rows
    }

    pub fn scenario_count(&self) -> usize {
        self.cols
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, t: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.values[i * self.cols + t]).collect()
    }

    pub fn get(&self, i: usize, t: usize) -> f64 {
        self.values[i * self.cols + t]
    }

    /// Keep the listed columns (in the given order) and rescale their
    /// probabilities to sum to one.
    pub fn select_columns(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyResult);
        }
        let mut values = Vec::with_capacity(self.rows * keep.len());
        for i in 0..self.rows {
            let row = self.row(i);
            values.extend(keep.iter().map(|&t| row[t]));
        }
        let kept: Vec<f64> = keep.iter().map(|&t| self.probabilities[t]).collect();
        let total: f64 = kept.iter().sum();
        let probabilities = if keep.len() == self.cols {
            kept
        } else {
            kept.iter().map(|p| p / total).collect()
        };
        ScenarioMatrix::new(self.rows, keep.len(), values, probabilities)
    }
}

pub fn equal_probabilities(count: usize) -> Vec<f64> {
    vec![1.0 / count as f64; count]
}

pub(crate) fn check_probabilities(probs: &[f64], expected: usize, tol: f64) -> Result<()> {
    if probs.len() != expected {
        return Err(Error::Shape(format!(
            "{} probabilities for {expected} scenarios",
            probs.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Argument(format!("probability {p} is not strictly positive")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::Argument(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Two nodes, one arc 0 -> 1, one commodity 0 -> 1.
    pub fn tiny(capacity: f64, demand: f64) -> DetInstance {
        DetInstance {
            graph: Graph {
                node_count: 2,
                arcs: vec![Arc { tail: 0, head: 1 }],
            },
            commodities: vec![Commodity {
                origin: 0,
                destination: 1,
                demand,
            }],
            fixed_cost: vec![10.0],
            capacity: vec![capacity],
            var_cost: vec![1.0],
            com_capacity: None,
        }
    }

    /// `arcs` arcs on a ring-ish pattern over `nodes` nodes with `coms` commodities.
    pub fn shaped(nodes: usize, arcs: usize, coms: usize) -> DetInstance {
        let mut graph = Graph::new(nodes);
        let mut i = 0;
        while graph.arc_count() < arcs {
            let tail = i % nodes;
            let head = (i / nodes + 1 + tail) % nodes;
            if head != tail {
                graph.add_arc(tail, head);
            }
            i += 1;
        }
        let commodities = (0..coms)
            .map(|k| Commodity {
                origin: k % nodes,
                destination: (k + 1) % nodes,
                demand: 10.0 + k as f64,
            })
            .collect();
        DetInstance {
            graph,
            commodities,
            fixed_cost: (0..arcs).map(|a| 100.0 + a as f64).collect(),
            capacity: (0..arcs).map(|a| 50.0 + a as f64).collect(),
            var_cost: (0..arcs * coms).map(|i| 1.0 + (i % 7) as f64).collect(),
            com_capacity: None,
        }
    }
}
