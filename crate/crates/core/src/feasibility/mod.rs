//! Second-stage feasibility of scenarios with every arc open.
//!
//! Each scenario is turned into a phase-1 LP: flow conservation rows get a
//! nonnegative slack pair `(s+, s-)`, bundle rows keep `sum_k x <= u`, and
//! commodity capacities become variable upper bounds. The scenario is
//! feasible when the total slack can be driven to (numerically) zero.

mod simplex;

pub use simplex::{
    primal_residual, solve, LpProblem, LpSolution, LpStatus, RowSense, BLAND_AFTER, MAX_PIVOTS,
    REINVERT_EVERY,
};

use crate::error::{Error, Result};
use crate::model::{node_balance, total_volume, unflatten, DetInstance, RandomizationSelection, ScenarioMatrix};

/// Relative phase-1 objective below which a scenario counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioCheck {
    pub scenario: usize,
    pub feasible: bool,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    pub tested: usize,
    pub rejected: usize,
    pub per_scenario: Vec<ScenarioCheck>,
}

impl FeasibilityReport {
    pub fn retained(&self) -> usize {
        self.tested - self.rejected
    }
}

pub fn scenario_instance(
    base: &DetInstance,
    selection: &RandomizationSelection,
    column: &[f64],
) -> Result<DetInstance> {
    unflatten(base, selection, column)
}

/// Variable layout of the LP built by [`build_feasibility_lp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibilityLayout {
    pub arcs: usize,
    pub commodities: usize,
    pub nodes: usize,
}

impl FeasibilityLayout {
    pub fn of(instance: &DetInstance) -> Self {
        FeasibilityLayout {
            arcs: instance.arc_count(),
            commodities: instance.commodity_count(),
            nodes: instance.node_count(),
        }
    }

    pub fn flow(&self, arc: usize, commodity: usize) -> usize {
        arc * self.commodities + commodity
    }

    pub fn flow_count(&self) -> usize {
        self.arcs * self.commodities
    }

    /// `(s+, s-)` of conservation row (node, commodity).
    pub fn slacks(&self, node: usize, commodity: usize) -> (usize, usize) {
        let base = self.flow_count() + 2 * (commodity * self.nodes + node);
        (base, base + 1)
    }

    pub fn variable_count(&self) -> usize {
        self.flow_count() + 2 * self.nodes * self.commodities
    }
}

pub fn build_feasibility_lp(instance: &DetInstance) -> LpProblem {
    let lay = FeasibilityLayout::of(instance);
    let n = lay.variable_count();
    let mut rows = Vec::with_capacity(lay.nodes * lay.commodities + lay.arcs);
    let mut senses = Vec::with_capacity(rows.capacity());
    let mut rhs = Vec::with_capacity(rows.capacity());
    let out_arcs = instance.graph.out_arcs();
    let in_arcs = instance.graph.in_arcs();
    for k in 0..lay.commodities {
        let w = node_balance(instance, k, None).expect("commodity index in range");
        for i in 0..lay.nodes {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(out_arcs[i].len() + in_arcs[i].len() + 2);
            row.extend(out_arcs[i].iter().map(|&a| (lay.flow(a, k), 1.0)));
            row.extend(in_arcs[i].iter().map(|&a| (lay.flow(a, k), -1.0)));
            let (sp, sm) = lay.slacks(i, k);
            row.push((sp, 1.0));
            row.push((sm, -1.0));
            rows.push(row);
            senses.push(RowSense::Eq);
            rhs.push(w[i]);
        }
    }
    for a in 0..lay.arcs {
        rows.push((0..lay.commodities).map(|k| (lay.flow(a, k), 1.0)).collect());
        senses.push(RowSense::Le);
        rhs.push(instance.capacity[a]);
    }
    let mut upper = vec![f64::INFINITY; n];
    if let Some(b) = &instance.com_capacity {
        upper[..lay.flow_count()].copy_from_slice(b);
    }
    let mut objective = vec![0.0; n];
    objective[lay.flow_count()..].iter_mut().for_each(|c| *c = 1.0);
    LpProblem {
        num_vars: n,
        objective,
        rows,
        senses,
        rhs,
        lower: vec![0.0; n],
        upper,
        tolerance_scale: total_volume(instance),
    }
}

/// `(feasible, phase-1 objective)`.
///
/// An LP whose own constraints admit no point (e.g. a negative capacity)
/// reports `(false, inf)`.
pub fn check_feasible(lp: &LpProblem) -> Result<(bool, f64)> {
    let sol = solve(lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok((false, f64::INFINITY)),
        LpStatus::Unbounded => Err(Error::Argument("feasibility LP is unbounded".into())),
        LpStatus::Optimal => {
            let threshold = FEASIBILITY_TOL * lp.tolerance_scale.max(1.0);
            let resid = primal_residual(lp, &sol.x);
            if resid > threshold {
                log::warn!("LP solution violates constraints by {resid:e}");
            }
            let obj = sol.objective.max(0.0);
            Ok((obj <= threshold, obj))
        }
    }
}

/// Check every scenario and keep the feasible ones, in order, with
/// probabilities rescaled to sum to one.
pub fn filter(
    base: &DetInstance,
    selection: &RandomizationSelection,
    scenarios: &ScenarioMatrix,
) -> Result<(ScenarioMatrix, FeasibilityReport)> {
    if scenarios.variable_count() != selection.variable_count() {
        return Err(Error::Shape(format!(
            "scenario matrix has {} variables, selection expects {}",
            scenarios.variable_count(),
            selection.variable_count()
        )));
    }
    let mut report = FeasibilityReport::default();
    let mut keep = Vec::new();
    for t in 0..scenarios.scenario_count() {
        let inst = scenario_instance(base, selection, &scenarios.column(t))?;
        let (feasible, objective) = check_feasible(&build_feasibility_lp(&inst))?;
        report.tested += 1;
        if feasible {
            keep.push(t);
        } else {
            report.rejected += 1;
            log::debug!("scenario {} rejected (phase-1 objective {objective:e})", t + 1);
        }
        report.per_scenario.push(ScenarioCheck {
            scenario: t,
            feasible,
            objective,
        });
    }
    if keep.is_empty() {
        return Err(Error::EmptyResult);
    }
    let retained = if keep.len() == scenarios.scenario_count() {
        scenarios.clone()
    } else {
        scenarios.select_columns(&keep)?
    };
    Ok((retained, report))
}
