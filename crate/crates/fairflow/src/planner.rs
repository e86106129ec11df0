//! Assembles and solves the two planning programs.
//!
//! Both programs share the same flow polytope: one commodity per demand on
//! every arc, plus empty-vehicle rebalancing flows on car arcs, coupled by
//! per-node flow conservation, car-layer vehicle conservation and a fleet
//! capacity budget.
//!
//! * **Minimum travel time** minimises total user travel time plus a small
//!   multiple of rebalancing time.
//! * **Minimum unfairness** adds one threshold-excess variable per demand
//!   (the minutes by which the demand's average travel time exceeds the
//!   accessibility threshold) and minimises the population-weighted excess,
//!   plus a small multiple of the time objective as a tie-breaker.
//!
//! All quantities are minutes and users per minute, so `time × flow` terms
//! are vehicle counts.

use crate::lp::{
    solve_simplex, LpError, LpModel, LpSolution, LpStatus, Relation, SimplexOptions,
};
use crate::network::Layer;
use crate::scenario::{DemandId, RegionId, Scenario};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("no feasible plan exists{}", infeasible_detail(.unroutable))]
    Infeasible { unroutable: Vec<DemandId> },
    #[error("iteration limit reached after {iterations} pivots")]
    IterationLimit { iterations: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal: {0}")]
    Internal(String),
    #[error("{file} line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("solution does not match the scenario: {0}")]
    Mismatch(String),
}

fn infeasible_detail(unroutable: &[DemandId]) -> String {
    if unroutable.is_empty() {
        " (the fleet capacity is too tight for the demands)".to_string()
    } else {
        let ids: Vec<String> = unroutable.iter().map(|d| d.to_string()).collect();
        format!(
            " (demands {} have no route from origin to destination)",
            ids.join(", ")
        )
    }
}

/// Which program a solution optimises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanObjective {
    MinTime,
    MinUnfairness,
}

impl PlanObjective {
    pub fn tag(self) -> &'static str {
        match self {
            PlanObjective::MinTime => "time",
            PlanObjective::MinUnfairness => "fairness",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "time" => Some(PlanObjective::MinTime),
            "fairness" => Some(PlanObjective::MinUnfairness),
            _ => None,
        }
    }
}

/// Maps (demand, arc) pairs, rebalancing arcs and excess variables to LP
/// column indices.
///
/// Layout: demand flows first (`demand_pos * num_arcs + arc_pos`), then one
/// rebalancing variable per car arc, then (fairness program only) one
/// threshold-excess variable per demand.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableLayout {
    pub num_demands: usize,
    pub num_arcs: usize,
    /// Arc positions of car-layer arcs, ascending.
    pub car_arcs: Vec<usize>,
    /// Whether threshold-excess variables exist (fairness program).
    pub with_excess: bool,
}

impl VariableLayout {
    pub fn new(scenario: &Scenario, with_excess: bool) -> Self {
        VariableLayout {
            num_demands: scenario.demands().len(),
            num_arcs: scenario.graph.num_arcs(),
            car_arcs: scenario.graph.layer_arc_positions(Layer::Car),
            with_excess,
        }
    }

    pub fn flow_var(&self, demand_pos: usize, arc_pos: usize) -> usize {
        debug_assert!(demand_pos < self.num_demands && arc_pos < self.num_arcs);
        demand_pos * self.num_arcs + arc_pos
    }

    /// Rebalancing variable for `self.car_arcs[car_idx]`.
    pub fn reb_var(&self, car_idx: usize) -> usize {
        debug_assert!(car_idx < self.car_arcs.len());
        self.num_demands * self.num_arcs + car_idx
    }

    pub fn excess_var(&self, demand_pos: usize) -> usize {
        debug_assert!(self.with_excess && demand_pos < self.num_demands);
        self.num_demands * self.num_arcs + self.car_arcs.len() + demand_pos
    }

    pub fn num_vars(&self) -> usize {
        self.num_demands * self.num_arcs
            + self.car_arcs.len()
            + if self.with_excess { self.num_demands } else { 0 }
    }
}

/// Flow-conservation rows: for every demand `m` and node `j`,
/// `outflow - inflow = rate_m * (1[j = origin] - 1[j = destination])`.
/// Every node gets a row, connected to the demand or not.
fn add_flow_balance_rows(model: &mut LpModel, scenario: &Scenario, layout: &VariableLayout) {
    let graph = &scenario.graph;
    for (m, demand) in scenario.demands().iter().enumerate() {
        let origin = graph.node_pos(demand.origin).expect("validated");
        let destination = graph.node_pos(demand.destination).expect("validated");
        for j in 0..graph.num_nodes() {
            let mut coeffs = Vec::new();
            for &a in graph.out_arcs(j) {
                coeffs.push((layout.flow_var(m, a), 1.0));
            }
            for &a in graph.in_arcs(j) {
                coeffs.push((layout.flow_var(m, a), -1.0));
            }
            let rhs = if j == origin {
                demand.rate
            } else if j == destination {
                -demand.rate
            } else {
                0.0
            };
            model.add_row(format!("B{m}N{j}"), coeffs, Relation::Eq, rhs);
        }
    }
}

/// Vehicle-conservation rows: at every car node, inbound car-arc flow
/// (users plus rebalancing) equals outbound car-arc flow.
fn add_car_balance_rows(model: &mut LpModel, scenario: &Scenario, layout: &VariableLayout) {
    let graph = &scenario.graph;
    let car_idx_of_arc: std::collections::HashMap<usize, usize> = layout
        .car_arcs
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i))
        .collect();
    for j in 0..graph.num_nodes() {
        if graph.nodes()[j].layer != Layer::Car {
            continue;
        }
        let mut coeffs = Vec::new();
        for &a in graph.out_arcs(j) {
            if let Some(&i) = car_idx_of_arc.get(&a) {
                coeffs.push((layout.reb_var(i), 1.0));
                for m in 0..layout.num_demands {
                    coeffs.push((layout.flow_var(m, a), 1.0));
                }
            }
        }
        for &a in graph.in_arcs(j) {
            if let Some(&i) = car_idx_of_arc.get(&a) {
                coeffs.push((layout.reb_var(i), -1.0));
                for m in 0..layout.num_demands {
                    coeffs.push((layout.flow_var(m, a), -1.0));
                }
            }
        }
        model.add_row(format!("C{j}"), coeffs, Relation::Eq, 0.0);
    }
}

/// Fleet budget: total vehicle-time on car arcs (users plus rebalancing)
/// may not exceed the fleet size.
fn add_fleet_cap_row(model: &mut LpModel, scenario: &Scenario, layout: &VariableLayout) {
    let mut coeffs = Vec::new();
    for (i, &a) in layout.car_arcs.iter().enumerate() {
        let t = scenario.graph.arcs()[a].travel_time_min;
        coeffs.push((layout.reb_var(i), t));
        for m in 0..layout.num_demands {
            coeffs.push((layout.flow_var(m, a), t));
        }
    }
    model.add_row("FLEET", coeffs, Relation::Le, scenario.params.fleet_cap);
}

/// Threshold rows: for every demand, average travel time minus its excess
/// variable stays below the threshold —
/// `sum_a (t_a / rate_m) x_a - excess_m <= t_max`.
fn add_excess_rows(model: &mut LpModel, scenario: &Scenario, layout: &VariableLayout) {
    for (m, demand) in scenario.demands().iter().enumerate() {
        let mut coeffs = Vec::new();
        for (a, arc) in scenario.graph.arcs().iter().enumerate() {
            if arc.travel_time_min != 0.0 {
                coeffs.push((layout.flow_var(m, a), arc.travel_time_min / demand.rate));
            }
        }
        coeffs.push((layout.excess_var(m), -1.0));
        model.add_row(format!("T{m}"), coeffs, Relation::Le, scenario.params.t_max_min);
    }
}

/// Adds the travel-time objective scaled by `weight`: user flow time plus
/// `gamma_reb` times rebalancing time.
fn add_time_objective(
    model: &mut LpModel,
    scenario: &Scenario,
    layout: &VariableLayout,
    weight: f64,
) {
    for (a, arc) in scenario.graph.arcs().iter().enumerate() {
        if arc.travel_time_min == 0.0 {
            continue;
        }
        for m in 0..layout.num_demands {
            model.add_objective(layout.flow_var(m, a), weight * arc.travel_time_min);
        }
    }
    for (i, &a) in layout.car_arcs.iter().enumerate() {
        let t = scenario.graph.arcs()[a].travel_time_min;
        if t != 0.0 {
            model.add_objective(layout.reb_var(i), weight * scenario.params.gamma_reb * t);
        }
    }
}

/// Weight of each demand's excess in the unfairness measure:
/// `(region population / total population) * (rate / region rate)`.
/// Zero when the total population or the region rate is zero.
pub fn demand_unfairness_weights(scenario: &Scenario) -> Vec<f64> {
    let total_pop: f64 = scenario.regions().iter().map(|r| r.population).sum();
    let mut weights = vec![0.0; scenario.demands().len()];
    if total_pop == 0.0 {
        return weights;
    }
    for region in scenario.regions() {
        let region_rate: f64 = region
            .demand_ids
            .iter()
            .map(|&d| scenario.demand(d).expect("indexed").rate)
            .sum();
        if region_rate == 0.0 {
            continue;
        }
        let pop_share = region.population / total_pop;
        for &d in &region.demand_ids {
            let pos = scenario.demand_pos(d).expect("indexed");
            weights[pos] = pop_share * scenario.demands()[pos].rate / region_rate;
        }
    }
    weights
}

fn name_variables(model: &mut LpModel, layout: &VariableLayout) {
    for m in 0..layout.num_demands {
        for a in 0..layout.num_arcs {
            model.set_var_name(layout.flow_var(m, a), format!("F{m}A{a}"));
        }
    }
    for (i, &a) in layout.car_arcs.iter().enumerate() {
        model.set_var_name(layout.reb_var(i), format!("R{a}"));
    }
    if layout.with_excess {
        for m in 0..layout.num_demands {
            model.set_var_name(layout.excess_var(m), format!("E{m}"));
        }
    }
}

/// Builds the minimum-travel-time program.
pub fn build_min_time_model(scenario: &Scenario) -> (LpModel, VariableLayout) {
    let layout = VariableLayout::new(scenario, false);
    let mut model = LpModel::new(layout.num_vars());
    name_variables(&mut model, &layout);
    add_flow_balance_rows(&mut model, scenario, &layout);
    add_car_balance_rows(&mut model, scenario, &layout);
    add_fleet_cap_row(&mut model, scenario, &layout);
    add_time_objective(&mut model, scenario, &layout, 1.0);
    (model, layout)
}

/// Builds the minimum-unfairness program.
pub fn build_min_unfairness_model(scenario: &Scenario) -> (LpModel, VariableLayout) {
    let layout = VariableLayout::new(scenario, true);
    let mut model = LpModel::new(layout.num_vars());
    name_variables(&mut model, &layout);
    add_flow_balance_rows(&mut model, scenario, &layout);
    add_car_balance_rows(&mut model, scenario, &layout);
    add_fleet_cap_row(&mut model, scenario, &layout);
    add_excess_rows(&mut model, scenario, &layout);
    let weights = demand_unfairness_weights(scenario);
    for (m, w) in weights.iter().enumerate() {
        if *w != 0.0 {
            model.add_objective(layout.excess_var(m), *w);
        }
    }
    add_time_objective(&mut model, scenario, &layout, scenario.params.gamma_time);
    (model, layout)
}

/// An optimal (or imported) plan: per-demand arc flows, rebalancing flows,
/// threshold excesses and the two headline measures.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    pub objective: PlanObjective,
    /// `demand_flows[demand_pos][arc_pos]`, users per minute.
    pub demand_flows: Vec<Vec<f64>>,
    /// Rebalancing flow per car arc, aligned with `VariableLayout::car_arcs`.
    pub reb_flows: Vec<f64>,
    /// Minutes by which each demand's average travel time exceeds the
    /// threshold. Taken from the program for the fairness objective,
    /// recomputed from the flows otherwise.
    pub excess_min: Vec<f64>,
    /// Total user travel time plus weighted rebalancing time
    /// (minutes × users/minute).
    pub j_time: f64,
    /// Population-weighted mean threshold excess, minutes.
    pub j_acc: f64,
    /// Objective value of the program that produced the solution.
    pub objective_value: f64,
    pub iterations: usize,
    /// `"simplex"` or `"import"`.
    pub solved_by: String,
}

/// Flow-level measures derived from a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMetrics {
    pub j_time: f64,
    pub j_acc: f64,
    /// Mean user travel time, minutes; rebalancing excluded.
    pub avg_travel_time_min: f64,
    /// Vehicle-time committed on car arcs (users + rebalancing), vehicles.
    pub fleet_usage: f64,
    pub region_unfairness: Vec<(RegionId, f64)>,
}

/// Average travel time of one demand under its flow vector, minutes.
pub fn demand_avg_time(scenario: &Scenario, demand_pos: usize, flows: &[f64]) -> f64 {
    let time: f64 = scenario
        .graph
        .arcs()
        .iter()
        .enumerate()
        .map(|(a, arc)| arc.travel_time_min * flows[a])
        .sum();
    time / scenario.demands()[demand_pos].rate
}

/// Threshold excess per demand recomputed from flows:
/// `max(0, avg travel time - t_max)`.
pub fn recompute_excess(scenario: &Scenario, demand_flows: &[Vec<f64>]) -> Vec<f64> {
    demand_flows
        .iter()
        .enumerate()
        .map(|(m, flows)| {
            (demand_avg_time(scenario, m, flows) - scenario.params.t_max_min).max(0.0)
        })
        .collect()
}

/// Per-region unfairness: rate-weighted mean excess of the region's demands
/// (zero for regions without demand).
pub fn region_unfairness(scenario: &Scenario, excess_min: &[f64]) -> Vec<(RegionId, f64)> {
    scenario
        .regions()
        .iter()
        .map(|region| {
            let mut rate = 0.0;
            let mut weighted = 0.0;
            for &d in &region.demand_ids {
                let pos = scenario.demand_pos(d).expect("indexed");
                rate += scenario.demands()[pos].rate;
                weighted += scenario.demands()[pos].rate * excess_min[pos];
            }
            let u = if rate == 0.0 { 0.0 } else { weighted / rate };
            (region.id, u)
        })
        .collect()
}

/// Population-weighted mean of the per-region unfairness values.
pub fn accessibility_unfairness(scenario: &Scenario, excess_min: &[f64]) -> f64 {
    let total_pop: f64 = scenario.regions().iter().map(|r| r.population).sum();
    if total_pop == 0.0 {
        return 0.0;
    }
    region_unfairness(scenario, excess_min)
        .iter()
        .zip(scenario.regions())
        .map(|(&(_, u), region)| region.population * u)
        .sum::<f64>()
        / total_pop
}

fn time_objective_value(scenario: &Scenario, layout: &VariableLayout, sol: &FlowSolution) -> f64 {
    let arcs = scenario.graph.arcs();
    let user_time: f64 = sol
        .demand_flows
        .iter()
        .map(|flows| {
            arcs.iter()
                .enumerate()
                .map(|(a, arc)| arc.travel_time_min * flows[a])
                .sum::<f64>()
        })
        .sum();
    let reb_time: f64 = layout
        .car_arcs
        .iter()
        .zip(&sol.reb_flows)
        .map(|(&a, &flow)| arcs[a].travel_time_min * flow)
        .sum();
    user_time + scenario.params.gamma_reb * reb_time
}

/// Derives flow metrics from a solution.
pub fn flow_metrics(scenario: &Scenario, sol: &FlowSolution) -> FlowMetrics {
    let layout = VariableLayout::new(scenario, false);
    let arcs = scenario.graph.arcs();
    let user_time: f64 = sol
        .demand_flows
        .iter()
        .map(|flows| {
            arcs.iter()
                .enumerate()
                .map(|(a, arc)| arc.travel_time_min * flows[a])
                .sum::<f64>()
        })
        .sum();
    let mut fleet_usage = 0.0;
    for (i, &a) in layout.car_arcs.iter().enumerate() {
        let mut flow = sol.reb_flows[i];
        for m in 0..sol.demand_flows.len() {
            flow += sol.demand_flows[m][a];
        }
        fleet_usage += arcs[a].travel_time_min * flow;
    }
    let total_rate = scenario.total_demand_rate();
    FlowMetrics {
        j_time: sol.j_time,
        j_acc: sol.j_acc,
        avg_travel_time_min: if total_rate == 0.0 { 0.0 } else { user_time / total_rate },
        fleet_usage,
        region_unfairness: region_unfairness(scenario, &sol.excess_min),
    }
}

/// Shapes a raw LP point into a [`FlowSolution`], computing the headline
/// measures.  Tiny negative flows from roundoff are clamped to zero.
pub fn solution_from_lp_point(
    scenario: &Scenario,
    layout: &VariableLayout,
    objective: PlanObjective,
    x: &[f64],
    iterations: usize,
    solved_by: &str,
) -> FlowSolution {
    let demand_flows: Vec<Vec<f64>> = (0..layout.num_demands)
        .map(|m| {
            (0..layout.num_arcs)
                .map(|a| x[layout.flow_var(m, a)].max(0.0))
                .collect()
        })
        .collect();
    let reb_flows: Vec<f64> = (0..layout.car_arcs.len())
        .map(|i| x[layout.reb_var(i)].max(0.0))
        .collect();
    let excess_min: Vec<f64> = if layout.with_excess {
        (0..layout.num_demands)
            .map(|m| x[layout.excess_var(m)].max(0.0))
            .collect()
    } else {
        recompute_excess(scenario, &demand_flows)
    };
    let mut sol = FlowSolution {
        objective,
        demand_flows,
        reb_flows,
        excess_min,
        j_time: 0.0,
        j_acc: 0.0,
        objective_value: 0.0,
        iterations,
        solved_by: solved_by.to_string(),
    };
    sol.j_time = time_objective_value(scenario, layout, &sol);
    sol.j_acc = accessibility_unfairness(scenario, &sol.excess_min);
    sol.objective_value = match objective {
        PlanObjective::MinTime => sol.j_time,
        PlanObjective::MinUnfairness => sol.j_acc + scenario.params.gamma_time * sol.j_time,
    };
    sol
}

/// Demands whose destination is unreachable from their origin.
fn unroutable_demands(scenario: &Scenario) -> Vec<DemandId> {
    let graph = &scenario.graph;
    let mut out = Vec::new();
    for demand in scenario.demands() {
        let origin = graph.node_pos(demand.origin).expect("validated");
        let target = graph.node_pos(demand.destination).expect("validated");
        let mut seen = vec![false; graph.num_nodes()];
        let mut stack = vec![origin];
        seen[origin] = true;
        let mut reached = false;
        while let Some(j) = stack.pop() {
            if j == target {
                reached = true;
                break;
            }
            for &a in graph.out_arcs(j) {
                let head = graph.node_pos(graph.arcs()[a].head).expect("built");
                if !seen[head] {
                    seen[head] = true;
                    stack.push(head);
                }
            }
        }
        if !reached {
            out.push(demand.id);
        }
    }
    out
}

fn run(
    scenario: &Scenario,
    objective: PlanObjective,
    opts: &SimplexOptions,
) -> Result<FlowSolution, PlannerError> {
    let (model, layout) = match objective {
        PlanObjective::MinTime => build_min_time_model(scenario),
        PlanObjective::MinUnfairness => build_min_unfairness_model(scenario),
    };
    let lp = solve_simplex(&model, opts)?;
    match lp.status {
        LpStatus::Optimal => Ok(solution_from_lp_point(
            scenario,
            &layout,
            objective,
            &lp.x,
            lp.iterations,
            "simplex",
        )),
        LpStatus::Infeasible => Err(PlannerError::Infeasible {
            unroutable: unroutable_demands(scenario),
        }),
        LpStatus::Unbounded => Err(PlannerError::Internal(
            "planning program reported unbounded, which cannot happen with non-negative times"
                .to_string(),
        )),
        LpStatus::IterationLimit => Err(PlannerError::IterationLimit {
            iterations: lp.iterations,
        }),
    }
}

/// Solves the minimum-travel-time program.
pub fn solve_min_time(scenario: &Scenario) -> Result<FlowSolution, PlannerError> {
    run(scenario, PlanObjective::MinTime, &SimplexOptions::default())
}

/// Solves the minimum-unfairness program.
pub fn solve_min_unfairness(scenario: &Scenario) -> Result<FlowSolution, PlannerError> {
    run(scenario, PlanObjective::MinUnfairness, &SimplexOptions::default())
}

/// Solves either program with explicit simplex options.
pub fn solve_with_options(
    scenario: &Scenario,
    objective: PlanObjective,
    opts: &SimplexOptions,
) -> Result<FlowSolution, PlannerError> {
    run(scenario, objective, opts)
}

/// Turns an externally produced LP point (e.g. an imported MPS solution)
/// into a flow solution for the given objective.
pub fn solution_from_import(
    scenario: &Scenario,
    objective: PlanObjective,
    lp: &LpSolution,
) -> Result<FlowSolution, PlannerError> {
    let layout = VariableLayout::new(scenario, objective == PlanObjective::MinUnfairness);
    if lp.x.len() != layout.num_vars() {
        return Err(PlannerError::Mismatch(format!(
            "expected {} variables, the imported point has {}",
            layout.num_vars(),
            lp.x.len()
        )));
    }
    Ok(solution_from_lp_point(
        scenario, &layout, objective, &lp.x, 0, "import",
    ))
}

const SOLUTION_VERSION: &str = "fairflow solution v1";

/// Renders a solution as delimited text: a versioned header, then one
/// `demand_id,arc_id,flow` row per positive user flow and one
/// `R,arc_id,flow` row per positive rebalancing flow.
pub fn write_solution_text(
    scenario: &Scenario,
    sol: &FlowSolution,
    manifest_id: Option<&str>,
) -> String {
    let layout = VariableLayout::new(scenario, false);
    let mut out = String::new();
    out.push_str(&format!("# {SOLUTION_VERSION}\n"));
    out.push_str(&format!("# manifest {}\n", manifest_id.unwrap_or("none")));
    out.push_str(&format!("# objective {}\n", sol.objective.tag()));
    out.push_str("demand_id,arc_id,flow\n");
    for (m, demand) in scenario.demands().iter().enumerate() {
        for (a, arc) in scenario.graph.arcs().iter().enumerate() {
            let flow = sol.demand_flows[m][a];
            if flow > 0.0 {
                out.push_str(&format!("{},{},{}\n", demand.id, arc.id, flow));
            }
        }
    }
    for (i, &a) in layout.car_arcs.iter().enumerate() {
        let flow = sol.reb_flows[i];
        if flow > 0.0 {
            out.push_str(&format!("R,{},{}\n", scenario.graph.arcs()[a].id, flow));
        }
    }
    out
}

/// Parses [`write_solution_text`] output against a scenario.  Flows for
/// unmentioned pairs are zero; excesses and measures are recomputed.
pub fn read_solution_text(
    scenario: &Scenario,
    text: &str,
    file: &str,
) -> Result<FlowSolution, PlannerError> {
    let layout = VariableLayout::new(scenario, false);
    let parse_err = |line: usize, msg: String| PlannerError::Parse {
        file: file.to_string(),
        line,
        msg,
    };

    let mut objective = None;
    let mut saw_version = false;
    let mut saw_table_header = false;
    let mut demand_flows = vec![vec![0.0; layout.num_arcs]; layout.num_demands];
    let mut reb_flows = vec![0.0; layout.car_arcs.len()];
    let car_idx_of_arc: std::collections::HashMap<usize, usize> = layout
        .car_arcs
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i))
        .collect();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if comment == SOLUTION_VERSION {
                saw_version = true;
            } else if let Some(tag) = comment.strip_prefix("objective ") {
                objective = Some(PlanObjective::from_tag(tag.trim()).ok_or_else(|| {
                    parse_err(lineno, format!("unknown objective tag `{}`", tag.trim()))
                })?);
            }
            continue;
        }
        if !saw_version {
            return Err(parse_err(
                lineno,
                format!("missing `# {SOLUTION_VERSION}` header"),
            ));
        }
        if !saw_table_header {
            if line != "demand_id,arc_id,flow" {
                return Err(parse_err(
                    lineno,
                    format!("expected `demand_id,arc_id,flow`, found `{line}`"),
                ));
            }
            saw_table_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 comma-separated fields, found {}", fields.len()),
            ));
        }
        let arc_id = fields[1]
            .parse::<u32>()
            .map_err(|_| parse_err(lineno, format!("invalid arc id `{}`", fields[1])))?;
        let arc_pos = scenario
            .graph
            .arc_pos(crate::network::ArcId(arc_id))
            .ok_or_else(|| {
                PlannerError::Mismatch(format!("{file} line {lineno}: unknown arc id {arc_id}"))
            })?;
        let flow: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid flow `{}`", fields[2])))?;
        if !flow.is_finite() || flow < 0.0 {
            return Err(parse_err(lineno, format!("flow must be finite and >= 0, got {flow}")));
        }
        if fields[0] == "R" {
            let &i = car_idx_of_arc.get(&arc_pos).ok_or_else(|| {
                PlannerError::Mismatch(format!(
                    "{file} line {lineno}: rebalancing flow on non-car arc {arc_id}"
                ))
            })?;
            reb_flows[i] = flow;
        } else {
            let demand_id = fields[0]
                .parse::<u32>()
                .map_err(|_| parse_err(lineno, format!("invalid demand id `{}`", fields[0])))?;
            let m = scenario.demand_pos(DemandId(demand_id)).ok_or_else(|| {
                PlannerError::Mismatch(format!(
                    "{file} line {lineno}: unknown demand id {demand_id}"
                ))
            })?;
            demand_flows[m][arc_pos] = flow;
        }
    }
    if !saw_table_header {
        return Err(parse_err(1, "missing flow table".to_string()))
    }
    let objective = objective
        .ok_or_else(|| parse_err(1, "missing `# objective` header".to_string()))?;

    let excess_min = recompute_excess(scenario, &demand_flows);
    let mut sol = FlowSolution {
        objective,
        demand_flows,
        reb_flows,
        excess_min,
        j_time: 0.0,
        j_acc: 0.0,
        objective_value: 0.0,
        iterations: 0,
        solved_by: "import".to_string(),
    };
    sol.j_time = time_objective_value(scenario, &layout, &sol);
    sol.j_acc = accessibility_unfairness(scenario, &sol.excess_min);
    sol.objective_value = match objective {
        PlanObjective::MinTime => sol.j_time,
        PlanObjective::MinUnfairness => sol.j_acc + scenario.params.gamma_time * sol.j_time,
    };
    Ok(sol)
}
