//! Decomposes an optimal flow into per-user paths.
//!
//! An arc-flow solution fixes how much of each demand rides every arc, but
//! users travel on whole paths, and a demand can meet the accessibility
//! threshold on average while every actual path misses it.  This module
//! takes one demand's support subgraph (the arcs its flow actually uses),
//! cancels any circulations, enumerates the origin–destination paths inside
//! the support and picks path fractions that reproduce the arc flow exactly
//! while minimising the fraction-weighted threshold excess of the paths.

use crate::lp::{solve_simplex, LpError, LpModel, LpStatus, Relation, SimplexOptions};
use crate::network::IntermodalGraph;
use crate::planner::{accessibility_unfairness, FlowSolution};
use crate::scenario::{DemandId, Scenario};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("demand {demand} has no flow to decompose")]
    EmptySupport { demand: DemandId },
    #[error("demand {demand}: the supported arcs contain no origin-destination path")]
    NoPathInSupport { demand: DemandId },
    #[error("demand {demand} uses more than {cap} paths; raise the path cap to decompose it")]
    PathExplosion { demand: DemandId, cap: usize },
    #[error("demand {demand}: no path combination reproduces the arc flow (residual {residual:e})")]
    ReconstructionInfeasible { demand: DemandId, residual: f64 },
    #[error("allocation is incomplete; demands {} failed", format_ids(.failed))]
    IncompleteAllocation { failed: Vec<DemandId> },
    #[error(transparent)]
    Lp(#[from] LpError),
}

fn format_ids(ids: &[DemandId]) -> String {
    ids.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// The arcs one demand's flow actually uses, with flows normalised by the
/// demand rate (so a flow of 1.0 means the whole demand rides the arc).
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSubgraph {
    pub demand: DemandId,
    pub demand_pos: usize,
    /// `(arc position, normalised flow)`, ascending by arc position, every
    /// flow above the support tolerance.
    pub arcs: Vec<(usize, f64)>,
    pub origin_pos: usize,
    pub dest_pos: usize,
}

impl SupportSubgraph {
    /// Outgoing support-arc indices (into `self.arcs`) per node position.
    fn adjacency(&self, graph: &IntermodalGraph) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); graph.num_nodes()];
        for (i, &(a, _)) in self.arcs.iter().enumerate() {
            let tail = graph.node_pos(graph.arcs()[a].tail).expect("built");
            adj[tail].push(i);
        }
        adj
    }
}

/// What cycle cancellation removed from a support subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub cycles_removed: usize,
    /// Total normalised circulation flow subtracted.
    pub flow_removed: f64,
    /// Total `flow x cycle time` subtracted, minutes.
    pub time_mass_removed: f64,
}

impl CycleReport {
    fn none() -> Self {
        CycleReport {
            cycles_removed: 0,
            flow_removed: 0.0,
            time_mass_removed: 0.0,
        }
    }
}

/// One origin-to-destination route: arc positions in travel order.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPath {
    pub arcs: Vec<usize>,
    pub time_min: f64,
}

/// Path fractions for one demand: `fractions[i]` of the demand travels
/// `paths[i]`, fractions sum to one and reproduce the arc flow.
#[derive(Debug, Clone, PartialEq)]
pub struct PathAllocation {
    pub demand: DemandId,
    pub demand_pos: usize,
    pub paths: Vec<UserPath>,
    pub fractions: Vec<f64>,
    /// Fraction-weighted threshold excess of the paths, minutes.
    pub excess_min: f64,
    /// Worst absolute gap between reconstructed and given arc flow
    /// (normalised units).
    pub residual: f64,
    pub cycles: CycleReport,
}

impl PathAllocation {
    /// User rate on each path, users per minute.
    pub fn path_rates(&self, scenario: &Scenario) -> Vec<f64> {
        let rate = scenario.demands()[self.demand_pos].rate;
        self.fractions.iter().map(|f| f * rate).collect()
    }
}

#[derive(Debug, Clone)]
pub struct AllocOptions {
    /// Normalised flows at or below this are treated as zero.
    pub support_tol: f64,
    /// Abort a demand once it enumerates more paths than this.
    pub path_cap: usize,
    /// Threshold override; the scenario threshold applies when `None`.
    pub t_max_min: Option<f64>,
    pub simplex: SimplexOptions,
}

impl Default for AllocOptions {
    fn default() -> Self {
        AllocOptions {
            support_tol: 1e-9,
            path_cap: 100_000,
            t_max_min: None,
            simplex: SimplexOptions::default(),
        }
    }
}

/// Collects the arcs carrying more than `tol` of the demand (normalised by
/// its rate).
pub fn extract_support(
    scenario: &Scenario,
    sol: &FlowSolution,
    demand_pos: usize,
    tol: f64,
) -> SupportSubgraph {
    let demand = &scenario.demands()[demand_pos];
    let graph = &scenario.graph;
    let arcs = sol.demand_flows[demand_pos]
        .iter()
        .enumerate()
        .filter_map(|(a, &flow)| {
            let normalised = flow / demand.rate;
            (normalised > tol).then_some((a, normalised))
        })
        .collect();
    SupportSubgraph {
        demand: demand.id,
        demand_pos,
        arcs,
        origin_pos: graph.node_pos(demand.origin).expect("validated"),
        dest_pos: graph.node_pos(demand.destination).expect("validated"),
    }
}

/// Finds one directed cycle in the support, as indices into `support.arcs`,
/// lowest-numbered arcs first.
fn find_cycle(support: &SupportSubgraph, graph: &IntermodalGraph) -> Option<Vec<usize>> {
    let adj = support.adjacency(graph);
    let head_of = |i: usize| {
        let a = support.arcs[i].0;
        graph.node_pos(graph.arcs()[a].head).expect("built")
    };
    // 0 = unvisited, 1 = on the current DFS path, 2 = finished.
    let mut colour = vec![0u8; graph.num_nodes()];
    for root in 0..graph.num_nodes() {
        if colour[root] != 0 || adj[root].is_empty() {
            continue;
        }
        // (node, index into adj[node] of the next arc to try)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        let mut path_arcs: Vec<usize> = Vec::new();
        colour[root] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < adj[node].len() {
                let arc_idx = adj[node][*next];
                *next += 1;
                let head = head_of(arc_idx);
                match colour[head] {
                    0 => {
                        colour[head] = 1;
                        path_arcs.push(arc_idx);
                        stack.push((head, 0));
                    }
                    1 => {
                        // Back edge: the cycle is the path suffix from
                        // `head` plus this arc.
                        let mut cycle = vec![arc_idx];
                        let mut tail_node = node;
                        for &i in path_arcs.iter().rev() {
                            if tail_node == head {
                                break;
                            }
                            cycle.push(i);
                            let a = support.arcs[i].0;
                            tail_node = graph.node_pos(graph.arcs()[a].tail).expect("built");
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                colour[node] = 2;
                stack.pop();
                path_arcs.pop();
            }
        }
    }
    None
}

/// Removes circulations from the support: while a directed cycle exists,
/// subtracts its bottleneck flow from every cycle arc and drops the arcs
/// that reach zero.  Balanced origin-destination flow is untouched.
pub fn cancel_cycles(support: &mut SupportSubgraph, graph: &IntermodalGraph) -> CycleReport {
    let mut report = CycleReport::none();
    while let Some(cycle) = find_cycle(support, graph) {
        let bottleneck = cycle
            .iter()
            .map(|&i| support.arcs[i].1)
            .fold(f64::INFINITY, f64::min);
        let cycle_time: f64 = cycle
            .iter()
            .map(|&i| graph.arcs()[support.arcs[i].0].travel_time_min)
            .sum();
        for &i in &cycle {
            support.arcs[i].1 -= bottleneck;
        }
        support.arcs.retain(|&(_, flow)| flow > 0.0);
        report.cycles_removed += 1;
        report.flow_removed += bottleneck;
        report.time_mass_removed += bottleneck * cycle_time;
    }
    report
}

/// Enumerates every origin-destination path in the (cycle-free) support,
/// in ascending arc-position order.
pub fn enumerate_paths(
    support: &SupportSubgraph,
    graph: &IntermodalGraph,
    cap: usize,
) -> Result<Vec<UserPath>, PathError> {
    if support.arcs.is_empty() {
        return Err(PathError::EmptySupport { demand: support.demand });
    }
    let adj = support.adjacency(graph);
    let head_of = |i: usize| {
        let a = support.arcs[i].0;
        graph.node_pos(graph.arcs()[a].head).expect("built")
    };
    let mut paths = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(support.origin_pos, 0)];
    let mut arc_stack: Vec<usize> = Vec::new();
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        if node == support.dest_pos && arc_stack.last().is_some() && *next == 0 {
            if paths.len() == cap {
                return Err(PathError::PathExplosion {
                    demand: support.demand,
                    cap,
                });
            }
            let arcs: Vec<usize> = arc_stack.iter().map(|&i| support.arcs[i].0).collect();
            let time_min = arcs.iter().map(|&a| graph.arcs()[a].travel_time_min).sum();
            paths.push(UserPath { arcs, time_min });
            // Destination nodes have no outgoing support arcs to explore.
        }
        if *next < adj[node].len() {
            let arc_idx = adj[node][*next];
            *next += 1;
            stack.push((head_of(arc_idx), 0));
            arc_stack.push(arc_idx);
        } else {
            stack.pop();
            arc_stack.pop();
        }
    }
    if paths.is_empty() {
        return Err(PathError::NoPathInSupport { demand: support.demand });
    }
    Ok(paths)
}

/// Picks path fractions in `[0, 1]` that reproduce the support's arc flows
/// exactly, minimising the fraction-weighted threshold excess.
pub fn allocate_paths(
    scenario: &Scenario,
    support: &SupportSubgraph,
    paths: Vec<UserPath>,
    cycles: CycleReport,
    opts: &AllocOptions,
) -> Result<PathAllocation, PathError> {
    let t_max = opts.t_max_min.unwrap_or(scenario.params.t_max_min);
    let mut model = LpModel::new(paths.len());
    let arc_row_of: std::collections::HashMap<usize, usize> = support
        .arcs
        .iter()
        .enumerate()
        .map(|(row, &(a, _))| (a, row))
        .collect();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); support.arcs.len()];
    for (p, path) in paths.iter().enumerate() {
        model.set_var_name(p, format!("P{p}"));
        model.set_bounds(p, 0.0, 1.0);
        let excess = (path.time_min - t_max).max(0.0);
        if excess != 0.0 {
            model.add_objective(p, excess);
        }
        for &a in &path.arcs {
            rows[arc_row_of[&a]].push((p, 1.0));
        }
    }
    for (row, &(a, flow)) in support.arcs.iter().enumerate() {
        model.add_row(format!("A{a}"), rows[row].clone(), Relation::Eq, flow);
    }
    let lp = solve_simplex(&model, &opts.simplex)?;
    if lp.status != LpStatus::Optimal {
        let residual = worst_residual(support, &paths, &vec![0.0; paths.len()]);
        return Err(PathError::ReconstructionInfeasible {
            demand: support.demand,
            residual,
        });
    }
    let fractions: Vec<f64> = lp.x.iter().map(|&f| f.clamp(0.0, 1.0)).collect();
    let excess_min = paths
        .iter()
        .zip(&fractions)
        .map(|(path, f)| f * (path.time_min - t_max).max(0.0))
        .sum();
    let residual = worst_residual(support, &paths, &fractions);
    Ok(PathAllocation {
        demand: support.demand,
        demand_pos: support.demand_pos,
        paths,
        fractions,
        excess_min,
        residual,
        cycles,
    })
}

fn worst_residual(support: &SupportSubgraph, paths: &[UserPath], fractions: &[f64]) -> f64 {
    support
        .arcs
        .iter()
        .map(|&(a, flow)| {
            let reconstructed: f64 = paths
                .iter()
                .zip(fractions)
                .filter(|(path, _)| path.arcs.contains(&a))
                .map(|(_, f)| f)
                .sum();
            (reconstructed - flow).abs()
        })
        .fold(0.0, f64::max)
}

fn allocate_demand(
    scenario: &Scenario,
    sol: &FlowSolution,
    demand_pos: usize,
    opts: &AllocOptions,
) -> Result<PathAllocation, PathError> {
    let mut support = extract_support(scenario, sol, demand_pos, opts.support_tol);
    if support.arcs.is_empty() {
        return Err(PathError::EmptySupport {
            demand: scenario.demands()[demand_pos].id,
        });
    }
    let cycles = cancel_cycles(&mut support, &scenario.graph);
    let paths = enumerate_paths(&support, &scenario.graph, opts.path_cap)?;
    allocate_paths(scenario, &support, paths, cycles, opts)
}

/// Path decomposition of a whole solution, one entry per demand position.
#[derive(Debug)]
pub struct AllocationRun {
    pub per_demand: Vec<Result<PathAllocation, PathError>>,
    /// Sum of the per-demand path excesses over the demands that
    /// decomposed, minutes.
    pub total_excess_min: f64,
}

impl AllocationRun {
    pub fn allocations(&self) -> impl Iterator<Item = &PathAllocation> {
        self.per_demand.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn failed_demands(&self) -> Vec<DemandId> {
        self.per_demand
            .iter()
            .filter_map(|r| r.as_ref().err().and_then(demand_of_error))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.per_demand.iter().all(|r| r.is_ok())
    }
}

fn demand_of_error(err: &PathError) -> Option<DemandId> {
    match err {
        PathError::EmptySupport { demand }
        | PathError::NoPathInSupport { demand }
        | PathError::PathExplosion { demand, .. }
        | PathError::ReconstructionInfeasible { demand, .. } => Some(*demand),
        _ => None,
    }
}

/// Decomposes every demand of a solution into paths (demands in parallel,
/// results in demand order).
pub fn run_allocation(
    scenario: &Scenario,
    sol: &FlowSolution,
    opts: &AllocOptions,
) -> AllocationRun {
    let per_demand: Vec<Result<PathAllocation, PathError>> = (0..scenario.demands().len())
        .into_par_iter()
        .map(|m| allocate_demand(scenario, sol, m, opts))
        .collect();
    let total_excess_min = per_demand
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .map(|a| a.excess_min)
        .sum();
    AllocationRun {
        per_demand,
        total_excess_min,
    }
}

/// Population-weighted unfairness recomputed from path-level excesses
/// (the analogue of the flow-level measure, but with each demand's excess
/// taken over its actual paths).  Requires every demand to have decomposed.
pub fn path_unfairness_summary(
    scenario: &Scenario,
    run: &AllocationRun,
) -> Result<f64, PathError> {
    if !run.is_complete() {
        return Err(PathError::IncompleteAllocation {
            failed: run.failed_demands(),
        });
    }
    let excesses: Vec<f64> = run
        .per_demand
        .iter()
        .map(|r| r.as_ref().expect("checked complete").excess_min)
        .collect();
    Ok(accessibility_unfairness(scenario, &excesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Arc, ArcId, ArcKind, Layer, Node, NodeId};
    use crate::planner::{solve_min_time, PlanObjective};
    use crate::scenario::{Demand, Params, RegionId};
    use proptest::prelude::*;

    fn node(id: u32, layer: Layer) -> Node {
        Node { id: NodeId(id), layer, label: None }
    }

    fn arc(id: u32, tail: u32, head: u32, t: f64, kind: ArcKind) -> Arc {
        Arc {
            id: ArcId(id),
            tail: NodeId(tail),
            head: NodeId(head),
            travel_time_min: t,
            kind,
        }
    }

    fn params() -> Params {
        Params {
            fleet_cap: 100.0,
            t_max_min: 20.0,
            gamma_reb: 1e-3,
            gamma_time: 1e-3,
        }
    }

    fn scenario_from(graph: IntermodalGraph, demands: Vec<Demand>) -> Scenario {
        Scenario::new(graph, demands, vec![(RegionId(0), 100.0)], params()).unwrap()
    }

    fn demand(id: u32, origin: u32, dest: u32, rate: f64) -> Demand {
        Demand {
            id: DemandId(id),
            origin: NodeId(origin),
            destination: NodeId(dest),
            rate,
            region: RegionId(0),
        }
    }

    fn manual_solution(scenario: &Scenario, demand_flows: Vec<Vec<f64>>) -> FlowSolution {
        FlowSolution {
            objective: PlanObjective::MinTime,
            demand_flows,
            reb_flows: vec![
                0.0;
                scenario.graph.layer_arc_positions(Layer::Car).len()
            ],
            excess_min: vec![0.0; scenario.demands().len()],
            j_time: 0.0,
            j_acc: 0.0,
            objective_value: 0.0,
            iterations: 0,
            solved_by: "manual".to_string(),
        }
    }

    /// origin -> two parallel walk branches -> destination, 15 vs 25 min.
    fn diamond() -> Scenario {
        let graph = IntermodalGraph::build(
            vec![
                node(0, Layer::Origin),
                node(1, Layer::Walk),
                node(2, Layer::Walk),
                node(3, Layer::Destination),
            ],
            vec![
                arc(0, 0, 1, 5.0, ArcKind::Switch),
                arc(1, 0, 2, 5.0, ArcKind::Switch),
                arc(2, 1, 3, 10.0, ArcKind::Switch),
                arc(3, 2, 3, 20.0, ArcKind::Switch),
            ],
        )
        .unwrap();
        scenario_from(graph, vec![demand(0, 0, 3, 2.0)])
    }

    #[test]
    fn support_keeps_used_arcs_and_normalises() {
        let s = diamond();
        let sol = manual_solution(&s, vec![vec![0.6, 1.4, 0.6, 1.4]]);
        let support = extract_support(&s, &sol, 0, 1e-9);
        assert_eq!(
            support.arcs,
            vec![(0, 0.3), (1, 0.7), (2, 0.3), (3, 0.7)]
        );
        assert_eq!(support.origin_pos, 0);
        assert_eq!(support.dest_pos, 3);
    }

    #[test]
    fn support_tolerance_drops_dust() {
        let s = diamond();
        let sol = manual_solution(&s, vec![vec![2.0, 1e-12, 2.0, 1e-12]]);
        let support = extract_support(&s, &sol, 0, 1e-9);
        assert_eq!(support.arcs, vec![(0, 1.0), (2, 1.0)]);
    }

    #[test]
    fn lopsided_split_is_reconstructed_exactly() {
        let s = diamond();
        let sol = manual_solution(&s, vec![vec![0.6, 1.4, 0.6, 1.4]]);
        let run = run_allocation(&s, &sol, &AllocOptions::default());
        assert!(run.is_complete());
        let alloc = run.allocations().next().unwrap();
        assert_eq!(alloc.paths.len(), 2);
        assert_eq!(alloc.paths[0].arcs, vec![0, 2]);
        assert_eq!(alloc.paths[1].arcs, vec![1, 3]);
        assert_eq!(alloc.fractions, vec![0.3, 0.7]);
        assert_eq!(alloc.residual, 0.0);
        // Path times 15 and 25 against threshold 20: excess 0.7 * 5.
        assert!((alloc.excess_min - 3.5).abs() < 1e-12);
    }

    #[test]
    fn even_split_has_exact_path_excess() {
        let s = diamond();
        let sol = manual_solution(&s, vec![vec![1.0, 1.0, 1.0, 1.0]]);
        let run = run_allocation(&s, &sol, &AllocOptions::default());
        let alloc = run.allocations().next().unwrap();
        assert_eq!(alloc.fractions, vec![0.5, 0.5]);
        assert_eq!(alloc.excess_min, 2.5);
        assert_eq!(run.total_excess_min, 2.5);
    }

    #[test]
    fn single_route_gets_the_whole_demand() {
        let graph = IntermodalGraph::build(
            vec![
                node(0, Layer::Origin),
                node(1, Layer::Walk),
                node(2, Layer::Destination),
            ],
            vec![
                arc(0, 0, 1, 1.0, ArcKind::Switch),
                arc(1, 1, 2, 9.0, ArcKind::Switch),
            ],
        )
        .unwrap();
        let s = scenario_from(graph, vec![demand(0, 0, 2, 3.0)]);
        let sol = solve_min_time(&s).unwrap();
        let run = run_allocation(&s, &sol, &AllocOptions::default());
        let alloc = run.allocations().next().unwrap();
        assert_eq!(alloc.paths.len(), 1);
        assert_eq!(alloc.fractions, vec![1.0]);
        assert_eq!(alloc.paths[0].time_min, 10.0);
        assert_eq!(alloc.excess_min, 0.0);
    }

    /// Walk chain with a two-arc circulation hanging off the middle node.
    fn chain_with_cycle() -> Scenario {
        let graph = IntermodalGraph::build(
            vec![
                node(0, Layer::Origin),
                node(1, Layer::Walk),
                node(2, Layer::Walk),
                node(3, Layer::Walk),
                node(4, Layer::Destination),
            ],
            vec![
                arc(0, 0, 1, 1.0, ArcKind::Switch),
                arc(1, 1, 2, 10.0, ArcKind::Within(Layer::Walk)),
                arc(2, 2, 4, 1.0, ArcKind::Switch),
                arc(3, 2, 3, 2.0, ArcKind::Within(Layer::Walk)),
                arc(4, 3, 2, 3.0, ArcKind::Within(Layer::Walk)),
            ],
        )
        .unwrap();
        scenario_from(graph, vec![demand(0, 0, 4, 1.0)])
    }

    #[test]
    fn circulation_is_cancelled_and_reported() {
        let s = chain_with_cycle();
        let sol = manual_solution(&s, vec![vec![1.0, 1.0, 1.0, 0.4, 0.4]]);
        let mut support = extract_support(&s, &sol, 0, 1e-9);
        let report = cancel_cycles(&mut support, &s.graph);
        assert_eq!(report.cycles_removed, 1);
        assert_eq!(report.flow_removed, 0.4);
        assert_eq!(report.time_mass_removed, 2.0);
        assert_eq!(support.arcs, vec![(0, 1.0), (1, 1.0), (2, 1.0)]);

        let again = cancel_cycles(&mut support, &s.graph);
        assert_eq!(again, CycleReport::none());
    }

    #[test]
    fn cancelled_flow_still_decomposes() {
        let s = chain_with_cycle();
        let sol = manual_solution(&s, vec![vec![1.0, 1.0, 1.0, 0.4, 0.4]]);
        let run = run_allocation(&s, &sol, &AllocOptions::default());
        let alloc = run.allocations().next().unwrap();
        assert_eq!(alloc.cycles.cycles_removed, 1);
        assert_eq!(alloc.paths.len(), 1);
        assert_eq!(alloc.paths[0].arcs, vec![0, 1, 2]);
        assert_eq!(alloc.paths[0].time_min, 12.0);
        assert_eq!(alloc.fractions, vec![1.0]);
    }

    /// Three stages with two parallel arcs each: 8 distinct paths.
    fn ladder() -> Scenario {
        let graph = IntermodalGraph::build(
            vec![
                node(0, Layer::Origin),
                node(1, Layer::Walk),
                node(2, Layer::Walk),
                node(3, Layer::Destination),
            ],
            vec![
                arc(0, 0, 1, 1.0, ArcKind::Switch),
                arc(1, 0, 1, 2.0, ArcKind::Switch),
                arc(2, 1, 2, 5.0, ArcKind::Within(Layer::Walk)),
                arc(3, 1, 2, 7.0, ArcKind::Within(Layer::Walk)),
                arc(4, 2, 3, 1.0, ArcKind::Switch),
                arc(5, 2, 3, 3.0, ArcKind::Switch),
            ],
        )
        .unwrap();
        scenario_from(graph, vec![demand(0, 0, 3, 1.0)])
    }

    #[test]
    fn parallel_stages_enumerate_all_combinations() {
        let s = ladder();
        let sol = manual_solution(&s, vec![vec![0.5; 6]]);
        let support = extract_support(&s, &sol, 0, 1e-9);
        let paths = enumerate_paths(&support, &s.graph, 100).unwrap();
        // One path per choice of arc at each of the three stages.
        assert_eq!(paths.len(), 2 * 2 * 2);
        // Ascending arc order makes the all-lowest path come first.
        assert_eq!(paths[0].arcs, vec![0, 2, 4]);
        assert_eq!(paths[0].time_min, 7.0);
        assert_eq!(paths[7].arcs, vec![1, 3, 5]);
        assert_eq!(paths[7].time_min, 12.0);
        let mut sorted = paths.clone();
        sorted.sort_by(|a, b| a.arcs.cmp(&b.arcs));
        assert_eq!(sorted, paths);
    }

    #[test]
    fn path_cap_aborts_enumeration() {
        let s = ladder();
        let sol = manual_solution(&s, vec![vec![0.5; 6]]);
        let support = extract_support(&s, &sol, 0, 1e-9);
        match enumerate_paths(&support, &s.graph, 7).unwrap_err() {
            PathError::PathExplosion { demand, cap } => {
                assert_eq!(demand, DemandId(0));
                assert_eq!(cap, 7);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    /// Two diamonds in series; branch times 3/9 then 9/15, each split 50/50.
    fn double_diamond() -> Scenario {
        let graph = IntermodalGraph::build(
            vec![
                node(0, Layer::Origin),
                node(1, Layer::Walk),
                node(2, Layer::Walk),
                node(3, Layer::Walk),
                node(4, Layer::Destination),
            ],
            vec![
                arc(0, 0, 1, 0.0, ArcKind::Switch),
                arc(1, 1, 2, 3.0, ArcKind::Within(Layer::Walk)),
                arc(2, 1, 2, 9.0, ArcKind::Within(Layer::Walk)),
                arc(3, 2, 3, 9.0, ArcKind::Within(Layer::Walk)),
                arc(4, 2, 3, 15.0, ArcKind::Within(Layer::Walk)),
                arc(5, 3, 4, 0.0, ArcKind::Switch),
            ],
        )
        .unwrap();
        scenario_from(graph, vec![demand(0, 0, 4, 1.0)])
    }

    /// Allocations in the double diamond form a one-parameter family;
    /// scanning the parameter gives an independent optimum to compare with.
    fn double_diamond_grid_optimum(t_max: f64) -> f64 {
        // fractions: f(3,9) = lambda, f(3,15) = 0.5 - lambda,
        //            f(9,9) = 0.5 - lambda, f(9,15) = lambda.
        let excess = |t: f64| (t - t_max).max(0.0);
        let mut best = f64::INFINITY;
        for step in 0..=1000 {
            let lambda = 0.5 * step as f64 / 1000.0;
            let obj = lambda * excess(12.0)
                + (0.5 - lambda) * excess(18.0)
                + (0.5 - lambda) * excess(18.0)
                + lambda * excess(24.0);
            best = best.min(obj);
        }
        best
    }

    #[test]
    fn series_split_matches_grid_scan() {
        for t_max in [15.0, 18.0, 21.0] {
            let s = double_diamond();
            let sol = manual_solution(&s, vec![vec![1.0, 0.5, 0.5, 0.5, 0.5, 1.0]]);
            let opts = AllocOptions {
                t_max_min: Some(t_max),
                ..AllocOptions::default()
            };
            let run = run_allocation(&s, &sol, &opts);
            let alloc = run.allocations().next().unwrap();
            assert_eq!(alloc.paths.len(), 4);
            let grid = double_diamond_grid_optimum(t_max);
            assert!(
                (alloc.excess_min - grid).abs() < 1e-9,
                "t_max {t_max}: allocation {} vs grid {grid}",
                alloc.excess_min
            );
            assert!(alloc.residual < 1e-9);
            assert!((alloc.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn path_excess_dominates_flow_excess() {
        // Averaging hides threshold violations; paths cannot.
        let s = diamond();
        let sol = manual_solution(&s, vec![vec![1.0, 1.0, 1.0, 1.0]]);
        let flow_avg = 0.5 * 15.0 + 0.5 * 25.0;
        let flow_excess = (flow_avg - s.params.t_max_min).max(0.0);
        assert_eq!(flow_excess, 0.0);
        let run = run_allocation(&s, &sol, &AllocOptions::default());
        let alloc = run.allocations().next().unwrap();
        assert!(alloc.excess_min >= flow_excess);
        assert_eq!(alloc.excess_min, 2.5);
    }

    #[test]
    fn unfairness_summary_weights_path_excess_by_region() {
        let s = diamond();
        let sol = manual_solution(&s, vec![vec![1.0, 1.0, 1.0, 1.0]]);
        let run = run_allocation(&s, &sol, &AllocOptions::default());
        // One region, one demand: the summary is the demand's excess.
        let summary = path_unfairness_summary(&s, &run).unwrap();
        assert_eq!(summary, 2.5);
    }

    #[test]
    fn incomplete_runs_refuse_a_summary() {
        let s = ladder();
        let sol = manual_solution(&s, vec![vec![0.5; 6]]);
        let opts = AllocOptions {
            path_cap: 7,
            ..AllocOptions::default()
        };
        let run = run_allocation(&s, &sol, &opts);
        assert!(!run.is_complete());
        assert_eq!(run.failed_demands(), vec![DemandId(0)]);
        match path_unfairness_summary(&s, &run).unwrap_err() {
            PathError::IncompleteAllocation { failed } => {
                assert_eq!(failed, vec![DemandId(0)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_flow_demand_reports_empty_support() {
        let s = diamond();
        let sol = manual_solution(&s, vec![vec![0.0; 4]]);
        let run = run_allocation(&s, &sol, &AllocOptions::default());
        match &run.per_demand[0] {
            Err(PathError::EmptySupport { demand }) => assert_eq!(*demand, DemandId(0)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbalanced_support_is_rejected() {
        // Arc flows that no path combination can reproduce: the two
        // branches carry different amounts at entry than at exit.
        let s = diamond();
        let sol = manual_solution(&s, vec![vec![0.6, 1.4, 1.4, 0.6]]);
        let run = run_allocation(&s, &sol, &AllocOptions::default());
        match &run.per_demand[0] {
            Err(PathError::ReconstructionInfeasible { demand, .. }) => {
                assert_eq!(*demand, DemandId(0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        /// Any two-way split of the diamond reconstructs with zero residual
        /// and fractions matching the split.
        #[test]
        fn prop_diamond_splits_reconstruct(share in 0.0f64..=1.0) {
            let s = diamond();
            let rate = s.demands()[0].rate;
            let top = rate * share;
            let bottom = rate - top;
            let sol = manual_solution(&s, vec![vec![top, bottom, top, bottom]]);
            let run = run_allocation(&s, &sol, &AllocOptions::default());
            let alloc = run.allocations().next();
            match alloc {
                Some(alloc) => {
                    prop_assert!(alloc.residual <= 1e-9);
                    prop_assert!((alloc.fractions.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                }
                // All-or-nothing splits leave a single branch; the other
                // vanishes from the support entirely.
                None => prop_assert!(share <= 1e-9 || share >= 1.0 - 1e-9),
            }
        }
    }
}
