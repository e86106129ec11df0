//! Solves the built-in scenario twice — once for minimum total travel time,
//! once for minimum accessibility unfairness — and shows what the fairness
//! objective changes: which demands gain car access, what that costs in
//! total time, and how the region-level picture evens out.
//!
//! Run with: cargo run -p fairflow --example fair_plan

use fairflow::network::Layer;
use fairflow::planner::{flow_metrics, solve_min_time, solve_min_unfairness, FlowSolution};
use fairflow::scenario::Scenario;
use fairflow::synth::demo_scenario;

fn car_rate(scenario: &Scenario, sol: &FlowSolution, demand_pos: usize) -> f64 {
    scenario
        .graph
        .layer_arc_positions(Layer::Car)
        .iter()
        .map(|&a| sol.demand_flows[demand_pos][a])
        .fold(0.0, f64::max)
}

fn main() {
    let scenario = demo_scenario();
    let time_plan = solve_min_time(&scenario).expect("feasible");
    let fair_plan = solve_min_unfairness(&scenario).expect("feasible");
    let time_metrics = flow_metrics(&scenario, &time_plan);
    let fair_metrics = flow_metrics(&scenario, &fair_plan);

    println!("{:<34}{:>12}{:>12}", "", "min-time", "min-unfair");
    println!(
        "{:<34}{:>12.4}{:>12.4}",
        "total time (user-min/min)", time_metrics.j_time, fair_metrics.j_time
    );
    println!(
        "{:<34}{:>12.4}{:>12.4}",
        "unfairness (min)", time_metrics.j_acc, fair_metrics.j_acc
    );
    println!(
        "{:<34}{:>12.4}{:>12.4}",
        "fleet usage (vehicles)", time_metrics.fleet_usage, fair_metrics.fleet_usage
    );

    println!();
    println!("car usage per demand (users/min on the busiest road arc):");
    for (pos, demand) in scenario.demands().iter().enumerate() {
        println!(
            "  demand {}: {:>7.4}  ->  {:>7.4}",
            demand.id,
            car_rate(&scenario, &time_plan, pos),
            car_rate(&scenario, &fair_plan, pos),
        );
    }

    println!();
    println!("minutes over the {} min threshold:", scenario.params.t_max_min);
    for (pos, demand) in scenario.demands().iter().enumerate() {
        println!(
            "  demand {}: {:>7.4}  ->  {:>7.4}",
            demand.id, time_plan.excess_min[pos], fair_plan.excess_min[pos],
        );
    }

    println!();
    println!("region unfairness (population-weighted into the objective):");
    for ((region, before), (_, after)) in time_metrics
        .region_unfairness
        .iter()
        .zip(&fair_metrics.region_unfairness)
    {
        println!("  region {region}: {before:>7.4}  ->  {after:>7.4}");
    }

    let price = fair_metrics.j_time - time_metrics.j_time;
    println!();
    println!(
        "levelling access for everyone costs {:.3} extra user-minutes per minute ({:+.2}%)",
        price,
        100.0 * price / time_metrics.j_time
    );
}
