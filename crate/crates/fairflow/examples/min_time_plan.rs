//! Solves the built-in scenario for minimum average travel time and prints
//! the resulting plan: objective, per-demand travel times, and how much of
//! the vehicle fleet the plan keeps busy.
//!
//! Run with: cargo run -p fairflow --example min_time_plan

use fairflow::planner::{demand_avg_time, flow_metrics, solve_min_time};
use fairflow::synth::demo_scenario;

fn main() {
    let scenario = demo_scenario();
    let sol = solve_min_time(&scenario).expect("demo scenario is feasible");
    let metrics = flow_metrics(&scenario, &sol);

    println!("objective value: {:.4} user-minutes per minute", sol.objective_value);
    println!("simplex iterations: {}", sol.iterations);
    println!();
    println!("mean travel time: {:.3} min", metrics.avg_travel_time_min);
    println!(
        "fleet usage: {:.1} of {} vehicles",
        metrics.fleet_usage, scenario.params.fleet_cap
    );
    println!();

    println!("per-demand view (threshold {} min):", scenario.params.t_max_min);
    for (pos, demand) in scenario.demands().iter().enumerate() {
        let avg = demand_avg_time(&scenario, pos, &sol.demand_flows[pos]);
        let excess = sol.excess_min[pos];
        println!(
            "  demand {} ({} -> {}, {:.2} users/min): {:.2} min average, {:.2} min over threshold",
            demand.id, demand.origin, demand.destination, demand.rate, avg, excess
        );
    }

    // The time-optimal plan is allowed to be uneven: it gives the fleet to
    // whichever travellers save the most minutes overall.
    println!();
    println!(
        "unfairness of this plan: {:.3} min (population-weighted mean excess)",
        metrics.j_acc
    );
    for (region, value) in &metrics.region_unfairness {
        println!("  region {region}: {value:.3} min");
    }
}
