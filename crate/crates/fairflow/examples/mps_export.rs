//! Exports a planning program in MPS format for an external solver, then
//! reads an external-style solution back in.  The MPS writer and reader are
//! exact inverses, so the bundled simplex and an outside solver see the
//! same program down to the last digit.
//!
//! Run with: cargo run -p fairflow --example mps_export

use fairflow::lp::{
    export_mps, import_mps, import_solution, solve_simplex, write_solution_values, SimplexOptions,
};
use fairflow::planner::{build_min_unfairness_model, solution_from_import, PlanObjective};
use fairflow::synth::demo_scenario;

fn main() {
    let scenario = demo_scenario();
    let (model, layout) = build_min_unfairness_model(&scenario);
    println!(
        "fairness program: {} variables, {} rows",
        layout.num_vars(),
        model.rows().len()
    );

    let mps = export_mps(&model).expect("model names sanitise");
    println!();
    for line in mps.lines().take(12) {
        println!("{line}");
    }
    println!("... ({} lines total)", mps.lines().count());

    // Round trip: parse our own export and make sure nothing drifted.
    let reread = import_mps(&mps).expect("own export parses");
    assert_eq!(export_mps(&reread).unwrap(), mps);
    println!();
    println!("re-exported MPS is byte-identical");

    // Solve the re-read copy, as an external solver would receive it.
    let opts = SimplexOptions::default();
    let ours = solve_simplex(&model, &opts).expect("solves");
    let theirs = solve_simplex(&reread, &opts).expect("solves");
    println!(
        "objective, original vs round-tripped: {} vs {}",
        ours.objective_value, theirs.objective_value
    );

    // An external solver hands back `variable value` lines.  Imported
    // points are checked against the constraints before being trusted.
    let reply = write_solution_values(&model, &theirs.x);
    let (point, report) = import_solution(&model, &reply, 1e-6).expect("reply parses");
    assert!(!report.infeasible_import);
    println!(
        "imported point: max constraint violation {:.1e}",
        report.max_violation
    );

    let sol = solution_from_import(&scenario, PlanObjective::MinUnfairness, &point)
        .expect("dimensions match the scenario");
    println!(
        "imported plan: unfairness {} min, total time {:.4} user-min/min",
        sol.j_acc, sol.j_time
    );
}
