//! Renders modal-share histograms for a fairness-optimal plan: how the
//! minutes of a trip split across walking, biking, cars, transit and mode
//! switches, bucketed by travel time.  Builds the histogram twice — once
//! from per-demand averages, once from allocated paths — and prints the
//! difference, which is exactly what averaging smooths away.
//!
//! Run with: cargo run -p fairflow --example modal_share

use fairflow::pathalloc::{run_allocation, AllocOptions};
use fairflow::planner::solve_min_unfairness;
use fairflow::report::{
    delta_csv, histogram_csv, histogram_difference, histogram_svg, modal_share_histogram,
    ModeClass, ShareBasis,
};
use fairflow::synth::demo_scenario;

fn main() {
    let scenario = demo_scenario();
    let sol = solve_min_unfairness(&scenario).expect("feasible");
    let run = run_allocation(&scenario, &sol, &AllocOptions::default());
    let bin_width = 5.0;

    let od = modal_share_histogram(&scenario, ShareBasis::OdPairs(&sol), bin_width)
        .expect("solution has demands");
    let paths = modal_share_histogram(&scenario, ShareBasis::Paths(&run), bin_width)
        .expect("allocation is complete");

    println!("histogram over per-demand average times:");
    print!("{}", histogram_csv(&od, None));
    println!();
    println!("histogram over allocated path times:");
    print!("{}", histogram_csv(&paths, None));
    println!();

    // Mode shares of the busiest bin, as fractions of in-vehicle minutes.
    if let Some(bin) = paths
        .bins
        .iter()
        .max_by(|a, b| a.users_per_min.total_cmp(&b.users_per_min))
    {
        println!(
            "busiest bin [{}, {}) min, {:.3} users/min:",
            bin.lo_min, bin.hi_min, bin.users_per_min
        );
        for class in ModeClass::ALL {
            println!("  {:<16} {:>5.1}%", class.label(), 100.0 * bin.share(class));
        }
        println!();
    }

    println!("paths minus averages, signed minutes per bin:");
    print!("{}", delta_csv(&histogram_difference(&paths, &od).unwrap(), None));

    let svg_path = std::env::temp_dir().join("fairflow_modal_share.svg");
    std::fs::write(
        &svg_path,
        histogram_svg(&paths, "fairness plan: travel time by mode", None),
    )
    .expect("temp dir is writable");
    println!();
    println!("stacked-bar chart written to {}", svg_path.display());
}
