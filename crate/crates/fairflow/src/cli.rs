//! Command-line front end.
//!
//! Subcommands: `validate` (check input files), `solve` (optimise a plan,
//! optionally exporting the program as MPS or importing an externally
//! solved point), `allocate` (decompose a solved plan into user paths),
//! `report` (histograms, tables and SVG charts) and `demo` (generate and
//! run the built-in scenario end to end).
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid input data,
//! 4 infeasible instance, 5 internal failure.
//!
//! Every run writes a `manifest.json` recording the command in a normal
//! form, content hashes of all inputs and the effective parameters; output
//! files carry the manifest id in a header line.  With `--no-timestamp`,
//! repeated runs on identical inputs produce byte-identical outputs.

use crate::lp::{export_mps, import_solution, LpError, SimplexOptions};
use crate::pathalloc::{
    path_unfairness_summary, run_allocation, AllocOptions, AllocationRun, PathError,
};
use crate::planner::{
    build_min_time_model, build_min_unfairness_model, flow_metrics, read_solution_text,
    solution_from_import, solve_with_options, write_solution_text, FlowSolution, PlanObjective,
    PlannerError,
};
use crate::report::{
    delta_csv, hash_file, histogram_csv, histogram_difference, histogram_svg, metrics_csv,
    modal_share_histogram, region_csv, sha256_hex, RunManifest, ShareBasis,
};
use crate::scenario::{load_scenario, write_demand_file, write_params, Scenario, ScenarioError};
use crate::synth::demo_scenario;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Debug)]
enum CliError {
    Data(String),
    Infeasible(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Data(_) => 3,
            CliError::Infeasible(_) => 4,
            CliError::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Data(m) | CliError::Infeasible(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(err: ScenarioError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<PlannerError> for CliError {
    fn from(err: PlannerError) -> Self {
        match err {
            PlannerError::Infeasible { .. } => CliError::Infeasible(err.to_string()),
            PlannerError::Parse { .. } | PlannerError::Mismatch(_) => {
                CliError::Data(err.to_string())
            }
            PlannerError::IterationLimit { .. }
            | PlannerError::Internal(_)
            | PlannerError::Lp(_) => CliError::Internal(err.to_string()),
        }
    }
}

impl From<PathError> for CliError {
    fn from(err: PathError) -> Self {
        CliError::Internal(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "fairflow",
    version,
    about = "Plan intermodal mobility-on-demand for travel time or accessibility fairness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that network, demand and parameter files form a valid scenario
    Validate(ScenarioArgs),
    /// Optimise a plan and write solution, metrics and region tables
    Solve(SolveArgs),
    /// Decompose a solved plan into per-user paths
    Allocate(AllocateArgs),
    /// Render histograms, tables and charts for a solved plan
    Report(ReportArgs),
    /// Generate the built-in scenario and run the whole pipeline on it
    Demo(DemoArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Network file (JSON)
    #[arg(long)]
    network: PathBuf,
    /// Demand file (CSV, with an embedded region table or a regions.csv
    /// sibling)
    #[arg(long)]
    demand: PathBuf,
    /// Parameter file (key = value lines)
    #[arg(long)]
    params: PathBuf,
}

impl ScenarioArgs {
    fn command_form(&self) -> Vec<String> {
        vec![
            "--network".to_string(),
            self.network.display().to_string(),
            "--demand".to_string(),
            self.demand.display().to_string(),
            "--params".to_string(),
            self.params.display().to_string(),
        ]
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output directory
    #[arg(long, env = "FAIRFLOW_OUT_DIR", default_value = "fairflow_out")]
    out: PathBuf,
    /// Omit the timestamp so identical runs write identical bytes
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    /// Minimise total travel time
    Time,
    /// Minimise accessibility unfairness
    Fairness,
}

impl ObjectiveArg {
    fn plan(self) -> PlanObjective {
        match self {
            ObjectiveArg::Time => PlanObjective::MinTime,
            ObjectiveArg::Fairness => PlanObjective::MinUnfairness,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Time)]
    objective: ObjectiveArg,
    /// Also write the optimisation program to this file in the output
    /// directory (MPS format)
    #[arg(long, value_name = "FILE")]
    export_mps: Option<String>,
    /// Skip the built-in solver and read variable values (`name value`
    /// lines) produced externally for the exported program
    #[arg(long, value_name = "PATH")]
    import_solution: Option<PathBuf>,
    /// Simplex pivot budget
    #[arg(long, default_value_t = 50_000)]
    max_iterations: usize,
}

#[derive(Args)]
struct AllocateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Solution file written by `solve`
    #[arg(long)]
    solution: PathBuf,
    /// Ignore arcs carrying less than this fraction of a demand
    #[arg(long, default_value_t = 1e-9)]
    support_tol: f64,
    /// Abort a demand once it enumerates more paths than this
    #[arg(long, default_value_t = 100_000)]
    path_cap: usize,
    /// Override the accessibility threshold used for path excess, minutes
    #[arg(long, value_name = "MINUTES")]
    t_max: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    /// One entry per demand at its average travel time
    Od,
    /// One entry per allocated path at its actual travel time
    Paths,
    /// Both histograms
    Both,
}

impl BasisArg {
    fn tag(self) -> &'static str {
        match self {
            BasisArg::Od => "od",
            BasisArg::Paths => "paths",
            BasisArg::Both => "both",
        }
    }
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    out: OutArgs,
    /// Solution file written by `solve`
    #[arg(long)]
    solution: PathBuf,
    /// Second solution to subtract, bin by bin
    #[arg(long, value_name = "PATH")]
    compare_solution: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BasisArg::Od)]
    histogram_basis: BasisArg,
    /// Histogram bin width, minutes
    #[arg(long, default_value_t = 2.0)]
    bin_width: f64,
    /// Also render the histogram as an SVG chart
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct DemoArgs {
    #[command(flatten)]
    out: OutArgs,
}

/// Runs the CLI on `args` (excluding the program name) and returns the
/// process exit code.
pub fn run(args: &[OsString]) -> u8 {
    let mut argv = vec![OsString::from("fairflow")];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate(args) => cmd_validate(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Allocate(args) => cmd_allocate(&args),
        Command::Report(args) => cmd_report(&args),
        Command::Demo(args) => cmd_demo(&args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.code()
        }
    }
}

fn load(args: &ScenarioArgs) -> Result<Scenario, CliError> {
    Ok(load_scenario(&args.network, &args.demand, &args.params)?)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|err| CliError::Data(format!("{}: {err}", path.display())))
}

fn write_output(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|err| CliError::Internal(format!("{}: {err}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|err| CliError::Internal(format!("{}: {err}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn timestamp(out: &OutArgs) -> Option<u64> {
    if out.no_timestamp {
        None
    } else {
        Some(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    }
}

fn hash_input(path: &Path) -> Result<(String, String), CliError> {
    let hash =
        hash_file(path).map_err(|err| CliError::Data(format!("{}: {err}", path.display())))?;
    Ok((path.display().to_string(), hash))
}

fn scenario_hashes(args: &ScenarioArgs) -> Result<BTreeMap<String, String>, CliError> {
    let mut inputs = BTreeMap::new();
    for path in [&args.network, &args.demand, &args.params] {
        let (key, hash) = hash_input(path)?;
        inputs.insert(key, hash);
    }
    let sibling = args.demand.with_file_name("regions.csv");
    if sibling.is_file() {
        let (key, hash) = hash_input(&sibling)?;
        inputs.insert(key, hash);
    }
    Ok(inputs)
}

fn cmd_validate(args: &ScenarioArgs) -> Result<(), CliError> {
    let scenario = load(args)?;
    println!(
        "network: {} nodes, {} arcs",
        scenario.graph.num_nodes(),
        scenario.graph.num_arcs()
    );
    println!(
        "demands: {} ({} users/min total)",
        scenario.demands().len(),
        scenario.total_demand_rate()
    );
    println!("regions: {}", scenario.regions().len());
    println!(
        "params: fleet_cap {} vehicles, threshold {} min",
        scenario.params.fleet_cap, scenario.params.t_max_min
    );
    println!("scenario is valid");
    Ok(())
}

fn solve_summary(sol: &FlowSolution, scenario: &Scenario) {
    let metrics = flow_metrics(scenario, sol);
    println!("objective: {}", sol.objective.tag());
    println!("status: optimal ({})", sol.solved_by);
    println!("objective value: {}", sol.objective_value);
    println!("total travel time: {} user-minutes/min", metrics.j_time);
    println!("unfairness: {} min", metrics.j_acc);
    println!("mean travel time: {} min", metrics.avg_travel_time_min);
    println!("fleet usage: {} vehicles", metrics.fleet_usage);
}

fn solve_command_form(args: &SolveArgs) -> Vec<String> {
    let mut command = vec!["solve".to_string()];
    command.extend(args.scenario.command_form());
    command.push("--objective".to_string());
    command.push(match args.objective {
        ObjectiveArg::Time => "time".to_string(),
        ObjectiveArg::Fairness => "fairness".to_string(),
    });
    command.push("--max-iterations".to_string());
    command.push(args.max_iterations.to_string());
    if let Some(name) = &args.export_mps {
        command.push("--export-mps".to_string());
        command.push(name.clone());
    }
    if let Some(path) = &args.import_solution {
        command.push("--import-solution".to_string());
        command.push(path.display().to_string());
    }
    if args.out.no_timestamp {
        command.push("--no-timestamp".to_string());
    }
    command
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    let objective = args.objective.plan();
    let (model, _) = match objective {
        PlanObjective::MinTime => build_min_time_model(&scenario),
        PlanObjective::MinUnfairness => build_min_unfairness_model(&scenario),
    };

    if let Some(name) = &args.export_mps {
        let mps = export_mps(&model)
            .map_err(|err| CliError::Internal(format!("MPS export failed: {err}")))?;
        write_output(&args.out.out, name, &mps)?;
    }

    let sol = if let Some(path) = &args.import_solution {
        let text = read_input(path)?;
        let (point, report) = import_solution(&model, &text, 1e-6).map_err(|err| match err {
            LpError::UnknownVariableName(_) | LpError::MpsParse { .. } => {
                CliError::Data(format!("{}: {err}", path.display()))
            }
            other => CliError::Internal(other.to_string()),
        })?;
        if report.infeasible_import {
            return Err(CliError::Data(format!(
                "{}: imported point violates the constraints by {:e}",
                path.display(),
                report.max_violation
            )));
        }
        solution_from_import(&scenario, objective, &point)?
    } else {
        let opts = SimplexOptions {
            max_iterations: args.max_iterations,
            ..SimplexOptions::default()
        };
        solve_with_options(&scenario, objective, &opts)?
    };

    let mut params = BTreeMap::new();
    params.insert("objective".to_string(), sol.objective.tag().to_string());
    params.insert(
        "max_iterations".to_string(),
        args.max_iterations.to_string(),
    );
    let mut inputs = scenario_hashes(&args.scenario)?;
    if let Some(path) = &args.import_solution {
        let (key, hash) = hash_input(path)?;
        inputs.insert(key, hash);
    }
    let manifest = RunManifest::new(
        "solution.csv",
        solve_command_form(args),
        inputs,
        params,
        timestamp(&args.out),
    );
    let id = Some(manifest.id.as_str());

    let metrics = flow_metrics(&scenario, &sol);
    write_output(
        &args.out.out,
        "solution.csv",
        &write_solution_text(&scenario, &sol, id),
    )?;
    write_output(
        &args.out.out,
        "metrics.csv",
        &metrics_csv(&sol, &metrics, id),
    )?;
    write_output(
        &args.out.out,
        "regions.csv",
        &region_csv(&scenario, &sol.excess_min, id),
    )?;
    write_output(&args.out.out, "manifest.json", &manifest.to_json())?;
    solve_summary(&sol, &scenario);
    Ok(())
}

fn paths_csv(
    run: &AllocationRun,
    objective: PlanObjective,
    t_max: f64,
    manifest_id: &str,
) -> String {
    let mut out = String::new();
    out.push_str("# fairflow paths v1\n");
    out.push_str(&format!("# manifest {manifest_id}\n"));
    out.push_str(&format!("# objective {}\n", objective.tag()));
    out.push_str("demand_id,path_index,fraction,path_time_min,excess_min\n");
    for alloc in run.allocations() {
        for (idx, (path, &fraction)) in alloc.paths.iter().zip(&alloc.fractions).enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                alloc.demand,
                idx,
                fraction,
                path.time_min,
                (path.time_min - t_max).max(0.0),
            ));
        }
    }
    out
}

/// Path geometry companion to `paths_csv`: one row per path, in the same
/// order, listing the nodes visited.
fn path_nodes_csv(
    scenario: &Scenario,
    run: &AllocationRun,
    objective: PlanObjective,
    manifest_id: &str,
) -> String {
    let graph = &scenario.graph;
    let mut out = String::new();
    out.push_str("# fairflow path nodes v1\n");
    out.push_str(&format!("# manifest {manifest_id}\n"));
    out.push_str(&format!("# objective {}\n", objective.tag()));
    out.push_str("demand_id,node_sequence\n");
    for alloc in run.allocations() {
        for path in &alloc.paths {
            let mut nodes = vec![graph.arcs()[path.arcs[0]].tail.to_string()];
            nodes.extend(
                path.arcs
                    .iter()
                    .map(|&pos| graph.arcs()[pos].head.to_string()),
            );
            out.push_str(&format!("{},{}\n", alloc.demand, nodes.join("|")));
        }
    }
    out
}

fn allocate_command_form(args: &AllocateArgs) -> Vec<String> {
    let mut command = vec!["allocate".to_string()];
    command.extend(args.scenario.command_form());
    command.push("--solution".to_string());
    command.push(args.solution.display().to_string());
    command.push("--support-tol".to_string());
    command.push(args.support_tol.to_string());
    command.push("--path-cap".to_string());
    command.push(args.path_cap.to_string());
    if let Some(t) = args.t_max {
        command.push("--t-max".to_string());
        command.push(t.to_string());
    }
    if args.out.no_timestamp {
        command.push("--no-timestamp".to_string());
    }
    command
}

fn cmd_allocate(args: &AllocateArgs) -> Result<(), CliError> {
    let scenario = load(&args.scenario)?;
    let text = read_input(&args.solution)?;
    let sol = read_solution_text(&scenario, &text, &args.solution.display().to_string())?;
    let opts = AllocOptions {
        support_tol: args.support_tol,
        path_cap: args.path_cap,
        t_max_min: args.t_max,
        ..AllocOptions::default()
    };
    let run = run_allocation(&scenario, &sol, &opts);

    let mut params = BTreeMap::new();
    params.insert("support_tol".to_string(), args.support_tol.to_string());
    params.insert("path_cap".to_string(), args.path_cap.to_string());
    let t_max = args.t_max.unwrap_or(scenario.params.t_max_min);
    params.insert("t_max_min".to_string(), t_max.to_string());
    let mut inputs = scenario_hashes(&args.scenario)?;
    let (key, hash) = hash_input(&args.solution)?;
    inputs.insert(key, hash);
    let manifest = RunManifest::new(
        "paths.csv",
        allocate_command_form(args),
        inputs,
        params,
        timestamp(&args.out),
    );

    write_output(
        &args.out.out,
        "paths.csv",
        &paths_csv(&run, sol.objective, t_max, &manifest.id),
    )?;
    write_output(
        &args.out.out,
        "path_nodes.csv",
        &path_nodes_csv(&scenario, &run, sol.objective, &manifest.id),
    )?;
    write_output(&args.out.out, "manifest.json", &manifest.to_json())?;

    for alloc in run.allocations() {
        println!(
            "demand {}: {} paths, excess {} min, residual {:e}, {} cycles cancelled",
            alloc.demand,
            alloc.paths.len(),
            alloc.excess_min,
            alloc.residual,
            alloc.cycles.cycles_removed,
        );
    }
    println!("total path excess: {} min", run.total_excess_min);
    if run.is_complete() {
        println!(
            "path-level unfairness: {} min",
            path_unfairness_summary(&scenario, &run)?
        );
        Ok(())
    } else {
        let failed: Vec<String> = run
            .per_demand
            .iter()
            .filter_map(|r| r.as_ref().err())
            .map(|e| e.to_string())
            .collect();
        Err(CliError::Internal(format!(
            "allocation incomplete: {}",
            failed.join("; ")
        )))
    }
}

fn report_command_form(args: &ReportArgs) -> Vec<String> {
    let mut command = vec!["report".to_string()];
    command.extend(args.scenario.command_form());
    command.push("--solution".to_string());
    command.push(args.solution.display().to_string());
    if let Some(path) = &args.compare_solution {
        command.push("--compare-solution".to_string());
        command.push(path.display().to_string());
    }
    command.push("--histogram-basis".to_string());
    command.push(args.histogram_basis.tag().to_string());
    command.push("--bin-width".to_string());
    command.push(args.bin_width.to_string());
    if args.svg {
        command.push("--svg".to_string());
    }
    if args.out.no_timestamp {
        command.push("--no-timestamp".to_string());
    }
    command
}

fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    if !(args.bin_width > 0.0) || !args.bin_width.is_finite() {
        return Err(CliError::Data(format!(
            "bin width must be a positive number of minutes, got {}",
            args.bin_width
        )));
    }
    let scenario = load(&args.scenario)?;
    let text = read_input(&args.solution)?;
    let sol = read_solution_text(&scenario, &text, &args.solution.display().to_string())?;
    let compare = match &args.compare_solution {
        Some(path) => {
            let text = read_input(path)?;
            Some(read_solution_text(
                &scenario,
                &text,
                &path.display().to_string(),
            )?)
        }
        None => None,
    };

    let mut params = BTreeMap::new();
    params.insert("bin_width".to_string(), args.bin_width.to_string());
    params.insert(
        "histogram_basis".to_string(),
        args.histogram_basis.tag().to_string(),
    );
    let mut inputs = scenario_hashes(&args.scenario)?;
    let (key, hash) = hash_input(&args.solution)?;
    inputs.insert(key, hash);
    if let Some(path) = &args.compare_solution {
        let (key, hash) = hash_input(path)?;
        inputs.insert(key, hash);
    }
    let manifest = RunManifest::new(
        "report",
        report_command_form(args),
        inputs,
        params,
        timestamp(&args.out),
    );
    let id = Some(manifest.id.as_str());

    let od_active = matches!(args.histogram_basis, BasisArg::Od | BasisArg::Both);
    let paths_active = matches!(args.histogram_basis, BasisArg::Paths | BasisArg::Both);

    if od_active {
        let hist = modal_share_histogram(&scenario, ShareBasis::OdPairs(&sol), args.bin_width)
            .map_err(|err| CliError::Data(err.to_string()))?;
        write_output(&args.out.out, "histogram_od.csv", &histogram_csv(&hist, id))?;
        if let Some(other) = &compare {
            let other_hist =
                modal_share_histogram(&scenario, ShareBasis::OdPairs(other), args.bin_width)
                    .map_err(|err| CliError::Data(err.to_string()))?;
            let delta = histogram_difference(&hist, &other_hist)
                .map_err(|err| CliError::Data(err.to_string()))?;
            write_output(&args.out.out, "delta_od.csv", &delta_csv(&delta, id))?;
        }
        if args.svg {
            write_output(
                &args.out.out,
                "modal_share_od.svg",
                &histogram_svg(&hist, "travel time by mode (per demand)", id),
            )?;
        }
    }
    if paths_active {
        let run = run_allocation(&scenario, &sol, &AllocOptions::default());
        let hist = modal_share_histogram(&scenario, ShareBasis::Paths(&run), args.bin_width)
            .map_err(|err| CliError::Internal(err.to_string()))?;
        write_output(
            &args.out.out,
            "histogram_paths.csv",
            &histogram_csv(&hist, id),
        )?;
        if let Some(other) = &compare {
            let other_run = run_allocation(&scenario, other, &AllocOptions::default());
            let other_hist =
                modal_share_histogram(&scenario, ShareBasis::Paths(&other_run), args.bin_width)
                    .map_err(|err| CliError::Internal(err.to_string()))?;
            let delta = histogram_difference(&hist, &other_hist)
                .map_err(|err| CliError::Data(err.to_string()))?;
            write_output(&args.out.out, "delta_paths.csv", &delta_csv(&delta, id))?;
        }
        if args.svg {
            write_output(
                &args.out.out,
                "modal_share_paths.svg",
                &histogram_svg(&hist, "travel time by mode (per path)", id),
            )?;
        }
    }

    let metrics = flow_metrics(&scenario, &sol);
    write_output(
        &args.out.out,
        "metrics.csv",
        &metrics_csv(&sol, &metrics, id),
    )?;
    write_output(
        &args.out.out,
        "regions.csv",
        &region_csv(&scenario, &sol.excess_min, id),
    )?;
    write_output(&args.out.out, "manifest.json", &manifest.to_json())?;
    Ok(())
}

fn cmd_demo(args: &DemoArgs) -> Result<(), CliError> {
    let scenario = demo_scenario();
    let dir = &args.out.out;

    let network_json = scenario.graph.to_json();
    let region_pairs: Vec<_> = scenario
        .regions()
        .iter()
        .map(|r| (r.id, r.population))
        .collect();
    let demand_text = write_demand_file(scenario.demands(), &region_pairs);
    let params_text = write_params(&scenario.params);
    write_output(dir, "network.json", &network_json)?;
    write_output(dir, "demand.csv", &demand_text)?;
    write_output(dir, "params.txt", &params_text)?;

    let time_sol = solve_with_options(
        &scenario,
        PlanObjective::MinTime,
        &SimplexOptions::default(),
    )?;
    let fair_sol = solve_with_options(
        &scenario,
        PlanObjective::MinUnfairness,
        &SimplexOptions::default(),
    )?;
    let alloc_opts = AllocOptions::default();
    let time_run = run_allocation(&scenario, &time_sol, &alloc_opts);
    let fair_run = run_allocation(&scenario, &fair_sol, &alloc_opts);
    let time_path_unfairness = path_unfairness_summary(&scenario, &time_run)?;
    let fair_path_unfairness = path_unfairness_summary(&scenario, &fair_run)?;

    let mut inputs = BTreeMap::new();
    inputs.insert(
        "network.json".to_string(),
        sha256_hex(network_json.as_bytes()),
    );
    inputs.insert("demand.csv".to_string(), sha256_hex(demand_text.as_bytes()));
    inputs.insert("params.txt".to_string(), sha256_hex(params_text.as_bytes()));
    let mut command = vec!["demo".to_string()];
    if args.out.no_timestamp {
        command.push("--no-timestamp".to_string());
    }
    let manifest = RunManifest::new(
        "demo",
        command,
        inputs,
        BTreeMap::new(),
        timestamp(&args.out),
    );
    let id = Some(manifest.id.as_str());

    let t_max = scenario.params.t_max_min;
    for (tag, sol, run) in [
        ("time", &time_sol, &time_run),
        ("fairness", &fair_sol, &fair_run),
    ] {
        let metrics = flow_metrics(&scenario, sol);
        write_output(
            dir,
            &format!("{tag}_solution.csv"),
            &write_solution_text(&scenario, sol, id),
        )?;
        write_output(
            dir,
            &format!("{tag}_metrics.csv"),
            &metrics_csv(sol, &metrics, id),
        )?;
        write_output(
            dir,
            &format!("{tag}_regions.csv"),
            &region_csv(&scenario, &sol.excess_min, id),
        )?;
        write_output(
            dir,
            &format!("{tag}_paths.csv"),
            &paths_csv(run, sol.objective, t_max, &manifest.id),
        )?;
        write_output(
            dir,
            &format!("{tag}_path_nodes.csv"),
            &path_nodes_csv(&scenario, run, sol.objective, &manifest.id),
        )?;
    }

    let bin_width = 2.0;
    let od_hist = modal_share_histogram(&scenario, ShareBasis::OdPairs(&fair_sol), bin_width)
        .map_err(|err| CliError::Internal(err.to_string()))?;
    let path_hist = modal_share_histogram(&scenario, ShareBasis::Paths(&fair_run), bin_width)
        .map_err(|err| CliError::Internal(err.to_string()))?;
    let delta = histogram_difference(&path_hist, &od_hist)
        .map_err(|err| CliError::Internal(err.to_string()))?;
    write_output(dir, "histogram_od.csv", &histogram_csv(&od_hist, id))?;
    write_output(dir, "histogram_paths.csv", &histogram_csv(&path_hist, id))?;
    write_output(dir, "histogram_delta.csv", &delta_csv(&delta, id))?;
    write_output(
        dir,
        "modal_share.svg",
        &histogram_svg(&path_hist, "fairness plan: travel time by mode", id),
    )?;
    write_output(dir, "manifest.json", &manifest.to_json())?;

    let time_metrics = flow_metrics(&scenario, &time_sol);
    let fair_metrics = flow_metrics(&scenario, &fair_sol);
    println!();
    println!("{:<28}{:>12}{:>14}", "measure", "min-time", "min-fairness");
    println!(
        "{:<28}{:>12.4}{:>14.4}",
        "total time (user-min/min)", time_metrics.j_time, fair_metrics.j_time
    );
    println!(
        "{:<28}{:>12.4}{:>14.4}",
        "unfairness (min)", time_metrics.j_acc, fair_metrics.j_acc
    );
    println!(
        "{:<28}{:>12.4}{:>14.4}",
        "path unfairness (min)", time_path_unfairness, fair_path_unfairness
    );
    println!(
        "{:<28}{:>12.4}{:>14.4}",
        "fleet usage (vehicles)", time_metrics.fleet_usage, fair_metrics.fleet_usage
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_map_error_classes() {
        assert_eq!(CliError::Data("x".into()).code(), 3);
        assert_eq!(CliError::Infeasible("x".into()).code(), 4);
        assert_eq!(CliError::Internal("x".into()).code(), 5);
    }

    #[test]
    fn command_forms_normalise_flags_and_skip_output_location() {
        let args = SolveArgs {
            scenario: ScenarioArgs {
                network: PathBuf::from("net.json"),
                demand: PathBuf::from("demand.csv"),
                params: PathBuf::from("params.txt"),
            },
            out: OutArgs {
                out: PathBuf::from("/tmp/somewhere"),
                no_timestamp: true,
            },
            objective: ObjectiveArg::Fairness,
            export_mps: None,
            import_solution: None,
            max_iterations: 50_000,
        };
        let command = solve_command_form(&args);
        assert_eq!(
            command,
            vec![
                "solve",
                "--network",
                "net.json",
                "--demand",
                "demand.csv",
                "--params",
                "params.txt",
                "--objective",
                "fairness",
                "--max-iterations",
                "50000",
                "--no-timestamp",
            ]
        );
        assert!(!command.iter().any(|a| a.contains("somewhere")));
    }
}
