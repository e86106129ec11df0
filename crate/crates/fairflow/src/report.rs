//! Reporting: modal-share histograms, comparison tables, renderers and the
//! run manifest that ties output files to their inputs.
//!
//! The same plan can be summarised two ways: by origin-destination pair
//! (each demand appears once at its average travel time) or by path (each
//! allocated path appears with its own door-to-door time).  Comparing the
//! two histograms shows how much an averaged view hides.

use crate::network::{ArcKind, Layer};
use crate::pathalloc::{AllocationRun, PathError};
use crate::planner::{region_unfairness, FlowMetrics, FlowSolution};
use crate::scenario::Scenario;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to report: the input has no weighted entries")]
    EmptyInput,
    #[error("bin width must be positive, got {width}")]
    NonPositiveBinWidth { width: f64 },
    #[error("histograms use different bin widths ({left} vs {right} minutes)")]
    BinWidthMismatch { left: f64, right: f64 },
    #[error(transparent)]
    Alloc(#[from] PathError),
}

/// Travel-time classes a minute on the road can belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClass {
    Walk,
    Bike,
    Car,
    PublicTransit,
    Switch,
}

impl ModeClass {
    pub const ALL: [ModeClass; 5] = [
        ModeClass::Walk,
        ModeClass::Bike,
        ModeClass::Car,
        ModeClass::PublicTransit,
        ModeClass::Switch,
    ];

    pub fn index(self) -> usize {
        match self {
            ModeClass::Walk => 0,
            ModeClass::Bike => 1,
            ModeClass::Car => 2,
            ModeClass::PublicTransit => 3,
            ModeClass::Switch => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModeClass::Walk => "walk",
            ModeClass::Bike => "bike",
            ModeClass::Car => "car",
            ModeClass::PublicTransit => "public_transit",
            ModeClass::Switch => "switch",
        }
    }
}

/// The class a minute spent on this arc counts towards.
pub fn arc_mode_class(kind: ArcKind) -> ModeClass {
    match kind {
        ArcKind::Switch => ModeClass::Switch,
        ArcKind::Within(Layer::Walk) => ModeClass::Walk,
        ArcKind::Within(Layer::Bike) => ModeClass::Bike,
        ArcKind::Within(Layer::Car) => ModeClass::Car,
        ArcKind::Within(Layer::PublicTransit) => ModeClass::PublicTransit,
        // Terminal layers carry no arcs; a switch is the only thing that
        // can touch them.
        ArcKind::Within(Layer::Origin) | ArcKind::Within(Layer::Destination) => ModeClass::Switch,
    }
}

/// One travel-time bin: users arriving per minute whose door-to-door time
/// falls in `[lo_min, hi_min)`, and how their riding minutes split across
/// mode classes (weighted by user rate).
#[derive(Debug, Clone, PartialEq)]
pub struct ModalShareBin {
    pub lo_min: f64,
    pub hi_min: f64,
    /// Users per minute in this bin.
    pub users_per_min: f64,
    /// Rate-weighted minutes per mode class, indexed by [`ModeClass::index`].
    pub class_time: [f64; 5],
}

impl ModalShareBin {
    /// Fraction of this bin's travel time spent in `class`.
    pub fn share(&self, class: ModeClass) -> f64 {
        let total: f64 = self.class_time.iter().sum();
        if total == 0.0 {
            0.0
        } else {
            self.class_time[class.index()] / total
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalShareHistogram {
    pub bin_width_min: f64,
    /// Non-empty bins, ascending by `lo_min`.
    pub bins: Vec<ModalShareBin>,
}

impl ModalShareHistogram {
    pub fn total_rate(&self) -> f64 {
        self.bins.iter().map(|b| b.users_per_min).sum()
    }

    pub fn total_time_mass(&self) -> f64 {
        self.bins
            .iter()
            .map(|b| b.class_time.iter().sum::<f64>())
            .sum()
    }
}

/// What a histogram entry stands for: a whole demand at its average travel
/// time, or a single allocated path at its actual travel time.
pub enum ShareBasis<'a> {
    OdPairs(&'a FlowSolution),
    Paths(&'a AllocationRun),
}

struct TimePoint {
    time_min: f64,
    weight: f64,
    class_min: [f64; 5],
}

fn od_points(scenario: &Scenario, sol: &FlowSolution) -> Vec<TimePoint> {
    let arcs = scenario.graph.arcs();
    scenario
        .demands()
        .iter()
        .enumerate()
        .map(|(m, demand)| {
            let mut class_min = [0.0; 5];
            for (a, arc) in arcs.iter().enumerate() {
                let minutes = arc.travel_time_min * sol.demand_flows[m][a] / demand.rate;
                class_min[arc_mode_class(arc.kind).index()] += minutes;
            }
            TimePoint {
                time_min: class_min.iter().sum(),
                weight: demand.rate,
                class_min,
            }
        })
        .collect()
}

fn path_points(scenario: &Scenario, run: &AllocationRun) -> Result<Vec<TimePoint>, ReportError> {
    if !run.is_complete() {
        return Err(ReportError::Alloc(PathError::IncompleteAllocation {
            failed: run.failed_demands(),
        }));
    }
    let arcs = scenario.graph.arcs();
    let mut points = Vec::new();
    for alloc in run.allocations() {
        let rate = scenario.demands()[alloc.demand_pos].rate;
        for (path, &fraction) in alloc.paths.iter().zip(&alloc.fractions) {
            if fraction <= 0.0 {
                continue;
            }
            let mut class_min = [0.0; 5];
            for &a in &path.arcs {
                class_min[arc_mode_class(arcs[a].kind).index()] += arcs[a].travel_time_min;
            }
            points.push(TimePoint {
                time_min: path.time_min,
                weight: fraction * rate,
                class_min,
            });
        }
    }
    Ok(points)
}

/// Bins user arrival rates by door-to-door travel time.
pub fn modal_share_histogram(
    scenario: &Scenario,
    basis: ShareBasis<'_>,
    bin_width_min: f64,
) -> Result<ModalShareHistogram, ReportError> {
    if !(bin_width_min > 0.0) || !bin_width_min.is_finite() {
        return Err(ReportError::NonPositiveBinWidth { width: bin_width_min });
    }
    let points = match basis {
        ShareBasis::OdPairs(sol) => od_points(scenario, sol),
        ShareBasis::Paths(run) => path_points(scenario, run)?,
    };
    if points.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let mut keyed: BTreeMap<i64, ModalShareBin> = BTreeMap::new();
    for point in &points {
        let key = (point.time_min / bin_width_min).floor() as i64;
        let bin = keyed.entry(key).or_insert_with(|| ModalShareBin {
            lo_min: key as f64 * bin_width_min,
            hi_min: (key + 1) as f64 * bin_width_min,
            users_per_min: 0.0,
            class_time: [0.0; 5],
        });
        bin.users_per_min += point.weight;
        for (slot, minutes) in bin.class_time.iter_mut().zip(&point.class_min) {
            *slot += point.weight * minutes;
        }
    }
    Ok(ModalShareHistogram {
        bin_width_min,
        bins: keyed.into_values().collect(),
    })
}

/// Signed per-bin differences `left - right`, covering every bin present in
/// either histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramDelta {
    pub bin_width_min: f64,
    pub bins: Vec<ModalShareBin>,
}

pub fn histogram_difference(
    left: &ModalShareHistogram,
    right: &ModalShareHistogram,
) -> Result<HistogramDelta, ReportError> {
    if left.bin_width_min != right.bin_width_min {
        return Err(ReportError::BinWidthMismatch {
            left: left.bin_width_min,
            right: right.bin_width_min,
        });
    }
    let key_of = |bin: &ModalShareBin| (bin.lo_min / left.bin_width_min).round() as i64;
    let mut keyed: BTreeMap<i64, ModalShareBin> = BTreeMap::new();
    for bin in &left.bins {
        keyed.insert(key_of(bin), bin.clone());
    }
    for bin in &right.bins {
        let entry = keyed.entry(key_of(bin)).or_insert_with(|| ModalShareBin {
            lo_min: bin.lo_min,
            hi_min: bin.hi_min,
            users_per_min: 0.0,
            class_time: [0.0; 5],
        });
        entry.users_per_min -= bin.users_per_min;
        for (slot, minutes) in entry.class_time.iter_mut().zip(&bin.class_time) {
            *slot -= minutes;
        }
    }
    Ok(HistogramDelta {
        bin_width_min: left.bin_width_min,
        bins: keyed.into_values().collect(),
    })
}

fn manifest_line(manifest_id: Option<&str>) -> String {
    match manifest_id {
        Some(id) => format!("# manifest {id}\n"),
        None => String::new(),
    }
}

const HISTOGRAM_HEADER: &str =
    "bin_lo_min,bin_hi_min,users_per_min,walk_min,bike_min,car_min,public_transit_min,switch_min\n";

fn histogram_rows(bins: &[ModalShareBin]) -> String {
    let mut out = String::new();
    for bin in bins {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            bin.lo_min,
            bin.hi_min,
            bin.users_per_min,
            bin.class_time[0],
            bin.class_time[1],
            bin.class_time[2],
            bin.class_time[3],
            bin.class_time[4],
        ));
    }
    out
}

pub fn histogram_csv(histogram: &ModalShareHistogram, manifest_id: Option<&str>) -> String {
    let mut out = manifest_line(manifest_id);
    out.push_str(HISTOGRAM_HEADER);
    out.push_str(&histogram_rows(&histogram.bins));
    out
}

pub fn delta_csv(delta: &HistogramDelta, manifest_id: Option<&str>) -> String {
    let mut out = manifest_line(manifest_id);
    out.push_str(HISTOGRAM_HEADER);
    out.push_str(&histogram_rows(&delta.bins));
    out
}

/// Per-region unfairness as CSV, ascending by region id.
pub fn region_csv(scenario: &Scenario, excess_min: &[f64], manifest_id: Option<&str>) -> String {
    let mut out = manifest_line(manifest_id);
    out.push_str("region_id,population,unfairness_min\n");
    for ((id, unfairness), region) in region_unfairness(scenario, excess_min)
        .into_iter()
        .zip(scenario.regions())
    {
        out.push_str(&format!("{},{},{}\n", id, region.population, unfairness));
    }
    out
}

/// Headline measures of one solution as `metric,value` CSV.
pub fn metrics_csv(
    sol: &FlowSolution,
    metrics: &FlowMetrics,
    manifest_id: Option<&str>,
) -> String {
    let mut out = manifest_line(manifest_id);
    out.push_str("metric,value\n");
    out.push_str(&format!("objective,{}\n", sol.objective.tag()));
    out.push_str(&format!("objective_value,{}\n", sol.objective_value));
    out.push_str(&format!("total_time_min,{}\n", metrics.j_time));
    out.push_str(&format!("unfairness_min,{}\n", metrics.j_acc));
    out.push_str(&format!(
        "avg_travel_time_min,{}\n",
        metrics.avg_travel_time_min
    ));
    out.push_str(&format!("fleet_usage_vehicles,{}\n", metrics.fleet_usage));
    out.push_str(&format!("simplex_iterations,{}\n", sol.iterations));
    out.push_str(&format!("solved_by,{}\n", sol.solved_by));
    out
}

const CLASS_COLOURS: [&str; 5] = ["#4c78a8", "#59a14f", "#e45756", "#f2a104", "#9d7660"];

/// Renders the histogram as a self-contained SVG: one stacked bar per time
/// bin, height proportional to user rate, segments split by mode share.
pub fn histogram_svg(
    histogram: &ModalShareHistogram,
    title: &str,
    manifest_id: Option<&str>,
) -> String {
    let width = 720.0;
    let height = 420.0;
    let margin_left = 60.0;
    let margin_right = 160.0;
    let margin_top = 50.0;
    let margin_bottom = 50.0;
    let plot_w = width - margin_left - margin_right;
    let plot_h = height - margin_top - margin_bottom;
    let max_rate = histogram
        .bins
        .iter()
        .map(|b| b.users_per_min)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let n = histogram.bins.len() as f64;
    let slot_w = plot_w / n;
    let bar_w = slot_w * 0.7;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    if let Some(id) = manifest_id {
        svg.push_str(&format!("  <!-- manifest {id} -->\n"));
    }
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        margin_left + plot_w / 2.0
    ));
    svg.push_str(&format!(
        "  <line x1=\"{margin_left}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        margin_top + plot_h,
        margin_left + plot_w,
        margin_top + plot_h
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         transform=\"rotate(-90 18 {})\" text-anchor=\"middle\">users per minute</text>\n",
        margin_top + plot_h / 2.0,
        margin_top + plot_h / 2.0
    ));
    for (i, bin) in histogram.bins.iter().enumerate() {
        let x = margin_left + i as f64 * slot_w + (slot_w - bar_w) / 2.0;
        let bar_h = plot_h * bin.users_per_min / max_rate;
        let mut y = margin_top + plot_h;
        for class in ModeClass::ALL {
            let seg_h = bar_h * bin.share(class);
            if seg_h <= 0.0 {
                continue;
            }
            y -= seg_h;
            svg.push_str(&format!(
                "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_w:.2}\" height=\"{seg_h:.2}\" \
                 fill=\"{}\"><title>{}: {:.1}% of bin time</title></rect>\n",
                CLASS_COLOURS[class.index()],
                class.label(),
                100.0 * bin.share(class)
            ));
        }
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}-{}</text>\n",
            x + bar_w / 2.0,
            margin_top + plot_h + 16.0,
            bin.lo_min,
            bin.hi_min
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{:.3}</text>\n",
            x + bar_w / 2.0,
            margin_top + plot_h - bar_h - 5.0,
            bin.users_per_min
        ));
    }
    for (i, class) in ModeClass::ALL.iter().enumerate() {
        let y = margin_top + 20.0 * i as f64;
        let x = width - margin_right + 16.0;
        svg.push_str(&format!(
            "  <rect x=\"{x}\" y=\"{y}\" width=\"14\" height=\"14\" fill=\"{}\"/>\n",
            CLASS_COLOURS[class.index()]
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            x + 20.0,
            y + 11.0,
            class.label()
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">door-to-door travel time, minutes</text>\n",
        margin_left + plot_w / 2.0,
        height - 12.0
    ));
    svg.push_str("</svg>\n");
    svg
}

/// Records what produced an output file: the command line, content hashes
/// of every input, the effective parameters and an id derived from all of
/// it.  Two runs with the same inputs and no timestamp produce identical
/// manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub id: String,
    pub artifact: String,
    pub command: Vec<String>,
    /// Input path -> SHA-256 of its content, hex.
    pub inputs: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

impl RunManifest {
    pub fn new(
        artifact: &str,
        command: Vec<String>,
        inputs: BTreeMap<String, String>,
        params: BTreeMap<String, String>,
        timestamp_unix: Option<u64>,
    ) -> Self {
        let mut manifest = RunManifest {
            id: String::new(),
            artifact: artifact.to_string(),
            command,
            inputs,
            params,
            timestamp_unix,
        };
        let unkeyed = serde_json::to_string(&manifest).expect("manifest serialises");
        manifest.id = sha256_hex(unkeyed.as_bytes())[..12].to_string();
        manifest
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serialises");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Recomputes the id from the other fields.
    pub fn expected_id(&self) -> String {
        let mut unkeyed = self.clone();
        unkeyed.id = String::new();
        let text = serde_json::to_string(&unkeyed).expect("manifest serialises");
        sha256_hex(text.as_bytes())[..12].to_string()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn hash_file(path: &std::path::Path) -> std::io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}
