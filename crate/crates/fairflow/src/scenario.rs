//! Travel demands, population regions and planning parameters.
//!
//! A scenario binds a validated [`IntermodalGraph`] to the demand side: each
//! demand ships travellers at a constant rate from one origin node to one
//! destination node, and belongs to exactly one geographical region whose
//! population later weights the unfairness objective.  All rates are stored
//! in users per minute and all times in minutes; the demand file may declare
//! rates per hour, which are converted on load.

use crate::network::{IntermodalGraph, Layer, NetworkError, NodeId};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use thiserror::Error;

pub const DEFAULT_GAMMA_REB: f64 = 1e-3;
pub const DEFAULT_GAMMA_TIME: f64 = 1e-3;

/// Identifier of a travel demand (an origin-destination pair with a rate).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DemandId(pub u32);

/// Identifier of a population region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionId(pub u32);

impl fmt::Display for DemandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demand {
    pub id: DemandId,
    pub origin: NodeId,
    pub destination: NodeId,
    /// Arrival rate of travellers, users per minute, strictly positive.
    pub rate: f64,
    pub region: RegionId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: RegionId,
    /// Number of inhabitants; weights the region in the unfairness measure.
    pub population: f64,
    /// Demands anchored in this region, ascending by demand id.
    pub demand_ids: Vec<DemandId>,
}

/// Planning parameters shared by both optimisation problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Maximum number of vehicles the fleet may keep busy (Σ time × flow
    /// over road arcs), in vehicles.
    pub fleet_cap: f64,
    /// Travel-time threshold below which a trip counts as accessible, minutes.
    pub t_max_min: f64,
    /// Weight of rebalancing-vehicle travel time in the time objective.
    pub gamma_reb: f64,
    /// Weight of the time objective inside the unfairness objective.
    pub gamma_time: f64,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("demand {demand} references unknown node {node}")]
    UnknownNode { demand: DemandId, node: NodeId },
    #[error("demand {demand}: node {node} is in layer {found}, expected {expected}")]
    WrongLayer {
        demand: DemandId,
        node: NodeId,
        found: Layer,
        expected: Layer,
    },
    #[error("demand {demand} has non-positive rate {rate} users/min")]
    DemandRateNonPositive { demand: DemandId, rate: f64 },
    #[error("demand {demand} references region {region} which has no population entry")]
    RegionlessDemand { demand: DemandId, region: RegionId },
    #[error("duplicate demand id {0}")]
    DuplicateDemandId(DemandId),
    #[error("duplicate region id {0}")]
    DuplicateRegionId(RegionId),
    #[error("region {region} has invalid population {population}")]
    BadPopulation { region: RegionId, population: f64 },
    #[error("parameter {key} = {value} is out of range: {why}")]
    ParamOutOfRange {
        key: &'static str,
        value: f64,
        why: &'static str,
    },
    #[error("demand file line {line}: rate unit tag is missing")]
    UnitTagMissing { line: usize },
    #[error("{file} line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("missing region table: no `region_id,population` section in the demand file and no regions.csv next to it")]
    MissingRegionTable,
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// A validated planning instance: graph + demands + regions + parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: IntermodalGraph,
    pub params: Params,
    demands: Vec<Demand>,
    regions: Vec<Region>,
}

impl Scenario {
    /// Validates demands and regions against the graph and the parameter
    /// ranges, and indexes demands into their regions.
    ///
    /// `region_populations` must list every region referenced by a demand;
    /// regions without demands are kept (they contribute zero unfairness).
    pub fn new(
        graph: IntermodalGraph,
        mut demands: Vec<Demand>,
        region_populations: Vec<(RegionId, f64)>,
        params: Params,
    ) -> Result<Self, ScenarioError> {
        check_params(&params)?;

        let mut regions: BTreeMap<RegionId, Region> = BTreeMap::new();
        for (id, population) in region_populations {
            if !population.is_finite() || population < 0.0 {
                return Err(ScenarioError::BadPopulation { region: id, population });
            }
            let prior = regions.insert(
                id,
                Region {
                    id,
                    population,
                    demand_ids: Vec::new(),
                },
            );
            if prior.is_some() {
                return Err(ScenarioError::DuplicateRegionId(id));
            }
        }

        demands.sort_by_key(|d| d.id);
        let mut seen = HashMap::new();
        for demand in &demands {
            if seen.insert(demand.id, ()).is_some() {
                return Err(ScenarioError::DuplicateDemandId(demand.id));
            }
            if !demand.rate.is_finite() || demand.rate <= 0.0 {
                return Err(ScenarioError::DemandRateNonPositive {
                    demand: demand.id,
                    rate: demand.rate,
                });
            }
            for (node, expected) in [
                (demand.origin, Layer::Origin),
                (demand.destination, Layer::Destination),
            ] {
                let found = graph
                    .node(node)
                    .ok_or(ScenarioError::UnknownNode {
                        demand: demand.id,
                        node,
                    })?
                    .layer;
                if found != expected {
                    return Err(ScenarioError::WrongLayer {
                        demand: demand.id,
                        node,
                        found,
                        expected,
                    });
                }
            }
            let region = regions
                .get_mut(&demand.region)
                .ok_or(ScenarioError::RegionlessDemand {
                    demand: demand.id,
                    region: demand.region,
                })?;
            region.demand_ids.push(demand.id);
        }

        Ok(Scenario {
            graph,
            params,
            demands,
            regions: regions.into_values().collect(),
        })
    }

    /// Demands ascending by id; the slice index is the demand position used
    /// throughout the planner.
    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    /// Regions ascending by id.
    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn demand_pos(&self, id: DemandId) -> Option<usize> {
        self.demands.binary_search_by_key(&id, |d| d.id).ok()
    }

    pub fn demand(&self, id: DemandId) -> Option<&Demand> {
        self.demand_pos(id).map(|p| &self.demands[p])
    }

    /// Combined arrival rate over all demands, users per minute.
    pub fn total_demand_rate(&self) -> f64 {
        self.demands.iter().map(|d| d.rate).sum()
    }
}

fn check_params(params: &Params) -> Result<(), ScenarioError> {
    let checks = [
        ("fleet_cap", params.fleet_cap, params.fleet_cap >= 0.0, "must be >= 0"),
        ("t_max_min", params.t_max_min, params.t_max_min > 0.0, "must be > 0"),
        ("gamma_reb", params.gamma_reb, params.gamma_reb > 0.0, "must be > 0"),
        ("gamma_time", params.gamma_time, params.gamma_time > 0.0, "must be > 0"),
    ];
    for (key, value, ok, why) in checks {
        if !value.is_finite() || !ok {
            return Err(ScenarioError::ParamOutOfRange { key, value, why });
        }
    }
    Ok(())
}

const DEMAND_HEADER: &str = "demand_id,region_id,origin_node,dest_node,rate,rate_unit";
const REGION_HEADER: &str = "region_id,population";

/// Multiplier converting a rate in the given unit to users per minute.
fn rate_unit_factor(tag: &str) -> Option<f64> {
    match tag {
        "users_per_hour" => Some(1.0 / 60.0),
        "users_per_min" | "users_per_minute" => Some(1.0),
        _ => None,
    }
}

fn parse_err(file: &str, line: usize, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        file: file.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parses the demand table and, when present, the embedded
/// `region_id,population` table that may follow it in the same file.
///
/// Returns demands (rates already in users per minute) and the region table
/// if one was embedded.
#[allow(clippy::type_complexity)]
pub fn parse_demand_file(
    text: &str,
    file: &str,
) -> Result<(Vec<Demand>, Option<Vec<(RegionId, f64)>>), ScenarioError> {
    let mut demands = Vec::new();
    let mut regions: Option<Vec<(RegionId, f64)>> = None;
    let mut saw_demand_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_demand_header {
            if line != DEMAND_HEADER {
                return Err(parse_err(
                    file,
                    lineno,
                    format!("expected header `{DEMAND_HEADER}`, found `{line}`"),
                ));
            }
            saw_demand_header = true;
            continue;
        }
        if line == REGION_HEADER {
            regions = Some(Vec::new());
            continue;
        }
        if let Some(regions) = regions.as_mut() {
            regions.push(parse_region_row(line, file, lineno)?);
            continue;
        }

        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(parse_err(
                file,
                lineno,
                format!("expected 6 comma-separated fields, found {}", fields.len()),
            ));
        }
        let parse_u32 = |s: &str, what: &str| {
            s.parse::<u32>()
                .map_err(|_| parse_err(file, lineno, format!("invalid {what} `{s}`")))
        };
        let id = DemandId(parse_u32(fields[0], "demand_id")?);
        let region = RegionId(parse_u32(fields[1], "region_id")?);
        let origin = NodeId(parse_u32(fields[2], "origin_node")?);
        let destination = NodeId(parse_u32(fields[3], "dest_node")?);
        let rate_raw: f64 = fields[4]
            .parse()
            .map_err(|_| parse_err(file, lineno, format!("invalid rate `{}`", fields[4])))?;
        if fields[5].is_empty() {
            return Err(ScenarioError::UnitTagMissing { line: lineno });
        }
        let factor = rate_unit_factor(fields[5]).ok_or_else(|| {
            parse_err(
                file,
                lineno,
                format!(
                    "unknown rate unit `{}`; use users_per_hour or users_per_min",
                    fields[5]
                ),
            )
        })?;
        demands.push(Demand {
            id,
            origin,
            destination,
            rate: rate_raw * factor,
            region,
        });
    }

    if !saw_demand_header {
        return Err(parse_err(file, 1, format!("empty file, expected `{DEMAND_HEADER}`")));
    }
    Ok((demands, regions))
}

fn parse_region_row(line: &str, file: &str, lineno: usize) -> Result<(RegionId, f64), ScenarioError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 2 {
        return Err(parse_err(
            file,
            lineno,
            format!("expected 2 comma-separated fields, found {}", fields.len()),
        ));
    }
    let id = fields[0]
        .parse::<u32>()
        .map_err(|_| parse_err(file, lineno, format!("invalid region_id `{}`", fields[0])))?;
    let population: f64 = fields[1]
        .parse()
        .map_err(|_| parse_err(file, lineno, format!("invalid population `{}`", fields[1])))?;
    Ok((RegionId(id), population))
}

/// Parses a standalone `region_id,population` file.
pub fn parse_regions_file(text: &str, file: &str) -> Result<Vec<(RegionId, f64)>, ScenarioError> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != REGION_HEADER {
                return Err(parse_err(
                    file,
                    lineno,
                    format!("expected header `{REGION_HEADER}`, found `{line}`"),
                ));
            }
            saw_header = true;
            continue;
        }
        rows.push(parse_region_row(line, file, lineno)?);
    }
    if !saw_header {
        return Err(parse_err(file, 1, format!("empty file, expected `{REGION_HEADER}`")));
    }
    Ok(rows)
}

/// Parses the `key = value` parameter file.
///
/// Keys `fleet_cap` and `t_max_min` are required; `gamma_reb` and
/// `gamma_time` default to 1e-3 when absent.
pub fn parse_params(text: &str, file: &str) -> Result<Params, ScenarioError> {
    let mut values: HashMap<&str, f64> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            parse_err(file, lineno, format!("expected `key = value`, found `{line}`"))
        })?;
        let key = key.trim();
        let known = ["fleet_cap", "t_max_min", "gamma_reb", "gamma_time"]
            .iter()
            .find(|k| **k == key)
            .copied()
            .ok_or_else(|| parse_err(file, lineno, format!("unknown parameter `{key}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse_err(file, lineno, format!("invalid number `{}`", value.trim())))?;
        if values.insert(known, value).is_some() {
            return Err(parse_err(file, lineno, format!("parameter `{key}` given twice")));
        }
    }
    let require = |key: &'static str| {
        values
            .get(key)
            .copied()
            .ok_or_else(|| parse_err(file, 1, format!("missing required parameter `{key}`")))
    };
    let params = Params {
        fleet_cap: require("fleet_cap")?,
        t_max_min: require("t_max_min")?,
        gamma_reb: values.get("gamma_reb").copied().unwrap_or(DEFAULT_GAMMA_REB),
        gamma_time: values.get("gamma_time").copied().unwrap_or(DEFAULT_GAMMA_TIME),
    };
    check_params(&params)?;
    Ok(params)
}

/// Renders demands (and their regions) in the demand-file format, rates in
/// users per minute.  `parse_demand_file` reads the result back exactly.
pub fn write_demand_file(demands: &[Demand], regions: &[(RegionId, f64)]) -> String {
    let mut out = String::new();
    out.push_str(DEMAND_HEADER);
    out.push('\n');
    let mut sorted: Vec<&Demand> = demands.iter().collect();
    sorted.sort_by_key(|d| d.id);
    for d in sorted {
        out.push_str(&format!(
            "{},{},{},{},{},users_per_min\n",
            d.id, d.region, d.origin, d.destination, d.rate
        ));
    }
    out.push('\n');
    out.push_str(REGION_HEADER);
    out.push('\n');
    let mut regions: Vec<&(RegionId, f64)> = regions.iter().collect();
    regions.sort_by_key(|(id, _)| *id);
    for (id, pop) in regions {
        out.push_str(&format!("{id},{pop}\n"));
    }
    out
}

/// Renders parameters in the parameter-file format.
pub fn write_params(params: &Params) -> String {
    format!(
        "fleet_cap = {}\nt_max_min = {}\ngamma_reb = {}\ngamma_time = {}\n",
        params.fleet_cap, params.t_max_min, params.gamma_reb, params.gamma_time
    )
}

/// Loads a scenario from a network JSON file, a demand file and a parameter
/// file.
///
/// Region populations come from the `region_id,population` table embedded in
/// the demand file when present, otherwise from a `regions.csv` next to it.
pub fn load_scenario(
    network_path: &Path,
    demand_path: &Path,
    params_path: &Path,
) -> Result<Scenario, ScenarioError> {
    let read = |path: &Path| {
        std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    let graph = IntermodalGraph::read_file(network_path)?;
    let demand_text = read(demand_path)?;
    let demand_name = demand_path.display().to_string();
    let (demands, embedded) = parse_demand_file(&demand_text, &demand_name)?;
    let regions = match embedded {
        Some(regions) => regions,
        None => {
            let sibling = demand_path.with_file_name("regions.csv");
            if sibling.is_file() {
                let text = read(&sibling)?;
                parse_regions_file(&text, &sibling.display().to_string())?
            } else {
                return Err(ScenarioError::MissingRegionTable);
            }
        }
    };
    let params_text = read(params_path)?;
    let params = parse_params(&params_text, &params_path.display().to_string())?;
    Scenario::new(graph, demands, regions, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Arc, ArcId, ArcKind, Node};

    fn test_graph() -> IntermodalGraph {
        IntermodalGraph::build(
            vec![
                Node { id: NodeId(0), layer: Layer::Origin, label: None },
                Node { id: NodeId(1), layer: Layer::Walk, label: None },
                Node { id: NodeId(2), layer: Layer::Walk, label: None },
                Node { id: NodeId(3), layer: Layer::Destination, label: None },
                Node { id: NodeId(4), layer: Layer::Origin, label: None },
            ],
            vec![
                Arc { id: ArcId(0), tail: NodeId(0), head: NodeId(1), travel_time_min: 1.0, kind: ArcKind::Switch },
                Arc { id: ArcId(1), tail: NodeId(1), head: NodeId(2), travel_time_min: 10.0, kind: ArcKind::Within(Layer::Walk) },
                Arc { id: ArcId(2), tail: NodeId(2), head: NodeId(3), travel_time_min: 1.0, kind: ArcKind::Switch },
            ],
        )
        .unwrap()
    }

    fn params() -> Params {
        Params {
            fleet_cap: 100.0,
            t_max_min: 20.0,
            gamma_reb: DEFAULT_GAMMA_REB,
            gamma_time: DEFAULT_GAMMA_TIME,
        }
    }

    fn demand(id: u32, rate: f64, region: u32) -> Demand {
        Demand {
            id: DemandId(id),
            origin: NodeId(0),
            destination: NodeId(3),
            rate,
            region: RegionId(region),
        }
    }

    #[test]
    fn scenario_validates_and_indexes() {
        let s = Scenario::new(
            test_graph(),
            vec![demand(1, 2.5, 0), demand(0, 1.0, 0)],
            vec![(RegionId(0), 500.0)],
            params(),
        )
        .unwrap();
        assert_eq!(s.demands().len(), 2);
        // Sorted by id regardless of input order.
        assert_eq!(s.demands()[0].id, DemandId(0));
        assert_eq!(s.total_demand_rate(), 3.5);
        assert_eq!(s.regions()[0].demand_ids, vec![DemandId(0), DemandId(1)]);
        assert_eq!(s.demand_pos(DemandId(1)), Some(1));
    }

    #[test]
    fn each_demand_lands_in_exactly_one_region() {
        let s = Scenario::new(
            test_graph(),
            vec![demand(0, 1.0, 0), demand(1, 1.0, 1), demand(2, 1.0, 0)],
            vec![(RegionId(0), 100.0), (RegionId(1), 200.0), (RegionId(2), 50.0)],
            params(),
        )
        .unwrap();
        let total: usize = s.regions().iter().map(|r| r.demand_ids.len()).sum();
        assert_eq!(total, s.demands().len());
        assert!(s.regions()[2].demand_ids.is_empty());
    }

    #[test]
    fn non_positive_rate_rejected() {
        for rate in [0.0, -1.0, f64::NAN] {
            let err = Scenario::new(
                test_graph(),
                vec![demand(0, rate, 0)],
                vec![(RegionId(0), 100.0)],
                params(),
            )
            .unwrap_err();
            assert!(matches!(err, ScenarioError::DemandRateNonPositive { .. }));
        }
    }

    #[test]
    fn unknown_and_wrong_layer_nodes_rejected() {
        let mut d = demand(0, 1.0, 0);
        d.origin = NodeId(99);
        let err = Scenario::new(test_graph(), vec![d], vec![(RegionId(0), 1.0)], params())
            .unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownNode { .. }));

        let mut d = demand(0, 1.0, 0);
        d.origin = NodeId(1); // a walk node
        let err = Scenario::new(test_graph(), vec![d], vec![(RegionId(0), 1.0)], params())
            .unwrap_err();
        match err {
            ScenarioError::WrongLayer { found, expected, .. } => {
                assert_eq!(found, Layer::Walk);
                assert_eq!(expected, Layer::Origin);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn demand_without_region_entry_rejected() {
        let err = Scenario::new(
            test_graph(),
            vec![demand(0, 1.0, 7)],
            vec![(RegionId(0), 100.0)],
            params(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ScenarioError::RegionlessDemand { region: RegionId(7), .. }
        ));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Scenario::new(
            test_graph(),
            vec![demand(0, 1.0, 0), demand(0, 2.0, 0)],
            vec![(RegionId(0), 1.0)],
            params(),
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::DuplicateDemandId(DemandId(0))));

        let err = Scenario::new(
            test_graph(),
            vec![],
            vec![(RegionId(1), 1.0), (RegionId(1), 2.0)],
            params(),
        )
        .unwrap_err();
        assert!(matches!(err, ScenarioError::DuplicateRegionId(RegionId(1))));
    }

    #[test]
    fn bad_params_rejected() {
        let cases = [
            Params { fleet_cap: -1.0, ..params() },
            Params { t_max_min: 0.0, ..params() },
            Params { gamma_reb: 0.0, ..params() },
            Params { gamma_time: -0.5, ..params() },
            Params { fleet_cap: f64::INFINITY, ..params() },
        ];
        for p in cases {
            let err = Scenario::new(test_graph(), vec![], vec![], p).unwrap_err();
            assert!(matches!(err, ScenarioError::ParamOutOfRange { .. }));
        }
    }

    #[test]
    fn hourly_rates_convert_to_per_minute() {
        let text = "demand_id,region_id,origin_node,dest_node,rate,rate_unit\n\
                    0,0,0,3,60,users_per_hour\n\
                    1,0,0,3,2.5,users_per_min\n";
        let (demands, _) = parse_demand_file(text, "demands.csv").unwrap();
        assert_eq!(demands[0].rate, 1.0);
        assert_eq!(demands[1].rate, 2.5);
    }

    #[test]
    fn large_hourly_rate_matches_reference_conversion() {
        let text = "demand_id,region_id,origin_node,dest_node,rate,rate_unit\n\
                    0,0,0,3,59000,users_per_hour\n";
        let (demands, _) = parse_demand_file(text, "demands.csv").unwrap();
        assert!((demands[0].rate - 983.33).abs() < 0.01);
    }

    #[test]
    fn missing_unit_tag_is_its_own_error() {
        let text = "demand_id,region_id,origin_node,dest_node,rate,rate_unit\n\
                    0,0,0,3,60,\n";
        let err = parse_demand_file(text, "demands.csv").unwrap_err();
        assert!(matches!(err, ScenarioError::UnitTagMissing { line: 2 }));
    }

    #[test]
    fn unknown_unit_tag_rejected() {
        let text = "demand_id,region_id,origin_node,dest_node,rate,rate_unit\n\
                    0,0,0,3,60,users_per_day\n";
        let err = parse_demand_file(text, "demands.csv").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2, .. }));
    }

    #[test]
    fn embedded_region_table_is_parsed() {
        let text = "demand_id,region_id,origin_node,dest_node,rate,rate_unit\n\
                    0,0,0,3,1.5,users_per_min\n\
                    \n\
                    region_id,population\n\
                    0,900\n\
                    1,600\n";
        let (demands, regions) = parse_demand_file(text, "demands.csv").unwrap();
        assert_eq!(demands.len(), 1);
        assert_eq!(
            regions.unwrap(),
            vec![(RegionId(0), 900.0), (RegionId(1), 600.0)]
        );
    }

    #[test]
    fn demand_file_round_trips() {
        let demands = vec![demand(0, 1.25, 0), demand(3, 0.4, 1)];
        let regions = vec![(RegionId(0), 900.0), (RegionId(1), 600.0)];
        let text = write_demand_file(&demands, &regions);
        let (back_d, back_r) = parse_demand_file(&text, "demands.csv").unwrap();
        assert_eq!(back_d, demands);
        assert_eq!(back_r.unwrap(), regions);
    }

    #[test]
    fn params_parse_with_defaults() {
        let p = parse_params("fleet_cap = 40\nt_max_min = 20\n", "params.txt").unwrap();
        assert_eq!(p.fleet_cap, 40.0);
        assert_eq!(p.t_max_min, 20.0);
        assert_eq!(p.gamma_reb, DEFAULT_GAMMA_REB);
        assert_eq!(p.gamma_time, DEFAULT_GAMMA_TIME);

        let p = parse_params(
            "# tuned\nfleet_cap = 4000\nt_max_min = 20\ngamma_reb = 0.002\ngamma_time = 0.01\n",
            "params.txt",
        )
        .unwrap();
        assert_eq!(p.gamma_reb, 0.002);
        assert_eq!(p.gamma_time, 0.01);
    }

    #[test]
    fn params_require_fleet_cap_and_threshold() {
        assert!(parse_params("fleet_cap = 40\n", "p").is_err());
        assert!(parse_params("t_max_min = 20\n", "p").is_err());
        assert!(parse_params("fleet_cap = 40\nt_max_min = 20\nbogus = 1\n", "p").is_err());
        assert!(parse_params("fleet_cap = 40\nfleet_cap = 41\nt_max_min = 20\n", "p").is_err());
    }

    #[test]
    fn params_round_trip() {
        let p = Params {
            fleet_cap: 12.0,
            t_max_min: 20.0,
            gamma_reb: 0.001,
            gamma_time: 0.0025,
        };
        let text = write_params(&p);
        assert_eq!(parse_params(&text, "params.txt").unwrap(), p);
    }

    #[test]
    fn load_scenario_with_sibling_regions_file() {
        let dir = tempfile::tempdir().unwrap();
        let net = dir.path().join("network.json");
        let dem = dir.path().join("demands.csv");
        let par = dir.path().join("params.txt");
        test_graph().write_file(&net).unwrap();
        std::fs::write(
            &dem,
            "demand_id,region_id,origin_node,dest_node,rate,rate_unit\n0,0,0,3,90,users_per_hour\n",
        )
        .unwrap();
        std::fs::write(dir.path().join("regions.csv"), "region_id,population\n0,450\n").unwrap();
        std::fs::write(&par, "fleet_cap = 10\nt_max_min = 15\n").unwrap();

        let s = load_scenario(&net, &dem, &par).unwrap();
        assert_eq!(s.demands()[0].rate, 1.5);
        assert_eq!(s.regions()[0].population, 450.0);
        assert_eq!(s.params.t_max_min, 15.0);

        // Loading the same files twice yields the same scenario.
        let again = load_scenario(&net, &dem, &par).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn load_scenario_without_any_region_table_fails() {
        let dir = tempfile::tempdir().unwrap();
        let net = dir.path().join("network.json");
        let dem = dir.path().join("demands.csv");
        let par = dir.path().join("params.txt");
        test_graph().write_file(&net).unwrap();
        std::fs::write(
            &dem,
            "demand_id,region_id,origin_node,dest_node,rate,rate_unit\n0,0,0,3,90,users_per_hour\n",
        )
        .unwrap();
        std::fs::write(&par, "fleet_cap = 10\nt_max_min = 15\n").unwrap();
        assert!(matches!(
            load_scenario(&net, &dem, &par),
            Err(ScenarioError::MissingRegionTable)
        ));
    }
}
