//! Layered intermodal digraph.
//!
//! The transportation system is one directed graph whose nodes are
//! partitioned into six layers: four travel modes (walk, bike, car, public
//! transit) plus virtual origin and destination layers that anchor demands.
//! Arcs either stay inside a single mode layer (a road segment, a transit
//! leg, ...) or switch between layers (boarding, alighting, parking).  Only
//! a fixed set of ordered layer pairs is a legal switch; everything else is
//! rejected when the graph is built, so downstream code can trust the
//! structure.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// One of the six node layers.
///
/// `Origin` and `Destination` are virtual: they hold the endpoints of travel
/// demands and may not contain internal arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Walk,
    Bike,
    Car,
    PublicTransit,
    Origin,
    Destination,
}

impl Layer {
    pub const ALL: [Layer; 6] = [
        Layer::Walk,
        Layer::Bike,
        Layer::Car,
        Layer::PublicTransit,
        Layer::Origin,
        Layer::Destination,
    ];

    /// Origin and destination layers anchor demands and carry no internal arcs.
    pub fn is_terminal(self) -> bool {
        matches!(self, Layer::Origin | Layer::Destination)
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Layer::Walk => "walk",
            Layer::Bike => "bike",
            Layer::Car => "car",
            Layer::PublicTransit => "public_transit",
            Layer::Origin => "origin",
            Layer::Destination => "destination",
        };
        f.write_str(name)
    }
}

/// Ordered layer pairs that a mode-switch arc may connect.
///
/// Cars can only be boarded at an origin and left at a destination; public
/// transit is entered and exited on foot; bikes are picked up at an origin
/// and dropped either at a walk node or directly at the destination.
pub const PERMITTED_SWITCHES: [(Layer, Layer); 9] = [
    (Layer::Origin, Layer::Walk),
    (Layer::Origin, Layer::Bike),
    (Layer::Origin, Layer::Car),
    (Layer::Walk, Layer::PublicTransit),
    (Layer::PublicTransit, Layer::Walk),
    (Layer::Bike, Layer::Walk),
    (Layer::Walk, Layer::Destination),
    (Layer::Bike, Layer::Destination),
    (Layer::Car, Layer::Destination),
];

/// True when a mode-switch arc may run from `tail` to `head`.
pub fn switch_permitted(tail: Layer, head: Layer) -> bool {
    PERMITTED_SWITCHES.contains(&(tail, head))
}

/// Identifier of a node. Unique within a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

/// Identifier of an arc. Unique within a graph; parallel arcs get distinct ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub layer: Layer,
    /// Optional external name; carries no semantics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// What an arc does: move within one mode layer, or switch layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcKind {
    /// Both endpoints lie in the given (non-terminal) layer.
    Within(Layer),
    /// Endpoints lie in two different layers forming a permitted switch.
    Switch,
}

impl ArcKind {
    pub fn tag(self) -> &'static str {
        match self {
            ArcKind::Within(Layer::Walk) => "walk",
            ArcKind::Within(Layer::Bike) => "bike",
            ArcKind::Within(Layer::Car) => "car",
            ArcKind::Within(Layer::PublicTransit) => "public_transit",
            // Terminal layers cannot hold internal arcs; such kinds are
            // rejected at build time and never serialised.
            ArcKind::Within(Layer::Origin) => "origin",
            ArcKind::Within(Layer::Destination) => "destination",
            ArcKind::Switch => "switch",
        }
    }

    pub fn from_tag(tag: &str) -> Option<ArcKind> {
        Some(match tag {
            "walk" => ArcKind::Within(Layer::Walk),
            "bike" => ArcKind::Within(Layer::Bike),
            "car" => ArcKind::Within(Layer::Car),
            "public_transit" => ArcKind::Within(Layer::PublicTransit),
            "switch" => ArcKind::Switch,
            _ => return None,
        })
    }
}

impl Serialize for ArcKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for ArcKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let tag = String::deserialize(d)?;
        ArcKind::from_tag(&tag)
            .ok_or_else(|| D::Error::custom(format!("unknown arc kind `{tag}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub id: ArcId,
    pub tail: NodeId,
    pub head: NodeId,
    /// Traversal time in minutes; non-negative and finite.
    pub travel_time_min: f64,
    pub kind: ArcKind,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("duplicate node id {0}")]
    DuplicateNodeId(NodeId),
    #[error("duplicate arc id {0}")]
    DuplicateArcId(ArcId),
    #[error("arc {arc} references missing node {node}")]
    DanglingArcEndpoint { arc: ArcId, node: NodeId },
    #[error("arc {arc} has negative or non-finite travel time {value}")]
    NegativeTravelTime { arc: ArcId, value: f64 },
    #[error("arc {arc} is a self-loop on node {node}")]
    SelfLoopArc { arc: ArcId, node: NodeId },
    #[error("arc {arc} is an internal arc in terminal layer {layer}")]
    InternalArcInTerminalLayer { arc: ArcId, layer: Layer },
    #[error("arc {arc} is tagged {kind} but runs {tail_layer} -> {head_layer}")]
    WithinLayerMismatch {
        arc: ArcId,
        kind: &'static str,
        tail_layer: Layer,
        head_layer: Layer,
    },
    #[error("arc {arc} is an illegal mode switch {from} -> {to}")]
    IllegalModeSwitch { arc: ArcId, from: Layer, to: Layer },
    #[error("network file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("network file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// A validated intermodal digraph.
///
/// Nodes and arcs are stored sorted by id.  Positional indices into those
/// two vectors (`node_pos`, `arc_pos`) are dense `0..n` values used for
/// array-backed adjacency and for laying out LP variables; ids remain the
/// external identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermodalGraph {
    nodes: Vec<Node>,
    arcs: Vec<Arc>,
    node_pos: HashMap<NodeId, usize>,
    arc_pos: HashMap<ArcId, usize>,
    /// Outgoing arc positions per node position, ascending by arc id.
    out_arcs: Vec<Vec<usize>>,
    /// Incoming arc positions per node position, ascending by arc id.
    in_arcs: Vec<Vec<usize>>,
}

impl IntermodalGraph {
    /// Validates and indexes a node/arc list.
    ///
    /// Checks, in order per item: id uniqueness, endpoint existence, finite
    /// non-negative travel time, no self-loops, within-arcs matching their
    /// layer (and that layer not being terminal), switch arcs connecting a
    /// permitted layer pair.
    pub fn build(mut nodes: Vec<Node>, mut arcs: Vec<Arc>) -> Result<Self, NetworkError> {
        nodes.sort_by_key(|n| n.id);
        arcs.sort_by_key(|a| a.id);

        let mut node_pos = HashMap::with_capacity(nodes.len());
        for (pos, node) in nodes.iter().enumerate() {
            if node_pos.insert(node.id, pos).is_some() {
                return Err(NetworkError::DuplicateNodeId(node.id));
            }
        }

        let mut arc_pos = HashMap::with_capacity(arcs.len());
        let mut out_arcs = vec![Vec::new(); nodes.len()];
        let mut in_arcs = vec![Vec::new(); nodes.len()];
        for (pos, arc) in arcs.iter().enumerate() {
            if arc_pos.insert(arc.id, pos).is_some() {
                return Err(NetworkError::DuplicateArcId(arc.id));
            }
            let tail_pos = *node_pos
                .get(&arc.tail)
                .ok_or(NetworkError::DanglingArcEndpoint {
                    arc: arc.id,
                    node: arc.tail,
                })?;
            let head_pos = *node_pos
                .get(&arc.head)
                .ok_or(NetworkError::DanglingArcEndpoint {
                    arc: arc.id,
                    node: arc.head,
                })?;
            if !arc.travel_time_min.is_finite() || arc.travel_time_min < 0.0 {
                return Err(NetworkError::NegativeTravelTime {
                    arc: arc.id,
                    value: arc.travel_time_min,
                });
            }
            if arc.tail == arc.head {
                return Err(NetworkError::SelfLoopArc {
                    arc: arc.id,
                    node: arc.tail,
                });
            }
            let tail_layer = nodes[tail_pos].layer;
            let head_layer = nodes[head_pos].layer;
            match arc.kind {
                ArcKind::Within(layer) => {
                    if layer.is_terminal() {
                        return Err(NetworkError::InternalArcInTerminalLayer {
                            arc: arc.id,
                            layer,
                        });
                    }
                    if tail_layer != layer || head_layer != layer {
                        return Err(NetworkError::WithinLayerMismatch {
                            arc: arc.id,
                            kind: arc.kind.tag(),
                            tail_layer,
                            head_layer,
                        });
                    }
                }
                ArcKind::Switch => {
                    if !switch_permitted(tail_layer, head_layer) {
                        return Err(NetworkError::IllegalModeSwitch {
                            arc: arc.id,
                            from: tail_layer,
                            to: head_layer,
                        });
                    }
                }
            }
            out_arcs[tail_pos].push(pos);
            in_arcs[head_pos].push(pos);
        }

        Ok(IntermodalGraph {
            nodes,
            arcs,
            node_pos,
            arc_pos,
            out_arcs,
            in_arcs,
        })
    }

    /// Nodes sorted by id; the slice index is the node position.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Arcs sorted by id; the slice index is the arc position.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_pos(&self, id: NodeId) -> Option<usize> {
        self.node_pos.get(&id).copied()
    }

    pub fn arc_pos(&self, id: ArcId) -> Option<usize> {
        self.arc_pos.get(&id).copied()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.node_pos(id).map(|p| &self.nodes[p])
    }

    pub fn arc(&self, id: ArcId) -> Option<&Arc> {
        self.arc_pos(id).map(|p| &self.arcs[p])
    }

    /// Positions of arcs leaving the node at `node_pos`, ascending by arc id.
    pub fn out_arcs(&self, node_pos: usize) -> &[usize] {
        &self.out_arcs[node_pos]
    }

    /// Positions of arcs entering the node at `node_pos`, ascending by arc id.
    pub fn in_arcs(&self, node_pos: usize) -> &[usize] {
        &self.in_arcs[node_pos]
    }

    /// Positions of all arcs internal to `layer`, ascending by arc id.
    pub fn layer_arc_positions(&self, layer: Layer) -> Vec<usize> {
        self.arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == ArcKind::Within(layer))
            .map(|(pos, _)| pos)
            .collect()
    }

    /// Positions of all mode-switch arcs, ascending by arc id.
    pub fn switch_arc_positions(&self) -> Vec<usize> {
        self.arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == ArcKind::Switch)
            .map(|(pos, _)| pos)
            .collect()
    }

    /// Serialises to the canonical JSON network format.
    ///
    /// Output is deterministic (nodes and arcs ascending by id, fixed field
    /// order), so serialising the same graph twice yields identical bytes.
    pub fn to_json(&self) -> String {
        let file = NetworkFile {
            nodes: self.nodes.clone(),
            arcs: self.arcs.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("graph serialisation");
        text.push('\n');
        text
    }

    /// Parses and validates the JSON network format.
    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let file: NetworkFile = serde_json::from_str(text)?;
        IntermodalGraph::build(file.nodes, file.arcs)
    }

    pub fn write_file(&self, path: &Path) -> Result<(), NetworkError> {
        std::fs::write(path, self.to_json()).map_err(|source| NetworkError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn read_file(path: &Path) -> Result<Self, NetworkError> {
        let text = std::fs::read_to_string(path).map_err(|source| NetworkError::Io {
            path: path.display().to_string(),
            source,
        })?;
        IntermodalGraph::from_json(&text)
    }
}

/// On-disk network format: a JSON object with `nodes` and `arcs` lists.
#[derive(Serialize, Deserialize)]
struct NetworkFile {
    nodes: Vec<Node>,
    arcs: Vec<Arc>,
}
