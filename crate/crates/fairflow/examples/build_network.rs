//! Builds a small intermodal network by hand and shows what the graph
//! layer rules accept: within-layer arcs carry one mode, switch arcs move
//! between permitted layer pairs, and origin/destination layers are pure
//! connection points with no internal arcs.
//!
//! Cars are boarded at an origin and left at a destination; transit is
//! entered and exited on foot; bikes start at an origin and can be dropped
//! at a walk node or ridden to the destination.
//!
//! Run with: cargo run -p fairflow --example build_network

use fairflow::network::{
    switch_permitted, Arc, ArcId, ArcKind, IntermodalGraph, Layer, Node, NodeId,
};

fn node(id: u32, layer: Layer, label: &str) -> Node {
    Node {
        id: NodeId(id),
        layer,
        label: Some(label.to_string()),
    }
}

fn arc(id: u32, tail: u32, head: u32, minutes: f64, kind: ArcKind) -> Arc {
    Arc {
        id: ArcId(id),
        tail: NodeId(tail),
        head: NodeId(head),
        travel_time_min: minutes,
        kind,
    }
}

fn main() {
    // One origin, one destination, three ways between them: walk the whole
    // way, ride a car door to door, or walk to a transit stop and ride.
    let nodes = vec![
        node(0, Layer::Origin, "home"),
        node(1, Layer::Destination, "office"),
        node(2, Layer::Walk, "home sidewalk"),
        node(3, Layer::Walk, "office sidewalk"),
        node(4, Layer::Car, "pick-up bay"),
        node(5, Layer::Car, "drop-off bay"),
        node(6, Layer::PublicTransit, "stop A"),
        node(7, Layer::PublicTransit, "stop B"),
    ];
    let arcs = vec![
        // on foot
        arc(0, 0, 2, 0.0, ArcKind::Switch),
        arc(1, 2, 3, 28.0, ArcKind::Within(Layer::Walk)),
        arc(2, 3, 1, 0.0, ArcKind::Switch),
        // by car; the return road lets empty vehicles rebalance
        arc(3, 0, 4, 2.0, ArcKind::Switch), // wait for the vehicle
        arc(4, 4, 5, 9.0, ArcKind::Within(Layer::Car)),
        arc(5, 5, 1, 1.0, ArcKind::Switch),
        arc(6, 5, 4, 9.0, ArcKind::Within(Layer::Car)),
        // by transit, boarded from the sidewalk
        arc(7, 2, 6, 4.0, ArcKind::Switch), // walk to the stop and wait
        arc(8, 6, 7, 8.0, ArcKind::Within(Layer::PublicTransit)),
        arc(9, 7, 3, 2.0, ArcKind::Switch), // alight and rejoin the sidewalk
    ];

    let graph = IntermodalGraph::build(nodes, arcs).expect("layer rules hold");
    println!(
        "built a graph with {} nodes and {} arcs",
        graph.num_nodes(),
        graph.num_arcs()
    );
    for layer in Layer::ALL {
        let arcs = graph.layer_arc_positions(layer);
        println!("  {layer}: {} internal arcs", arcs.len());
    }
    let switches = graph
        .arcs()
        .iter()
        .filter(|a| a.kind == ArcKind::Switch)
        .count();
    println!("  {switches} mode-switch arcs");

    // The JSON form round-trips exactly, so files are safe to regenerate.
    let text = graph.to_json();
    let back = IntermodalGraph::from_json(&text).expect("self-written JSON parses");
    assert_eq!(back.to_json(), text);
    println!("JSON round trip is byte-identical ({} bytes)", text.len());
    println!();

    // The builder rejects structure the planner could not use.  Hailing a
    // car mid-walk is not a permitted switch — vehicles are assigned at
    // the origin:
    assert!(!switch_permitted(Layer::Walk, Layer::Car));
    let bad = IntermodalGraph::build(
        vec![node(0, Layer::Walk, "kerb"), node(1, Layer::Car, "car")],
        vec![arc(0, 0, 1, 1.0, ArcKind::Switch)],
    );
    println!("walk-to-car switch is rejected: {}", bad.unwrap_err());

    // Neither may a within-layer arc contradict its endpoints:
    let bad = IntermodalGraph::build(
        vec![node(0, Layer::Walk, "a"), node(1, Layer::Walk, "b")],
        vec![arc(0, 0, 1, 5.0, ArcKind::Within(Layer::Car))],
    );
    println!("mislabelled road arc is rejected: {}", bad.unwrap_err());
}
