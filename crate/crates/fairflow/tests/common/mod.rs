//! Shared helpers for the integration suites: a seeded random scenario
//! generator, an independent shortest-path oracle, and a brute-force LP
//! oracle that enumerates basic points instead of pivoting.  Nothing here
//! calls into the solver or the planner's internals, so agreement between
//! these oracles and the library is meaningful evidence.

use fairflow::lp::LpModel;
use fairflow::network::{Arc, ArcId, ArcKind, IntermodalGraph, Layer, Node, NodeId};
use fairflow::scenario::{Demand, DemandId, Params, RegionId, Scenario};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

pub fn node(id: u32, layer: Layer) -> Node {
    Node {
        id: NodeId(id),
        layer,
        label: None,
    }
}

pub fn arc(id: u32, tail: u32, head: u32, minutes: f64, kind: ArcKind) -> Arc {
    Arc {
        id: ArcId(id),
        tail: NodeId(tail),
        head: NodeId(head),
        travel_time_min: minutes,
        kind,
    }
}

/// Quarter-minute grid value in `[lo, hi]` quarters.  Keeping every travel
/// time on a coarse grid means distinct path times differ by at least 0.25
/// minutes, so tolerance checks cannot be confused by near-ties.
fn grid(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64 * 0.25
}

/// A random but always-routable scenario: a bidirectional walking spine,
/// optional car / transit / bike layers hanging off it, and one fresh
/// origin and destination node per demand.  At most 30 nodes, 80 arcs and
/// 5 demands.  The fleet cap is far from binding, every region has
/// positive population, and no zero-time cycle exists (transit boarding
/// always costs at least 0.25 min; other layer pairs cannot form cycles).
pub fn random_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::new();
    let mut arcs = Vec::new();
    let mut next_node = 0u32;
    let mut next_arc = 0u32;

    let add_node = |nodes: &mut Vec<Node>, next: &mut u32, layer| {
        let id = *next;
        *next += 1;
        nodes.push(node(id, layer));
        id
    };
    let add_arc = |arcs: &mut Vec<Arc>, next: &mut u32, tail, head, minutes, kind| {
        let id = *next;
        *next += 1;
        arcs.push(arc(id, tail, head, minutes, kind));
    };

    // Walking spine, traversable in both directions.
    let n_walk = rng.gen_range(3..=8);
    let walk: Vec<u32> = (0..n_walk)
        .map(|_| add_node(&mut nodes, &mut next_node, Layer::Walk))
        .collect();
    for w in walk.windows(2) {
        let t = grid(&mut rng, 1, 20);
        add_arc(&mut arcs, &mut next_arc, w[0], w[1], t, ArcKind::Within(Layer::Walk));
        let t = grid(&mut rng, 1, 20);
        add_arc(&mut arcs, &mut next_arc, w[1], w[0], t, ArcKind::Within(Layer::Walk));
    }

    // Road layer: a two-way chain so rebalancing is always possible.
    let car: Vec<u32> = if rng.gen_bool(0.7) {
        let n = rng.gen_range(2..=4);
        let car: Vec<u32> = (0..n)
            .map(|_| add_node(&mut nodes, &mut next_node, Layer::Car))
            .collect();
        for w in car.windows(2) {
            let t = grid(&mut rng, 1, 20);
            add_arc(&mut arcs, &mut next_arc, w[0], w[1], t, ArcKind::Within(Layer::Car));
            add_arc(&mut arcs, &mut next_arc, w[1], w[0], t, ArcKind::Within(Layer::Car));
        }
        car
    } else {
        Vec::new()
    };

    // Transit layer, entered and left on foot.  Boarding costs at least a
    // quarter minute (platform waiting), which rules out zero-time cycles
    // through the walk layer.
    let transit: Vec<u32> = if rng.gen_bool(0.6) {
        let n = rng.gen_range(2..=4);
        let transit: Vec<u32> = (0..n)
            .map(|_| add_node(&mut nodes, &mut next_node, Layer::PublicTransit))
            .collect();
        for w in transit.windows(2) {
            let t = grid(&mut rng, 1, 20);
            add_arc(
                &mut arcs,
                &mut next_arc,
                w[0],
                w[1],
                t,
                ArcKind::Within(Layer::PublicTransit),
            );
            let t = grid(&mut rng, 1, 20);
            add_arc(
                &mut arcs,
                &mut next_arc,
                w[1],
                w[0],
                t,
                ArcKind::Within(Layer::PublicTransit),
            );
        }
        for _ in 0..rng.gen_range(1..=3) {
            let w = walk[rng.gen_range(0..walk.len())];
            let p = transit[rng.gen_range(0..transit.len())];
            let t = grid(&mut rng, 1, 8);
            add_arc(&mut arcs, &mut next_arc, w, p, t, ArcKind::Switch);
        }
        for _ in 0..rng.gen_range(1..=3) {
            let p = transit[rng.gen_range(0..transit.len())];
            let w = walk[rng.gen_range(0..walk.len())];
            let t = grid(&mut rng, 0, 8);
            add_arc(&mut arcs, &mut next_arc, p, w, t, ArcKind::Switch);
        }
        transit
    } else {
        Vec::new()
    };

    // Bike layer: boarded at an origin, dropped at a walk node or ridden
    // through to a destination.
    let bike: Vec<u32> = if rng.gen_bool(0.4) {
        let n = rng.gen_range(2..=3);
        let bike: Vec<u32> = (0..n)
            .map(|_| add_node(&mut nodes, &mut next_node, Layer::Bike))
            .collect();
        for w in bike.windows(2) {
            let t = grid(&mut rng, 1, 20);
            add_arc(&mut arcs, &mut next_arc, w[0], w[1], t, ArcKind::Within(Layer::Bike));
            let t = grid(&mut rng, 1, 20);
            add_arc(&mut arcs, &mut next_arc, w[1], w[0], t, ArcKind::Within(Layer::Bike));
        }
        for _ in 0..rng.gen_range(1..=2) {
            let b = bike[rng.gen_range(0..bike.len())];
            let w = walk[rng.gen_range(0..walk.len())];
            let t = grid(&mut rng, 0, 8);
            add_arc(&mut arcs, &mut next_arc, b, w, t, ArcKind::Switch);
        }
        bike
    } else {
        Vec::new()
    };

    // Demands, each with its own origin and destination node.  Every
    // origin reaches the walk spine and every destination is reachable
    // from it, so all demands are routable regardless of the other layers.
    let n_demands = rng.gen_range(1..=5);
    let mut demands = Vec::new();
    for m in 0..n_demands {
        let origin = add_node(&mut nodes, &mut next_node, Layer::Origin);
        let destination = add_node(&mut nodes, &mut next_node, Layer::Destination);
        let w_in = walk[rng.gen_range(0..walk.len())];
        let w_out = walk[rng.gen_range(0..walk.len())];
        let t = grid(&mut rng, 0, 8);
        add_arc(&mut arcs, &mut next_arc, origin, w_in, t, ArcKind::Switch);
        let t = grid(&mut rng, 0, 8);
        add_arc(&mut arcs, &mut next_arc, w_out, destination, t, ArcKind::Switch);
        if !car.is_empty() && rng.gen_bool(0.6) {
            let c_in = car[rng.gen_range(0..car.len())];
            let c_out = car[rng.gen_range(0..car.len())];
            let t = grid(&mut rng, 0, 8);
            add_arc(&mut arcs, &mut next_arc, origin, c_in, t, ArcKind::Switch);
            let t = grid(&mut rng, 0, 8);
            add_arc(&mut arcs, &mut next_arc, c_out, destination, t, ArcKind::Switch);
        }
        if !bike.is_empty() && rng.gen_bool(0.4) {
            let b = bike[rng.gen_range(0..bike.len())];
            let t = grid(&mut rng, 0, 8);
            add_arc(&mut arcs, &mut next_arc, origin, b, t, ArcKind::Switch);
            if rng.gen_bool(0.5) {
                let b = bike[rng.gen_range(0..bike.len())];
                let t = grid(&mut rng, 0, 8);
                add_arc(&mut arcs, &mut next_arc, b, destination, t, ArcKind::Switch);
            }
        }
        demands.push(Demand {
            id: DemandId(m as u32),
            origin: NodeId(origin),
            destination: NodeId(destination),
            rate: grid(&mut rng, 1, 12),
            region: RegionId(0), // reassigned below
        });
    }
    let _ = transit;

    let n_regions = rng.gen_range(1..=3.min(n_demands));
    for (m, demand) in demands.iter_mut().enumerate() {
        demand.region = RegionId((m % n_regions) as u32);
    }
    let regions: Vec<(RegionId, f64)> = (0..n_regions)
        .map(|r| (RegionId(r as u32), rng.gen_range(2..=20) as f64 * 50.0))
        .collect();

    let params = Params {
        fleet_cap: 1e6,
        t_max_min: grid(&mut rng, 20, 160),
        gamma_reb: 1e-3,
        gamma_time: 1e-3,
    };

    assert!(nodes.len() <= 30, "generator exceeded the node budget");
    assert!(arcs.len() <= 80, "generator exceeded the arc budget");
    let graph = IntermodalGraph::build(nodes, arcs).expect("generated graph is legal");
    Scenario::new(graph, demands, regions, params).expect("generated scenario is valid")
}

/// Independent shortest-path oracle: textbook O(V^2) Dijkstra over the arc
/// list, minutes from `from` to `to`.
pub fn dijkstra_time(scenario: &Scenario, from: NodeId, to: NodeId) -> Option<f64> {
    let graph = &scenario.graph;
    let index: HashMap<NodeId, usize> = graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(pos, n)| (n.id, pos))
        .collect();
    let mut adj = vec![Vec::new(); graph.num_nodes()];
    for a in graph.arcs() {
        adj[index[&a.tail]].push((index[&a.head], a.travel_time_min));
    }

    let mut dist = vec![f64::INFINITY; graph.num_nodes()];
    let mut done = vec![false; graph.num_nodes()];
    dist[index[&from]] = 0.0;
    for _ in 0..graph.num_nodes() {
        let mut u = None;
        let mut best = f64::INFINITY;
        for (v, &d) in dist.iter().enumerate() {
            if !done[v] && d < best {
                best = d;
                u = Some(v);
            }
        }
        let Some(u) = u else { break };
        done[u] = true;
        for &(v, t) in &adj[u] {
            if dist[u] + t < dist[v] {
                dist[v] = dist[u] + t;
            }
        }
    }
    let d = dist[index[&to]];
    d.is_finite().then_some(d)
}

/// Brute-force LP oracle: enumerates every candidate basic point (equality
/// rows always active, plus each subset of inequality rows and finite
/// bounds pinned active), solves the resulting linear system, keeps the
/// feasible ones and returns the best objective.  Exponential in the
/// number of inequalities, fine for the handful of variables it is used on.
pub fn vertex_enum_optimum(model: &LpModel) -> Option<f64> {
    let n = model.num_vars();
    let dense = |coeffs: &[(usize, f64)]| {
        let mut row = vec![0.0; n];
        for &(v, c) in coeffs {
            row[v] = c;
        }
        row
    };

    let mut base: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut optional: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in model.rows() {
        let entry = (dense(&row.coeffs), row.rhs);
        match row.relation {
            fairflow::lp::Relation::Eq => base.push(entry),
            _ => optional.push(entry),
        }
    }
    for (v, &(lo, hi)) in model.bounds().iter().enumerate() {
        let mut unit = vec![0.0; n];
        unit[v] = 1.0;
        if lo.is_finite() {
            optional.push((unit.clone(), lo));
        }
        if hi.is_finite() {
            optional.push((unit, hi));
        }
    }
    assert!(
        optional.len() <= 20,
        "too many inequalities for exhaustive enumeration"
    );

    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << optional.len()) {
        if (mask.count_ones() as usize) > n {
            continue;
        }
        let mut rows: Vec<(Vec<f64>, f64)> = base.clone();
        for (i, entry) in optional.iter().enumerate() {
            if mask & (1 << i) != 0 {
                rows.push(entry.clone());
            }
        }
        let Some(x) = solve_exact(&rows, n) else {
            continue;
        };
        if model.max_violation(&x) <= 1e-7 {
            let value = model.objective_value(&x);
            best = Some(best.map_or(value, |b: f64| b.min(value)));
        }
    }
    best
}

/// Gaussian elimination with partial pivoting on a stacked (possibly
/// redundant) system.  Returns the unique solution, or `None` when the
/// system is inconsistent or underdetermined.
fn solve_exact(rows: &[(Vec<f64>, f64)], n: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .map(|(coeffs, rhs)| {
            let mut row = coeffs.clone();
            row.push(*rhs);
            row
        })
        .collect();
    let m = a.len();
    let mut pivot_col_of_row = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(best) = (rank..m)
            .filter(|&r| a[r][col].abs() > 1e-10)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
        else {
            continue;
        };
        a.swap(rank, best);
        for r in 0..m {
            if r != rank && a[r][col].abs() > 0.0 {
                let f = a[r][col] / a[rank][col];
                for c in col..=n {
                    a[r][c] -= f * a[rank][c];
                }
            }
        }
        pivot_col_of_row.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }
    // Inconsistent: a zero row with nonzero rhs.
    for r in rank..m {
        if a[r][n].abs() > 1e-7 {
            return None;
        }
    }
    if rank < n {
        return None;
    }
    let mut x = vec![0.0; n];
    for (r, &col) in pivot_col_of_row.iter().enumerate() {
        x[col] = a[r][n] / a[r][col];
    }
    Some(x)
}

/// Smallest instance on which the fleet cap forces a split between a fast
/// car route and a slow walk: 8 flow variables (6 arcs + 2 rebalancing),
/// one excess variable in the fairness program.  Car door to door takes
/// 15 min, walking 25; each car round trip occupies a vehicle for 24 min,
/// so a 12-vehicle fleet carries exactly half of the unit demand.
pub fn car_cap_mini() -> Scenario {
    let nodes = vec![
        node(0, Layer::Origin),
        node(1, Layer::Destination),
        node(2, Layer::Walk),
        node(3, Layer::Car),
        node(4, Layer::Car),
    ];
    let arcs = vec![
        arc(0, 0, 2, 10.0, ArcKind::Switch),
        arc(1, 2, 1, 15.0, ArcKind::Switch),
        arc(2, 0, 3, 2.0, ArcKind::Switch),
        arc(3, 3, 4, 12.0, ArcKind::Within(Layer::Car)),
        arc(4, 4, 1, 1.0, ArcKind::Switch),
        arc(5, 4, 3, 12.0, ArcKind::Within(Layer::Car)),
    ];
    let demands = vec![Demand {
        id: DemandId(0),
        origin: NodeId(0),
        destination: NodeId(1),
        rate: 1.0,
        region: RegionId(0),
    }];
    let params = Params {
        fleet_cap: 12.0,
        t_max_min: 20.0,
        gamma_reb: 1e-3,
        gamma_time: 1e-3,
    };
    let graph = IntermodalGraph::build(nodes, arcs).expect("legal mini graph");
    Scenario::new(graph, demands, vec![(RegionId(0), 100.0)], params).expect("valid mini scenario")
}
