//! Planning library for intermodal autonomous mobility-on-demand systems.
//!
//! The library models a multimodal transportation network (walking, biking,
//! road vehicles, public transit) as a single layered digraph, states two
//! linear programs over per-demand commodity flows on that digraph — one
//! minimising average travel time, one minimising an accessibility
//! unfairness measure — and decomposes the resulting flows into user-level
//! path assignments that keep as many travellers as possible under a travel
//! time threshold.
//!
//! Modules, bottom-up:
//!
//! * [`network`] — layered intermodal digraph: nodes, arcs, mode-switch
//!   rules, JSON persistence.
//! * [`scenario`] — travel demands, population regions, and planning
//!   parameters loaded on top of a network.
//! * [`lp`] — a small bounded-variable LP toolkit: model container,
//!   two-phase revised simplex, MPS export/import.
//! * [`planner`] — assembles and solves the two planning programs, computes
//!   flow-level metrics.
//! * [`pathalloc`] — decomposes an optimal flow into simple paths and picks
//!   path fractions that minimise above-threshold travel time.
//! * [`report`] — modal-share histograms, unfairness tables, run manifests,
//!   text/SVG rendering.
//! * [`synth`] — small built-in instances used by the demo command, the
//!   examples and the test-suite.
//! * [`cli`] — the command-line front end (`validate`, `solve`, `allocate`,
//!   `report`, `demo`).

pub mod cli;
pub mod lp;
pub mod network;
pub mod pathalloc;
pub mod planner;
pub mod report;
pub mod scenario;
pub mod synth;
