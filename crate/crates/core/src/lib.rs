//! Exact analysis of the planar piecewise-linear family
//! `F(x, y) = (|x| - y + a, x - |y| + b)`.
//!
//! The crate is organised bottom-up: exact geometry, the map itself, the
//! atlas of invariant graphs, Markov partitions and entropy, circle-map
//! rotation numbers, interval-map reductions, and reporting helpers used by
//! the `pwldyn` binary.

pub mod circle_dynamics;
pub mod cli_reporting;
pub mod exact_geometry;
pub mod graph_catalog;
pub mod interval_reduction;
pub mod map_engine;
pub mod markov_entropy;
