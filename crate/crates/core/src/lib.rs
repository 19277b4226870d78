//! Flow methods for cooperative games with coalition configurations.
//!
//! Agents are `1..=n`, a coalition is a bit mask, blocks of the configuration are
//! 0-based internally and 1-based in everything printed.

pub mod cli;
pub mod coalition;
pub mod dag;
pub mod dot;
pub mod error;
pub mod flow;
pub mod game;
pub mod io;
pub mod product;
pub mod rational;
pub mod reduction;
pub mod set_system;
pub mod two_step;
pub mod values;

pub use coalition::Coalition;
pub use dag::{components, AgentDigraph, Dag, EdgeList};
pub use error::{Error, Result};
pub use flow::{check_flow, cut_value, edge_decomposition, Cut, Flow, FlowCheck};
pub use game::{
    dirac_game, equal_split_coefficients, flow_method_value, marginalist_value, null_agents, Game,
    MarginalistCoefficients, PayoffVector,
};
pub use product::{build_product, support, Hypercube, ProductDigraph, Profile, Support};
pub use rational::Q;
pub use reduction::{
    check_reduction_condition, induced_value, lift_game, reachable_system, union_map,
    ReachableSystem,
};
pub use set_system::{
    classify, count_paths, covering_digraph, uniform_path_flow, validate_set_system,
    CoveringDigraph, PathCounts, SetSystem,
};
pub use two_step::{
    check_coalitional_anonymity, check_flow_proportionality, check_intracoalitional_anonymity,
    check_null_flow_nonrelevant, compose_two_step_flow, extract_factor_flow,
    extract_hypercube_flow, AxiomCheck,
};
pub use values::{
    audit_value, az_flow, az_value, configuration_value, shapley_hypercube_flow,
    shapley_like_value, two_step_value, upper_game, TuGame,
};
