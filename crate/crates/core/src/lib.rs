//! Optimal transmission switching with provably exact linear
//! network-connectedness constraints.
//!
//! The crate builds DC dispatch-plus-switching MILP models, attaches the
//! connectedness block (full or contracted), replicates everything per
//! branch contingency, and solves the result with a bundled
//! branch-and-bound over a bounded simplex. Every connectivity claim can be
//! cross-checked against independent union-find and least-squares oracles.

pub mod constraints;
pub mod graph;
pub mod grid;
pub mod model;
pub mod reduction;
pub mod solver;

#[cfg(test)]
pub(crate) mod testutil;

pub use constraints::{
    add_connectedness, add_contingency_connectedness, add_n_minus_1, add_necessary_connectedness,
    assemble, build_base_ots, connectedness_feasibility_model, make_uniquely_balanced_c,
    AssembleOptions,
};
pub use graph::{
    classify_balance, connected_components, edge_induced, enumerate_connected_nis,
    is_unbalanced_nis, laplacian, oriented_incidence, potential_feasible, BalanceClass,
    BalanceKind, ComponentPartition, GraphError, Multigraph, NisCatalog, Topology,
};
pub use grid::{
    default_contingencies, load_case, parse_case, sample_switchable, to_canonical_json, Branch,
    Bus, CaseError, ContingencySet, Network, SwitchConfig, SAMPLER_PRNG,
};
pub use model::{
    BigMPolicy, Connectedness, MilpModel, ModelError, ModelVariant, RowSense, VarKind, Variable,
};
pub use reduction::{
    contract, contract_with_switchable, equivalence_check, find_unbalanced_nis,
    reduced_connectedness, EquivalenceReport, NisStrategy, ReductionError, ReductionPlan,
    UnbalancedNisSet,
};
pub use solver::{
    check_solution, export_lp, solve, write_lp_string, BranchRule, CheckReport, Solution,
    SolveStats, SolveStatus, SolverError, SolverOptions,
};
