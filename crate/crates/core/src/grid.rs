//! Physical network data model: case-file ingestion with validation,
//! switchable-line sampling, and the default contingency set.

use std::collections::BTreeSet;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{connected_components, Multigraph};

/// Case schema version accepted by [`load_case`].
pub const CASE_VERSION: u32 = 1;

/// PRNG backing [`sample_switchable`]; recorded in experiment output so a
/// sweep can be reproduced.
pub const SAMPLER_PRNG: &str = "chacha8";

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported case version {0}, expected {CASE_VERSION}")]
    Version(u32),
    #[error("validation: {0}")]
    Validation(String),
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
}

fn invalid(msg: impl Into<String>) -> CaseError {
    CaseError::Validation(msg.into())
}

/// One bus: load, generation bounds and cost, angle bounds, ramp limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: usize,
    pub p_d: f64,
    pub p_g_min: f64,
    pub p_g_max: f64,
    pub c_g: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub r_up: f64,
    pub r_down: f64,
}

/// One branch with its fixed orientation `from -> to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    /// Susceptance, p.u., > 0.
    pub b: f64,
    pub p_b_max: f64,
    pub switchable: bool,
    /// Switching/transmission cost; absent means 0.
    #[serde(default)]
    pub c_b: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseFile {
    version: u32,
    name: String,
    buses: Vec<Bus>,
    branches: Vec<Branch>,
}

/// Validated physical network. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub name: String,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
}

impl Network {
    pub fn new(name: impl Into<String>, buses: Vec<Bus>, branches: Vec<Branch>) -> Result<Self, CaseError> {
        let net = Self { name: name.into(), buses, branches };
        net.validate()?;
        Ok(net)
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// The multigraph on (buses, branches); edge k is branch k.
    pub fn to_multigraph(&self) -> Multigraph {
        let edges = self.branches.iter().map(|br| (br.from, br.to)).collect();
        Multigraph::new(self.bus_count(), edges).expect("validated network")
    }

    /// Branch ids flagged switchable in the case file.
    pub fn switchable_ids(&self) -> BTreeSet<usize> {
        self.branches.iter().filter(|b| b.switchable).map(|b| b.id).collect()
    }

    fn validate(&self) -> Result<(), CaseError> {
        if self.buses.is_empty() {
            return Err(invalid("buses: must not be empty"));
        }
        let n = self.buses.len();
        for (i, bus) in self.buses.iter().enumerate() {
            if bus.id != i + 1 {
                return Err(invalid(format!("bus {}: id must be {} (ids are 1..N in order)", bus.id, i + 1)));
            }
            for (field, value) in [
                ("p_d", bus.p_d),
                ("p_g_min", bus.p_g_min),
                ("p_g_max", bus.p_g_max),
                ("c_g", bus.c_g),
                ("theta_min", bus.theta_min),
                ("theta_max", bus.theta_max),
                ("r_up", bus.r_up),
                ("r_down", bus.r_down),
            ] {
                if !value.is_finite() {
                    return Err(invalid(format!("bus {}: {field} is not finite", bus.id)));
                }
            }
            if bus.p_g_min > bus.p_g_max {
                return Err(invalid(format!("bus {}: p_g_min > p_g_max", bus.id)));
            }
            if bus.theta_min > bus.theta_max {
                return Err(invalid(format!("bus {}: theta_min > theta_max", bus.id)));
            }
            if bus.r_up < 0.0 || bus.r_down < 0.0 {
                return Err(invalid(format!("bus {}: ramp limits must be >= 0", bus.id)));
            }
        }
        for (k, br) in self.branches.iter().enumerate() {
            if br.id != k + 1 {
                return Err(invalid(format!("branch {}: id must be {} (ids are 1..N in order)", br.id, k + 1)));
            }
            for (field, value) in [("b", br.b), ("p_b_max", br.p_b_max), ("c_b", br.c_b)] {
                if !value.is_finite() {
                    return Err(invalid(format!("branch {}: {field} is not finite", br.id)));
                }
            }
            if br.from < 1 || br.from > n {
                return Err(invalid(format!("branch {}: unknown bus {} in `from`", br.id, br.from)));
            }
            if br.to < 1 || br.to > n {
                return Err(invalid(format!("branch {}: unknown bus {} in `to`", br.id, br.to)));
            }
            if br.from == br.to {
                return Err(invalid(format!("branch {}: self-loop at bus {}", br.id, br.from)));
            }
            if br.b <= 0.0 {
                return Err(invalid(format!("branch {}: b must be > 0", br.id)));
            }
            if br.p_b_max <= 0.0 {
                return Err(invalid(format!("branch {}: p_b_max must be > 0", br.id)));
            }
            if br.c_b < 0.0 {
                return Err(invalid(format!("branch {}: c_b must be >= 0", br.id)));
            }
        }
        if !connected_components(&self.to_multigraph()).is_connected() {
            return Err(invalid("branches: graph is disconnected"));
        }
        Ok(())
    }
}

/// Loads and validates a version-1 case file.
pub fn load_case(path: impl AsRef<Path>) -> Result<Network, CaseError> {
    let text = std::fs::read_to_string(path)?;
    parse_case(&text)
}

/// Parses a case from its JSON text.
pub fn parse_case(text: &str) -> Result<Network, CaseError> {
    let file: CaseFile = serde_json::from_str(text)?;
    if file.version != CASE_VERSION {
        return Err(CaseError::Version(file.version));
    }
    Network::new(file.name, file.buses, file.branches)
}

/// Canonical serialization; loading a canonical file and re-serializing it
/// round-trips byte-identically.
pub fn to_canonical_json(network: &Network) -> String {
    let file = CaseFile {
        version: CASE_VERSION,
        name: network.name.clone(),
        buses: network.buses.clone(),
        branches: network.branches.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("case serialization");
    text.push('\n');
    text
}

/// A concrete choice of switchable lines, either sampled or taken from the
/// case file's flags.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchConfig {
    pub switchable_ids: BTreeSet<usize>,
    pub alpha: f64,
    pub seed: u64,
}

impl SwitchConfig {
    /// Config from the case file's own `switchable` flags.
    pub fn from_flags(network: &Network) -> Self {
        let ids = network.switchable_ids();
        let alpha = if network.branch_count() == 0 {
            1.0
        } else {
            ids.len() as f64 / network.branch_count() as f64
        };
        Self { switchable_ids: ids, alpha, seed: 0 }
    }

    pub fn is_switchable(&self, branch_id: usize) -> bool {
        self.switchable_ids.contains(&branch_id)
    }
}

/// Samples `ceil(alpha * N_e)` distinct switchable branch ids, uniformly
/// without replacement, from a ChaCha8 stream seeded by `seed`. The same
/// (network, alpha, seed) always yields the same set.
pub fn sample_switchable(network: &Network, alpha: f64, seed: u64) -> Result<SwitchConfig, CaseError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CaseError::InvalidAlpha(alpha));
    }
    let m = network.branch_count();
    let k = (alpha * m as f64).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, m, k.min(m));
    let switchable_ids: BTreeSet<usize> = picked.iter().map(|i| i + 1).collect();
    Ok(SwitchConfig { switchable_ids, alpha, seed })
}

/// Branch contingency set; members must be non-bridges of the full graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContingencySet {
    pub branch_ids: BTreeSet<usize>,
}

impl ContingencySet {
    pub fn is_empty(&self) -> bool {
        self.branch_ids.is_empty()
    }

    pub fn len(&self) -> usize {
        self.branch_ids.len()
    }
}

/// Every branch whose single outage leaves the graph connected, found by
/// removing each branch in turn and re-running the connectivity oracle.
pub fn default_contingencies(network: &Network) -> ContingencySet {
    let graph = network.to_multigraph();
    let m = graph.edge_count();
    let mut branch_ids = BTreeSet::new();
    for k in 0..m {
        let edges: Vec<(usize, usize)> = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, &e)| e)
            .collect();
        let without = Multigraph::new(graph.node_count(), edges).expect("valid subgraph");
        if connected_components(&without).is_connected() {
            branch_ids.insert(k + 1);
        }
    }
    ContingencySet { branch_ids }
}
