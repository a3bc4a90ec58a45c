//! Constraint reduction: contract certified unbalanced load/generation
//! pockets to their boundary, collapse always-on components, and emit the
//! connectedness block on the contracted graph.
//!
//! A pocket is only auto-selected when the contraction provably preserves
//! the set of connected feasible topologies: every connected sub-NIS of the
//! pocket must have a net-injection interval excluding zero (so no part of
//! it can ever island and self-balance), and the pocket must meet the rest
//! of the network at a single boundary node (so it can never bridge two
//! otherwise separate areas). [`contract`] itself is mechanical and also
//! accepts hand-built multi-boundary sets.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constraints::{build_base_ots, make_uniquely_balanced_c};
use crate::graph::{
    connected_components, edge_induced, enumerate_connected_nis, is_unbalanced_nis, GraphError,
    Multigraph, Topology,
};
use crate::grid::{Network, SwitchConfig};
use crate::model::{BigMPolicy, MilpModel, ModelError, RowSense, VarKind};
use crate::solver::{solve, SolveStatus, SolverOptions};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("node sets {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("node set {{{0}}} does not induce a connected subgraph")]
    NotConnected(String),
    #[error("node set {{{0}}} is not unbalanced")]
    NotUnbalanced(String),
    #[error("boundary mismatch for node set {{{0}}}")]
    BoundaryMismatch(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] Box<ModelError>),
}

impl From<ModelError> for ReductionError {
    fn from(e: ModelError) -> Self {
        ReductionError::Model(Box::new(e))
    }
}

impl From<ReductionError> for ModelError {
    fn from(e: ReductionError) -> Self {
        ModelError::Reduction(e.to_string())
    }
}

/// How to search for contractible pockets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NisStrategy {
    /// Enumerate connected node sets up to `max_nodes` (all nodes when
    /// `None`), certify each, and keep a maximal disjoint family,
    /// largest-first with lowest-min-node tiebreak.
    Exhaustive { max_nodes: Option<usize> },
    /// Flood maximal one-signed regions (every member bus strictly
    /// over- or under-supplied); a region failing the single-boundary
    /// test falls back to its member singletons.
    SeededGrowth,
}

impl Default for NisStrategy {
    fn default() -> Self {
        NisStrategy::Exhaustive { max_nodes: None }
    }
}

impl std::str::FromStr for NisStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(NisStrategy::Exhaustive { max_nodes: None }),
            "seeded" | "seeded-growth" => Ok(NisStrategy::SeededGrowth),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// Disjoint certified pockets plus their boundary node sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnbalancedNisSet {
    pub node_sets: Vec<Vec<usize>>,
    pub boundary_sets: Vec<Vec<usize>>,
}

impl UnbalancedNisSet {
    pub fn empty() -> Self {
        Self { node_sets: Vec::new(), boundary_sets: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.node_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_sets.is_empty()
    }
}

/// The contracted graph with everything needed to wire its constraint block
/// back to the original model.
#[derive(Debug, Clone)]
pub struct ReductionPlan {
    pub contracted: Multigraph,
    /// Original node (index - 1) to contracted node id.
    pub node_map: Vec<usize>,
    /// Contracted edge index to the original branch id it mirrors.
    pub edge_map: BTreeMap<usize, usize>,
    /// Contracted edge indices whose status is constant 1.
    pub fixed_edges: BTreeSet<usize>,
    /// Audit log, one line per pipeline action, stable ordering.
    pub steps: Vec<String>,
}

impl ReductionPlan {
    pub fn audit_log(&self) -> String {
        let mut s = self.steps.join("\n");
        s.push('\n');
        s
    }

    /// Maps a full topology onto the contracted graph: mirrored edges copy
    /// their branch status, connector edges stay on.
    pub fn project(&self, z: &Topology) -> Topology {
        let bits = (0..self.contracted.edge_count())
            .map(|j| match self.edge_map.get(&j) {
                Some(&branch_id) => z.is_on(branch_id - 1),
                None => true,
            })
            .collect();
        Topology::new(bits)
    }
}

fn boundary_of(network: &Network, nodes: &BTreeSet<usize>) -> Vec<usize> {
    let mut boundary = BTreeSet::new();
    for br in &network.branches {
        let fin = nodes.contains(&br.from);
        let tin = nodes.contains(&br.to);
        if fin != tin {
            boundary.insert(if fin { br.from } else { br.to });
        }
    }
    boundary.into_iter().collect()
}

fn induces_connected(network: &Network, nodes: &BTreeSet<usize>) -> bool {
    if nodes.is_empty() {
        return false;
    }
    let order: Vec<usize> = nodes.iter().copied().collect();
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
    let edges: Vec<(usize, usize)> = network
        .branches
        .iter()
        .filter(|br| nodes.contains(&br.from) && nodes.contains(&br.to))
        .map(|br| (rank[&br.from], rank[&br.to]))
        .collect();
    let sub = Multigraph::new(order.len(), edges).expect("validated endpoints");
    connected_components(&sub).is_connected()
}

/// Every connected sub-NIS of the pocket must be interval-unbalanced;
/// one-signed pockets satisfy this by construction.
fn sub_nis_all_unbalanced(network: &Network, nodes: &BTreeSet<usize>) -> bool {
    let one_signed_neg = nodes.iter().all(|&v| network.buses[v - 1].p_g_max - network.buses[v - 1].p_d < 0.0);
    let one_signed_pos = nodes.iter().all(|&v| network.buses[v - 1].p_g_min - network.buses[v - 1].p_d > 0.0);
    if one_signed_neg || one_signed_pos {
        return true;
    }
    let order: Vec<usize> = nodes.iter().copied().collect();
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
    let edges: Vec<(usize, usize)> = network
        .branches
        .iter()
        .filter(|br| nodes.contains(&br.from) && nodes.contains(&br.to))
        .map(|br| (rank[&br.from], rank[&br.to]))
        .collect();
    let sub = Multigraph::new(order.len(), edges).expect("validated endpoints");
    let Ok(catalog) = enumerate_connected_nis(&sub, None) else {
        return false;
    };
    catalog.node_sets.iter().all(|set| {
        let original: Vec<usize> = set.iter().map(|&i| order[i - 1]).collect();
        is_unbalanced_nis(&original, network)
    })
}

fn certify(network: &Network, nodes: &BTreeSet<usize>) -> Option<Vec<usize>> {
    if nodes.len() >= network.bus_count() {
        return None; // proper subsets only
    }
    if !induces_connected(network, nodes) {
        return None;
    }
    let boundary = boundary_of(network, nodes);
    if boundary.len() != 1 {
        return None;
    }
    if !sub_nis_all_unbalanced(network, nodes) {
        return None;
    }
    Some(boundary)
}

fn order_and_select(network: &Network, mut candidates: Vec<BTreeSet<usize>>) -> UnbalancedNisSet {
    candidates.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.iter().next().cmp(&b.iter().next()))
            .then_with(|| a.cmp(b))
    });
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut out = UnbalancedNisSet::empty();
    for cand in candidates {
        if cand.iter().any(|v| used.contains(v)) {
            continue;
        }
        let Some(boundary) = certify(network, &cand) else { continue };
        used.extend(cand.iter().copied());
        out.node_sets.push(cand.into_iter().collect());
        out.boundary_sets.push(boundary);
    }
    out
}

/// Finds a disjoint family of certified contractible pockets.
pub fn find_unbalanced_nis(
    network: &Network,
    strategy: &NisStrategy,
) -> Result<UnbalancedNisSet, ReductionError> {
    if network.bus_count() < 2 {
        return Ok(UnbalancedNisSet::empty());
    }
    let candidates: Vec<BTreeSet<usize>> = match strategy {
        NisStrategy::Exhaustive { max_nodes } => {
            let graph = network.to_multigraph();
            let catalog = enumerate_connected_nis(&graph, *max_nodes)?;
            catalog.node_sets[1..]
                .iter()
                .map(|s| s.iter().copied().collect())
                .collect()
        }
        NisStrategy::SeededGrowth => {
            let sign = |v: usize| -> i8 {
                let bus = &network.buses[v - 1];
                if bus.p_g_max - bus.p_d < 0.0 {
                    -1
                } else if bus.p_g_min - bus.p_d > 0.0 {
                    1
                } else {
                    0
                }
            };
            let adj = network.to_multigraph().adjacency();
            let n = network.bus_count();
            let mut visited = vec![false; n];
            let mut candidates = Vec::new();
            for v in 1..=n {
                if visited[v - 1] || sign(v) == 0 {
                    continue;
                }
                let s = sign(v);
                let mut region = BTreeSet::new();
                let mut stack = vec![v];
                while let Some(u) = stack.pop() {
                    if visited[u - 1] {
                        continue;
                    }
                    visited[u - 1] = true;
                    region.insert(u);
                    for &w in &adj[u - 1] {
                        if !visited[w - 1] && sign(w) == s {
                            stack.push(w);
                        }
                    }
                }
                if boundary_of(network, &region).len() == 1 {
                    candidates.push(region);
                } else {
                    for u in region {
                        candidates.push(BTreeSet::from([u]));
                    }
                }
            }
            candidates
        }
    };
    Ok(order_and_select(network, candidates))
}

/// Contraction driven by the case's switch config.
pub fn contract(
    network: &Network,
    config: &SwitchConfig,
    nis_set: &UnbalancedNisSet,
) -> Result<ReductionPlan, ReductionError> {
    contract_with_switchable(network, &config.switchable_ids, nis_set)
}

fn fmt_set(nodes: &[usize]) -> String {
    let inner: Vec<String> = nodes.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn fmt_pairs(pairs: &[(usize, usize)]) -> String {
    let inner: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    format!("{{{}}}", inner.join(","))
}

/// The contraction pipeline on an explicit switchable set (the security
/// variants call this per contingency with the faulted branch made
/// switchable, since it is absent post-contingency).
pub fn contract_with_switchable(
    network: &Network,
    switchable: &BTreeSet<usize>,
    nis_set: &UnbalancedNisSet,
) -> Result<ReductionPlan, ReductionError> {
    let n = network.bus_count();
    let mut steps: Vec<String> = Vec::new();

    // Validate the pocket family.
    let sets: Vec<BTreeSet<usize>> = nis_set.node_sets.iter().map(|s| s.iter().copied().collect()).collect();
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b) {
                return Err(ReductionError::Overlap(i, j));
            }
        }
    }
    let mut nis_of: Vec<Option<usize>> = vec![None; n];
    for (s, set) in sets.iter().enumerate() {
        if !induces_connected(network, set) {
            return Err(ReductionError::NotConnected(fmt_set(&nis_set.node_sets[s])));
        }
        if !is_unbalanced_nis(&nis_set.node_sets[s], network) {
            return Err(ReductionError::NotUnbalanced(fmt_set(&nis_set.node_sets[s])));
        }
        let boundary = boundary_of(network, set);
        if boundary != nis_set.boundary_sets[s] {
            return Err(ReductionError::BoundaryMismatch(fmt_set(&nis_set.node_sets[s])));
        }
        for &v in set {
            nis_of[v - 1] = Some(s);
        }
    }

    // Pocket contraction: keep boundary nodes, drop interiors and internal
    // edges, stitch each boundary with an ascending connector path.
    let mut alive = vec![true; n];
    let mut connectors: Vec<(usize, usize)> = Vec::new();
    for (s, set) in sets.iter().enumerate() {
        let boundary = &nis_set.boundary_sets[s];
        for &v in set {
            if !boundary.contains(&v) {
                alive[v - 1] = false;
            }
        }
        let path: Vec<(usize, usize)> = boundary.windows(2).map(|w| (w[0], w[1])).collect();
        steps.push(format!(
            "S1 contract nodes={} boundary={} connectors={}",
            fmt_set(&nis_set.node_sets[s]),
            fmt_set(boundary),
            fmt_pairs(&path),
        ));
        connectors.extend(path);
    }
    let surviving: Vec<&crate::grid::Branch> = network
        .branches
        .iter()
        .filter(|br| {
            let same_pocket = nis_of[br.from - 1].is_some() && nis_of[br.from - 1] == nis_of[br.to - 1];
            !same_pocket
        })
        .collect();
    for br in &surviving {
        if !alive[br.from - 1] || !alive[br.to - 1] {
            return Err(ReductionError::Inconsistent(format!(
                "branch {} lost an endpoint during pocket contraction",
                br.id
            )));
        }
    }

    // Always-on skeleton: unswitchable surviving branches plus connectors.
    let mut uf = crate::graph::UnionFind::new(n);
    for br in &surviving {
        if !switchable.contains(&br.id) {
            uf.union(br.from - 1, br.to - 1);
        }
    }
    for &(a, b) in &connectors {
        uf.union(a - 1, b - 1);
    }
    let mut comp_nodes: BTreeMap<usize, Vec<usize>> = BTreeMap::new(); // root -> members
    for v in 1..=n {
        if alive[v - 1] {
            let root = uf.find(v - 1);
            comp_nodes.entry(root).or_default().push(v);
        }
    }
    let comp_list: Vec<Vec<usize>> = {
        let mut groups: Vec<Vec<usize>> = comp_nodes.into_values().collect();
        groups.sort_by_key(|g| g[0]);
        groups
    };
    let mut comp_of: Vec<usize> = vec![usize::MAX; n];
    for (k, group) in comp_list.iter().enumerate() {
        for &v in group {
            comp_of[v - 1] = k;
        }
        steps.push(format!("S2 component k={} nodes={}", k + 1, fmt_set(group)));
    }

    let linking: Vec<&crate::grid::Branch> = surviving
        .iter()
        .copied()
        .filter(|br| switchable.contains(&br.id) && comp_of[br.from - 1] != comp_of[br.to - 1])
        .collect();
    steps.push(format!(
        "S2 linking branches={}",
        fmt_set(&linking.iter().map(|br| br.id).collect::<Vec<_>>())
    ));

    // Single always-on component: connectivity cannot be broken, the block
    // is constant-feasible and the contracted graph degenerates to a point.
    if comp_list.len() <= 1 {
        steps.push("S4 contracted nodes=1 edges=0".to_string());
        let contracted = Multigraph::new(1, Vec::new())?;
        return Ok(ReductionPlan {
            contracted,
            node_map: vec![1; n],
            edge_map: BTreeMap::new(),
            fixed_edges: BTreeSet::new(),
            steps,
        });
    }

    // Shrink each component to its linking-incident nodes on a connector path.
    let mut keep_nodes: Vec<Vec<usize>> = vec![Vec::new(); comp_list.len()];
    for br in &linking {
        for v in [br.from, br.to] {
            let k = comp_of[v - 1];
            if !keep_nodes[k].contains(&v) {
                keep_nodes[k].push(v);
            }
        }
    }
    let mut inner_connectors: Vec<Vec<(usize, usize)>> = Vec::new();
    for (k, keep) in keep_nodes.iter_mut().enumerate() {
        keep.sort_unstable();
        if keep.is_empty() {
            return Err(ReductionError::Inconsistent(format!(
                "component {} has no linking-incident node",
                k + 1
            )));
        }
        let path: Vec<(usize, usize)> = keep.windows(2).map(|w| (w[0], w[1])).collect();
        steps.push(format!(
            "S3 shrink k={} keep={} connectors={}",
            k + 1,
            fmt_set(keep),
            fmt_pairs(&path),
        ));
        inner_connectors.push(path);
    }

    // Assemble the contracted graph; ids ascend with original node ids.
    let mut final_nodes: Vec<usize> = keep_nodes.iter().flatten().copied().collect();
    final_nodes.sort_unstable();
    let contracted_id: BTreeMap<usize, usize> =
        final_nodes.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_map = BTreeMap::new();
    for br in &linking {
        edge_map.insert(edges.len(), br.id);
        edges.push((contracted_id[&br.from], contracted_id[&br.to]));
    }
    let mut fixed_edges = BTreeSet::new();
    for path in &inner_connectors {
        for &(a, b) in path {
            fixed_edges.insert(edges.len());
            edges.push((contracted_id[&a], contracted_id[&b]));
        }
    }
    steps.push(format!("S4 contracted nodes={} edges={}", final_nodes.len(), edges.len()));
    for (j, _) in edges.iter().enumerate() {
        match edge_map.get(&j) {
            Some(branch_id) => steps.push(format!("S5 edge {} <- branch {}", j + 1, branch_id)),
            None => steps.push(format!("S5 edge {} fixed on", j + 1)),
        }
    }

    // Map every original node to the contracted node standing in for it.
    let rep_of_comp: Vec<usize> = keep_nodes.iter().map(|keep| keep[0]).collect();
    let mut node_map = vec![0usize; n];
    for v in 1..=n {
        let anchor = if alive[v - 1] {
            v
        } else {
            let s = nis_of[v - 1].expect("dead nodes are pocket interiors");
            nis_set.boundary_sets[s][0]
        };
        let k = comp_of[anchor - 1];
        let rep = if contracted_id.contains_key(&anchor) { anchor } else { rep_of_comp[k] };
        node_map[v - 1] = contracted_id[&rep];
    }

    let contracted = Multigraph::new(final_nodes.len(), edges)?;
    if !connected_components(&contracted).is_connected() {
        return Err(ReductionError::Inconsistent(
            "contracted graph with all edges on is disconnected".into(),
        ));
    }
    Ok(ReductionPlan { contracted, node_map, edge_map, fixed_edges, steps })
}

/// Emits the connectedness block over the contracted graph: connector edges
/// carry constant status 1, mirrored edges reuse the original `z`
/// variables, and no binaries are added. A single-node plan needs no rows.
pub fn reduced_connectedness(
    model: &mut MilpModel,
    plan: &ReductionPlan,
    pivot: usize,
    m_big: f64,
) -> Result<(), ReductionError> {
    emit_reduced_block(model, plan, pivot, m_big, "", "", None)
}

/// Per-contingency copy of the reduced block: same wiring, with the faulted
/// branch's status taken as constant 0 wherever it survived contraction.
pub fn reduced_connectedness_post_contingency(
    model: &mut MilpModel,
    plan: &ReductionPlan,
    pivot: usize,
    m_big: f64,
    faulted_branch: usize,
) -> Result<(), ReductionError> {
    emit_reduced_block(
        model,
        plan,
        pivot,
        m_big,
        &format!("_k{faulted_branch}"),
        &format!("_c{faulted_branch}"),
        Some(faulted_branch),
    )
}

fn emit_reduced_block(
    model: &mut MilpModel,
    plan: &ReductionPlan,
    pivot: usize,
    m_big: f64,
    suffix: &str,
    tag_suffix: &str,
    faulted_branch: Option<usize>,
) -> Result<(), ReductionError> {
    let g = &plan.contracted;
    let n = g.node_count();
    if n < 2 {
        return Ok(());
    }
    if pivot < 1 || pivot > plan.node_map.len() {
        return Err(ModelError::PivotOutOfRange { pivot, n: plan.node_map.len() }.into());
    }
    let pivot_contracted = plan.node_map[pivot - 1];
    let c = make_uniquely_balanced_c(n, pivot_contracted)?;

    for node in 1..=n {
        model.add_var(
            format!("vth_{node}{suffix}"),
            VarKind::Continuous,
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
    }
    for j in 0..g.edge_count() {
        model.add_var(
            format!("rho_{}{suffix}", j + 1),
            VarKind::Continuous,
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
    }

    for (j, &(u, v)) in g.edges().iter().enumerate() {
        let vth_u = model.require_var(&format!("vth_{u}{suffix}"))?;
        let vth_v = model.require_var(&format!("vth_{v}{suffix}"))?;
        let rho = model.require_var(&format!("rho_{}{suffix}", j + 1))?;
        let e = j + 1;
        enum Status {
            Variable(usize),
            Constant(f64),
        }
        let status = match plan.edge_map.get(&j) {
            None => Status::Constant(1.0),
            Some(&branch_id) if faulted_branch == Some(branch_id) => Status::Constant(0.0),
            Some(&branch_id) => Status::Variable(model.require_var(&format!("z_{branch_id}"))?),
        };
        match status {
            Status::Variable(z) => {
                model.add_row(
                    format!("rconn_pot_lo_e{e}{tag_suffix}"),
                    vec![(vth_u, 1.0), (vth_v, -1.0), (rho, -1.0), (z, -m_big)],
                    RowSense::Ge,
                    -m_big,
                )?;
                model.add_row(
                    format!("rconn_pot_up_e{e}{tag_suffix}"),
                    vec![(vth_u, 1.0), (vth_v, -1.0), (rho, -1.0), (z, m_big)],
                    RowSense::Le,
                    m_big,
                )?;
                model.add_row(
                    format!("rconn_gate_lo_e{e}{tag_suffix}"),
                    vec![(rho, 1.0), (z, m_big)],
                    RowSense::Ge,
                    0.0,
                )?;
                model.add_row(
                    format!("rconn_gate_up_e{e}{tag_suffix}"),
                    vec![(rho, 1.0), (z, -m_big)],
                    RowSense::Le,
                    0.0,
                )?;
            }
            Status::Constant(bit) => {
                // Substituted rows keep the same shape with z replaced.
                model.add_row(
                    format!("rconn_pot_lo_e{e}{tag_suffix}"),
                    vec![(vth_u, 1.0), (vth_v, -1.0), (rho, -1.0)],
                    RowSense::Ge,
                    -m_big * (1.0 - bit),
                )?;
                model.add_row(
                    format!("rconn_pot_up_e{e}{tag_suffix}"),
                    vec![(vth_u, 1.0), (vth_v, -1.0), (rho, -1.0)],
                    RowSense::Le,
                    m_big * (1.0 - bit),
                )?;
                model.add_row(
                    format!("rconn_gate_lo_e{e}{tag_suffix}"),
                    vec![(rho, 1.0)],
                    RowSense::Ge,
                    -m_big * bit,
                )?;
                model.add_row(
                    format!("rconn_gate_up_e{e}{tag_suffix}"),
                    vec![(rho, 1.0)],
                    RowSense::Le,
                    m_big * bit,
                )?;
            }
        }
    }
    for node in 1..=n {
        let mut terms = Vec::new();
        for (j, &(u, v)) in g.edges().iter().enumerate() {
            let rho = model.require_var(&format!("rho_{}{suffix}", j + 1))?;
            if u == node {
                terms.push((rho, 1.0));
            }
            if v == node {
                terms.push((rho, -1.0));
            }
        }
        model.add_row(
            format!("rconn_div_n{node}{tag_suffix}"),
            terms,
            RowSense::Eq,
            c[node - 1],
        )?;
    }
    Ok(())
}

/// One sampled-topology comparison: the full graph and the contracted graph
/// must agree on connectedness for every dispatch-feasible status vector.
#[derive(Debug, Clone)]
pub struct MismatchCase {
    pub z: Vec<bool>,
    pub full_connected: bool,
    pub reduced_connected: bool,
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub samples: usize,
    pub feasible: usize,
    pub mismatches: Vec<MismatchCase>,
}

impl EquivalenceReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Samples random status vectors, keeps the dispatch-feasible ones (decided
/// by LP with the statuses pinned), and checks that connectedness of the
/// full and contracted graphs agree on every one.
pub fn equivalence_check(
    network: &Network,
    config: &SwitchConfig,
    plan: &ReductionPlan,
    sample_count: usize,
    seed: u64,
) -> Result<EquivalenceReport, ReductionError> {
    let policy = BigMPolicy::derive(network);
    let base = build_base_ots(network, config, &policy)?;
    let graph = network.to_multigraph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivalenceReport { samples: sample_count, feasible: 0, mismatches: Vec::new() };
    let opts = SolverOptions::default();
    for _ in 0..sample_count {
        let bits: Vec<bool> = network
            .branches
            .iter()
            .map(|br| !config.is_switchable(br.id) || rng.random_bool(0.5))
            .collect();
        let z = Topology::new(bits.clone());
        let mut fixed = base.clone();
        for (k, &bit) in bits.iter().enumerate() {
            let id = fixed.require_var(&format!("z_{}", k + 1))?;
            let value = if bit { 1.0 } else { 0.0 };
            fixed.set_bounds(id, value, value)?;
        }
        let solution = solve(&fixed, &opts).map_err(|e| ReductionError::Inconsistent(e.to_string()))?;
        if solution.status != SolveStatus::Optimal {
            continue;
        }
        report.feasible += 1;
        let full_connected = connected_components(&edge_induced(&graph, &z)?).is_connected();
        let reduced_connected =
            connected_components(&edge_induced(&plan.contracted, &plan.project(&z))?).is_connected();
        if full_connected != reduced_connected {
            report.mismatches.push(MismatchCase { z: bits, full_connected, reduced_connected });
        }
    }
    Ok(report)
}
