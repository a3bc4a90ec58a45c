//! Multigraph connectivity machinery: incidence and Laplacian matrices,
//! edge-induced subgraphs, connected components, enumeration of connected
//! node-induced subgraphs (NIS), and injection-balance classification.
//!
//! Node ids are 1-based throughout, matching bus ids in case files. Matrix
//! rows/columns are 0-based (row `i` is node `i + 1`).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::grid::Network;

/// Hard cap on NIS enumeration; exceeding it is an explicit refusal, not a
/// silent truncation.
pub const DEFAULT_NIS_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge {index}: endpoint {node} out of range 1..={n}")]
    EndpointOutOfRange { index: usize, node: usize, n: usize },
    #[error("edge {index}: self-loop at node {node}")]
    SelfLoop { index: usize, node: usize },
    #[error("weight vector length {got}, expected {expected}")]
    WeightLength { got: usize, expected: usize },
    #[error("edge {index}: weight must be > 0, got {value}")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("topology length {got}, expected {expected}")]
    TopologyLength { got: usize, expected: usize },
    #[error("injection vector length {got}, expected {expected}")]
    InjectionLength { got: usize, expected: usize },
    #[error("graph is disconnected; NIS catalog requires the full node set to induce a connected subgraph")]
    Disconnected,
    #[error("connected-subgraph enumeration exceeded cap of {cap} sets")]
    EnumerationCap { cap: usize },
}

/// Undirected multigraph with a fixed per-edge orientation.
///
/// Parallel edges are allowed; self-loops are not. Optional positive edge
/// weights back the weighted Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
}

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        for (index, &(u, v)) in edges.iter().enumerate() {
            if u < 1 || u > n {
                return Err(GraphError::EndpointOutOfRange { index, node: u, n });
            }
            if v < 1 || v > n {
                return Err(GraphError::EndpointOutOfRange { index, node: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { index, node: u });
            }
        }
        Ok(Self { n, edges, weights: None })
    }

    pub fn with_weights(n: usize, edges: Vec<(usize, usize)>, weights: Vec<f64>) -> Result<Self, GraphError> {
        let mut g = Self::new(n, edges)?;
        if weights.len() != g.edges.len() {
            return Err(GraphError::WeightLength { got: weights.len(), expected: g.edges.len() });
        }
        for (index, &w) in weights.iter().enumerate() {
            if w.is_nan() || w <= 0.0 {
                return Err(GraphError::NonPositiveWeight { index, value: w });
            }
        }
        g.weights = Some(weights);
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Deduplicated neighbor lists, indexed by node - 1.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u - 1].push(v);
            adj[v - 1].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

/// Binary branch-status vector; entry `k` is the on/off state of edge `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    bits: Vec<bool>,
}

impl Topology {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn all_on(len: usize) -> Self {
        Self { bits: vec![true; len] }
    }

    /// Topology from the low `len` bits of `mask` (bit k = edge k), used by
    /// the exhaustive sweeps.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 64, "mask topologies support at most 64 edges");
        Self { bits: (0..len).map(|k| mask >> k & 1 == 1).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_on(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn on_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl From<Vec<bool>> for Topology {
    fn from(bits: Vec<bool>) -> Self {
        Self::new(bits)
    }
}

/// Partition of nodes into connected components.
#[derive(Debug, Clone)]
pub struct ComponentPartition {
    /// Component index (0-based, by lowest contained node) per node - 1.
    pub component_of: Vec<usize>,
    pub count: usize,
}

impl ComponentPartition {
    pub fn is_connected(&self) -> bool {
        self.count <= 1
    }

    /// Node sets, each ascending, ordered by lowest member.
    pub fn node_sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.count];
        for (i, &c) in self.component_of.iter().enumerate() {
            sets[c].push(i + 1);
        }
        sets
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Oriented incidence matrix: column `k` has +1 at `from(k)`, -1 at `to(k)`.
pub fn oriented_incidence(graph: &Multigraph) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(graph.n, graph.edges.len());
    for (k, &(u, v)) in graph.edges.iter().enumerate() {
        e[(u - 1, k)] = 1.0;
        e[(v - 1, k)] = -1.0;
    }
    e
}

/// Weighted Laplacian `E diag(w) E^T`; unit weights when neither `weights`
/// nor the graph's own weights are present.
pub fn laplacian(graph: &Multigraph, weights: Option<&[f64]>) -> Result<DMatrix<f64>, GraphError> {
    let w = match weights.or(graph.weights()) {
        Some(w) => {
            if w.len() != graph.edges.len() {
                return Err(GraphError::WeightLength { got: w.len(), expected: graph.edges.len() });
            }
            for (index, &x) in w.iter().enumerate() {
                if x.is_nan() || x <= 0.0 {
                    return Err(GraphError::NonPositiveWeight { index, value: x });
                }
            }
            w.to_vec()
        }
        None => vec![1.0; graph.edges.len()],
    };
    let mut l = DMatrix::zeros(graph.n, graph.n);
    for (k, &(u, v)) in graph.edges.iter().enumerate() {
        let (i, j) = (u - 1, v - 1);
        l[(i, i)] += w[k];
        l[(j, j)] += w[k];
        l[(i, j)] -= w[k];
        l[(j, i)] -= w[k];
    }
    Ok(l)
}

/// Edge-induced subgraph: every node kept, exactly the edges with `z_k = 1`.
pub fn edge_induced(graph: &Multigraph, z: &Topology) -> Result<Multigraph, GraphError> {
    if z.len() != graph.edges.len() {
        return Err(GraphError::TopologyLength { got: z.len(), expected: graph.edges.len() });
    }
    let edges: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .enumerate()
        .filter(|(k, _)| z.is_on(*k))
        .map(|(_, &e)| e)
        .collect();
    let weights = graph.weights.as_ref().map(|w| {
        w.iter()
            .enumerate()
            .filter(|(k, _)| z.is_on(*k))
            .map(|(_, &x)| x)
            .collect()
    });
    Ok(Multigraph { n: graph.n, edges, weights })
}

pub fn connected_components(graph: &Multigraph) -> ComponentPartition {
    let mut uf = UnionFind::new(graph.n);
    for &(u, v) in &graph.edges {
        uf.union(u - 1, v - 1);
    }
    let mut label = vec![usize::MAX; graph.n];
    let mut count = 0;
    let mut component_of = vec![0; graph.n];
    for (i, slot) in component_of.iter_mut().enumerate() {
        let root = uf.find(i);
        if label[root] == usize::MAX {
            label[root] = count;
            count += 1;
        }
        *slot = label[root];
    }
    ComponentPartition { component_of, count }
}

/// Catalog of node sets inducing connected subgraphs; entry 0 is always the
/// full node set.
#[derive(Debug, Clone)]
pub struct NisCatalog {
    pub node_sets: Vec<Vec<usize>>,
}

impl NisCatalog {
    pub fn len(&self) -> usize {
        self.node_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_sets.is_empty()
    }
}

/// Enumerates every node subset of size <= `max_nodes` (default: all nodes)
/// whose induced subgraph is connected. The full node set always comes
/// first, then subsets ordered by (size, lexicographic).
///
/// Refuses with [`GraphError::EnumerationCap`] once more than
/// [`DEFAULT_NIS_CAP`] sets would be produced.
pub fn enumerate_connected_nis(graph: &Multigraph, max_nodes: Option<usize>) -> Result<NisCatalog, GraphError> {
    enumerate_connected_nis_capped(graph, max_nodes, DEFAULT_NIS_CAP)
}

pub fn enumerate_connected_nis_capped(
    graph: &Multigraph,
    max_nodes: Option<usize>,
    cap: usize,
) -> Result<NisCatalog, GraphError> {
    let n = graph.n;
    if !connected_components(graph).is_connected() {
        return Err(GraphError::Disconnected);
    }
    let limit = max_nodes.unwrap_or(n).min(n);
    let adj = graph.adjacency();
    let mut sets: Vec<Vec<usize>> = Vec::new();

    // Enumerate, for each root v in turn, the connected sets whose minimum
    // node is v, growing through exclusive new neighbors so each set is
    // produced exactly once.
    let mut current: Vec<usize> = Vec::new();
    for v in 1..=n {
        current.push(v);
        if sets.len() >= cap {
            return Err(GraphError::EnumerationCap { cap });
        }
        sets.push(current.clone());
        if limit >= 2 {
            let ext: Vec<usize> = adj[v - 1].iter().copied().filter(|&u| u > v).collect();
            extend_nis(&adj, v, &mut current, &ext, limit, cap, &mut sets)?;
        }
        current.pop();
    }

    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    // Full node set to the front.
    if let Some(pos) = sets.iter().position(|s| s.len() == n) {
        let full = sets.remove(pos);
        sets.insert(0, full);
    } else {
        sets.insert(0, (1..=n).collect());
    }
    Ok(NisCatalog { node_sets: sets })
}

fn extend_nis(
    adj: &[Vec<usize>],
    root: usize,
    current: &mut Vec<usize>,
    ext: &[usize],
    limit: usize,
    cap: usize,
    sets: &mut Vec<Vec<usize>>,
) -> Result<(), GraphError> {
    for (i, &w) in ext.iter().enumerate() {
        // Exclusive new candidates: neighbors of w not already reachable
        // from the current set (that closure includes every tried or
        // pending extension candidate), so each subgraph appears once.
        let mut exclusive: Vec<usize> = Vec::new();
        for &u in &adj[w - 1] {
            if u > root
                && u != w
                && !current.contains(&u)
                && !current.iter().any(|&v| adj[v - 1].contains(&u))
            {
                exclusive.push(u);
            }
        }
        current.push(w);
        if sets.len() >= cap {
            return Err(GraphError::EnumerationCap { cap });
        }
        let mut emitted = current.clone();
        emitted.sort_unstable();
        sets.push(emitted);
        if current.len() < limit {
            let mut next_ext: Vec<usize> = ext[i + 1..].to_vec();
            for u in exclusive {
                if !next_ext.contains(&u) {
                    next_ext.push(u);
                }
            }
            extend_nis(adj, root, current, &next_ext, limit, cap, sets)?;
        }
        current.pop();
    }
    Ok(())
}

/// Injection-balance classes: the zero pattern of per-NIS sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BalanceKind {
    /// Only the whole-graph sum is zero.
    UniquelyBalanced,
    /// More than one catalog sum is zero (count carried).
    MultiplyBalanced(usize),
    /// Every catalog sum is nonzero.
    Unbalanced,
}

#[derive(Debug, Clone)]
pub struct BalanceClass {
    pub kind: BalanceKind,
    /// Per-catalog-entry sums, same order as the catalog.
    pub sums: Vec<f64>,
}

/// Classifies `c` against a NIS catalog: sums `c` over each catalog entry
/// and inspects the zero pattern (|sum| <= tol counts as zero).
pub fn classify_balance(c: &[f64], catalog: &NisCatalog, tol: f64) -> BalanceClass {
    let sums: Vec<f64> = catalog
        .node_sets
        .iter()
        .map(|set| set.iter().map(|&i| c[i - 1]).sum())
        .collect();
    let zeros: Vec<usize> = sums
        .iter()
        .enumerate()
        .filter(|(_, &s)| s.abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    let kind = if zeros.is_empty() {
        BalanceKind::Unbalanced
    } else if zeros == [0] {
        BalanceKind::UniquelyBalanced
    } else {
        BalanceKind::MultiplyBalanced(zeros.len())
    };
    BalanceClass { kind, sums }
}

/// Feasibility of the vertex potential equation `L theta = c` on `graph`,
/// decided by the minimum-norm least-squares residual: feasible iff
/// `||L theta - c||_inf <= tol * max(1, ||c||_inf)`.
///
/// With `c` uniquely balanced for the parent graph this equals
/// connectedness of `graph`.
pub fn potential_feasible(graph: &Multigraph, c: &[f64], tol: f64) -> Result<bool, GraphError> {
    if c.len() != graph.n {
        return Err(GraphError::InjectionLength { got: c.len(), expected: graph.n });
    }
    let l = laplacian(graph, Some(&vec![1.0; graph.edge_count()]))?;
    let rhs = DVector::from_column_slice(c);
    let svd = l.clone().svd(true, true);
    let theta = svd
        .solve(&rhs, 1.0e-10)
        .expect("SVD with U and V requested");
    let residual = (&l * theta - &rhs).amax();
    let scale = c.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
    Ok(residual <= tol * scale)
}

/// Whether a connected node set has a net injection interval excluding zero:
/// `0 not in [sum p_g_min - sum p_d, sum p_g_max - sum p_d]`. Over a single
/// connected NIS, the attainable net injection ranges over exactly that
/// interval, so this decides whether every admissible dispatch leaves the
/// set unbalanced.
pub fn is_unbalanced_nis(node_set: &[usize], network: &Network) -> bool {
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    for &i in node_set {
        let bus = &network.buses[i - 1];
        lo += bus.p_g_min - bus.p_d;
        hi += bus.p_g_max - bus.p_d;
    }
    lo > 0.0 || hi < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path3() -> Multigraph {
        Multigraph::new(3, vec![(1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn incidence_single_edge() {
        let g = Multigraph::new(2, vec![(1, 2)]).unwrap();
        let e = oriented_incidence(&g);
        assert_eq!(e.column(0).as_slice(), &[1.0, -1.0]);
    }

    #[test]
    fn incidence_path() {
        let e = oriented_incidence(&path3());
        assert_eq!(e.column(0).as_slice(), &[1.0, -1.0, 0.0]);
        assert_eq!(e.column(1).as_slice(), &[0.0, 1.0, -1.0]);
    }

    #[test]
    fn laplacian_single_edge() {
        let g = Multigraph::new(2, vec![(1, 2)]).unwrap();
        let l = laplacian(&g, None).unwrap();
        assert_eq!(l.as_slice(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn laplacian_parallel_edges() {
        // Two identical incidence columns: E E^T doubles every entry.
        let g = Multigraph::new(2, vec![(1, 2), (1, 2)]).unwrap();
        let l = laplacian(&g, None).unwrap();
        let e = oriented_incidence(&g);
        assert_eq!(l, &e * e.transpose());
        assert_eq!(l.as_slice(), &[2.0, -2.0, -2.0, 2.0]);
    }

    #[test]
    fn laplacian_weighted_edge() {
        let g = Multigraph::new(2, vec![(1, 2)]).unwrap();
        let l = laplacian(&g, Some(&[5.0])).unwrap();
        assert_eq!(l.as_slice(), &[5.0, -5.0, -5.0, 5.0]);
    }

    #[test]
    fn laplacian_rejects_bad_weights() {
        let g = Multigraph::new(2, vec![(1, 2)]).unwrap();
        assert!(matches!(laplacian(&g, Some(&[0.0])), Err(GraphError::NonPositiveWeight { .. })));
        assert!(matches!(laplacian(&g, Some(&[1.0, 1.0])), Err(GraphError::WeightLength { .. })));
    }

    #[test]
    fn self_loop_rejected() {
        assert!(matches!(Multigraph::new(2, vec![(2, 2)]), Err(GraphError::SelfLoop { .. })));
    }

    #[test]
    fn edge_induced_identity_and_empty() {
        let g = path3();
        let same = edge_induced(&g, &Topology::all_on(2)).unwrap();
        assert_eq!(same, g);
        let empty = edge_induced(&g, &Topology::new(vec![false, false])).unwrap();
        assert_eq!(empty.node_count(), 3);
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn edge_induced_cycle_minus_edge_is_path() {
        let cycle = Multigraph::new(4, vec![(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let sub = edge_induced(&cycle, &Topology::new(vec![true, true, true, false])).unwrap();
        assert_eq!(sub.edge_count(), 3);
        assert!(connected_components(&sub).is_connected());
    }

    #[test]
    fn edge_induced_length_mismatch() {
        let g = path3();
        assert!(matches!(
            edge_induced(&g, &Topology::all_on(5)),
            Err(GraphError::TopologyLength { .. })
        ));
    }

    #[test]
    fn components_counts() {
        assert!(connected_components(&path3()).is_connected());
        let isolated = Multigraph::new(4, vec![]).unwrap();
        let parts = connected_components(&isolated);
        assert_eq!(parts.count, 4);
    }

    #[test]
    fn components_two_area_split() {
        // Two triangle areas joined by a 2-line cutset; switching the cutset
        // off must leave exactly the two areas.
        let g = Multigraph::new(
            6,
            vec![(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (1, 4), (2, 5)],
        )
        .unwrap();
        let z = Topology::new(vec![true, true, true, true, true, true, false, false]);
        let parts = connected_components(&edge_induced(&g, &z).unwrap());
        assert_eq!(parts.count, 2);
        assert_eq!(parts.node_sets(), vec![vec![1, 2, 3], vec![4, 5, 6]]);
    }

    #[test]
    fn nis_triangle_has_seven() {
        let g = Multigraph::new(3, vec![(1, 2), (2, 3), (1, 3)]).unwrap();
        let cat = enumerate_connected_nis(&g, None).unwrap();
        assert_eq!(cat.len(), 7);
        assert_eq!(cat.node_sets[0], vec![1, 2, 3]);
    }

    #[test]
    fn nis_two_node_path() {
        let g = Multigraph::new(2, vec![(1, 2)]).unwrap();
        let cat = enumerate_connected_nis(&g, None).unwrap();
        assert_eq!(cat.node_sets, vec![vec![1, 2], vec![1], vec![2]]);
    }

    /// Independent subset-filter brute force used as the enumeration oracle.
    fn brute_force_nis(g: &Multigraph, max_nodes: usize) -> Vec<Vec<usize>> {
        let n = g.node_count();
        let mut out = Vec::new();
        for mask in 1u64..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            if set.len() > max_nodes && set.len() != n {
                continue;
            }
            let keep: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .copied()
                .filter(|&(u, v)| set.contains(&u) && set.contains(&v))
                .collect();
            let mut uf = UnionFind::new(n);
            for &(u, v) in &keep {
                uf.union(u - 1, v - 1);
            }
            let root = uf.find(set[0] - 1);
            if set.iter().all(|&i| uf.find(i - 1) == root) {
                out.push(set);
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        if let Some(pos) = out.iter().position(|s| s.len() == n) {
            let full = out.remove(pos);
            out.insert(0, full);
        }
        out
    }

    #[test]
    fn nis_four_node_matches_brute_force() {
        // Diamond with a chord; catalog and J-matrix row sums are frozen from
        // the subset-filter oracle.
        let g = Multigraph::new(4, vec![(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]).unwrap();
        let cat = enumerate_connected_nis(&g, None).unwrap();
        assert_eq!(cat.node_sets, brute_force_nis(&g, 4));
        assert_eq!(cat.len(), 14);
    }

    #[test]
    fn nis_two_area_graph_matches_brute_force() {
        let g = Multigraph::new(
            6,
            vec![(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (1, 4), (2, 5)],
        )
        .unwrap();
        let cat = enumerate_connected_nis(&g, None).unwrap();
        assert_eq!(cat.node_sets, brute_force_nis(&g, 6));
        assert_eq!(cat.len(), 42);
    }

    #[test]
    fn nis_respects_max_nodes_but_keeps_full_set() {
        let g = Multigraph::new(4, vec![(1, 2), (2, 3), (3, 4)]).unwrap();
        let cat = enumerate_connected_nis(&g, Some(2)).unwrap();
        assert_eq!(cat.node_sets[0], vec![1, 2, 3, 4]);
        assert!(cat.node_sets[1..].iter().all(|s| s.len() <= 2));
    }

    #[test]
    fn nis_cap_refusal() {
        let edges: Vec<(usize, usize)> = (1..=16)
            .flat_map(|u| (u + 1..=16).map(move |v| (u, v)))
            .collect();
        let g = Multigraph::new(16, edges).unwrap();
        assert!(matches!(
            enumerate_connected_nis_capped(&g, None, 10_000),
            Err(GraphError::EnumerationCap { cap: 10_000 })
        ));
    }

    #[test]
    fn nis_requires_connected_graph() {
        let g = Multigraph::new(3, vec![(1, 2)]).unwrap();
        assert!(matches!(enumerate_connected_nis(&g, None), Err(GraphError::Disconnected)));
    }

    #[test]
    fn balance_classes() {
        let g = Multigraph::new(4, vec![(1, 2), (2, 3), (3, 4)]).unwrap();
        let cat = enumerate_connected_nis(&g, None).unwrap();
        let canonical = vec![-3.0, 1.0, 1.0, 1.0];
        assert_eq!(classify_balance(&canonical, &cat, 1e-9).kind, BalanceKind::UniquelyBalanced);
        let zeros = vec![0.0; 4];
        assert_eq!(
            classify_balance(&zeros, &cat, 1e-9).kind,
            BalanceKind::MultiplyBalanced(cat.len())
        );
        let ones = vec![1.0; 4];
        assert_eq!(classify_balance(&ones, &cat, 1e-9).kind, BalanceKind::Unbalanced);
    }

    #[test]
    fn potential_feasible_connected_path() {
        let g = path3();
        assert!(potential_feasible(&g, &[-2.0, 1.0, 1.0], 1e-8).unwrap());
    }

    #[test]
    fn potential_feasible_disjoint_edges() {
        let g = Multigraph::new(4, vec![(1, 2), (3, 4)]).unwrap();
        assert!(!potential_feasible(&g, &[-3.0, 1.0, 1.0, 1.0], 1e-8).unwrap());
    }

    #[test]
    fn potential_feasible_agrees_with_components_exhaustively() {
        // 5-node, 7-edge graph: every one of the 2^7 topologies.
        let g = Multigraph::new(5, vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3), (2, 5)]).unwrap();
        let c = vec![-4.0, 1.0, 1.0, 1.0, 1.0];
        for mask in 0u64..(1 << 7) {
            let z = Topology::from_mask(mask, 7);
            let sub = edge_induced(&g, &z).unwrap();
            let by_potential = potential_feasible(&sub, &c, 1e-8).unwrap();
            let by_union_find = connected_components(&sub).is_connected();
            assert_eq!(by_potential, by_union_find, "mask {mask:#b}");
        }
    }

    proptest! {
        #[test]
        fn laplacian_factors_through_incidence(
            n in 2usize..6,
            picks in proptest::collection::vec((0usize..100, 0usize..100, 0.1f64..10.0), 1..10)
        ) {
            let edges: Vec<(usize, usize)> = picks
                .iter()
                .map(|&(a, b, _)| (a % n + 1, b % n + 1))
                .filter(|&(u, v)| u != v)
                .collect();
            prop_assume!(!edges.is_empty());
            let weights: Vec<f64> = picks.iter().take(edges.len()).map(|&(_, _, w)| w).collect();
            let g = Multigraph::with_weights(n, edges, weights.clone()).unwrap();
            let l = laplacian(&g, None).unwrap();
            let e = oriented_incidence(&g);
            let d = DMatrix::from_diagonal(&DVector::from_vec(weights));
            let product = &e * d * e.transpose();
            prop_assert!((l - product).amax() == 0.0);
            // Symmetric with zero row sums.
        }

        #[test]
        fn nis_enumeration_matches_subset_filter(
            n in 2usize..7,
            picks in proptest::collection::vec((0usize..100, 0usize..100), 1..12)
        ) {
            let mut edges: Vec<(usize, usize)> = picks
                .iter()
                .map(|&(a, b)| (a % n + 1, b % n + 1))
                .filter(|&(u, v)| u != v)
                .collect();
            // Spanning path keeps the graph connected.
            for k in 1..n {
                edges.push((k, k + 1));
            }
            let g = Multigraph::new(n, edges).unwrap();
            let cat = enumerate_connected_nis(&g, None).unwrap();
            prop_assert_eq!(&cat.node_sets, &brute_force_nis(&g, n));
        }

        #[test]
        fn component_count_invariant_under_orientation_flips(
            n in 2usize..7,
            picks in proptest::collection::vec((0usize..100, 0usize..100), 0..10),
            flips in proptest::collection::vec(any::<bool>(), 10)
        ) {
            let edges: Vec<(usize, usize)> = picks
                .iter()
                .map(|&(a, b)| (a % n + 1, b % n + 1))
                .filter(|&(u, v)| u != v)
                .collect();
            let flipped: Vec<(usize, usize)> = edges
                .iter()
                .zip(flips.iter())
                .map(|(&(u, v), &f)| if f { (v, u) } else { (u, v) })
                .collect();
            let g = Multigraph::new(n, edges).unwrap();
            let h = Multigraph::new(n, flipped).unwrap();
            prop_assert_eq!(connected_components(&g).count, connected_components(&h).count);
        }
    }
}
