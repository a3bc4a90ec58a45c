//! Three-way oracle sweep for a case's graph: for each topology, LP
//! feasibility of the connectedness block, the least-squares potential
//! equation, and union-find must all agree.

use ots_core::{
    connected_components, connectedness_feasibility_model, edge_induced,
    make_uniquely_balanced_c, potential_feasible, solve, BigMPolicy, Network, SolveStatus,
    SolverOptions, Topology,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::HarnessError;

/// Hard ceiling for the exhaustive sweep; 2^22 LP solves is already hours.
pub const MAX_EXHAUSTIVE_EDGES: usize = 22;

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub topologies: usize,
    pub connected: usize,
    pub block_mismatches: usize,
    pub potential_mismatches: usize,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.block_mismatches == 0 && self.potential_mismatches == 0
    }
}

/// Sweeps topologies of the case's graph: all `2^|E|` when `exhaustive`,
/// otherwise `samples` random ones from `seed`.
pub fn verify_connectedness_oracles(
    network: &Network,
    exhaustive: bool,
    samples: usize,
    seed: u64,
    pivot: usize,
) -> Result<VerifyReport, HarnessError> {
    let graph = network.to_multigraph();
    let m = graph.edge_count();
    if exhaustive && m > MAX_EXHAUSTIVE_EDGES {
        return Err(HarnessError::TooLarge(format!(
            "{m} edges exceeds the exhaustive sweep cap of {MAX_EXHAUSTIVE_EDGES}"
        )));
    }
    let n = graph.node_count();
    let c = make_uniquely_balanced_c(n, pivot)?;
    let m_big = BigMPolicy::conn_bound(&c);
    let opts = SolverOptions::default();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topologies: Box<dyn Iterator<Item = Topology>> = if exhaustive {
        Box::new((0u64..(1u64 << m)).map(move |mask| Topology::from_mask(mask, m)))
    } else {
        Box::new((0..samples).map(move |_| Topology::new((0..m).map(|_| rng.random_bool(0.5)).collect())))
    };

    let mut report = VerifyReport::default();
    for z in topologies {
        report.topologies += 1;
        let sub = edge_induced(&graph, &z)?;
        let by_union_find = connected_components(&sub).is_connected();
        if by_union_find {
            report.connected += 1;
        }
        let model = connectedness_feasibility_model(&graph, &z, &c, m_big)?;
        let by_block = solve(&model, &opts)?.status == SolveStatus::Optimal;
        if by_block != by_union_find {
            report.block_mismatches += 1;
        }
        let by_potential = potential_feasible(&sub, &c, 1e-8)?;
        if by_potential != by_union_find {
            report.potential_mismatches += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::make_fixture;
    use ots_core::{Branch, Bus, Network};

    #[test]
    fn cycle3_exhaustive_sweep_is_clean() {
        let net = make_fixture("cycle3").unwrap();
        let report = verify_connectedness_oracles(&net, true, 0, 0, 1).unwrap();
        assert_eq!(report.topologies, 8);
        // Connected subgraphs of a triangle: 3 spanning paths + the ring.
        assert_eq!(report.connected, 4);
        assert!(report.is_clean());
    }

    #[test]
    fn sampled_sweep_is_clean_on_bridge2() {
        let net = make_fixture("bridge2").unwrap();
        let report = verify_connectedness_oracles(&net, false, 64, 5, 2).unwrap();
        assert_eq!(report.topologies, 64);
        assert!(report.is_clean());
    }

    #[test]
    fn oversized_exhaustive_refused() {
        let n = MAX_EXHAUSTIVE_EDGES + 1;
        let buses: Vec<Bus> = (1..=n)
            .map(|id| Bus {
                id,
                p_d: 0.0,
                p_g_min: 0.0,
                p_g_max: 1.0,
                c_g: 1.0,
                theta_min: -1.0,
                theta_max: 1.0,
                r_up: 0.0,
                r_down: 0.0,
            })
            .collect();
        let branches: Vec<Branch> = (1..=n)
            .map(|id| Branch {
                id,
                from: id,
                to: id % n + 1,
                b: 1.0,
                p_b_max: 1.0,
                switchable: true,
                c_b: 0.0,
            })
            .collect();
        let net = Network::new("big-ring", buses, branches).unwrap();
        assert!(matches!(
            verify_connectedness_oracles(&net, true, 0, 0, 1),
            Err(HarnessError::TooLarge(_))
        ));
    }
}
