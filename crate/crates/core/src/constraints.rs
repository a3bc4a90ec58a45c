//! Model assembly: the switching dispatch model, the per-bus degree
//! condition, the exact linear connectedness block and its security-side
//! replication, and the M1..M4 / N1..N4 variant roster.

use crate::graph::{
    classify_balance, connected_components, enumerate_connected_nis, BalanceKind, Multigraph, Topology,
};
use crate::grid::{ContingencySet, Network, SwitchConfig};
use crate::model::{BigMPolicy, Connectedness, MilpModel, ModelError, ModelVariant, RowSense, VarKind};
use crate::reduction::{contract, contract_with_switchable, find_unbalanced_nis, NisStrategy};

/// Options threaded through [`assemble`]: the pivot bus for the canonical
/// injection vector and the unbalanced-NIS search strategy for reduced
/// variants.
#[derive(Debug, Clone)]
pub struct AssembleOptions {
    pub pivot: usize,
    pub nis_strategy: NisStrategy,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self { pivot: 1, nis_strategy: NisStrategy::default() }
    }
}

/// The dispatch model: binary branch statuses, generation and angle bounds,
/// capacity gating, big-K angle-flow coupling, and nodal balance. Branches
/// outside the switch config are pinned on.
pub fn build_base_ots(
    network: &Network,
    config: &SwitchConfig,
    policy: &BigMPolicy,
) -> Result<MilpModel, ModelError> {
    if !(policy.k_flow > 0.0 && policy.m_conn > 0.0) {
        return Err(ModelError::BadPolicy);
    }
    for &id in &config.switchable_ids {
        if id < 1 || id > network.branch_count() {
            return Err(ModelError::UnknownSwitchBranch(id));
        }
    }

    let mut model = MilpModel::new(network.name.clone());
    let k_flow = policy.k_flow;

    for br in &network.branches {
        let (lo, hi) = if config.is_switchable(br.id) { (0.0, 1.0) } else { (1.0, 1.0) };
        model.add_var(format!("z_{}", br.id), VarKind::Binary, lo, hi)?;
    }
    for bus in &network.buses {
        model.add_var(format!("pg_{}", bus.id), VarKind::Continuous, bus.p_g_min, bus.p_g_max)?;
    }
    for bus in &network.buses {
        model.add_var(format!("th_{}", bus.id), VarKind::Continuous, bus.theta_min, bus.theta_max)?;
    }
    for br in &network.branches {
        model.add_var(format!("pb_{}", br.id), VarKind::Continuous, -br.p_b_max, br.p_b_max)?;
    }

    for bus in &network.buses {
        let pg = model.require_var(&format!("pg_{}", bus.id))?;
        model.add_objective_term(pg, bus.c_g);
    }
    for br in &network.branches {
        if config.is_switchable(br.id) && br.c_b > 0.0 {
            let z = model.require_var(&format!("z_{}", br.id))?;
            model.add_objective_term(z, br.c_b);
        }
    }

    for br in &network.branches {
        let z = model.require_var(&format!("z_{}", br.id))?;
        let pb = model.require_var(&format!("pb_{}", br.id))?;
        let th_from = model.require_var(&format!("th_{}", br.from))?;
        let th_to = model.require_var(&format!("th_{}", br.to))?;
        // -p_max z <= p_b <= p_max z
        model.add_row(
            format!("cap_lo_b{}", br.id),
            vec![(pb, 1.0), (z, br.p_b_max)],
            RowSense::Ge,
            0.0,
        )?;
        model.add_row(
            format!("cap_up_b{}", br.id),
            vec![(pb, 1.0), (z, -br.p_b_max)],
            RowSense::Le,
            0.0,
        )?;
        // b (th_i - th_j) - p_b within +-(1 - z) K
        model.add_row(
            format!("dcflow_lo_b{}", br.id),
            vec![(th_from, br.b), (th_to, -br.b), (pb, -1.0), (z, -k_flow)],
            RowSense::Ge,
            -k_flow,
        )?;
        model.add_row(
            format!("dcflow_up_b{}", br.id),
            vec![(th_from, br.b), (th_to, -br.b), (pb, -1.0), (z, k_flow)],
            RowSense::Le,
            k_flow,
        )?;
    }
    for bus in &network.buses {
        let pg = model.require_var(&format!("pg_{}", bus.id))?;
        let mut terms = vec![(pg, 1.0)];
        for br in &network.branches {
            let pb = model.require_var(&format!("pb_{}", br.id))?;
            if br.from == bus.id {
                terms.push((pb, -1.0));
            }
            if br.to == bus.id {
                terms.push((pb, 1.0));
            }
        }
        model.add_row(format!("bal_n{}", bus.id), terms, RowSense::Eq, bus.p_d)?;
    }
    Ok(model)
}

/// Per-bus degree condition: at least one incident branch stays on. This is
/// necessary for connectedness but nowhere near sufficient.
pub fn add_necessary_connectedness(model: &mut MilpModel, network: &Network) -> Result<(), ModelError> {
    for bus in &network.buses {
        let mut terms = Vec::new();
        for br in &network.branches {
            if br.from == bus.id || br.to == bus.id {
                let z = model.require_var(&format!("z_{}", br.id))?;
                terms.push((z, 1.0));
            }
        }
        model.add_row(format!("degree_n{}", bus.id), terms, RowSense::Ge, 1.0)?;
    }
    Ok(())
}

/// The canonical uniquely-balanced injection: `1 - n` at the pivot, `1`
/// everywhere else. On any connected graph every proper connected NIS sums
/// to `|V_i|` or `|V_i| - n`, both nonzero.
pub fn make_uniquely_balanced_c(n: usize, pivot: usize) -> Result<Vec<f64>, ModelError> {
    if n < 2 {
        return Err(ModelError::TooFewNodes(n));
    }
    if pivot < 1 || pivot > n {
        return Err(ModelError::PivotOutOfRange { pivot, n });
    }
    let mut c = vec![1.0; n];
    c[pivot - 1] = 1.0 - n as f64;
    Ok(c)
}

fn is_canonical_balanced(c: &[f64]) -> bool {
    let n = c.len();
    if n < 2 {
        return false;
    }
    let pivot_value = 1.0 - n as f64;
    let pivots = c.iter().filter(|&&x| x == pivot_value).count();
    let ones = c.iter().filter(|&&x| x == 1.0).count();
    pivots == 1 && ones == n - 1
}

/// Verifies unique balance. The canonical pattern is accepted analytically
/// on a connected graph; anything else is checked against the enumerated
/// catalog, subject to the enumeration cap.
fn ensure_uniquely_balanced(graph: &Multigraph, c: &[f64]) -> Result<(), ModelError> {
    if c.len() != graph.node_count() {
        return Err(ModelError::NotUniquelyBalanced(format!(
            "length {} does not match node count {}",
            c.len(),
            graph.node_count()
        )));
    }
    if is_canonical_balanced(c) {
        if connected_components(graph).is_connected() {
            return Ok(());
        }
        return Err(ModelError::NotUniquelyBalanced("graph is disconnected".into()));
    }
    let catalog = enumerate_connected_nis(graph, None)?;
    match classify_balance(c, &catalog, 1e-9).kind {
        BalanceKind::UniquelyBalanced => Ok(()),
        other => Err(ModelError::NotUniquelyBalanced(format!("classified as {other:?}"))),
    }
}

/// The exact connectedness block: free auxiliary potentials and edge flows,
/// McCormick-gated against the branch statuses, with divergence pinned to
/// `c`. Adds no binaries. Feasible iff the on-topology is connected.
pub fn add_connectedness(
    model: &mut MilpModel,
    graph: &Multigraph,
    c: &[f64],
    m_big: f64,
) -> Result<(), ModelError> {
    ensure_uniquely_balanced(graph, c)?;
    add_connectedness_rows(model, graph, c, m_big, "", "")
}

/// Shared row emitter for the base block and its per-contingency copies.
/// `faulted` substitutes constant 0 for that branch's status.
fn add_connectedness_rows(
    model: &mut MilpModel,
    graph: &Multigraph,
    c: &[f64],
    m_big: f64,
    suffix: &str,
    tag_suffix: &str,
) -> Result<(), ModelError> {
    add_connectedness_rows_faulted(model, graph, c, m_big, suffix, tag_suffix, None)
}

fn add_connectedness_rows_faulted(
    model: &mut MilpModel,
    graph: &Multigraph,
    c: &[f64],
    m_big: f64,
    suffix: &str,
    tag_suffix: &str,
    faulted: Option<usize>,
) -> Result<(), ModelError> {
    if m_big.is_nan() || m_big <= 0.0 {
        return Err(ModelError::BadPolicy);
    }
    let n = graph.node_count();
    for node in 1..=n {
        model.add_var(
            format!("vth_{node}{suffix}"),
            VarKind::Continuous,
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
    }
    for k in 0..graph.edge_count() {
        model.add_var(
            format!("rho_{}{suffix}", k + 1),
            VarKind::Continuous,
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
    }
    for (k, &(u, v)) in graph.edges().iter().enumerate() {
        let branch_id = k + 1;
        let vth_u = model.require_var(&format!("vth_{u}{suffix}"))?;
        let vth_v = model.require_var(&format!("vth_{v}{suffix}"))?;
        let rho = model.require_var(&format!("rho_{branch_id}{suffix}"))?;
        if faulted == Some(branch_id) {
            // Post-contingency status is constant 0: the potential rows
            // relax fully and the gate pins the auxiliary flow to zero.
            model.add_row(
                format!("conn_pot_lo_e{branch_id}{tag_suffix}"),
                vec![(vth_u, 1.0), (vth_v, -1.0), (rho, -1.0)],
                RowSense::Ge,
                -m_big,
            )?;
            model.add_row(
                format!("conn_pot_up_e{branch_id}{tag_suffix}"),
                vec![(vth_u, 1.0), (vth_v, -1.0), (rho, -1.0)],
                RowSense::Le,
                m_big,
            )?;
            model.add_row(
                format!("conn_gate_lo_e{branch_id}{tag_suffix}"),
                vec![(rho, 1.0)],
                RowSense::Ge,
                0.0,
            )?;
            model.add_row(
                format!("conn_gate_up_e{branch_id}{tag_suffix}"),
                vec![(rho, 1.0)],
                RowSense::Le,
                0.0,
            )?;
        } else {
            let z = model.require_var(&format!("z_{branch_id}"))?;
            // -M (1 - z) <= E^T vth - rho <= M (1 - z)
            model.add_row(
                format!("conn_pot_lo_e{branch_id}{tag_suffix}"),
                vec![(vth_u, 1.0), (vth_v, -1.0), (rho, -1.0), (z, -m_big)],
                RowSense::Ge,
                -m_big,
            )?;
            model.add_row(
                format!("conn_pot_up_e{branch_id}{tag_suffix}"),
                vec![(vth_u, 1.0), (vth_v, -1.0), (rho, -1.0), (z, m_big)],
                RowSense::Le,
                m_big,
            )?;
            // -M z <= rho <= M z
            model.add_row(
                format!("conn_gate_lo_e{branch_id}{tag_suffix}"),
                vec![(rho, 1.0), (z, m_big)],
                RowSense::Ge,
                0.0,
            )?;
            model.add_row(
                format!("conn_gate_up_e{branch_id}{tag_suffix}"),
                vec![(rho, 1.0), (z, -m_big)],
                RowSense::Le,
                0.0,
            )?;
        }
    }
    for node in 1..=n {
        let mut terms = Vec::new();
        for (k, &(u, v)) in graph.edges().iter().enumerate() {
            let rho = model.require_var(&format!("rho_{}{suffix}", k + 1))?;
            if u == node {
                terms.push((rho, 1.0));
            }
            if v == node {
                terms.push((rho, -1.0));
            }
        }
        model.add_row(
            format!("conn_div_n{node}{tag_suffix}"),
            terms,
            RowSense::Eq,
            c[node - 1],
        )?;
    }
    Ok(())
}

/// Security replication: per contingency, fresh generation, angle, and flow
/// variables bound by the same operating constraints with the faulted
/// branch forced out, plus generator ramp coupling to the base dispatch.
///
/// An empty contingency set leaves the model unchanged.
pub fn add_n_minus_1(
    model: &mut MilpModel,
    network: &Network,
    contingencies: &ContingencySet,
    policy: &BigMPolicy,
) -> Result<(), ModelError> {
    let graph = network.to_multigraph();
    for &kappa in &contingencies.branch_ids {
        let keep: Vec<(usize, usize)> = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != kappa - 1)
            .map(|(_, &e)| e)
            .collect();
        let without = Multigraph::new(graph.node_count(), keep)?;
        if !connected_components(&without).is_connected() {
            return Err(ModelError::BridgeContingency(kappa));
        }
    }

    let k_flow = policy.k_flow;
    for &kappa in &contingencies.branch_ids {
        let sfx = format!("_k{kappa}");
        for bus in &network.buses {
            model.add_var(format!("pg_{}{sfx}", bus.id), VarKind::Continuous, bus.p_g_min, bus.p_g_max)?;
        }
        for bus in &network.buses {
            model.add_var(format!("th_{}{sfx}", bus.id), VarKind::Continuous, bus.theta_min, bus.theta_max)?;
        }
        for br in &network.branches {
            model.add_var(format!("pb_{}{sfx}", br.id), VarKind::Continuous, -br.p_b_max, br.p_b_max)?;
        }
        for br in &network.branches {
            let pb = model.require_var(&format!("pb_{}{sfx}", br.id))?;
            let th_from = model.require_var(&format!("th_{}{sfx}", br.from))?;
            let th_to = model.require_var(&format!("th_{}{sfx}", br.to))?;
            if br.id == kappa {
                // z_k s_k = 0: the branch is out, its flow pinned to zero and
                // the coupling fully relaxed.
                model.add_row(format!("cap_lo_b{}_c{kappa}", br.id), vec![(pb, 1.0)], RowSense::Ge, 0.0)?;
                model.add_row(format!("cap_up_b{}_c{kappa}", br.id), vec![(pb, 1.0)], RowSense::Le, 0.0)?;
                model.add_row(
                    format!("dcflow_lo_b{}_c{kappa}", br.id),
                    vec![(th_from, br.b), (th_to, -br.b), (pb, -1.0)],
                    RowSense::Ge,
                    -k_flow,
                )?;
                model.add_row(
                    format!("dcflow_up_b{}_c{kappa}", br.id),
                    vec![(th_from, br.b), (th_to, -br.b), (pb, -1.0)],
                    RowSense::Le,
                    k_flow,
                )?;
            } else {
                let z = model.require_var(&format!("z_{}", br.id))?;
                model.add_row(
                    format!("cap_lo_b{}_c{kappa}", br.id),
                    vec![(pb, 1.0), (z, br.p_b_max)],
                    RowSense::Ge,
                    0.0,
                )?;
                model.add_row(
                    format!("cap_up_b{}_c{kappa}", br.id),
                    vec![(pb, 1.0), (z, -br.p_b_max)],
                    RowSense::Le,
                    0.0,
                )?;
                model.add_row(
                    format!("dcflow_lo_b{}_c{kappa}", br.id),
                    vec![(th_from, br.b), (th_to, -br.b), (pb, -1.0), (z, -k_flow)],
                    RowSense::Ge,
                    -k_flow,
                )?;
                model.add_row(
                    format!("dcflow_up_b{}_c{kappa}", br.id),
                    vec![(th_from, br.b), (th_to, -br.b), (pb, -1.0), (z, k_flow)],
                    RowSense::Le,
                    k_flow,
                )?;
            }
        }
        for bus in &network.buses {
            let pg = model.require_var(&format!("pg_{}{sfx}", bus.id))?;
            let mut terms = vec![(pg, 1.0)];
            for br in &network.branches {
                let pb = model.require_var(&format!("pb_{}{sfx}", br.id))?;
                if br.from == bus.id {
                    terms.push((pb, -1.0));
                }
                if br.to == bus.id {
                    terms.push((pb, 1.0));
                }
            }
            model.add_row(format!("bal_n{}_c{kappa}", bus.id), terms, RowSense::Eq, bus.p_d)?;
        }
        for bus in &network.buses {
            let pg_base = model.require_var(&format!("pg_{}", bus.id))?;
            let pg_post = model.require_var(&format!("pg_{}{sfx}", bus.id))?;
            // -r_down <= pg^k - pg <= r_up
            model.add_row(
                format!("ramp_dn_n{}_c{kappa}", bus.id),
                vec![(pg_post, 1.0), (pg_base, -1.0)],
                RowSense::Ge,
                -bus.r_down,
            )?;
            model.add_row(
                format!("ramp_up_n{}_c{kappa}", bus.id),
                vec![(pg_post, 1.0), (pg_base, -1.0)],
                RowSense::Le,
                bus.r_up,
            )?;
        }
    }
    Ok(())
}

/// One fresh connectedness block per contingency, statuses taken as
/// `z` with the faulted branch substituted by constant 0.
pub fn add_contingency_connectedness(
    model: &mut MilpModel,
    graph: &Multigraph,
    contingencies: &ContingencySet,
    c: &[f64],
    m_big: f64,
) -> Result<(), ModelError> {
    if contingencies.is_empty() {
        return Ok(());
    }
    ensure_uniquely_balanced(graph, c)?;
    for &kappa in &contingencies.branch_ids {
        add_connectedness_rows_faulted(
            model,
            graph,
            c,
            m_big,
            &format!("_k{kappa}"),
            &format!("_c{kappa}"),
            Some(kappa),
        )?;
    }
    Ok(())
}

/// Standalone feasibility model for a fixed topology: just the
/// connectedness block with every status pinned. Used by the exhaustive
/// oracle sweeps and `verify`.
pub fn connectedness_feasibility_model(
    graph: &Multigraph,
    z: &Topology,
    c: &[f64],
    m_big: f64,
) -> Result<MilpModel, ModelError> {
    if z.len() != graph.edge_count() {
        return Err(crate::graph::GraphError::TopologyLength {
            got: z.len(),
            expected: graph.edge_count(),
        }
        .into());
    }
    let mut model = MilpModel::new("connectedness-feasibility");
    for k in 0..graph.edge_count() {
        let bit = if z.is_on(k) { 1.0 } else { 0.0 };
        model.add_var(format!("z_{}", k + 1), VarKind::Binary, bit, bit)?;
    }
    add_connectedness_rows(&mut model, graph, c, m_big, "", "")?;
    Ok(model)
}

/// Assembles a variant: the base model plus the blocks its tag prescribes.
pub fn assemble(
    variant: ModelVariant,
    network: &Network,
    config: &SwitchConfig,
    contingencies: &ContingencySet,
    policy: &BigMPolicy,
    opts: &AssembleOptions,
) -> Result<MilpModel, ModelError> {
    let mut model = build_base_ots(network, config, policy)?;
    model.name = format!("{}-{}", network.name, variant);
    let graph = network.to_multigraph();
    let c = make_uniquely_balanced_c(network.bus_count(), opts.pivot)?;

    let nis_set = if variant.connectedness() == Connectedness::Reduced {
        Some(find_unbalanced_nis(network, &opts.nis_strategy)?)
    } else {
        None
    };

    match variant.connectedness() {
        Connectedness::None => {}
        Connectedness::NecessaryOnly => add_necessary_connectedness(&mut model, network)?,
        Connectedness::Full => add_connectedness(&mut model, &graph, &c, policy.m_conn)?,
        Connectedness::Reduced => {
            let nis = nis_set.as_ref().expect("reduced variant");
            let plan = contract(network, config, nis)?;
            crate::reduction::reduced_connectedness(&mut model, &plan, opts.pivot, policy.m_conn)?;
        }
    }

    if variant.security_constrained() {
        add_n_minus_1(&mut model, network, contingencies, policy)?;
        match variant.connectedness() {
            Connectedness::Full => {
                add_contingency_connectedness(&mut model, &graph, contingencies, &c, policy.m_conn)?;
            }
            Connectedness::Reduced => {
                let nis = nis_set.as_ref().expect("reduced variant");
                for &kappa in &contingencies.branch_ids {
                    let mut switchable = config.switchable_ids.clone();
                    switchable.insert(kappa);
                    let plan = contract_with_switchable(network, &switchable, nis)?;
                    crate::reduction::reduced_connectedness_post_contingency(
                        &mut model,
                        &plan,
                        opts.pivot,
                        policy.m_conn,
                        kappa,
                    )?;
                }
            }
            _ => {}
        }
    }
    model.validate()?;
    Ok(model)
}
