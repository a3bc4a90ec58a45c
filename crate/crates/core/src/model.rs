//! Solver-neutral MILP tableau: named variables, sparse rows with
//! provenance tags, and the big-M policy derivations.

use std::collections::HashMap;

use thiserror::Error;

use crate::grid::Network;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable name `{0}`")]
    UnknownVariable(String),
    #[error("row `{tag}`: variable index {index} out of range")]
    BadVariableIndex { tag: String, index: usize },
    #[error("row `{tag}`: non-finite coefficient or rhs")]
    NonFinite { tag: String },
    #[error("variable `{name}`: invalid bounds [{lower}, {upper}]")]
    BadBounds { name: String, lower: f64, upper: f64 },
    #[error("binary variable `{name}` has bounds outside [0, 1]")]
    BinaryBounds { name: String },
    #[error("big-M policy values must be > 0")]
    BadPolicy,
    #[error("uniquely balanced vector needs n >= 2, got {0}")]
    TooFewNodes(usize),
    #[error("pivot {pivot} out of range 1..={n}")]
    PivotOutOfRange { pivot: usize, n: usize },
    #[error("injection vector is not uniquely balanced: {0}")]
    NotUniquelyBalanced(String),
    #[error("switch config references branch {0} not present in the network")]
    UnknownSwitchBranch(usize),
    #[error("contingency branch {0} is a bridge of the full graph")]
    BridgeContingency(usize),
    #[error("graph error: {0}")]
    Graph(#[from] crate::graph::GraphError),
    #[error("reduction error: {0}")]
    Reduction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl RowSense {
    pub fn symbol(&self) -> &'static str {
        match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// One linear constraint: sparse terms, sense, right-hand side, and a
/// provenance tag naming the block it came from.
#[derive(Debug, Clone)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub tag: String,
}

#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    pub name: String,
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
    /// Sparse objective, minimized.
    pub objective: Vec<(usize, f64)>,
    pub objective_constant: f64,
    rows: Vec<Row>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<usize, ModelError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(ModelError::DuplicateVariable(name));
        }
        if lower > upper || lower.is_nan() || upper.is_nan() {
            return Err(ModelError::BadBounds { name, lower, upper });
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(ModelError::BinaryBounds { name });
        }
        let id = self.vars.len();
        self.index.insert(name.clone(), id);
        self.vars.push(Variable { name, kind, lower, upper });
        Ok(id)
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require_var(&self, name: &str) -> Result<usize, ModelError> {
        self.var(name).ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn binary_count(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn continuous_count(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Continuous).count()
    }

    /// Tightens a variable's bounds, e.g. to pin an unswitchable branch on.
    pub fn set_bounds(&mut self, id: usize, lower: f64, upper: f64) -> Result<(), ModelError> {
        let v = &mut self.vars[id];
        if lower > upper || lower.is_nan() || upper.is_nan() {
            return Err(ModelError::BadBounds { name: v.name.clone(), lower, upper });
        }
        if v.kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(ModelError::BinaryBounds { name: v.name.clone() });
        }
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn add_objective_term(&mut self, id: usize, coefficient: f64) {
        if coefficient != 0.0 {
            self.objective.push((id, coefficient));
        }
    }

    pub fn add_row(
        &mut self,
        tag: impl Into<String>,
        terms: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> Result<usize, ModelError> {
        let tag = tag.into();
        for &(index, coefficient) in &terms {
            if index >= self.vars.len() {
                return Err(ModelError::BadVariableIndex { tag, index });
            }
            if !coefficient.is_finite() {
                return Err(ModelError::NonFinite { tag });
            }
        }
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite { tag });
        }
        let id = self.rows.len();
        self.rows.push(Row { terms, sense, rhs, tag });
        Ok(id)
    }

    /// Re-checks the structural invariants on an assembled model.
    pub fn validate(&self) -> Result<(), ModelError> {
        for v in &self.vars {
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(ModelError::BinaryBounds { name: v.name.clone() });
            }
        }
        for row in &self.rows {
            for &(index, coefficient) in &row.terms {
                if index >= self.vars.len() {
                    return Err(ModelError::BadVariableIndex { tag: row.tag.clone(), index });
                }
                if !coefficient.is_finite() {
                    return Err(ModelError::NonFinite { tag: row.tag.clone() });
                }
            }
            if !row.rhs.is_finite() {
                return Err(ModelError::NonFinite { tag: row.tag.clone() });
            }
        }
        Ok(())
    }

    /// Variable ids of the branch-status vector, in branch order.
    pub fn topology_var_ids(&self) -> Vec<usize> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.name.starts_with("z_"))
            .map(|(i, _)| i)
            .collect()
    }
}

/// The two deactivation constants: `k_flow` relaxes the angle-flow coupling
/// of an open branch, `m_conn` bounds the auxiliary potentials and flows of
/// the connectedness block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigMPolicy {
    pub k_flow: f64,
    pub m_conn: f64,
}

impl BigMPolicy {
    pub fn new(k_flow: f64, m_conn: f64) -> Result<Self, ModelError> {
        if !(k_flow > 0.0 && m_conn > 0.0) {
            return Err(ModelError::BadPolicy);
        }
        Ok(Self { k_flow, m_conn })
    }

    /// `k_flow` is the tightest uniform bound on |b_k (theta_i - theta_j)|
    /// plus one; `m_conn` follows [`BigMPolicy::conn_bound`] for the
    /// canonical injection.
    pub fn derive(network: &Network) -> Self {
        let theta_max = network.buses.iter().map(|b| b.theta_max).fold(f64::NEG_INFINITY, f64::max);
        let theta_min = network.buses.iter().map(|b| b.theta_min).fold(f64::INFINITY, f64::min);
        let span = (theta_max - theta_min).max(0.0);
        let b_max = network.branches.iter().map(|b| b.b).fold(0.0_f64, f64::max);
        let k_flow = b_max * span + 1.0;
        let n = network.bus_count();
        let c = crate::constraints::make_uniquely_balanced_c(n.max(2), 1).expect("n >= 2");
        Self { k_flow, m_conn: Self::conn_bound(&c) }
    }

    /// `max(||c||_1, (n - 1) * ||c||_inf) + 1`: with unit resistances any
    /// edge flow and potential spread on a connected subgraph stays within
    /// this bound.
    pub fn conn_bound(c: &[f64]) -> f64 {
        let norm1: f64 = c.iter().map(|x| x.abs()).sum();
        let norm_inf = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let n = c.len();
        norm1.max((n.saturating_sub(1)) as f64 * norm_inf) + 1.0
    }
}

/// Roster of assembled model flavors: M-variants are the dispatch model with
/// growing connectedness treatment, N-variants add branch-outage security.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    M1,
    M2,
    M3,
    M4,
    N1,
    N2,
    N3,
    N4,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 8] = [
        ModelVariant::M1,
        ModelVariant::M2,
        ModelVariant::M3,
        ModelVariant::M4,
        ModelVariant::N1,
        ModelVariant::N2,
        ModelVariant::N3,
        ModelVariant::N4,
    ];

    pub fn security_constrained(&self) -> bool {
        matches!(self, ModelVariant::N1 | ModelVariant::N2 | ModelVariant::N3 | ModelVariant::N4)
    }

    /// Which connectedness block the variant carries, if any.
    pub fn connectedness(&self) -> Connectedness {
        match self {
            ModelVariant::M1 | ModelVariant::N1 => Connectedness::None,
            ModelVariant::M2 | ModelVariant::N2 => Connectedness::NecessaryOnly,
            ModelVariant::M3 | ModelVariant::N3 => Connectedness::Full,
            ModelVariant::M4 | ModelVariant::N4 => Connectedness::Reduced,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectedness {
    None,
    NecessaryOnly,
    Full,
    Reduced,
}

impl std::fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelVariant::M1 => "M1",
            ModelVariant::M2 => "M2",
            ModelVariant::M3 => "M3",
            ModelVariant::M4 => "M4",
            ModelVariant::N1 => "N1",
            ModelVariant::N2 => "N2",
            ModelVariant::N3 => "N3",
            ModelVariant::N4 => "N4",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ModelVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "M1" => Ok(ModelVariant::M1),
            "M2" => Ok(ModelVariant::M2),
            "M3" => Ok(ModelVariant::M3),
            "M4" => Ok(ModelVariant::M4),
            "N1" => Ok(ModelVariant::N1),
            "N2" => Ok(ModelVariant::N2),
            "N3" => Ok(ModelVariant::N3),
            "N4" => Ok(ModelVariant::N4),
            other => Err(format!("unknown model variant `{other}`")),
        }
    }
}
