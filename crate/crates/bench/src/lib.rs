//! Shared setup for the criterion benchmarks.

use ots_core::{
    default_contingencies, AssembleOptions, BigMPolicy, ContingencySet, MilpModel, ModelVariant,
    Network, SwitchConfig,
};

/// Everything a bench target needs to assemble one variant of one case.
pub struct BenchCase {
    pub network: Network,
    pub config: SwitchConfig,
    pub contingencies: ContingencySet,
    pub policy: BigMPolicy,
    pub opts: AssembleOptions,
}

impl BenchCase {
    pub fn new(network: Network) -> Self {
        let config = SwitchConfig::from_flags(&network);
        let contingencies = default_contingencies(&network);
        let policy = BigMPolicy::derive(&network);
        Self { network, config, contingencies, policy, opts: AssembleOptions::default() }
    }

    pub fn assemble(&self, variant: ModelVariant) -> MilpModel {
        ots_core::assemble(
            variant,
            &self.network,
            &self.config,
            &self.contingencies,
            &self.policy,
            &self.opts,
        )
        .expect("bench case assembles")
    }
}
