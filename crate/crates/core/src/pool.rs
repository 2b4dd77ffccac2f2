use crate::candidates::{dominance_survivors, enumerate_candidates, ClusterCandidate};
use crate::energy::{candidate_cost_l1, EnergyParams};
use crate::error::Result;
use crate::topology::Topology;

/// Pruned candidate clusters over one topology, each with its per-activation
/// L1 energy. `costs[i]` belongs to `candidates[i]`.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    pub n: usize,
    pub candidates: Vec<ClusterCandidate>,
    pub costs: Vec<f64>,
    /// Candidate count before dominated heads were removed.
    pub enumerated: usize,
}

impl CandidatePool {
    pub fn build(topology: &Topology, size_min: usize, size_max: usize, params: &EnergyParams) -> Result<Self> {
        params.validate()?;
        let all = enumerate_candidates(topology, size_min, size_max)?;
        let costs: Vec<f64> = all.iter().map(|c| candidate_cost_l1(c, topology, params)).collect();
        let kept = dominance_survivors(&all, &costs)?;
        Ok(Self {
            n: topology.n(),
            enumerated: all.len(),
            candidates: kept.iter().map(|&i| all[i].clone()).collect(),
            costs: kept.iter().map(|&i| costs[i]).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Index of the all-node cluster, if it survived pruning.
    pub fn full_cluster(&self) -> Option<usize> {
        self.candidates.iter().position(|c| c.size() == self.n)
    }
}
