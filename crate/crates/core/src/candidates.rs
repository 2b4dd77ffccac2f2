//! Candidate clusters and their averaging matrices.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::topology::Topology;

/// A cluster head together with the (sorted) set of nodes it averages over.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ClusterCandidate {
    head: usize,
    members: Vec<usize>,
}

impl ClusterCandidate {
    /// Validates and normalizes a candidate over `n` nodes. `members` may be
    /// given in any order but must be distinct and contain `head`.
    pub fn new(head: usize, mut members: Vec<usize>, n: usize) -> Result<Self> {
        members.sort_unstable();
        if members.len() < 2 || members.len() > n {
            return Err(Error::InvalidArgument(format!(
                "cluster size {} outside [2, {n}]",
                members.len()
            )));
        }
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("cluster members must be distinct".into()));
        }
        if members.last().is_some_and(|&m| m >= n) {
            return Err(Error::InvalidArgument(format!("member index out of range for {n} nodes")));
        }
        if members.binary_search(&head).is_err() {
            return Err(Error::InvalidArgument(format!("head {head} is not a member")));
        }
        Ok(Self { head, members })
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.members.binary_search(&node).is_ok()
    }
}

/// Emits, for every head and every size in `[size_min, size_max]`, the
/// cluster made of the head and its `size - 1` nearest neighbours (ties go to
/// the lower node index). Clusters sharing a member set but not a head are
/// all kept; see [`prune_dominated`].
pub fn enumerate_candidates(
    topology: &Topology,
    size_min: usize,
    size_max: usize,
) -> Result<Vec<ClusterCandidate>> {
    let n = topology.n();
    if size_min < 2 {
        return Err(Error::InvalidConfig(format!("cluster_size_min must be >= 2 (got {size_min})")));
    }
    if size_max > n {
        return Err(Error::InvalidConfig(format!(
            "cluster_size_max must be <= number of nodes {n} (got {size_max})"
        )));
    }
    if size_min > size_max {
        return Err(Error::InvalidConfig(format!(
            "cluster_size_min ({size_min}) exceeds cluster_size_max ({size_max})"
        )));
    }

    let mut out = Vec::with_capacity(n * (size_max - size_min + 1));
    for head in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != head).collect();
        others.sort_by(|&a, &b| {
            topology
                .dist_sq(head, a)
                .total_cmp(&topology.dist_sq(head, b))
                .then(a.cmp(&b))
        });
        for size in size_min..=size_max {
            let mut members: Vec<usize> = others[..size - 1].to_vec();
            members.push(head);
            members.sort_unstable();
            let candidate = ClusterCandidate { head, members };
            // Different sizes never collide for the same head; this only
            // guards the contract.
            if !out.contains(&candidate) {
                out.push(candidate);
            }
        }
    }
    Ok(out)
}

/// Among candidates with identical member sets only the cheapest (by L1
/// cost, then lower head index) survives. Order of survivors follows the
/// input order.
pub fn prune_dominated(candidates: &[ClusterCandidate], costs: &[f64]) -> Result<Vec<ClusterCandidate>> {
    Ok(dominance_survivors(candidates, costs)?
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect())
}

/// Indices of the candidates kept by [`prune_dominated`].
pub fn dominance_survivors(candidates: &[ClusterCandidate], costs: &[f64]) -> Result<Vec<usize>> {
    if candidates.len() != costs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} candidates but {} costs",
            candidates.len(),
            costs.len()
        )));
    }
    let mut best: HashMap<&[usize], usize> = HashMap::new();
    for (i, c) in candidates.iter().enumerate() {
        best.entry(c.members())
            .and_modify(|kept| {
                let k = &candidates[*kept];
                let better = costs[i] < costs[*kept] || (costs[i] == costs[*kept] && c.head < k.head);
                if better {
                    *kept = i;
                }
            })
            .or_insert(i);
    }
    let mut kept: Vec<usize> = best.into_values().collect();
    kept.sort_unstable();
    Ok(kept)
}

/// A symmetric, doubly stochastic `n x n` averaging matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(DMatrix<f64>);

impl WeightMatrix {
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub(crate) fn from_matrix(m: DMatrix<f64>) -> Self {
        Self(m)
    }
}

/// Members are mixed to their mean (`1/size` weights), everyone else keeps
/// their value.
pub fn build_weight_matrix(candidate: &ClusterCandidate, n: usize) -> WeightMatrix {
    let mut w = DMatrix::identity(n, n);
    let weight = 1.0 / candidate.size() as f64;
    for &j in candidate.members() {
        for &k in candidate.members() {
            w[(j, k)] = weight;
        }
    }
    WeightMatrix(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{candidate_cost_l1, EnergyParams};

    fn line3() -> Topology {
        Topology::from_positions(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap()
    }

    #[test]
    fn full_range_count_matches_head_times_size() {
        let t = Topology::generate(3, 10.0, 3).unwrap();
        assert_eq!(enumerate_candidates(&t, 2, 3).unwrap().len(), 6);

        let t = Topology::generate(2, 10.0, 3).unwrap();
        let c = enumerate_candidates(&t, 2, 2).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].head(), c[0].members()), (0, &[0, 1][..]));
        assert_eq!((c[1].head(), c[1].members()), (1, &[0, 1][..]));

        let t = Topology::generate(12, 50.0, 5).unwrap();
        assert_eq!(enumerate_candidates(&t, 2, 12).unwrap().len(), 11 * 12);
        assert_eq!(enumerate_candidates(&t, 3, 5).unwrap().len(), 3 * 12);
    }

    #[test]
    fn nearest_neighbour_ties_go_to_lower_index() {
        let t = line3();
        let c = enumerate_candidates(&t, 2, 2).unwrap();
        let mid = c.iter().find(|c| c.head() == 1).unwrap();
        // exhaustive check: both neighbours are at distance 1, pick the lowest index
        let mut ranked: Vec<usize> = vec![0, 2];
        ranked.sort_by(|&a, &b| t.dist_sq(1, a).total_cmp(&t.dist_sq(1, b)).then(a.cmp(&b)));
        assert_eq!(mid.members(), &[ranked[0], 1][..]);
        assert_eq!(mid.members(), &[0, 1][..]);
    }

    #[test]
    fn rejects_bad_size_ranges() {
        let t = line3();
        assert!(matches!(enumerate_candidates(&t, 1, 2), Err(Error::InvalidConfig(_))));
        assert!(matches!(enumerate_candidates(&t, 2, 4), Err(Error::InvalidConfig(_))));
        assert!(matches!(enumerate_candidates(&t, 3, 2), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn candidate_validation() {
        assert!(ClusterCandidate::new(0, vec![0], 3).is_err());
        assert!(ClusterCandidate::new(0, vec![0, 0], 3).is_err());
        assert!(ClusterCandidate::new(2, vec![0, 1], 3).is_err());
        assert!(ClusterCandidate::new(0, vec![0, 3], 3).is_err());
        let c = ClusterCandidate::new(1, vec![2, 1, 0], 3).unwrap();
        assert_eq!(c.members(), &[0, 1, 2][..]);
    }

    #[test]
    fn weight_matrix_examples() {
        let w = build_weight_matrix(&ClusterCandidate::new(0, vec![0, 1], 3).unwrap(), 3);
        let expected = DMatrix::from_row_slice(3, 3, &[0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(w.as_matrix(), &expected);

        let w = build_weight_matrix(&ClusterCandidate::new(0, vec![0, 1, 2], 3).unwrap(), 3);
        assert!(w.as_matrix().iter().all(|&x| x == 1.0 / 3.0));
    }

    #[test]
    fn weight_matrices_are_averaging_projectors() {
        let t = Topology::generate(9, 50.0, 11).unwrap();
        for c in enumerate_candidates(&t, 2, 9).unwrap() {
            let w = build_weight_matrix(&c, 9).into_matrix();
            let ones = DMatrix::from_element(9, 1, 1.0);
            assert!((&w * &ones - &ones).abs().max() <= 1e-12);
            assert!((&w * &w - &w).abs().max() <= 1e-12);
            assert!((&w - w.transpose()).abs().max() == 0.0);
            assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn pruning_keeps_central_head() {
        let t = line3();
        let params = EnergyParams::default();
        let all = enumerate_candidates(&t, 3, 3).unwrap();
        let costs: Vec<f64> = all.iter().map(|c| candidate_cost_l1(c, &t, &params)).collect();
        let kept = prune_dominated(&all, &costs).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].head(), 1);
    }

    #[test]
    fn pruning_never_merges_distinct_member_sets() {
        let a = ClusterCandidate::new(0, vec![0, 1], 3).unwrap();
        let b = ClusterCandidate::new(1, vec![1, 2], 3).unwrap();
        let kept = prune_dominated(&[a.clone(), b.clone()], &[5.0, 1.0]).unwrap();
        assert_eq!(kept, vec![a, b]);
    }

    #[test]
    fn pruning_tie_goes_to_lower_head() {
        // symmetric pair: both heads cost the same
        let t = Topology::from_positions(vec![[0.0, 0.0], [4.0, 0.0]]).unwrap();
        let params = EnergyParams::default();
        let all = enumerate_candidates(&t, 2, 2).unwrap();
        let costs: Vec<f64> = all.iter().map(|c| candidate_cost_l1(c, &t, &params)).collect();
        assert_eq!(costs[0], costs[1]);
        // exhaustive min-cost scan
        let min = costs.iter().cloned().fold(f64::INFINITY, f64::min);
        let oracle = all.iter().zip(&costs).filter(|(_, &c)| c == min).map(|(c, _)| c.head()).min();
        let kept = prune_dominated(&all, &costs).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(Some(kept[0].head()), oracle);
        assert_eq!(kept[0].head(), 0);
    }

    #[test]
    fn pruning_preserves_distinct_matrices_and_dominance() {
        let t = Topology::generate(10, 50.0, 21).unwrap();
        let params = EnergyParams::default();
        let all = enumerate_candidates(&t, 2, 10).unwrap();
        let costs: Vec<f64> = all.iter().map(|c| candidate_cost_l1(c, &t, &params)).collect();
        let kept_idx = dominance_survivors(&all, &costs).unwrap();
        let mut before: Vec<&[usize]> = all.iter().map(|c| c.members()).collect();
        before.sort();
        before.dedup();
        let mut after: Vec<&[usize]> = kept_idx.iter().map(|&i| all[i].members()).collect();
        after.sort();
        assert_eq!(before, after);
        for (i, c) in all.iter().enumerate() {
            if kept_idx.contains(&i) {
                continue;
            }
            let twin = kept_idx.iter().find(|&&k| all[k].members() == c.members()).unwrap();
            assert!(costs[*twin] <= costs[i]);
        }
    }
}
