//! Transmit-energy cost model.
//!
//! Sending a `k`-bit message over squared distance `d^2` costs
//! `k*E_elec + eps_amp*k*d^2 + k*E_elec`. With the default parameters
//! (`E_elec = 0`, `eps_amp = 1`, `k = 1`) the cost is just `d^2`, i.e. only the
//! amplifier term is counted. Reception is not charged.
//!
//! An activated cluster pays twice: every non-head member transmits its
//! (channel-inverted) reading to the head, then the head broadcasts the mean
//! far enough to reach its most distant member.

use serde::{Deserialize, Serialize};

use crate::candidates::ClusterCandidate;
use crate::error::{Error, Result};
use crate::topology::Topology;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Amplifier energy per bit per unit squared distance.
    pub eps_amp: f64,
    /// Circuitry energy per bit, charged on both the tx and rx side.
    pub e_elec: f64,
    /// Message length in bits.
    pub k_bits: u32,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self { eps_amp: 1.0, e_elec: 0.0, k_bits: 1 }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_amp >= 0.0 && self.eps_amp.is_finite()) {
            return Err(Error::InvalidConfig(format!("eps_amp must be >= 0 (got {})", self.eps_amp)));
        }
        if !(self.e_elec >= 0.0 && self.e_elec.is_finite()) {
            return Err(Error::InvalidConfig(format!("e_elec must be >= 0 (got {})", self.e_elec)));
        }
        Ok(())
    }
}

/// Per-node energy for one activation of a cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn l1(&self) -> f64 {
        // entries are nonnegative
        self.0.iter().sum()
    }

    fn add_scaled(&mut self, other: &CostVector, scale: f64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += scale * b;
        }
    }
}

impl std::ops::Add for CostVector {
    type Output = CostVector;

    fn add(mut self, rhs: CostVector) -> CostVector {
        self.add_scaled(&rhs, 1.0);
        self
    }
}

pub fn transmission_energy(params: &EnergyParams, d_sq: f64) -> Result<f64> {
    if !(d_sq >= 0.0) {
        return Err(Error::InvalidArgument(format!("squared distance must be >= 0 (got {d_sq})")));
    }
    params.validate().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let k = params.k_bits as f64;
    Ok(k * params.e_elec + params.eps_amp * k * d_sq + k * params.e_elec)
}

// Distances come from a validated topology, so they are always >= 0.
fn tx(params: &EnergyParams, d_sq: f64) -> f64 {
    let k = params.k_bits as f64;
    2.0 * k * params.e_elec + params.eps_amp * k * d_sq
}

/// Step-one cost: every non-head member transmits to the head.
pub fn cost_fc(candidate: &ClusterCandidate, topology: &Topology, params: &EnergyParams) -> CostVector {
    let head = candidate.head();
    let mut c = CostVector::zeros(topology.n());
    for &m in candidate.members() {
        if m != head {
            c.0[m] = tx(params, topology.dist_sq(head, m));
        }
    }
    c
}

/// Step-two cost: the head broadcasts to its farthest member.
pub fn cost_bc(candidate: &ClusterCandidate, topology: &Topology, params: &EnergyParams) -> CostVector {
    let head = candidate.head();
    let reach = candidate
        .members()
        .iter()
        .map(|&m| topology.dist_sq(head, m))
        .fold(0.0, f64::max);
    let mut c = CostVector::zeros(topology.n());
    if reach > 0.0 {
        c.0[head] = tx(params, reach);
    }
    c
}

pub fn candidate_cost(candidate: &ClusterCandidate, topology: &Topology, params: &EnergyParams) -> CostVector {
    cost_fc(candidate, topology, params) + cost_bc(candidate, topology, params)
}

/// Total energy of one activation, `||c_fc + c_bc||_1`.
pub fn candidate_cost_l1(candidate: &ClusterCandidate, topology: &Topology, params: &EnergyParams) -> f64 {
    candidate_cost(candidate, topology, params).l1()
}

/// Expected per-node energy per slot when cluster `i` fires with probability `p[i]`.
pub fn expected_cost(
    p: &[f64],
    candidates: &[ClusterCandidate],
    topology: &Topology,
    params: &EnergyParams,
) -> Result<CostVector> {
    if p.len() != candidates.len() {
        return Err(Error::InvalidArgument(format!(
            "probability vector has length {} but there are {} candidates",
            p.len(),
            candidates.len()
        )));
    }
    let mut total = CostVector::zeros(topology.n());
    for (&pi, c) in p.iter().zip(candidates) {
        if pi != 0.0 {
            total.add_scaled(&candidate_cost(c, topology, params), pi);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tri() -> Topology {
        Topology::from_positions(vec![[0.0, 0.0], [3.0, 4.0], [10.0, 0.0]]).unwrap()
    }

    fn cand(head: usize, members: &[usize], n: usize) -> ClusterCandidate {
        ClusterCandidate::new(head, members.to_vec(), n).unwrap()
    }

    #[test]
    fn transmission_energy_examples() {
        let d = EnergyParams::default();
        assert_eq!(transmission_energy(&d, 25.0).unwrap(), 25.0);
        assert_eq!(transmission_energy(&d, 0.0).unwrap(), 0.0);
        let p = EnergyParams { eps_amp: 1.0, e_elec: 2.0, k_bits: 3 };
        assert_eq!(transmission_energy(&p, 25.0).unwrap(), 87.0);
        assert!(matches!(transmission_energy(&d, -1.0), Err(Error::InvalidArgument(_))));
        let bad = EnergyParams { eps_amp: -1.0, ..d };
        assert!(transmission_energy(&bad, 1.0).is_err());
    }

    #[test]
    fn cost_vectors_on_reference_triangle() {
        let t = tri();
        let d = EnergyParams::default();
        assert_eq!(cost_fc(&cand(0, &[0, 1], 3), &t, &d).as_slice(), &[0.0, 25.0, 0.0]);
        assert_eq!(cost_fc(&cand(0, &[0, 2], 3), &t, &d).as_slice(), &[0.0, 0.0, t.dist_sq(0, 2)]);
        assert_eq!(cost_fc(&cand(0, &[0, 2], 3), &t, &d).as_slice(), &[0.0, 0.0, 100.0]);
        assert_eq!(cost_bc(&cand(0, &[0, 1], 3), &t, &d).as_slice(), &[25.0, 0.0, 0.0]);
        assert_eq!(cost_bc(&cand(0, &[0, 1, 2], 3), &t, &d).as_slice(), &[100.0, 0.0, 0.0]);
        assert_eq!(candidate_cost_l1(&cand(0, &[0, 1], 3), &t, &d), 50.0);
        let full = cand(0, &[0, 1, 2], 3);
        let fc = cost_fc(&full, &t, &d);
        let bc = cost_bc(&full, &t, &d);
        let componentwise: f64 = fc.as_slice().iter().zip(bc.as_slice()).map(|(a, b)| a + b).sum();
        assert_eq!(componentwise, 225.0);
        assert_eq!(candidate_cost_l1(&full, &t, &d), 225.0);
    }

    #[test]
    fn coincident_nodes_cost_nothing() {
        let t = Topology::from_positions(vec![[2.0, 2.0]; 4]).unwrap();
        let c = cand(1, &[0, 1, 2, 3], 4);
        let d = EnergyParams::default();
        assert_eq!(cost_fc(&c, &t, &d).l1(), 0.0);
        assert_eq!(cost_bc(&c, &t, &d).l1(), 0.0);
        assert_eq!(candidate_cost_l1(&c, &t, &d), 0.0);
    }

    #[test]
    fn expected_cost_mixtures() {
        let t = tri();
        let d = EnergyParams::default();
        let cs = vec![cand(0, &[0, 1], 3), cand(1, &[1, 2], 3), cand(0, &[0, 1, 2], 3)];
        let vertex = expected_cost(&[0.0, 1.0, 0.0], &cs, &t, &d).unwrap();
        assert_eq!(vertex, candidate_cost(&cs[1], &t, &d));

        let half = expected_cost(&[0.5, 0.5], &cs[..2], &t, &d).unwrap();
        let a = candidate_cost(&cs[0], &t, &d);
        let b = candidate_cost(&cs[1], &t, &d);
        for i in 0..3 {
            assert_eq!(half.as_slice()[i], 0.5 * (a.as_slice()[i] + b.as_slice()[i]));
        }

        let p = [0.2, 0.3, 0.5];
        let via_vector = expected_cost(&p, &cs, &t, &d).unwrap().l1();
        let via_dot: f64 = p.iter().zip(&cs).map(|(pi, c)| pi * candidate_cost_l1(c, &t, &d)).sum();
        assert!((via_vector - via_dot).abs() <= 1e-12 * via_dot);

        assert!(matches!(expected_cost(&[1.0], &cs, &t, &d), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn elec_term_applies_to_transmitters_only() {
        let t = tri();
        let p = EnergyParams { eps_amp: 1.0, e_elec: 2.0, k_bits: 3 };
        let fc = cost_fc(&cand(0, &[0, 1], 3), &t, &p);
        assert_eq!(fc.as_slice(), &[0.0, 87.0, 0.0]);
        assert_eq!(cost_bc(&cand(0, &[0, 1], 3), &t, &p).as_slice(), &[87.0, 0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn cost_structure(seed in 0u64..500, n in 3usize..12, size in 2usize..12, head_pick in 0usize..100) {
            let size = size.min(n);
            let t = Topology::generate(n, 50.0, seed).unwrap();
            let d = EnergyParams::default();
            let cands = crate::candidates::enumerate_candidates(&t, 2, n).unwrap();
            let head = head_pick % n;
            let mine: Vec<&ClusterCandidate> = cands.iter().filter(|c| c.head() == head).collect();
            // enlarging a cluster around the same head never gets cheaper
            let mut last = 0.0;
            for c in &mine {
                let l1 = candidate_cost_l1(c, &t, &d);
                prop_assert!(l1 >= last);
                last = l1;
            }
            let c = mine[size - 2];
            let bc = cost_bc(c, &t, &d);
            prop_assert!(bc.as_slice().iter().enumerate().all(|(i, &v)| v >= 0.0 && (i == head || v == 0.0)));
            let fc = cost_fc(c, &t, &d);
            prop_assert!(fc.as_slice().iter().enumerate().all(|(i, &v)| v >= 0.0 && (c.contains(i) || v == 0.0)));
        }

        #[test]
        fn expected_cost_is_linear(seed in 0u64..200, lambda in 0.0f64..=1.0, raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 6)) {
            let t = Topology::generate(6, 50.0, seed).unwrap();
            let d = EnergyParams::default();
            let cands = crate::candidates::enumerate_candidates(&t, 2, 2).unwrap();
            let norm = |v: Vec<f64>| { let s: f64 = v.iter().sum::<f64>() + 1e-12; v.into_iter().map(|x| (x + 1e-12 / 6.0) / s).collect::<Vec<_>>() };
            let p = norm(raw.iter().map(|r| r.0).collect());
            let q = norm(raw.iter().map(|r| r.1).collect());
            let mix: Vec<f64> = p.iter().zip(&q).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
            let cp = expected_cost(&p, &cands, &t, &d).unwrap().l1();
            let cq = expected_cost(&q, &cands, &t, &d).unwrap().l1();
            let cm = expected_cost(&mix, &cands, &t, &d).unwrap().l1();
            prop_assert!((cm - (lambda * cp + (1.0 - lambda) * cq)).abs() <= 1e-12 * cm.max(1.0) * 10.0);
        }
    }
}
