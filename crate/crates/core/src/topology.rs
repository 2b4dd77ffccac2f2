//! Node placement and pairwise squared distances.

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A placed sensor field. The squared-distance matrix is computed once at
/// construction and never changes afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    positions: Vec<[f64; 2]>,
    d_sq: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    positions: Vec<[f64; 2]>,
}

impl Topology {
    /// Places `n` nodes i.i.d. uniformly on `[0, side]^2`.
    pub fn generate(n: usize, side: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("a topology needs at least 2 nodes (got {n})")));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidConfig(format!("field side must be positive and finite (got {side})")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = (0..n)
            .map(|_| [rng.random_range(0.0..=side), rng.random_range(0.0..=side)])
            .collect();
        Self::from_positions(positions)
    }

    pub fn from_positions(positions: Vec<[f64; 2]>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "a topology needs at least 2 nodes (got {})",
                positions.len()
            )));
        }
        if let Some(i) = positions.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::InvalidConfig(format!("position of node {i} is not finite")));
        }
        let d_sq = squared_distance_matrix(&positions);
        Ok(Self { positions, d_sq })
    }

    /// Parses `{"positions": [[x, y], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TopologyFile = serde_json::from_str(text)?;
        Self::from_positions(file.positions)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TopologyFile { positions: self.positions.clone() })
            .expect("positions are finite")
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn d_sq(&self) -> &DMatrix<f64> {
        &self.d_sq
    }

    #[inline]
    pub fn dist_sq(&self, i: usize, j: usize) -> f64 {
        self.d_sq[(i, j)]
    }
}

/// Pairwise squared Euclidean distances. Each unordered pair is evaluated
/// once, so the result is exactly symmetric with an exact zero diagonal.
pub fn squared_distance_matrix(positions: &[[f64; 2]]) -> DMatrix<f64> {
    let n = positions.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = positions[i][0] - positions[j][0];
            let dy = positions[i][1] - positions[j][1];
            let v = dx * dx + dy * dy;
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}
