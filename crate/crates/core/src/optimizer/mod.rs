//! Activation-probability optimization.
//!
//! Minimizes `xi(p) + alpha * sum_i p_i ||c_i||_1` over the probability
//! simplex, where `xi(p) = lambda_max(W(p) - J)` is the second-largest
//! eigenvalue of the expected averaging matrix `W(p) = sum_i p_i W_i`. The
//! objective is convex but nonsmooth, so we run a projected subgradient
//! method with diminishing steps and keep the best point seen.
//! While `xi > 1 - epsilon` the step follows the `xi` subgradient alone.

pub mod spectral;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::candidates::{ClusterCandidate, WeightMatrix};
use crate::error::{Error, Result};
pub use spectral::symmetric_top_eigenpair;
use spectral::{deflate, DEFAULT_TOL};

/// Probabilities below this are dropped from the returned distribution.
pub const SUPPORT_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerOptions {
    pub alpha: f64,
    /// Required spectral margin: feasible solutions satisfy `xi <= 1 - epsilon`.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Step at iteration `t` is `step_scale / sqrt(t)`.
    pub step_scale: f64,
    /// Divide each step by the length of the subgradient's component along
    /// the simplex. Converges noticeably better when `alpha * cost` dominates
    /// `xi`; off by default.
    pub normalize_steps: bool,
    /// Stop once the best objective improves by less than this over
    /// `stall_window` consecutive iterations.
    pub tol: f64,
    pub stall_window: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { alpha: 0.0, epsilon: 1e-2, max_iters: 5000, step_scale: 1.0, normalize_steps: false, tol: 1e-6, stall_window: 500 }
    }
}

impl OptimizerOptions {
    pub fn with_alpha(alpha: f64) -> Self {
        Self { alpha, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("alpha must be >= 0 (got {})", self.alpha)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1) (got {})", self.epsilon)));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("step_scale must be > 0 (got {})", self.step_scale)));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be >= 0 (got {})", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivationDistribution {
    pub p: Vec<f64>,
    pub xi: f64,
    pub expected_cost_l1: f64,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizeOutcome {
    Feasible(ActivationDistribution),
    /// No distribution reached `xi <= 1 - epsilon`; carries the best one found.
    Infeasible { best_xi: f64, best: ActivationDistribution },
}

impl OptimizeOutcome {
    pub fn distribution(&self) -> &ActivationDistribution {
        match self {
            OptimizeOutcome::Feasible(d) => d,
            OptimizeOutcome::Infeasible { best, .. } => best,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, OptimizeOutcome::Feasible(_))
    }
}

fn check_dims(p: &[f64], candidates: &[ClusterCandidate], n: usize) -> Result<()> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidates".into()));
    }
    if p.len() != candidates.len() {
        return Err(Error::InvalidArgument(format!(
            "probability vector has length {} but there are {} candidates",
            p.len(),
            candidates.len()
        )));
    }
    if let Some(c) = candidates.iter().find(|c| c.members().last().is_some_and(|&m| m >= n)) {
        return Err(Error::InvalidArgument(format!("candidate headed by {} exceeds {n} nodes", c.head())));
    }
    Ok(())
}

/// `W(p) = sum_i p_i W_i`.
pub fn mixing_matrix(p: &[f64], candidates: &[ClusterCandidate], n: usize) -> Result<WeightMatrix> {
    check_dims(p, candidates, n)?;
    Ok(WeightMatrix::from_matrix(mixing_dense(p, candidates, n)))
}

// Each W_i is the identity except on its member block, so only the blocks
// need touching.
fn mixing_dense(p: &[f64], candidates: &[ClusterCandidate], n: usize) -> DMatrix<f64> {
    let total: f64 = p.iter().sum();
    let mut w = DMatrix::from_diagonal_element(n, n, total);
    for (&pi, c) in p.iter().zip(candidates) {
        if pi == 0.0 {
            continue;
        }
        let share = pi / c.size() as f64;
        for &j in c.members() {
            w[(j, j)] -= pi;
            for &k in c.members() {
                w[(j, k)] += share;
            }
        }
    }
    w
}

fn top_of_deflated(p: &[f64], candidates: &[ClusterCandidate], n: usize) -> Result<(f64, nalgebra::DVector<f64>)> {
    let w = mixing_dense(p, candidates, n);
    symmetric_top_eigenpair(&deflate(&w), DEFAULT_TOL)
}

/// Second-largest eigenvalue of `W(p)`, computed as `lambda_max(W(p) - J)`
/// and clamped to `[0, 1]` against rounding.
pub fn xi(p: &[f64], candidates: &[ClusterCandidate], n: usize) -> Result<f64> {
    check_dims(p, candidates, n)?;
    let (lambda, _) = top_of_deflated(p, candidates, n)?;
    Ok(lambda.clamp(0.0, 1.0))
}

/// `g_i = v^T W_i v + alpha * costs[i]` for a unit top eigenvector `v` of
/// `W(p) - J`. This is the gradient when the top eigenvalue is simple and a
/// subgradient otherwise.
pub fn objective_subgradient(
    p: &[f64],
    candidates: &[ClusterCandidate],
    costs: &[f64],
    alpha: f64,
    n: usize,
) -> Result<Vec<f64>> {
    check_dims(p, candidates, n)?;
    if costs.len() != candidates.len() {
        return Err(Error::InvalidArgument("costs and candidates differ in length".into()));
    }
    let (_, v) = top_of_deflated(p, candidates, n)?;
    Ok(subgradient_from(v.as_slice(), candidates, costs, alpha))
}

fn subgradient_from(v: &[f64], candidates: &[ClusterCandidate], costs: &[f64], alpha: f64) -> Vec<f64> {
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    candidates
        .iter()
        .zip(costs)
        .map(|(c, &cost)| {
            // v^T W_i v = ||v||^2 - sum_{C_i} v_j^2 + (sum_{C_i} v_j)^2 / N_i
            let (s, sq) = c.members().iter().fold((0.0, 0.0), |(s, sq), &j| (s + v[j], sq + v[j] * v[j]));
            norm_sq - sq + s * s / c.size() as f64 + alpha * cost
        })
        .collect()
}

/// Euclidean projection onto `{p >= 0, sum p = 1}` (sort-and-threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - tau).max(0.0)).collect();
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= s);
    out
}

struct Eval {
    xi: f64,
    cost: f64,
    objective: f64,
}

fn evaluate(p: &[f64], candidates: &[ClusterCandidate], costs: &[f64], alpha: f64, n: usize) -> Result<(Eval, nalgebra::DVector<f64>)> {
    let (lambda, v) = top_of_deflated(p, candidates, n)?;
    let xi = lambda.clamp(0.0, 1.0);
    let cost: f64 = p.iter().zip(costs).map(|(a, b)| a * b).sum();
    let objective = xi + alpha * cost;
    if !objective.is_finite() {
        return Err(Error::Numerical(format!("objective evaluated to {objective}")));
    }
    Ok((Eval { xi, cost, objective }, v))
}

/// Runs a switching projected subgradient method from the uniform
/// distribution: while `xi(p) > 1 - epsilon` the step follows a subgradient
/// of `xi` alone (restoring feasibility), otherwise a subgradient of the full
/// objective. The best feasible point seen is returned.
///
/// Every all-node vertex (`xi = 0`) is scored as well, so the result is never
/// worse than the best one-shot strategy. Returns
/// [`OptimizeOutcome::Infeasible`], carrying the smallest `xi` seen, when no
/// visited point satisfies the margin.
pub fn optimize(
    candidates: &[ClusterCandidate],
    costs: &[f64],
    n: usize,
    options: &OptimizerOptions,
) -> Result<OptimizeOutcome> {
    options.validate()?;
    let c = candidates.len();
    let mut p = vec![1.0 / c as f64; c];
    check_dims(&p, candidates, n)?;
    if costs.len() != c {
        return Err(Error::InvalidArgument("costs and candidates differ in length".into()));
    }
    if let Some(i) = costs.iter().position(|x| !(*x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(format!("cost of candidate {i} is not a nonnegative number")));
    }
    let alpha = options.alpha;
    let xi_max = 1.0 - options.epsilon;

    let mut best: Option<(f64, Vec<f64>)> = None;
    for i in (0..c).filter(|&i| candidates[i].size() == n) {
        let obj = alpha * costs[i];
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, (0..c).map(|k| if k == i { 1.0 } else { 0.0 }).collect()));
        }
    }
    let mut least_xi = (f64::INFINITY, p.clone());

    let mut anchor = (f64::INFINITY, f64::INFINITY);
    let mut anchor_iter = 0;
    let mut iterations = 0;
    for t in 1..=options.max_iters {
        iterations = t;
        let (eval, v) = evaluate(&p, candidates, costs, alpha, n)?;
        let feasible = eval.xi <= xi_max;
        if feasible && best.as_ref().is_none_or(|(b, _)| eval.objective < *b) {
            best = Some((eval.objective, p.clone()));
        }
        if eval.xi < least_xi.0 {
            least_xi = (eval.xi, p.clone());
        }

        let best_obj = best.as_ref().map_or(f64::INFINITY, |(b, _)| *b);
        if best_obj < anchor.0 - options.tol || (best.is_none() && least_xi.0 < anchor.1 - options.tol) {
            anchor = (best_obj, least_xi.0);
            anchor_iter = t;
        } else if t - anchor_iter >= options.stall_window {
            break;
        }

        let weight = if feasible { alpha } else { 0.0 };
        let g = subgradient_from(v.as_slice(), candidates, costs, weight);
        let mut step = options.step_scale / (t as f64).sqrt();
        if options.normalize_steps {
            // only the component of g along the simplex moves p
            let mean = g.iter().sum::<f64>() / c as f64;
            let norm = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            step /= norm;
        }
        let moved: Vec<f64> = p.iter().zip(&g).map(|(pi, gi)| pi - step * gi).collect();
        p = project_simplex(&moved);
    }

    let finish = |point: Vec<f64>| -> Result<ActivationDistribution> {
        let (eval, _) = evaluate(&point, candidates, costs, alpha, n)?;
        Ok(ActivationDistribution {
            p: point,
            xi: eval.xi,
            expected_cost_l1: eval.cost,
            objective: eval.objective,
            iterations,
        })
    };

    match best {
        Some((_, point)) => {
            let sparse = finish(sparsify(&point))?;
            // Dropping tiny weights can nudge a boundary point past the
            // margin; keep the dense point in that case.
            if sparse.xi <= xi_max {
                Ok(OptimizeOutcome::Feasible(sparse))
            } else {
                Ok(OptimizeOutcome::Feasible(finish(point)?))
            }
        }
        None => {
            let dist = finish(sparsify(&least_xi.1))?;
            Ok(OptimizeOutcome::Infeasible { best_xi: dist.xi.min(least_xi.0), best: dist })
        }
    }
}

fn sparsify(p: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = p.iter().map(|&x| if x < SUPPORT_CUTOFF { 0.0 } else { x }).collect();
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= s);
    out
}
