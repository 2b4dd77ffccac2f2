//! Test-only oracles, independent of the library's solver paths.

#![allow(dead_code)]

/// Eigenvalues of a symmetric matrix (row-major, `n x n`) by cyclic Jacobi
/// rotations, sorted descending.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Every point of the simplex in `dim` coordinates on a grid of `steps`
/// divisions.
pub fn simplex_grid(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, steps: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() == dim - 1 {
            prefix.push(left);
            out.push(prefix.iter().map(|&k| k as f64 / steps as f64).collect());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(dim, left - k, steps, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, steps, steps, &mut Vec::new(), &mut out);
    out
}

/// The averaging matrix of a member set, built entry by entry.
pub fn member_matrix(members: &[usize], n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            let (in_j, in_k) = (members.contains(&j), members.contains(&k));
            w[j * n + k] = if in_j && in_k {
                1.0 / members.len() as f64
            } else if !in_j && j == k {
                1.0
            } else {
                0.0
            };
        }
    }
    w
}

/// `sum_i p_i W_i` from explicitly built member matrices.
pub fn mixture(p: &[f64], members: &[Vec<usize>], n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n * n];
    for (pi, m) in p.iter().zip(members) {
        for (a, b) in w.iter_mut().zip(member_matrix(m, n)) {
            *a += pi * b;
        }
    }
    w
}

/// Second-largest eigenvalue of `sum_i p_i W_i` from the full Jacobi spectrum.
pub fn second_eigenvalue(p: &[f64], members: &[Vec<usize>], n: usize) -> f64 {
    jacobi_eigenvalues(&mixture(p, members, n), n)[1]
}
