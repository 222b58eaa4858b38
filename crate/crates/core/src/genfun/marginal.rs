//! Weighted marginals of `χ_{n,0}`: integrating `j` coordinates against the
//! normalized first-kind weight `1/(π√(1-x²))` leaves the constant 1, since
//! only the `T_0` term survives.

use serde::Serialize;

use super::{chi_angle_eval, GenSpec};
use crate::chebyshev::gauss_chebyshev_nodes;
use crate::error::{Error, Result};
use crate::par::Exec;

/// Gauss–Chebyshev nodes per integrated axis. The rule aliases only `T_k`
/// with `k` a multiple of `2M`, so at `|ρ| = 0.9` the error is about
/// `0.9^(2M)`; `M = 128` puts it near `2e-12`.
pub const MARGINAL_NODES: usize = 128;
pub const MARGINAL_RHOS: [f64; 4] = [-0.9, -0.5, 0.5, 0.9];
pub const MARGINAL_FREE_GRID: [f64; 5] = [-0.9, -0.4, 0.0, 0.4, 0.9];

#[derive(Clone, Debug, Serialize)]
pub struct MarginalReport {
    pub n: usize,
    pub j: usize,
    pub nodes: usize,
    pub expected: f64,
    pub max_deviation: f64,
    pub points: usize,
}

pub fn marginal_check(n: usize, j: usize) -> Result<MarginalReport> {
    marginal_check_with(n, j, MARGINAL_NODES, Exec::default())
}

pub fn marginal_check_with(n: usize, j: usize, nodes: usize, exec: Exec) -> Result<MarginalReport> {
    if n == 0 || n > 3 {
        return Err(Error::Scale(format!("marginals are checked for 1 <= n <= 3, got {n}")));
    }
    if j == 0 || j > n {
        return Err(Error::Domain(format!("j must lie in 1..={n}, got {j}")));
    }
    let spec = GenSpec::unshifted(n, 0)?;
    let thetas: Vec<f64> = gauss_chebyshev_nodes(nodes).iter().map(|x| x.acos()).collect();
    let free = n - j;
    let free_pts = MARGINAL_FREE_GRID.len().pow(free as u32);
    let mut cases = Vec::new();
    for &rho in &MARGINAL_RHOS {
        for f in 0..free_pts {
            cases.push((rho, f));
        }
    }
    let devs: Vec<Result<f64>> = exec.map(&cases, |&(rho, f)| {
        let mut alphas = vec![0.0; n];
        let mut rest = f;
        for slot in alphas.iter_mut().skip(j) {
            *slot = MARGINAL_FREE_GRID[rest % MARGINAL_FREE_GRID.len()].acos();
            rest /= MARGINAL_FREE_GRID.len();
        }
        let total = nodes.pow(j as u32);
        let mut sum = 0.0;
        for q in 0..total {
            let mut idx = q;
            for slot in alphas.iter_mut().take(j) {
                *slot = thetas[idx % nodes];
                idx /= nodes;
            }
            sum += chi_angle_eval(&spec, &alphas, rho)?;
        }
        Ok((sum / total as f64 - 1.0).abs())
    });
    let mut max_deviation: f64 = 0.0;
    for d in devs {
        max_deviation = max_deviation.max(d?);
    }
    Ok(MarginalReport {
        n,
        j,
        nodes,
        expected: 1.0,
        max_deviation,
        points: cases.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_marginal() {
        let r = marginal_check(1, 1).unwrap();
        assert!(r.max_deviation < 1e-9, "{r:?}");
    }

    #[test]
    fn coarse_rule_shows_aliasing() {
        // 0.9^128 ≈ 1.4e-6: a 64-node rule cannot reach 1e-9 at |ρ| = 0.9.
        let r = marginal_check_with(1, 1, 64, Exec::Sequential).unwrap();
        assert!(r.max_deviation > 1e-7);
    }
}
