//! Lanczos with full reorthogonalisation for the algebraically largest
//! eigenpairs of a symmetric operator.
//!
//! The Krylov basis is kept in memory and grown until every requested Ritz
//! pair has residual estimate `β_m |s_{m,i}|` below the tolerance, the
//! matrix-vector budget is spent, or the basis spans the whole space. On
//! breakdown (an invariant subspace) a fresh random direction orthogonal to
//! the basis is injected, which also lets repeated eigenvalues surface.

use alloc::vec;
use alloc::vec::Vec;

use super::dense::tridiagonal_eigen;
use super::SymmetricOperator;
use crate::math::{dot, norm};
use crate::rng::{splitmix64, unit_f64};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct LanczosConfig {
    /// Residual tolerance `‖A y - θ y‖` for every returned pair.
    pub tol: f64,
    pub max_matvec: usize,
    /// Seed of the deterministic start vector.
    pub seed: u64,
    /// Convergence is tested every `check_every` steps.
    pub check_every: usize,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            tol: 1e-10,
            max_matvec: 10_000,
            seed: 0x5eed,
            check_every: 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    /// Descending.
    pub values: Vec<f64>,
    /// Unit-norm, mutually orthogonal.
    pub vectors: Vec<Vec<f64>>,
    /// Explicit residual norms `‖A y - θ y‖`.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

fn random_unit(n: usize, state: &mut u64, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            *state = splitmix64(*state);
            unit_f64(*state) - 0.5
        })
        .collect();
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
    let nv = norm(&v);
    if nv < 1e-10 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    Some(v)
}

pub fn largest_eigenpairs<A: SymmetricOperator + ?Sized>(
    op: &A,
    k: usize,
    cfg: &LanczosConfig,
) -> Result<Eigenpairs> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::DimensionTooLarge { d: k, n });
    }
    let mut state = cfg.seed;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = random_unit(n, &mut state, &basis).expect("n >= 1");
    let mut w = vec![0.0; n];
    let mut matvecs = 0;
    let mut scale = 0.0f64;

    loop {
        op.apply(&q, &mut w);
        matvecs += 1;
        let a = dot(&q, &w);
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= a * qi;
        }
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= b * pi;
            }
        }
        basis.push(core::mem::take(&mut q));
        alpha.push(a);
        // two passes of classical Gram-Schmidt keep the basis orthogonal to
        // working precision
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let mut b = norm(&w);
        scale = scale.max(a.abs() + b);
        let m = basis.len();

        let mut next = None;
        let mut exhausted = m == n;
        if !exhausted {
            if b > 1e-12 * scale.max(1.0) {
                next = Some(w.iter().map(|x| x / b).collect::<Vec<f64>>());
            } else {
                b = 0.0;
                match random_unit(n, &mut state, &basis) {
                    Some(v) => next = Some(v),
                    None => exhausted = true,
                }
            }
        }
        if exhausted {
            b = 0.0;
        }

        let budget_spent = matvecs >= cfg.max_matvec;
        let check = m >= k && (m.is_multiple_of(cfg.check_every) || exhausted || budget_spent);
        if check {
            let (vals, last) = tridiagonal_eigen(&alpha, &beta_with_pad(&beta, m), &[m - 1]);
            let order = descending_order(&vals);
            let worst = order[..k]
                .iter()
                .map(|&i| (b * last[i]).abs())
                .fold(0.0f64, f64::max);
            if worst <= 0.1 * cfg.tol || exhausted {
                return Ok(finish(op, &basis, &alpha, &beta, k, matvecs));
            }
            if budget_spent {
                let best = finish(op, &basis, &alpha, &beta, k, matvecs);
                let residual = best.residuals.iter().copied().fold(0.0f64, f64::max);
                if residual <= cfg.tol {
                    return Ok(best);
                }
                return Err(Error::NotConverged {
                    iterations: matvecs,
                    residual,
                });
            }
        } else if budget_spent {
            return Err(Error::NotConverged {
                iterations: matvecs,
                residual: f64::INFINITY,
            });
        }
        beta.push(b);
        q = next.expect("basis not exhausted");
    }
}

fn beta_with_pad(beta: &[f64], m: usize) -> Vec<f64> {
    beta[..m - 1].to_vec()
}

fn descending_order(vals: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    idx
}

fn finish<A: SymmetricOperator + ?Sized>(
    op: &A,
    basis: &[Vec<f64>],
    alpha: &[f64],
    beta: &[f64],
    k: usize,
    matvecs: usize,
) -> Eigenpairs {
    let m = basis.len();
    let n = op.dim();
    let rows: Vec<usize> = (0..m).collect();
    let (vals, s) = tridiagonal_eigen(alpha, &beta_with_pad(beta, m), &rows);
    let order = descending_order(&vals);
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut ay = vec![0.0; n];
    for &i in &order[..k] {
        let mut y = vec![0.0; n];
        for (j, qj) in basis.iter().enumerate() {
            let c = s[j * m + i];
            for (yi, qi) in y.iter_mut().zip(qj) {
                *yi += c * qi;
            }
        }
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        op.apply(&y, &mut ay);
        let theta = dot(&y, &ay);
        let r: f64 = ay
            .iter()
            .zip(&y)
            .map(|(a, yi)| (a - theta * yi) * (a - theta * yi))
            .sum();
        values.push(theta);
        vectors.push(y);
        residuals.push(libm::sqrt(r));
    }
    Eigenpairs {
        values,
        vectors,
        residuals,
        matvecs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ScaledAdjacency, SymmetricEigen};
    use crate::Graph;

    #[test]
    fn matches_dense_on_cycle_with_chord() {
        let n = 40u32;
        let mut e: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        e.extend([(0, 20), (5, 17), (3, 31)]);
        let g = Graph::from_edges(n as usize, e).unwrap();
        let op = ScaledAdjacency::unscaled(&g);
        let dense = SymmetricEigen::new(n as usize, op.to_dense());
        let cfg = LanczosConfig {
            tol: 1e-10,
            max_matvec: 400,
            ..Default::default()
        };
        let got = largest_eigenpairs(&op, 4, &cfg).unwrap();
        for i in 0..4 {
            assert!((got.values[i] - dense.values[i]).abs() < 1e-9, "{i}");
            assert!(got.residuals[i] < 1e-9);
        }
    }

    #[test]
    fn finds_repeated_eigenvalue_of_complete_graph() {
        // K_6 spectrum: 5, then -1 with multiplicity 5
        let mut e = Vec::new();
        for u in 0..6u32 {
            for v in u + 1..6 {
                e.push((u, v));
            }
        }
        let g = Graph::from_edges(6, e).unwrap();
        let op = ScaledAdjacency::unscaled(&g);
        let got = largest_eigenpairs(&op, 3, &LanczosConfig::default()).unwrap();
        assert!((got.values[0] - 5.0).abs() < 1e-10);
        assert!((got.values[1] + 1.0).abs() < 1e-10);
        assert!((got.values[2] + 1.0).abs() < 1e-10);
    }
}
