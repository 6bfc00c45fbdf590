use alloc::vec;
use alloc::vec::Vec;

use super::SymmetricOperator;
use crate::math::{dot, sqrt};
use crate::{Error, Result};

/// Solves `A x = b` for symmetric positive definite `A`, stopping when
/// `‖b - A x‖ <= tol · ‖b‖`.
pub fn conjugate_gradient<A: SymmetricOperator + ?Sized>(
    a: &A,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let bnorm = sqrt(dot(b, b));
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    for _ in 0..max_iter {
        if sqrt(rr) <= tol * bnorm {
            return Ok(x);
        }
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let step = rr / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if sqrt(rr) <= tol * bnorm {
        Ok(x)
    } else {
        Err(Error::SolveFailed {
            residual: sqrt(rr) / bnorm,
        })
    }
}
