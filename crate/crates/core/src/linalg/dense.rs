// Dense symmetric eigensolver: Householder reduction to tridiagonal form
// followed by the implicit QL iteration (tred2/tql2 from EISPACK, via JAMA).

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{hypot, sqrt};

/// Eigendecomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    n: usize,
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Row-major `n × n`; column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    /// Decomposes the row-major symmetric matrix `a` of order `n`.
    pub fn new(n: usize, a: Vec<f64>) -> Self {
        assert_eq!(a.len(), n * n);
        if n == 0 {
            return SymmetricEigen {
                n,
                values: Vec::new(),
                vectors: Vec::new(),
            };
        }
        let mut v = a;
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        tred2(n, &mut v, &mut d, &mut e);
        tql2(n, n, &mut v, &mut d, &mut e);
        let mut eig = SymmetricEigen {
            n,
            values: d,
            vectors: v,
        };
        eig.sort_descending();
        eig
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }

    fn sort_descending(&mut self) {
        let n = self.n;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        let values = idx.iter().map(|&k| self.values[k]).collect();
        let mut vectors = vec![0.0; n * n];
        for i in 0..n {
            let row = &self.vectors[i * n..(i + 1) * n];
            for (new, &old) in idx.iter().enumerate() {
                vectors[i * n + new] = row[old];
            }
        }
        self.values = values;
        self.vectors = vectors;
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[j]` couples `j` and `j + 1`), in ascending
/// order, together with the requested rows of the eigenvector matrix.
///
/// `rows` selects which components of every eigenvector to return; the
/// result is row-major `rows.len() × m`.
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64], rows: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let m = diag.len();
    assert_eq!(off.len() + 1, m.max(1));
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    for j in 0..off.len() {
        e[j + 1] = off[j];
    }
    let r = rows.len();
    let mut z = vec![0.0; r * m];
    for (ri, &row) in rows.iter().enumerate() {
        z[ri * m + row] = 1.0;
    }
    tql2(m, r, &mut z, &mut d, &mut e);
    (d, z)
}

fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`; `z` is row-major `rows × n` and
/// receives the accumulated rotations. Eigenvalues are left unsorted.
fn tql2(n: usize, rows: usize, z: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= f64::EPSILON * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..rows {
                        let row = &mut z[k * n..(k + 1) * n];
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= f64::EPSILON * tst1 || iter > 300 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}
