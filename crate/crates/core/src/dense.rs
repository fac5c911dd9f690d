//! Small dense helpers shared by the modules.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

pub(crate) fn fro(m: &DMatrix<f64>) -> f64 {
    m.norm()
}

/// Largest singular value.
pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    svd(m).sigma.iter().copied().fold(0.0, f64::max)
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// `M = U·diag(σ)·Vᵀ` with `σ` descending.
///
/// For `rows ≥ cols`, `U` is `rows×cols` and `V` is the full `cols×cols`
/// orthogonal factor. For wide input the factors of `Mᵀ` are swapped, so
/// `U` is full instead. Columns of the thin factor that belong to zero
/// singular values are zero.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub v: DMatrix<f64>,
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * x - s * y;
        m[(i, q)] = s * x + c * y;
    }
}

/// One-sided Jacobi SVD.
pub(crate) fn svd(m: &DMatrix<f64>) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.transpose());
        return Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }
    let mut g = m.clone();
    let mut v = DMatrix::identity(cols, cols);
    let eps = f64::EPSILON * rows.max(1) as f64;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dot(&g.column(q));
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                rotate_columns(&mut g, p, q, c, c * t);
                rotate_columns(&mut v, p, q, c, c * t);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols).map(|j| g.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let mut u = DMatrix::zeros(rows, cols);
    let mut v_sorted = DMatrix::zeros(cols, cols);
    let mut sigma = DVector::zeros(cols);
    for (k, &j) in order.iter().enumerate() {
        sigma[k] = norms[j];
        if norms[j] > 0.0 {
            u.set_column(k, &(g.column(j) / norms[j]));
        }
        v_sorted.set_column(k, &v.column(j));
    }
    Svd {
        u,
        sigma,
        v: v_sorted,
    }
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn hstack(parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = parts.first().map_or(0, |p| p.nrows());
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut c = 0;
    for p in parts {
        debug_assert_eq!(p.nrows(), rows);
        out.view_mut((0, c), (rows, p.ncols())).copy_from(*p);
        c += p.ncols();
    }
    out
}

pub(crate) fn vstack(parts: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let cols = parts.first().map_or(0, |p| p.ncols());
    let rows = parts.iter().map(|p| p.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for p in parts {
        debug_assert_eq!(p.ncols(), cols);
        out.view_mut((r, 0), (p.nrows(), cols)).copy_from(*p);
        r += p.nrows();
    }
    out
}

/// Builds a matrix from a square grid of blocks; `None` entries are zero.
pub(crate) fn block_matrix(sizes: &[usize], blocks: &[&[Option<&DMatrix<f64>>]]) -> DMatrix<f64> {
    let total = sizes.iter().sum();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let mut out = DMatrix::zeros(total, total);
    for (i, row) in blocks.iter().enumerate() {
        for (j, blk) in row.iter().enumerate() {
            if let Some(b) = blk {
                debug_assert_eq!((b.nrows(), b.ncols()), (sizes[i], sizes[j]));
                out.view_mut((offsets[i], offsets[j]), (sizes[i], sizes[j]))
                    .copy_from(*b);
            }
        }
    }
    out
}

pub(crate) fn concat(parts: &[&DVector<f64>]) -> DVector<f64> {
    let len = parts.iter().map(|p| p.len()).sum();
    let mut out = DVector::zeros(len);
    let mut r = 0;
    for p in parts {
        out.rows_mut(r, p.len()).copy_from(*p);
        r += p.len();
    }
    out
}

/// Unit vector in the direction of `v`, with the sign fixed so that the
/// entry of largest magnitude is positive.
pub(crate) fn normalized(v: &DVector<f64>) -> DVector<f64> {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    let mut out = v / norm;
    if let Some((_, &pivot)) = out
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
    {
        if pivot < 0.0 {
            out.neg_mut();
        }
    }
    out
}

/// Solves `M X = rhs` by partial-pivoting LU.
pub(crate) fn solve_lu(m: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    m.clone().lu().solve(rhs)
}

/// Minimum-norm least-squares solution of `M x = rhs`.
pub(crate) fn lstsq(m: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    if m.ncols() == 0 {
        return DVector::zeros(0);
    }
    let f = svd(m);
    let cutoff = f.sigma.iter().copied().fold(0.0, f64::max) * 1e-13;
    let mut x = DVector::zeros(m.ncols());
    for (k, &s) in f.sigma.iter().enumerate() {
        if s > cutoff {
            let coeff = f.u.column(k).dot(rhs) / s;
            x += f.v.column(k) * coeff;
        }
    }
    x
}

pub(crate) fn is_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|x| x.is_finite())
}
