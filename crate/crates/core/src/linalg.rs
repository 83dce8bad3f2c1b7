//! Thin SVD-based solvers used by the span-program witness computations.
//!
//! Everything here tolerates rank deficiency, so all inversions go through
//! the singular value decomposition with a fixed relative cutoff: singular
//! values below `SV_CUTOFF` times the largest are treated as exact zeros.
//!
//! The factorization itself is a cyclic one-sided Jacobi, not nalgebra's
//! bidiagonal SVD: the latter misconverges on some of the structured 0/1
//! matrices produced here (duplicate columns with clustered singular
//! values), silently returning factors with backward error around 1e-1.
//! Jacobi spends a constant factor more flops and is dependable; every
//! matrix in this crate is small enough not to care.

use nalgebra::{DMatrix, DVector};

pub const SV_CUTOFF: f64 = 1e-10;

/// `a = u * diag(sigma) * v^T` with `sigma` sorted descending. Columns of
/// `u` with `sigma == 0` are zero vectors, not arbitrary basis fill.
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn thin_svd(a: &DMatrix<f64>) -> ThinSvd {
    if a.nrows() >= a.ncols() {
        jacobi(a.clone())
    } else {
        let t = jacobi(a.transpose());
        ThinSvd { u: t.v, sigma: t.sigma, v: t.u }
    }
}

/// One-sided Jacobi on a tall matrix: rotate column pairs until mutually
/// orthogonal, then read off `sigma` as column norms.
fn jacobi(mut w: DMatrix<f64>) -> ThinSvd {
    let (m, c) = w.shape();
    let mut v = DMatrix::<f64>::identity(c, c);
    const PAIR_TOL: f64 = 1e-14;
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..c {
            for j in (i + 1)..c {
                let alpha = w.column(i).norm_squared();
                let beta = w.column(j).norm_squared();
                let gamma = w.column(i).dot(&w.column(j));
                if gamma == 0.0 || gamma.abs() <= PAIR_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (mut wi, mut wj) = w.columns_range_pair_mut(i, j);
                for r in 0..m {
                    let (x, y) = (wi[r], wj[r]);
                    wi[r] = cs * x - sn * y;
                    wj[r] = sn * x + cs * y;
                }
                let (mut vi, mut vj) = v.columns_range_pair_mut(i, j);
                for r in 0..c {
                    let (x, y) = (vi[r], vj[r]);
                    vi[r] = cs * x - sn * y;
                    vj[r] = sn * x + cs * y;
                }
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..c).map(|k| w.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = DMatrix::zeros(m, c);
    let mut vs = DMatrix::zeros(c, c);
    let mut sigma = Vec::with_capacity(c);
    for (k, &old) in order.iter().enumerate() {
        sigma.push(norms[old]);
        if norms[old] > 0.0 {
            u.set_column(k, &(w.column(old) / norms[old]));
        }
        vs.set_column(k, &v.column(old));
    }
    ThinSvd { u, sigma, v: vs }
}

fn cutoff(sigma: &[f64]) -> f64 {
    (sigma.first().copied().unwrap_or(0.0) * SV_CUTOFF).max(f64::MIN_POSITIVE)
}

/// Moore-Penrose pseudoinverse with the crate-wide cutoff.
pub fn pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.is_empty() {
        return a.transpose();
    }
    let svd = thin_svd(a);
    let eps = cutoff(&svd.sigma);
    let mut p = DMatrix::zeros(a.ncols(), a.nrows());
    for k in 0..svd.sigma.len() {
        if svd.sigma[k] > eps {
            p += svd.v.column(k) * svd.u.column(k).transpose() * (1.0 / svd.sigma[k]);
        }
    }
    p
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq_min_norm(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    lstsq_min_norm_anchored(a, b, 0.0)
}

/// Like [`lstsq_min_norm`], but the singular value cutoff is taken relative
/// to `max(sigma_max, anchor)`. Needed when `a` is a compression of a larger
/// operator: if the compression wiped `a` out entirely, its own largest
/// singular value is rounding noise and must not be trusted as a scale.
pub fn lstsq_min_norm_anchored(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    anchor: f64,
) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = thin_svd(a);
    let eps = cutoff(&svd.sigma).max(SV_CUTOFF * anchor);
    let mut x = DVector::zeros(a.ncols());
    for k in 0..svd.sigma.len() {
        if svd.sigma[k] > eps {
            let coef = svd.u.column(k).dot(b) / svd.sigma[k];
            x += svd.v.column(k) * coef;
        }
    }
    x
}

/// Minimizes `x^T q x` subject to `a x = b` (`q` symmetric positive
/// semidefinite). Returns `None` when the constraints are inconsistent.
///
/// Method: particular solution via pseudoinverse, then minimize over the
/// nullspace of `a` with a projected normal equation. All pieces tolerate
/// rank deficiency.
pub fn constrained_quadratic_min(
    q: &DMatrix<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
) -> Option<DVector<f64>> {
    let a_pinv = pinv(a);
    let x0 = &a_pinv * b;
    let feas = (a * &x0 - b).norm();
    if feas > 1e-8 * (1.0 + b.norm()) {
        return None;
    }
    // Projector onto null(a).
    let n = a.ncols();
    let proj = DMatrix::<f64>::identity(n, n) - &a_pinv * a;
    let reduced = &proj * q * &proj;
    let rhs = -(&proj * (q * &x0));
    // The constraints may determine x completely, leaving `reduced` as pure
    // rounding noise; anchor the cutoff to q's scale so such noise is
    // truncated instead of inverted.
    let z = lstsq_min_norm_anchored(&reduced, &rhs, q.norm());
    Some(x0 + proj * z)
}
