//! Small dense linear algebra helpers: everything in this crate runs at desk
//! scale (n, m up to a few hundred), so plain dense routines are enough.

use ndarray::{Array1, Array2};

use crate::{Error, Result, Scalar};

/// Estimate of the spectral norm of `a` by power iteration on `aᵀa`.
///
/// `iters` controls the iteration count; the estimate approaches the true
/// norm from below, so callers deriving step sizes should leave a margin.
pub fn spectral_norm<S: Scalar>(a: &Array2<S>, iters: usize) -> S {
    let m = a.ncols();
    if m == 0 || a.nrows() == 0 {
        return S::zero();
    }
    // deterministic non-degenerate start
    let mut v = Array1::from_shape_fn(m, |i| S::one() + S::lit(1e-3) * S::from(i).unwrap());
    let norm = |w: &Array1<S>| w.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt();
    let mut sigma = S::zero();
    let nv = norm(&v);
    if nv > S::zero() {
        v.mapv_inplace(|x| x / nv);
    }
    for _ in 0..iters {
        let av = a.dot(&v);
        let atav = a.t().dot(&av);
        let n = norm(&atav);
        if n == S::zero() {
            return S::zero();
        }
        v = atav.mapv(|x| x / n);
        sigma = norm(&a.dot(&v));
    }
    sigma
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns, so
/// `a = v · diag(λ) · vᵀ`. Eigenvalues are in ascending order.
pub fn symmetric_eigen<S: Scalar>(a: &Array2<S>) -> (Array1<S>, Array2<S>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "symmetric_eigen needs a square matrix");
    let mut m = a.clone();
    let mut v = Array2::eye(n);
    if n <= 1 {
        return (m.diag().to_owned(), v);
    }
    let fro = a.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt();
    let tol = S::lit(1e-14) * (fro + S::one());
    for _sweep in 0..100 {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= tol * S::lit(1e-2) {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let theta = (aqq - app) / (S::lit(2.0) * apq);
                // stable tangent of the rotation angle
                let t = {
                    let s = if theta >= S::zero() {
                        S::one()
                    } else {
                        -S::one()
                    };
                    s / (theta.abs() + (theta * theta + S::one()).sqrt())
                };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<S> = (0..n).map(|i| m[[i, i]]).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let vals = Array1::from_iter(order.iter().map(|&i| diag[i]));
    let mut vecs = Array2::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[[k, new]] = v[[k, old]];
        }
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue<S: Scalar>(a: &Array2<S>) -> S {
    let (vals, _) = symmetric_eigen(a);
    vals[0]
}

/// Projection of a symmetric matrix onto the positive semidefinite cone
/// (eigenvalue clamping).
pub fn project_psd<S: Scalar>(a: &Array2<S>) -> Array2<S> {
    let (vals, vecs) = symmetric_eigen(a);
    let n = a.nrows();
    let mut out = Array2::zeros((n, n));
    for k in 0..n {
        let lam = vals[k].max(S::zero());
        if lam == S::zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] += lam * vecs[[i, k]] * vecs[[j, k]];
            }
        }
    }
    // resymmetrize against rounding drift
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (out[[i, j]] + out[[j, i]]) * S::lit(0.5);
            out[[i, j]] = avg;
            out[[j, i]] = avg;
        }
    }
    out
}

/// Solve the square linear system `a · x = b` by Gaussian elimination with
/// partial pivoting.
pub fn solve_linear<S: Scalar>(a: &Array2<S>, b: &Array1<S>) -> Result<Array1<S>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve_linear: matrix {}x{}, rhs {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let mut m = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if m[[r, col]].abs() > m[[piv, col]].abs() {
                piv = r;
            }
        }
        if m[[piv, col]].abs() < S::lit(1e-300) {
            return Err(Error::InvalidInput(
                "singular matrix in solve_linear".into(),
            ));
        }
        if piv != col {
            for c in 0..n {
                m.swap([col, c], [piv, c]);
            }
            rhs.swap(col, piv);
        }
        for r in (col + 1)..n {
            let f = m[[r, col]] / m[[col, col]];
            if f == S::zero() {
                continue;
            }
            for c in col..n {
                let v = m[[col, c]];
                m[[r, c]] -= f * v;
            }
            let v = rhs[col];
            rhs[r] -= f * v;
        }
    }
    let mut x = Array1::zeros(n);
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for c in (row + 1)..n {
            s -= m[[row, c]] * x[c];
        }
        x[row] = s / m[[row, row]];
    }
    Ok(x)
}

/// Orthonormal basis of the span of the given vectors, by column-pivoted
/// modified Gram-Schmidt. Vectors whose residual norm falls below
/// `rank_tol` times the largest input norm are treated as dependent.
pub fn orthonormal_basis<S: Scalar>(vectors: &[Array1<S>], rank_tol: S) -> Vec<Array1<S>> {
    let mut pool: Vec<Array1<S>> = vectors.to_vec();
    let norm = |w: &Array1<S>| w.iter().fold(S::zero(), |acc, &x| acc + x * x).sqrt();
    let scale = pool.iter().map(&norm).fold(S::zero(), |a, b| a.max(b));
    if scale == S::zero() {
        return Vec::new();
    }
    let thresh = rank_tol * scale;
    let mut basis: Vec<Array1<S>> = Vec::new();
    while !pool.is_empty() {
        // pivot on the largest remaining residual
        let (best, best_norm) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm(v)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if best_norm <= thresh {
            break;
        }
        let q = pool.swap_remove(best).mapv(|x| x / best_norm);
        for v in pool.iter_mut() {
            let coeff = v.dot(&q);
            v.zip_mut_with(&q, |vi, qi| *vi -= coeff * *qi);
        }
        basis.push(q);
    }
    basis
}
