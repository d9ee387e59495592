//! Proximal maps and ball projections used by the saddle-point solver.

use ndarray::Array1;

use crate::Scalar;

/// Coordinate-wise soft thresholding with per-coordinate thresholds.
pub fn soft_threshold<S: Scalar>(v: &Array1<S>, thresholds: &Array1<S>) -> Array1<S> {
    Array1::from_shape_fn(v.len(), |i| {
        let t = thresholds[i];
        let x = v[i];
        if x > t {
            x - t
        } else if x < -t {
            x + t
        } else {
            S::zero()
        }
    })
}

/// Prox of `alpha · ‖·‖₂`: block shrinkage toward the origin.
pub fn block_shrink<S: Scalar>(v: &Array1<S>, alpha: S) -> Array1<S> {
    let norm = v.iter().fold(S::zero(), |a, &x| a + x * x).sqrt();
    if norm <= alpha {
        Array1::zeros(v.len())
    } else {
        let f = S::one() - alpha / norm;
        v.mapv(|x| f * x)
    }
}

/// Prox of `alpha · ‖·‖_∞` via the Moreau decomposition
/// `v - Π_{‖·‖₁ ≤ alpha}(v)`.
pub fn prox_linf<S: Scalar>(v: &Array1<S>, alpha: S) -> Array1<S> {
    let proj = project_l1_ball(v, alpha);
    v - &proj
}

/// Euclidean projection onto the l1 ball of radius `r` (sort-based
/// threshold search).
pub fn project_l1_ball<S: Scalar>(v: &Array1<S>, r: S) -> Array1<S> {
    if r <= S::zero() {
        return Array1::zeros(v.len());
    }
    let l1 = v.iter().fold(S::zero(), |a, &x| a + x.abs());
    if l1 <= r {
        return v.clone();
    }
    let mut mags: Vec<S> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = S::zero();
    let mut theta = S::zero();
    for (j, &u) in mags.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - r) / S::from(j + 1).unwrap();
        if u > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    v.mapv(|x| {
        let shrunk = (x.abs() - theta).max(S::zero());
        if x >= S::zero() {
            shrunk
        } else {
            -shrunk
        }
    })
}

/// Projection onto the l2 ball of radius `r`.
pub fn project_l2_ball<S: Scalar>(v: &Array1<S>, r: S) -> Array1<S> {
    let norm = v.iter().fold(S::zero(), |a, &x| a + x * x).sqrt();
    if norm <= r {
        v.clone()
    } else {
        v.mapv(|x| x / norm * r)
    }
}

/// Projection onto the l-infinity ball of radius `r` (clipping).
pub fn project_linf_ball<S: Scalar>(v: &Array1<S>, r: S) -> Array1<S> {
    v.mapv(|x| x.max(-r).min(r))
}
