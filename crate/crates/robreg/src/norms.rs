//! Vector norms and their duals.
//!
//! Only l1, l2 and l-infinity (plus diagonally weighted variants) appear in
//! the toolkit; duality between them drives which regularizer an uncertainty
//! set induces, so the dual map is part of the type.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Base norm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    /// l1 and l-infinity are dual to each other; l2 is self-dual.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::LInf,
            NormKind::L2 => NormKind::L2,
            NormKind::LInf => NormKind::L1,
        }
    }
}

/// A norm on R^d: a base family plus optional per-coordinate weights,
/// `‖v‖ = base_norm(w ⊙ v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTag<S> {
    kind: NormKind,
    weights: Option<Array1<S>>,
}

impl<S: Scalar> NormTag<S> {
    pub fn l1() -> Self {
        NormTag {
            kind: NormKind::L1,
            weights: None,
        }
    }

    pub fn l2() -> Self {
        NormTag {
            kind: NormKind::L2,
            weights: None,
        }
    }

    pub fn linf() -> Self {
        NormTag {
            kind: NormKind::LInf,
            weights: None,
        }
    }

    pub fn from_kind(kind: NormKind) -> Self {
        NormTag {
            kind,
            weights: None,
        }
    }

    /// Weighted variant; all weights must be nonnegative.
    pub fn weighted(kind: NormKind, weights: Array1<S>) -> Result<Self> {
        if weights.iter().any(|w| *w < S::zero() || !w.is_finite()) {
            return Err(Error::InvalidInput(
                "negative weight in weighted norm".into(),
            ));
        }
        Ok(NormTag {
            kind,
            weights: Some(weights),
        })
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn weights(&self) -> Option<&Array1<S>> {
        self.weights.as_ref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Evaluate the norm of `v`.
    pub fn eval(&self, v: &Array1<S>) -> S {
        match &self.weights {
            None => eval_kind(self.kind, v.iter().copied()),
            Some(w) => {
                assert_eq!(w.len(), v.len(), "weighted norm dimension mismatch");
                eval_kind(self.kind, v.iter().zip(w.iter()).map(|(&vi, &wi)| wi * vi))
            }
        }
    }

    /// The dual norm: kinds swap l1 <-> l-inf, l2 stays, weights invert.
    ///
    /// A zero weight has no dual (the weighted seminorm vanishes on a
    /// coordinate direction), so it is rejected.
    pub fn dual(&self) -> Result<Self> {
        let weights = match &self.weights {
            None => None,
            Some(w) => {
                if w.iter().any(|wi| *wi == S::zero()) {
                    return Err(Error::ZeroWeightDual);
                }
                Some(w.mapv(|wi| S::one() / wi))
            }
        };
        Ok(NormTag {
            kind: self.kind.dual(),
            weights,
        })
    }
}

fn eval_kind<S: Scalar>(kind: NormKind, it: impl Iterator<Item = S>) -> S {
    match kind {
        NormKind::L1 => it.fold(S::zero(), |acc, x| acc + x.abs()),
        NormKind::L2 => it.fold(S::zero(), |acc, x| acc + x * x).sqrt(),
        NormKind::LInf => it.fold(S::zero(), |acc, x| acc.max(x.abs())),
    }
}

/// Free-function form of [`NormTag::eval`].
pub fn norm_eval<S: Scalar>(v: &Array1<S>, tag: &NormTag<S>) -> S {
    tag.eval(v)
}

/// Free-function form of [`NormTag::dual`].
pub fn dual_norm<S: Scalar>(tag: &NormTag<S>) -> Result<NormTag<S>> {
    tag.dual()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn pythagorean_l2() {
        assert_relative_eq!(NormTag::l2().eval(&array![3.0, 4.0]), 5.0);
    }

    #[test]
    fn zero_vector_l1() {
        assert_eq!(NormTag::l1().eval(&array![0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn max_magnitude_linf() {
        assert_eq!(NormTag::linf().eval(&array![1.0, -2.0, 3.0]), 3.0);
    }

    #[test]
    fn standard_dualities() {
        let l1 = NormTag::<f64>::l1();
        assert_eq!(l1.dual().unwrap().kind(), NormKind::LInf);
        let l2 = NormTag::<f64>::l2();
        assert_eq!(l2.dual().unwrap(), l2);
        let linf = NormTag::<f64>::linf();
        assert_eq!(linf.dual().unwrap().dual().unwrap(), linf);
    }

    #[test]
    fn weighted_dual_inverts_weights() {
        let t = NormTag::weighted(NormKind::L1, array![2.0, 4.0]).unwrap();
        let d = t.dual().unwrap();
        assert_eq!(d.kind(), NormKind::LInf);
        assert_relative_eq!(d.weights().unwrap()[0], 0.5);
        assert_relative_eq!(d.weights().unwrap()[1], 0.25);
        // double dual restores weights up to roundoff
        let dd = d.dual().unwrap();
        assert_eq!(dd.kind(), NormKind::L1);
        for (orig, twice) in t.weights().unwrap().iter().zip(dd.weights().unwrap()) {
            assert_relative_eq!(orig, twice, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_weight_has_no_dual() {
        let t = NormTag::weighted(NormKind::L2, array![1.0, 0.0]).unwrap();
        assert_eq!(t.dual(), Err(Error::ZeroWeightDual));
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(NormTag::weighted(NormKind::L2, array![1.0, -1.0]).is_err());
    }

    fn tags() -> Vec<NormTag<f64>> {
        vec![NormTag::l1(), NormTag::l2(), NormTag::linf()]
    }

    proptest! {
        #[test]
        fn triangle_inequality_and_homogeneity(
            v in proptest::collection::vec(-10.0_f64..10.0, 1..8),
            w in proptest::collection::vec(-10.0_f64..10.0, 1..8),
            alpha in -5.0_f64..5.0,
        ) {
            let d = v.len().min(w.len());
            let v = Array1::from(v[..d].to_vec());
            let w = Array1::from(w[..d].to_vec());
            for t in tags() {
                let sum = t.eval(&(&v + &w));
                prop_assert!(sum <= t.eval(&v) + t.eval(&w) + 1e-12);
                let scaled = t.eval(&v.mapv(|x| alpha * x));
                prop_assert!((scaled - alpha.abs() * t.eval(&v)).abs() <= 1e-10);
            }
        }

        #[test]
        fn hoelder_inequality(
            v in proptest::collection::vec(-10.0_f64..10.0, 1..8),
            w in proptest::collection::vec(-10.0_f64..10.0, 1..8),
        ) {
            let d = v.len().min(w.len());
            let v = Array1::from(v[..d].to_vec());
            let w = Array1::from(w[..d].to_vec());
            for t in tags() {
                let dual = t.dual().unwrap();
                prop_assert!(v.dot(&w).abs() <= t.eval(&v) * dual.eval(&w) + 1e-9);
            }
            // one weighted pairing as well
            let weights = Array1::from_elem(d, 2.0);
            let t = NormTag::weighted(NormKind::L2, weights).unwrap();
            let dual = t.dual().unwrap();
            prop_assert!(v.dot(&w).abs() <= t.eval(&v) * dual.eval(&w) + 1e-9);
        }

        #[test]
        fn dual_is_involution_on_unweighted(kind in prop_oneof![
            Just(NormKind::L1), Just(NormKind::L2), Just(NormKind::LInf)
        ]) {
            let t = NormTag::<f64>::from_kind(kind);
            prop_assert_eq!(t.dual().unwrap().dual().unwrap(), t);
        }
    }
}
