use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{dot_dd, dot_int_dd, norm, Dd};

/// Unit-norm tolerance accepted by [`DirectionVector::new`].
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// A direction of linear flow: a vector in `R^n`, `n >= 2`, of unit length.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct DirectionVector {
    coords: Vec<f64>,
}

impl DirectionVector {
    /// Accepts `coords` if its Euclidean norm is 1 within [`UNIT_TOLERANCE`].
    /// The coordinates are stored exactly as given.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidInput("direction needs dimension >= 2".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("direction has non-finite coordinates".into()));
        }
        let r = norm(&coords);
        if (r - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnit { norm: r, tolerance: UNIT_TOLERANCE });
        }
        Ok(Self { coords })
    }

    /// `N(v) = v / |v|`.
    pub fn normalize(coords: &[f64]) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("direction has non-finite coordinates".into()));
        }
        let r = norm(coords);
        if r == 0.0 {
            return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
        }
        Self::new(coords.iter().map(|c| c / r).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `k . alpha` for an integer vector.
    pub fn dot_int(&self, k: &[i64]) -> f64 {
        dot_int_dd(k, &self.coords).to_f64()
    }

    pub(crate) fn dot_int_dd(&self, k: &[i64]) -> Dd {
        dot_int_dd(k, &self.coords)
    }

    /// Splits `p` into its coordinate along the axis and its component in the
    /// orthogonal hyperplane, written into `radial`. Returns the axial
    /// coordinate. Accurate to a few ulps of each part even when `p` is long
    /// and nearly parallel to the axis.
    pub fn split_into(&self, p: &[i64], radial: &mut [f64]) -> f64 {
        let a = &self.coords;
        let dot = dot_int_dd(p, a);
        let n2 = dot_dd(a, a);
        let s = dot.div(n2);
        for ((r, &pi), &ai) in radial.iter_mut().zip(p).zip(a) {
            let t = libm::fma(-s.hi, ai, pi as f64);
            *r = t - s.lo * ai;
        }
        dot.to_f64() / libm::sqrt(n2.to_f64())
    }

    /// `(|p . alpha|, |p - (p . alpha) alpha|)` for an integer vector.
    pub fn split_norms(&self, p: &[i64]) -> (f64, f64) {
        let mut buf = [0.0f64; 8];
        if p.len() <= buf.len() {
            let u = self.split_into(p, &mut buf[..p.len()]);
            (u.abs(), norm(&buf[..p.len()]))
        } else {
            let mut v = alloc::vec![0.0; p.len()];
            let u = self.split_into(p, &mut v);
            (u.abs(), norm(&v))
        }
    }
}
