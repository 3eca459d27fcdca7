//! Axially symmetric convex bodies, their lattice points, successive minima
//! and reciprocal bodies.

mod basis;
mod body;
mod enumerate;
mod minima;

use alloc::vec::Vec;

pub use basis::{extract_zbasis, IntegerBasis, ENTRY_LIMIT};
pub use body::{coreciprocal_cylinder, polar_body, AxialBody, CylinderBody, DiamondBody};
pub use enumerate::{lattice_points_in, lattice_points_in_canonical, Budget, GaugedPoint, GAUGE_EPS};
pub use minima::{successive_minima, MinimaResult};

use crate::error::{Error, Result};

/// Smallest `lambda` with `k` in `lambda * body`.
pub fn dilation_needed<B: AxialBody + ?Sized>(body: &B, k: &[i64]) -> Result<f64> {
    if k.len() != body.dim() {
        return Err(Error::DimensionMismatch { expected: body.dim(), got: k.len() });
    }
    if k.iter().all(|&v| v == 0) {
        return Err(Error::InvalidInput("dilation of the zero vector is undefined".into()));
    }
    Ok(body.gauge(k))
}

/// Products `lambda_k(polar) * lambda_{n+1-k}(body)` for `k = 1..n`. Each lies
/// in `[1, n!]` for a compact convex symmetric body and its polar.
pub fn duality_check(body: &CylinderBody, budget: Budget) -> Result<Vec<f64>> {
    let own = successive_minima(body, budget)?;
    let polar = successive_minima(&polar_body(body), budget)?;
    let n = body.dim();
    Ok((0..n).map(|k| polar.lambdas[k] * own.lambdas[n - 1 - k]).collect())
}
