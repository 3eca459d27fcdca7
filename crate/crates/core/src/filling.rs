//! Explicit filling times for linear flow on the torus.
//!
//! For a direction `alpha` satisfying the truncated Diophantine condition
//! with cutoff `N > 1 + n^2 n!`, the long thin cylinder
//! `C = {x alpha + y : |x| <= N^tau / gamma, |y| <= 1 / (N - 1)}` has
//! `lambda_n(C) < n!`, so `n n! C` holds a basis `w_1, ..., w_n` of `Z^n`.
//! Writing `w_j = x_j alpha + y_j` gives multipliers `x_j` and near-axis
//! directions `omega_j = w_j / x_j`. Any target `theta` on the torus has
//! unique coordinates `t_j in [0, 1)` with `theta = sum t_j w_j (mod Z^n)`,
//! and the flow started at 0 arrives within `sum t_j |y_j|` of `theta` at
//! time `T = sum t_j x_j`.

use alloc::format;
use alloc::vec::Vec;

use crate::diophantine::{check_truncated, DioParams, TruncatedCheck};
use crate::direction::DirectionVector;
use crate::error::{Error, Result};
use crate::lattice::{
    coreciprocal_cylinder, extract_zbasis, lattice_points_in, successive_minima, Budget, CylinderBody, IntegerBasis,
    MinimaResult,
};
use crate::num::{factorial, Dd};

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension {n} < 2")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidInput(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// `n^2 n!`
fn n2_fact(n: usize) -> f64 {
    (n * n) as f64 * factorial(n)
}

/// Critical cutoff `N* = (1 + n^2 n!) / delta`.
pub fn critical_cutoff(n: usize, delta: f64) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    Ok((1.0 + n2_fact(n)) / delta)
}

/// `C(n, tau) = (1 + n^2 n!)^(tau + 1)`.
pub fn bound_constant(n: usize, tau: f64) -> Result<f64> {
    check_n(n)?;
    if !(tau.is_finite() && tau >= (n - 1) as f64) {
        return Err(Error::InvalidInput(format!("tau = {tau} must be at least n - 1")));
    }
    Ok(libm::pow(1.0 + n2_fact(n), tau + 1.0))
}

/// Upper bound `C(n, tau) / (gamma delta^tau)` on the filling time.
pub fn filling_time_bound(n: usize, tau: f64, gamma: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidInput(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    Ok(bound_constant(n, tau)? / (gamma * libm::pow(delta, tau)))
}

/// A basis of `Z^n` adapted to a Diophantine direction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdaptedBasis {
    alpha: DirectionVector,
    params: DioParams,
    multipliers: Vec<f64>,
    directions: Vec<Vec<f64>>,
    integer_basis: IntegerBasis,
    /// `|y_j| = |w_j - x_j alpha|`
    radial: Vec<f64>,
    minima: MinimaResult,
}

/// Numeric evidence for the three properties of an adapted basis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisInvariants {
    /// `sqrt(3)/2 < x_j`
    pub multiplier_floor: f64,
    /// `x_j <= n n! N^tau / gamma`
    pub multiplier_ceiling: f64,
    /// `|alpha - omega_j|`
    pub deviations: Vec<f64>,
    /// `n n! / (x_j (N - 1))`
    pub deviation_bounds: Vec<f64>,
    pub determinant: i128,
    pub multipliers_ok: bool,
    pub deviations_ok: bool,
    pub unimodular: bool,
}

impl BasisInvariants {
    pub fn holds(&self) -> bool {
        self.multipliers_ok && self.deviations_ok && self.unimodular
    }
}

impl AdaptedBasis {
    pub fn alpha(&self) -> &DirectionVector {
        &self.alpha
    }
    pub fn params(&self) -> &DioParams {
        &self.params
    }
    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }
    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }
    pub fn integer_basis(&self) -> &IntegerBasis {
        &self.integer_basis
    }
    /// Successive minima of the cylinder the basis was drawn from.
    pub fn minima(&self) -> &MinimaResult {
        &self.minima
    }
    pub fn cutoff(&self) -> f64 {
        self.params.cutoff().expect("adapted bases are built with a cutoff")
    }

    /// Recomputes all three properties from the stored data.
    pub fn invariants(&self) -> BasisInvariants {
        let n = self.alpha.dim();
        let nf = n as f64 * factorial(n);
        let cutoff = self.cutoff();
        let floor = libm::sqrt(3.0) / 2.0;
        let ceiling = nf * libm::pow(cutoff, self.params.tau()) / self.params.gamma();
        let deviations: Vec<f64> = self.radial.iter().zip(&self.multipliers).map(|(y, x)| y / x).collect();
        let deviation_bounds: Vec<f64> = self.multipliers.iter().map(|x| nf / (x * (cutoff - 1.0))).collect();
        let determinant = self.integer_basis.determinant();
        BasisInvariants {
            multiplier_floor: floor,
            multiplier_ceiling: ceiling,
            multipliers_ok: self.multipliers.iter().all(|&x| floor < x && x <= ceiling),
            deviations_ok: deviations.iter().zip(&deviation_bounds).all(|(d, b)| *d <= *b),
            deviations,
            deviation_bounds,
            determinant,
            unimodular: determinant.abs() == 1,
        }
    }
}

/// Builds the adapted basis for `alpha`.
///
/// The emptiness of `Z^n` in the coreciprocal cylinder is enumerated rather
/// than inferred from the Diophantine check, and `lambda_n(C) < n!` is
/// checked before extraction.
pub fn adapted_basis(alpha: &DirectionVector, params: &DioParams, budget: Budget) -> Result<AdaptedBasis> {
    let n = params.n();
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: alpha.dim() });
    }
    let cutoff = params.cutoff().ok_or(Error::MissingCutoff)?;
    let required = 1.0 + n2_fact(n);
    if cutoff <= required {
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    if let TruncatedCheck::Violated(w) = check_truncated(alpha, params, budget)? {
        return Err(Error::NotDiophantine(w));
    }

    let axial = libm::pow(cutoff, params.tau()) / params.gamma();
    let cylinder = CylinderBody::new(alpha.clone(), axial, 1.0 / (cutoff - 1.0))?;
    let star = coreciprocal_cylinder(&cylinder);
    let inside = lattice_points_in(&star, 1.0, budget)?;
    if !inside.is_empty() {
        return Err(Error::ExclusionFailed(inside.into_iter().map(|p| p.k).collect()));
    }

    let minima = successive_minima(&cylinder, budget)?;
    let nfact = factorial(n);
    if minima.last() >= nfact {
        return Err(Error::Internal(format!("lambda_n = {} is not below n! = {nfact}", minima.last())));
    }
    let mut integer_basis = extract_zbasis(&cylinder, &minima, budget)?;

    let mut multipliers = Vec::with_capacity(n);
    let mut directions = Vec::with_capacity(n);
    let mut radial = Vec::with_capacity(n);
    let mut y = alloc::vec![0.0; n];
    for j in 0..n {
        if alpha.dot_int(&integer_basis.columns()[j]) < 0.0 {
            integer_basis.flip(j);
        }
        let w = &integer_basis.columns()[j];
        let x = alpha.dot_int(w);
        alpha.split_into(w, &mut y);
        radial.push(crate::num::norm(&y));
        directions.push(w.iter().map(|&v| v as f64 / x).collect());
        multipliers.push(x);
    }

    let basis =
        AdaptedBasis { alpha: alpha.clone(), params: *params, multipliers, directions, integer_basis, radial, minima };
    let inv = basis.invariants();
    if !inv.holds() {
        return Err(Error::Internal(format!("adapted basis fails its invariants: {inv:?}")));
    }
    Ok(basis)
}

/// A time at which the flow from the origin arrives near a target.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FillingCertificate {
    /// Target reduced to `[0, 1)^n`.
    pub theta: Vec<f64>,
    /// Coordinates `t_j in [0, 1)` of `theta` in the adapted basis.
    pub coords: Vec<f64>,
    pub time: f64,
    /// Torus distance from `time * alpha` to `theta`.
    pub endpoint_distance: f64,
    /// `C(n, tau) / (gamma delta^tau)`
    pub bound: f64,
    pub delta: f64,
    /// Cutoff the basis was built with.
    pub cutoff: f64,
    /// Whether `cutoff >= N*(delta)`, so that `endpoint_distance < delta` is
    /// guaranteed.
    pub guaranteed: bool,
}

/// Reduces each coordinate to `[0, 1)`.
pub fn reduce_mod_one(theta: &[f64]) -> Vec<f64> {
    theta
        .iter()
        .map(|&v| {
            let f = v - libm::floor(v);
            if f >= 1.0 {
                0.0
            } else {
                f
            }
        })
        .collect()
}

/// Hitting time for `theta` from the origin.
///
/// Coordinates come from the exact integer inverse of the basis matrix
/// applied in double-double arithmetic, so `t_j` is accurate even for
/// multipliers of size `10^8`.
pub fn hitting_time(basis: &AdaptedBasis, theta: &[f64], delta: f64) -> Result<FillingCertificate> {
    let n = basis.alpha.dim();
    if theta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: theta.len() });
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("theta has non-finite coordinates".into()));
    }
    check_delta(delta)?;
    // IntegerBasis guarantees unimodularity; re-check in case of tampering
    // through deserialisation.
    let det = crate::intmat::determinant(basis.integer_basis.columns())?;
    if det.abs() != 1 {
        return Err(Error::NotUnimodular { det });
    }

    let theta = reduce_mod_one(theta);
    let inv = crate::intmat::unimodular_inverse(basis.integer_basis.columns())?;
    let coords: Vec<f64> = inv
        .iter()
        .map(|row| {
            row.iter().zip(&theta).fold(Dd::ZERO, |acc, (&m, &th)| acc.add(Dd::from_i128(m).mul_f64(th))).fract()
        })
        .collect();

    let mut time = Dd::ZERO;
    for (t, w) in coords.iter().zip(basis.integer_basis.columns()) {
        time = time.add(basis.alpha.dot_int_dd(w).mul_f64(*t));
    }
    let mut d2 = 0.0;
    for (a, th) in basis.alpha.coords().iter().zip(&theta) {
        let f = time.mul_f64(*a).add(Dd::from_f64(-th)).fract();
        let d = f.min(1.0 - f);
        d2 += d * d;
    }

    let params = basis.params;
    let cutoff = basis.cutoff();
    let critical = critical_cutoff(n, delta)?;
    Ok(FillingCertificate {
        theta,
        coords,
        time: time.to_f64(),
        endpoint_distance: libm::sqrt(d2),
        bound: filling_time_bound(n, params.tau(), params.gamma(), delta)?,
        delta,
        cutoff,
        guaranteed: cutoff >= critical * (1.0 - 1e-12),
    })
}
