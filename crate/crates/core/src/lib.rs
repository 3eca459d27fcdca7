//! Filling times of linear flows on the torus.
//!
//! A unit direction `alpha` in `R^n` generates the flow `theta -> theta + t alpha
//! (mod Z^n)`. This crate decides truncated Diophantine conditions on `alpha`,
//! computes successive minima of cylinders around `alpha`, builds the
//! adapted `Z^n` basis they yield, and turns it into explicit hitting times
//! for any target on the torus. A grid simulator measures filling times
//! directly for `n = 2, 3`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod diophantine;
pub mod direction;
pub mod error;
pub mod filling;
pub mod intmat;
pub mod lattice;
mod num;
pub mod simulator;

pub use diophantine::{
    best_gamma, check_truncated, complement_measure_estimate, random_direction, resonance_search, BestGamma, DioParams,
    MeasureEstimate, ResonanceReport, TruncatedCheck, ViolationWitness,
};
pub use direction::{DirectionVector, UNIT_TOLERANCE};
pub use error::{Error, Result};
pub use filling::{
    adapted_basis, bound_constant, critical_cutoff, filling_time_bound, hitting_time, AdaptedBasis, BasisInvariants,
    FillingCertificate,
};
pub use lattice::{
    coreciprocal_cylinder, dilation_needed, duality_check, extract_zbasis, lattice_points_in, polar_body,
    successive_minima, AxialBody, Budget, CylinderBody, DiamondBody, GaugedPoint, IntegerBasis, MinimaResult,
};
pub use num::canonical_sign;
pub use simulator::{
    empirical_fill_time, resonant_reference, torus_distance, verify_delta_dense, CoverageResult, DensityVerdict,
    FillOptions, ResonantReference,
};
