//! Truncated Diophantine conditions on direction vectors.
//!
//! `alpha` satisfies the condition with parameters `(n, tau, gamma, N)` when
//! `|k . alpha| >= gamma |k|^(-tau)` for every integer `k` with
//! `0 < |k| <= N`. Every violating `k` has `|k . alpha| < gamma` and
//! `|k| <= N`, so it lies in the flat cylinder of axial half-extent `gamma`
//! and radius `N` around `alpha`; membership is decided by enumerating that
//! cylinder.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::direction::DirectionVector;
use crate::error::{Error, Result};
use crate::lattice::{lattice_points_in_canonical, Budget, CylinderBody};
use crate::num::{cmp_ranked, gcd, norm2_int, norm_int};

/// Parameters `(n, tau, gamma, N)` of a truncated Diophantine set; `cutoff`
/// is `None` for the untruncated set.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DioParams {
    n: usize,
    tau: f64,
    gamma: f64,
    cutoff: Option<f64>,
}

impl DioParams {
    pub fn new(n: usize, tau: f64, gamma: f64, cutoff: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(alloc::format!("dimension {n} < 2")));
        }
        if !(tau.is_finite() && tau >= (n - 1) as f64) {
            return Err(Error::InvalidInput(alloc::format!("tau = {tau} must be at least n - 1 = {}", n - 1)));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidInput(alloc::format!("gamma = {gamma} must lie in (0, 1)")));
        }
        if let Some(c) = cutoff {
            if !(c.is_finite() && c >= 1.0) {
                return Err(Error::InvalidInput(alloc::format!("cutoff N = {c} must be >= 1")));
            }
        }
        Ok(Self { n, tau, gamma, cutoff })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn cutoff(&self) -> Option<f64> {
        self.cutoff
    }
}

/// An integer vector breaking the Diophantine inequality.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ViolationWitness {
    pub k: Vec<i64>,
    /// `|k . alpha|`
    pub inner: f64,
    /// `gamma |k|^(-tau)`
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TruncatedCheck {
    Pass,
    Violated(ViolationWitness),
}

impl TruncatedCheck {
    pub fn passed(&self) -> bool {
        matches!(self, TruncatedCheck::Pass)
    }
}

/// One-sided floating slack on the Diophantine comparison.
pub fn comparison_slack(norm: f64) -> f64 {
    1e-12 * norm
}

fn check_dims(alpha: &DirectionVector, n: usize) -> Result<()> {
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: alpha.dim() });
    }
    Ok(())
}

fn within_cutoff(k: &[i64], cutoff: f64) -> bool {
    (norm2_int(k) as f64) <= cutoff * cutoff * (1.0 + 4.0 * f64::EPSILON)
}

/// Decides `alpha` in `D_n(tau, gamma, N)`. On failure reports the violating
/// `k` of smallest norm (first nonzero entry positive, ties broken
/// lexicographically).
pub fn check_truncated(alpha: &DirectionVector, params: &DioParams, budget: Budget) -> Result<TruncatedCheck> {
    check_dims(alpha, params.n)?;
    let cutoff = params.cutoff.ok_or(Error::MissingCutoff)?;
    let slab = CylinderBody::new(alpha.clone(), params.gamma, cutoff)?;
    let mut best: Option<ViolationWitness> = None;
    for p in lattice_points_in_canonical(&slab, 1.0, budget)? {
        if !within_cutoff(&p.k, cutoff) {
            continue;
        }
        let norm = norm_int(&p.k);
        let inner = alpha.dot_int(&p.k).abs();
        let threshold = params.gamma * libm::pow(norm, -params.tau);
        if inner < threshold - comparison_slack(norm) {
            let better = match &best {
                None => true,
                Some(b) => cmp_ranked((0.0, &p.k), (0.0, &b.k)).is_lt(),
            };
            if better {
                best = Some(ViolationWitness { k: p.k, inner, threshold });
            }
        }
    }
    Ok(match best {
        None => TruncatedCheck::Pass,
        Some(w) => TruncatedCheck::Violated(w),
    })
}

/// Largest admissible `gamma` for given `tau` and cutoff.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BestGamma {
    pub gamma_max: f64,
    pub argmin_k: Vec<i64>,
}

/// `min |k . alpha| |k|^tau` over `0 < |k| <= N`. Resonances within the
/// comparison slack count as exact and give `gamma_max = 0`.
pub fn best_gamma(alpha: &DirectionVector, tau: f64, cutoff: f64, budget: Budget) -> Result<BestGamma> {
    if !tau.is_finite() {
        return Err(Error::InvalidInput("tau must be finite".into()));
    }
    if !(cutoff.is_finite() && cutoff >= 1.0) {
        return Err(Error::InvalidInput(alloc::format!("cutoff N = {cutoff} must be finite and >= 1")));
    }
    let n = alpha.dim();
    let value = |k: &[i64]| {
        let norm = norm_int(k);
        let inner = alpha.dot_int(k).abs();
        if inner <= comparison_slack(norm) {
            0.0
        } else {
            inner * libm::pow(norm, tau)
        }
    };

    // Unit vectors give a first upper bound; anything better has
    // |k . alpha| below it.
    let mut best: Option<(f64, Vec<i64>)> = None;
    for i in 0..n {
        let mut e = alloc::vec![0i64; n];
        e[i] = 1;
        let v = value(&e);
        if best.as_ref().is_none_or(|(bv, bk)| cmp_ranked((v, &e), (*bv, bk)).is_lt()) {
            best = Some((v, e));
        }
    }
    let (bound, _) = best.clone().expect("n >= 2");
    let axial = bound.max(comparison_slack(cutoff)).max(f64::MIN_POSITIVE);
    let slab = CylinderBody::new(alpha.clone(), axial, cutoff)?;
    for p in lattice_points_in_canonical(&slab, 1.0, budget)? {
        if !within_cutoff(&p.k, cutoff) {
            continue;
        }
        let v = value(&p.k);
        let (bv, bk) = best.as_ref().expect("seeded above");
        if cmp_ranked((v, &p.k), (*bv, bk)).is_lt() {
            best = Some((v, p.k));
        }
    }
    let (gamma_max, argmin_k) = best.expect("seeded above");
    Ok(BestGamma { gamma_max, argmin_k })
}

/// A primitive integer vector nearly orthogonal to `alpha`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResonanceReport {
    pub k: Vec<i64>,
    pub order: f64,
    pub residual: f64,
}

/// Every primitive `k` (first nonzero entry positive) with
/// `|k| <= max_order` and `|k . alpha| <= tol`, sorted by norm then
/// lexicographically. `tol = 0` finds exact resonances, up to the
/// comparison slack.
pub fn resonance_search(
    alpha: &DirectionVector,
    max_order: f64,
    tol: f64,
    budget: Budget,
) -> Result<Vec<ResonanceReport>> {
    if !(max_order.is_finite() && max_order >= 1.0) {
        return Err(Error::InvalidInput(alloc::format!("max_order = {max_order} must be >= 1")));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidInput(alloc::format!("tol = {tol} must be >= 0")));
    }
    let slab = CylinderBody::new(alpha.clone(), tol + comparison_slack(max_order), max_order)?;
    let mut out: Vec<ResonanceReport> = lattice_points_in_canonical(&slab, 1.0, budget)?
        .into_iter()
        .filter(|p| within_cutoff(&p.k, max_order))
        .filter(|p| p.k.iter().fold(0i128, |g, &v| gcd(g, v as i128)) == 1)
        .filter_map(|p| {
            let order = norm_int(&p.k);
            let residual = alpha.dot_int(&p.k).abs();
            (residual <= tol + comparison_slack(order)).then_some(ResonanceReport { k: p.k, order, residual })
        })
        .collect();
    out.sort_by(|a, b| cmp_ranked((0.0, &a.k), (0.0, &b.k)));
    Ok(out)
}

/// Uniform random direction on the unit sphere (normalized Gaussian).
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DirectionVector {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Ok(d) = DirectionVector::normalize(&v) {
            return d;
        }
    }
}

/// Monte Carlo estimate of the excluded fraction of the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasureEstimate {
    pub fraction: f64,
    pub stderr: f64,
    pub samples: u64,
    pub excluded: u64,
}

/// Fraction of uniformly random unit vectors failing the truncated
/// condition, with its binomial standard error. Bit-for-bit reproducible for
/// a fixed seed.
pub fn complement_measure_estimate(
    params: &DioParams,
    samples: u64,
    seed: u64,
    budget: Budget,
) -> Result<MeasureEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be >= 1".into()));
    }
    if params.cutoff.is_none() {
        return Err(Error::MissingCutoff);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut excluded = 0u64;
    for _ in 0..samples {
        let alpha = random_direction(&mut rng, params.n);
        if !check_truncated(&alpha, params, budget)?.passed() {
            excluded += 1;
        }
    }
    let fraction = excluded as f64 / samples as f64;
    let stderr = libm::sqrt(fraction * (1.0 - fraction) / samples as f64);
    Ok(MeasureEstimate { fraction, stderr, samples, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const PHI: f64 = 1.618_033_988_749_895;

    fn n2(a: f64, b: f64) -> DirectionVector {
        DirectionVector::normalize(&[a, b]).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(DioParams::new(1, 1.0, 0.5, Some(2.0)).is_err());
        assert!(DioParams::new(2, 0.9, 0.5, Some(2.0)).is_err(), "tau below n - 1");
        assert!(DioParams::new(2, 1.0, 0.5, Some(2.0)).is_ok());
        assert!(DioParams::new(2, 1.5, 1.0, Some(2.0)).is_err());
        assert!(DioParams::new(2, 1.5, 0.5, Some(0.5)).is_err());
        assert!(DioParams::new(2, 1.5, 0.5, None).is_ok());
    }

    fn raw(n: usize, tau: f64, gamma: f64, cutoff: f64) -> DioParams {
        DioParams::new(n, tau, gamma, Some(cutoff)).unwrap()
    }

    #[test]
    fn exact_resonance_is_reported() {
        let r = check_truncated(&n2(2.0, 1.0), &raw(2, 1.0, 0.01, 3.0), Budget::default()).unwrap();
        let TruncatedCheck::Violated(w) = r else { panic!("expected violation") };
        assert_eq!(w.k, vec![1, -2]);
        assert!(w.inner < 1e-15);
    }

    #[test]
    fn unit_cutoff_diagonal_passes() {
        let r = check_truncated(&n2(1.0, 1.0), &raw(2, 1.0, 0.5, 1.0), Budget::default()).unwrap();
        assert_eq!(r, TruncatedCheck::Pass);
    }

    #[test]
    fn missing_cutoff_is_rejected() {
        let p = DioParams::new(2, 1.5, 0.1, None).unwrap();
        assert_eq!(check_truncated(&n2(1.0, PHI), &p, Budget::default()), Err(Error::MissingCutoff));
    }

    #[test]
    fn best_gamma_small_cases() {
        let g = best_gamma(&n2(1.0, 1.0), 1.0, 1.0, Budget::default()).unwrap();
        assert!((g.gamma_max - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(g.argmin_k, vec![0, 1]);
        let g = best_gamma(&n2(2.0, 1.0), 1.0, 3.0, Budget::default()).unwrap();
        assert_eq!(g.gamma_max, 0.0);
        assert_eq!(g.argmin_k, vec![1, -2]);
    }

    #[test]
    fn resonances() {
        let r = resonance_search(&n2(3.0, 1.0), 4.0, 0.0, Budget::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].k, vec![1, -3]);
        assert!((r[0].order - 10f64.sqrt()).abs() < 1e-15);
        assert!(resonance_search(&n2(1.0, PHI), 10.0, 0.0, Budget::default()).unwrap().is_empty());
        let r = resonance_search(&n2(1.0, 0.0), 2.0, 0.0, Budget::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].k, vec![0, 1]);
        assert_eq!(r[0].order, 1.0);
    }

    #[test]
    fn vanishing_gamma_excludes_nothing() {
        let p = DioParams::new(2, 2.0, 1e-9, Some(10.0)).unwrap();
        let m = complement_measure_estimate(&p, 10_000, 7, Budget::default()).unwrap();
        assert_eq!(m.fraction, 0.0);
        assert_eq!(m.stderr, 0.0);
    }

    #[test]
    fn estimator_is_reproducible() {
        let p = DioParams::new(2, 2.0, 0.05, Some(10.0)).unwrap();
        let a = complement_measure_estimate(&p, 2000, 42, Budget::default()).unwrap();
        let b = complement_measure_estimate(&p, 2000, 42, Budget::default()).unwrap();
        assert_eq!(a.fraction.to_bits(), b.fraction.to_bits());
        assert_eq!(a.excluded, b.excluded);
    }
}
