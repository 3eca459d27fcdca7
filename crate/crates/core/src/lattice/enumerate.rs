//! Lattice point enumeration in axially symmetric bodies.
//!
//! The bodies of interest are long needles or flat pancakes (axis-to-radius
//! ratios beyond 10^10 occur), so a coordinate box around the body is far too
//! large to scan. Instead `Z^n` is embedded as `p -> (sqrt(wa) u, sqrt(wr) v)`
//! where `u`, `v` are the axial and radial parts of `p`; the image basis is
//! LLL-reduced (integer transforms tracked exactly, embeddings recomputed from
//! the integer vectors in double-double precision) and Fincke-Pohst
//! enumeration lists every coefficient vector inside the bounding ellipsoid.
//! Candidates are then filtered by their exact gauge.

use alloc::vec;
use alloc::vec::Vec;

use super::body::AxialBody;
use crate::error::{Error, Result};
use crate::num::{cmp_ranked, is_canonical};

/// Node budget for a single enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(100_000_000)
    }
}

/// Absolute slack on gauge comparisons.
pub const GAUGE_EPS: f64 = 1e-12;

/// Integer vectors in enumeration are kept below this magnitude so that they
/// convert to `f64` exactly.
const EXACT_LIMIT: i64 = 1 << 52;

const LLL_DELTA: f64 = 0.99;
const LLL_MAX_STEPS: usize = 200_000;

/// A nonzero lattice point with its dilation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugedPoint {
    pub dilation: f64,
    pub k: Vec<i64>,
}

fn embed<B: AxialBody + ?Sized>(body: &B, p: &[i64], out: &mut [f64], scratch: &mut [f64]) {
    let u = body.axis().split_into(p, scratch);
    let sa = libm::sqrt(body.axial_weight());
    let sr = libm::sqrt(body.radial_weight());
    out[0] = sa * u;
    for (o, &v) in out[1..].iter_mut().zip(scratch.iter()) {
        *o = sr * v;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Gso {
    bstar2: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

/// Modified Gram-Schmidt on the embedded basis.
fn gso(emb: &[Vec<f64>]) -> Result<Gso> {
    let n = emb.len();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut bstar2 = vec![0.0; n];
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut v = emb[i].clone();
        for j in 0..i {
            let m = dot(&v, &bstar[j]) / bstar2[j];
            mu[i][j] = m;
            for (x, y) in v.iter_mut().zip(&bstar[j]) {
                *x -= m * y;
            }
        }
        let b2 = dot(&v, &v);
        if b2.is_nan() || b2 <= 0.0 || !b2.is_finite() {
            return Err(Error::Internal(
                "Gram-Schmidt breakdown: body too ill-conditioned for double-double embedding".into(),
            ));
        }
        bstar2[i] = b2;
        mu[i][i] = 1.0;
        bstar.push(v);
    }
    Ok(Gso { bstar2, mu })
}

/// An LLL-reduced basis of `Z^n` with respect to a body's quadratic form.
pub(crate) struct ReducedBasis {
    pub vectors: Vec<Vec<i64>>,
    bstar2: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

fn sub_multiple(target: &mut [i64], q: i64, src: &[i64]) -> Result<()> {
    for (t, &s) in target.iter_mut().zip(src) {
        let v = (*t as i128) - (q as i128) * (s as i128);
        if v.abs() >= EXACT_LIMIT as i128 {
            return Err(Error::Overflow { entry: v });
        }
        *t = v as i64;
    }
    Ok(())
}

pub(crate) fn reduce<B: AxialBody + ?Sized>(body: &B) -> Result<ReducedBasis> {
    let n = body.dim();
    let mut basis: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut e = vec![0i64; n];
            e[i] = 1;
            e
        })
        .collect();
    let mut scratch = vec![0.0; n];
    let mut emb: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| {
            let mut out = vec![0.0; n + 1];
            embed(body, b, &mut out, &mut scratch);
            out
        })
        .collect();

    let mut k = 1;
    let mut steps = 0;
    while k < n {
        steps += 1;
        if steps > LLL_MAX_STEPS {
            return Err(Error::Internal("LLL reduction did not converge".into()));
        }
        // Size reduction of basis[k]; repeated because huge mu are only
        // approximately known until the vector has been shortened.
        for _ in 0..64 {
            let g = gso(&emb[..=k])?;
            let mut changed = false;
            let mut mu_k = g.mu[k].clone();
            for j in (0..k).rev() {
                let q = libm::round(mu_k[j]);
                if q != 0.0 {
                    if q.abs() >= EXACT_LIMIT as f64 {
                        return Err(Error::Overflow { entry: q as i128 });
                    }
                    let qi = q as i64;
                    let (head, tail) = basis.split_at_mut(k);
                    sub_multiple(&mut tail[0], qi, &head[j])?;
                    for l in 0..=j {
                        mu_k[l] -= q * g.mu[j][l];
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            embed(body, &basis[k], &mut emb[k], &mut scratch);
        }
        let g = gso(&emb[..=k])?;
        let m = g.mu[k][k - 1];
        if g.bstar2[k] >= (LLL_DELTA - m * m) * g.bstar2[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            emb.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    let g = gso(&emb)?;
    Ok(ReducedBasis { vectors: basis, bstar2: g.bstar2, mu: g.mu })
}

struct Walk<'a, B: AxialBody + ?Sized> {
    body: &'a B,
    red: &'a ReducedBasis,
    radius2: f64,
    lambda: f64,
    canonical_only: bool,
    budget: u64,
    nodes: u64,
    coeffs: Vec<i64>,
    out: Vec<GaugedPoint>,
}

impl<B: AxialBody + ?Sized> Walk<'_, B> {
    fn level(&mut self, i: usize, partial: f64) -> Result<()> {
        let n = self.coeffs.len();
        let center: f64 = -(i + 1..n).map(|j| self.red.mu[j][i] * self.coeffs[j] as f64).sum::<f64>();
        let room = (self.radius2 - partial).max(0.0);
        let rad = libm::sqrt(room / self.red.bstar2[i]);
        let rad = rad * (1.0 + 1e-9) + 1e-9;
        let lo = libm::ceil(center - rad);
        let hi = libm::floor(center + rad);
        if lo > hi {
            return Ok(());
        }
        if hi - lo > 1e12 || lo.abs() >= EXACT_LIMIT as f64 || hi.abs() >= EXACT_LIMIT as f64 {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        let (lo, hi) = (lo as i64, hi as i64);
        for c in lo..=hi {
            let d = c as f64 - center;
            let next = partial + d * d * self.red.bstar2[i];
            if next > self.radius2 * (1.0 + 1e-9) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            self.coeffs[i] = c;
            if i == 0 {
                self.visit()?;
            } else {
                self.level(i - 1, next)?;
            }
        }
        self.coeffs[i] = 0;
        Ok(())
    }

    fn visit(&mut self) -> Result<()> {
        if self.coeffs.iter().all(|&c| c == 0) {
            return Ok(());
        }
        let n = self.coeffs.len();
        let mut p = vec![0i128; n];
        for (c, v) in self.coeffs.iter().zip(&self.red.vectors) {
            if *c == 0 {
                continue;
            }
            for (pi, &vi) in p.iter_mut().zip(v) {
                *pi += (*c as i128) * (vi as i128);
            }
        }
        if let Some(&big) = p.iter().find(|v| v.abs() >= EXACT_LIMIT as i128) {
            return Err(Error::Overflow { entry: big });
        }
        let k: Vec<i64> = p.into_iter().map(|v| v as i64).collect();
        if self.canonical_only && !is_canonical(&k) {
            return Ok(());
        }
        let dilation = self.body.gauge(&k);
        if dilation <= self.lambda + GAUGE_EPS {
            self.out.push(GaugedPoint { dilation, k });
        }
        Ok(())
    }
}

pub(crate) fn enumerate_reduced<B: AxialBody + ?Sized>(
    body: &B,
    red: &ReducedBasis,
    lambda: f64,
    canonical_only: bool,
    budget: Budget,
) -> Result<Vec<GaugedPoint>> {
    let n = body.dim();
    let mut walk = Walk {
        body,
        red,
        radius2: body.slack() * lambda * lambda * (1.0 + 1e-9),
        lambda,
        canonical_only,
        budget: budget.0,
        nodes: 0,
        coeffs: vec![0; n],
        out: Vec::new(),
    };
    walk.level(n - 1, 0.0)?;
    let mut out = walk.out;
    out.sort_by(|a, b| cmp_ranked((a.dilation, &a.k), (b.dilation, &b.k)));
    Ok(out)
}

/// All nonzero `k` in `Z^n` with dilation at most `lambda` (plus
/// [`GAUGE_EPS`]), ordered by dilation, then norm, then lexicographically.
pub fn lattice_points_in<B: AxialBody + ?Sized>(body: &B, lambda: f64, budget: Budget) -> Result<Vec<GaugedPoint>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput("dilation must be positive and finite".into()));
    }
    let red = reduce(body)?;
    enumerate_reduced(body, &red, lambda, false, budget)
}

/// As [`lattice_points_in`], keeping only the representative of each pair
/// `{k, -k}` whose first nonzero entry is positive.
pub fn lattice_points_in_canonical<B: AxialBody + ?Sized>(
    body: &B,
    lambda: f64,
    budget: Budget,
) -> Result<Vec<GaugedPoint>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput("dilation must be positive and finite".into()));
    }
    let red = reduce(body)?;
    enumerate_reduced(body, &red, lambda, true, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::DirectionVector;
    use crate::lattice::body::{CylinderBody, DiamondBody};

    fn axis(v: &[f64]) -> DirectionVector {
        DirectionVector::normalize(v).unwrap()
    }

    fn ks(points: &[GaugedPoint]) -> Vec<Vec<i64>> {
        points.iter().map(|p| p.k.clone()).collect()
    }

    #[test]
    fn axis_aligned_cylinder_at_unit_dilation() {
        let c = CylinderBody::new(axis(&[1.0, 0.0]), 3.0, 0.4).unwrap();
        let mut got = ks(&lattice_points_in(&c, 1.0, Budget::default()).unwrap());
        got.sort();
        let mut want = vec![vec![1, 0], vec![-1, 0], vec![2, 0], vec![-2, 0], vec![3, 0], vec![-3, 0]];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn small_dilation_is_empty() {
        let c = CylinderBody::new(axis(&[1.0, 0.0]), 3.0, 0.4).unwrap();
        assert!(lattice_points_in(&c, 0.3, Budget::default()).unwrap().is_empty());
    }

    #[test]
    fn output_is_sorted_and_symmetric() {
        let c = CylinderBody::new(axis(&[0.3, 0.5, 0.8]), 4.0, 1.1).unwrap();
        let pts = lattice_points_in(&c, 1.5, Budget::default()).unwrap();
        assert!(pts.windows(2).all(|w| w[0].dilation <= w[1].dilation));
        for p in &pts {
            let neg: Vec<i64> = p.k.iter().map(|v| -v).collect();
            assert!(pts.iter().any(|q| q.k == neg));
        }
        let canon = lattice_points_in_canonical(&c, 1.5, Budget::default()).unwrap();
        assert_eq!(canon.len() * 2, pts.len());
    }

    #[test]
    fn extreme_needle_is_tractable() {
        // axial 4e8, radial 1/274: far beyond any box scan.
        let a = axis(&[0.31, 0.57, 0.76]);
        let c = CylinderBody::new(a, 275f64.powi(3) / 0.05, 1.0 / 274.0).unwrap();
        let red = reduce(&c).unwrap();
        let pts = enumerate_reduced(&c, &red, 0.5, true, Budget::default()).unwrap();
        for p in &pts {
            assert!(p.dilation <= 0.5 + GAUGE_EPS);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let d = DiamondBody::new(axis(&[1.0, 1.0]), 0.01, 0.01).unwrap();
        let r = lattice_points_in(&d, 1.0, Budget(1000));
        assert_eq!(r, Err(Error::BudgetExceeded { budget: 1000 }));
    }
}
