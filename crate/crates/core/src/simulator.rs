//! Brute-force filling-time measurement on a cell grid.
//!
//! The torus `[0,1)^n` is cut into `m^n` cubes of side `h = 1/m`. A cell is
//! marked once some orbit sample lies within `r = delta - h sqrt(n) / 2` of
//! its center; when every cell is marked, every point of the torus is within
//! `delta` of a sample, and samples lie on the orbit, so the sampled segment
//! is `delta`-dense.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::direction::DirectionVector;
use crate::error::{Error, Result};

/// Largest grid the simulator will allocate.
pub const MAX_CELLS: u64 = 1 << 30;

/// Distance in the quotient metric of `R^n / Z^n`.
///
/// # Panics
/// If `p` and `q` have different lengths.
pub fn torus_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "torus points of different dimension");
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| {
            let d = libm::fabs(a - b);
            let f = d - libm::floor(d);
            let d = f.min(1.0 - f);
            d * d
        })
        .sum();
    libm::sqrt(s)
}

/// Sampling parameters for [`empirical_fill_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FillOptions {
    pub dt: f64,
    pub max_time: f64,
    /// Requested cell side; the grid uses `1 / ceil(1 / h)`. Defaults to
    /// `delta / (2 sqrt(n))`.
    pub grid_side: Option<f64>,
}

impl FillOptions {
    /// `dt = delta / 10` and the default grid.
    pub fn for_delta(delta: f64, max_time: f64) -> Self {
        Self { dt: delta / 10.0, max_time, grid_side: None }
    }
}

/// Outcome of a simulated run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoverageResult {
    pub delta: f64,
    pub time_step: f64,
    /// Cell side actually used.
    pub grid_side: f64,
    /// Time of the first sample after which every cell is covered.
    pub fill_time: Option<f64>,
    /// Number of samples taken.
    pub samples: u64,
    pub uncovered_cells: u64,
    pub max_time: f64,
}

impl CoverageResult {
    pub fn filled(&self) -> bool {
        self.fill_time.is_some()
    }
}

/// Result of a static density check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DensityVerdict {
    Covered,
    /// The closed `delta`-ball around `center` holds no point of the set.
    EmptyBall {
        center: Vec<f64>,
    },
    /// The grid cell at `center` is not covered at the shrunken radius, but
    /// the `delta`-ball around it does meet the set.
    Inconclusive {
        center: Vec<f64>,
    },
}

fn check_dim(n: usize) -> Result<()> {
    if n != 2 && n != 3 {
        return Err(Error::InvalidInput(format!("grid simulation supports n = 2 or 3, got {n}")));
    }
    Ok(())
}

struct Grid {
    n: usize,
    m: i64,
    h: f64,
    radius: f64,
    bits: Vec<u64>,
    total: u64,
    covered: u64,
}

impl Grid {
    fn new(n: usize, delta: f64, grid_side: Option<f64>) -> Result<Self> {
        check_dim(n)?;
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidInput(format!("delta = {delta} must lie in (0, 1/2)")));
        }
        let sqrt_n = libm::sqrt(n as f64);
        let requested = grid_side.unwrap_or(delta / (2.0 * sqrt_n));
        if !(requested > 0.0 && requested.is_finite()) {
            return Err(Error::InvalidInput(format!("grid side {requested} must be positive")));
        }
        let m = libm::ceil(1.0 / requested);
        let total = libm::pow(m, n as f64);
        if total > MAX_CELLS as f64 {
            return Err(Error::InvalidInput(format!("grid of {m}^{n} cells exceeds the limit of {MAX_CELLS}")));
        }
        let h = 1.0 / m;
        let shrink = h * sqrt_n / 2.0;
        if delta <= shrink {
            return Err(Error::DeltaTooSmall { delta, min_delta: shrink });
        }
        let total = total as u64;
        Ok(Self {
            n,
            m: m as i64,
            h,
            // Absorbs rounding in the interval arithmetic below.
            radius: (delta - shrink) * (1.0 - 1e-12),
            bits: vec![0; total.div_ceil(64) as usize],
            total,
            covered: 0,
        })
    }

    fn lo_index(&self, x: f64) -> i64 {
        libm::ceil(x / self.h - 0.5) as i64
    }

    fn hi_index(&self, x: f64) -> i64 {
        libm::floor(x / self.h - 0.5) as i64
    }

    fn center(&self, i: i64) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    /// Unwrapped index interval of the last coordinate covered by a ball at
    /// `p` in the row whose leading coordinates are at squared distance `d2`.
    fn row(&self, p: f64, d2: f64) -> Option<(i64, i64)> {
        let w2 = self.radius * self.radius - d2;
        if w2 < 0.0 {
            return None;
        }
        let w = libm::sqrt(w2);
        let (lo, hi) = (self.lo_index(p - w), self.hi_index(p + w));
        (lo <= hi).then_some((lo, hi))
    }

    fn mark_span(&mut self, base: usize, lo: i64, hi: i64) {
        let hi = hi.min(lo + self.m - 1);
        for j in lo..=hi {
            let idx = base + j.rem_euclid(self.m) as usize;
            let (w, b) = (idx / 64, 1u64 << (idx % 64));
            if self.bits[w] & b == 0 {
                self.bits[w] |= b;
                self.covered += 1;
            }
        }
    }

    fn mark_diff(&mut self, base: usize, new: (i64, i64), old: Option<(i64, i64)>) {
        match old {
            Some((c, d)) if c <= new.1 && d >= new.0 => {
                if new.0 < c {
                    self.mark_span(base, new.0, c - 1);
                }
                if d < new.1 {
                    self.mark_span(base, d + 1, new.1);
                }
            }
            _ => self.mark_span(base, new.0, new.1),
        }
    }

    /// Marks the cells within the radius of `p` that were not already within
    /// the radius of `prev`. Both points must live in the same unwrapped
    /// frame.
    fn mark(&mut self, p: &[f64], prev: Option<&[f64]>) {
        let r = self.radius;
        let m = self.m;
        let d2_old = |c: f64, k: usize, prev: Option<&[f64]>| prev.map(|q| (c - q[k]) * (c - q[k]));
        for i in self.lo_index(p[0] - r)..=self.hi_index(p[0] + r) {
            let c0 = self.center(i);
            let d0 = (c0 - p[0]) * (c0 - p[0]);
            let o0 = d2_old(c0, 0, prev);
            let row0 = i.rem_euclid(m) as usize;
            if self.n == 2 {
                if let Some(new) = self.row(p[1], d0) {
                    let old = o0.and_then(|o| self.row(prev.unwrap()[1], o));
                    self.mark_diff(row0 * m as usize, new, old);
                }
                continue;
            }
            let w = libm::sqrt((r * r - d0).max(0.0));
            for j in self.lo_index(p[1] - w)..=self.hi_index(p[1] + w) {
                let c1 = self.center(j);
                let d1 = d0 + (c1 - p[1]) * (c1 - p[1]);
                if let Some(new) = self.row(p[2], d1) {
                    let old = o0.zip(d2_old(c1, 1, prev)).and_then(|(a, b)| self.row(prev.unwrap()[2], a + b));
                    let base = (row0 * m as usize + j.rem_euclid(m) as usize) * m as usize;
                    self.mark_diff(base, new, old);
                }
            }
        }
    }

    fn complete(&self) -> bool {
        self.covered == self.total
    }

    fn first_uncovered(&self) -> Option<Vec<f64>> {
        let (w, word) = self.bits.iter().enumerate().find(|(w, &word)| {
            let live = (self.total - 64 * *w as u64).min(64);
            let mask = if live == 64 { u64::MAX } else { (1u64 << live) - 1 };
            word & mask != mask
        })?;
        let mut idx = (w * 64 + (!*word).trailing_zeros() as usize) as i64;
        let mut center = vec![0.0; self.n];
        for c in center.iter_mut().rev() {
            *c = self.center(idx % self.m);
            idx /= self.m;
        }
        Some(center)
    }
}

/// Position `theta0 + k dt alpha` without reduction mod 1.
fn unwrapped(alpha: &[f64], theta0: &[f64], k: u64, dt: f64) -> Vec<f64> {
    let t = k as f64 * dt;
    alpha.iter().zip(theta0).map(|(a, th)| libm::fma(t, *a, *th)).collect()
}

/// Orbit samples `theta0 + k dt alpha mod 1` for `k = 0..=steps`, as used by
/// [`empirical_fill_time`].
pub fn orbit_samples(alpha: &DirectionVector, theta0: &[f64], dt: f64, steps: u64) -> Vec<Vec<f64>> {
    (0..=steps)
        .map(|k| unwrapped(alpha.coords(), theta0, k, dt).into_iter().map(|x| x - libm::floor(x)).collect())
        .collect()
}

/// Marches the orbit from `theta0` in steps of `dt` until the grid is fully
/// covered or `max_time` is reached.
///
/// A reported fill time certifies that the samples up to that time, hence
/// the orbit segment, are `delta`-dense.
pub fn empirical_fill_time(
    alpha: &DirectionVector,
    theta0: &[f64],
    delta: f64,
    options: &FillOptions,
) -> Result<CoverageResult> {
    let n = alpha.dim();
    if theta0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: theta0.len() });
    }
    if theta0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("theta0 has non-finite coordinates".into()));
    }
    let FillOptions { dt, max_time, grid_side } = *options;
    if !(dt > 0.0 && dt.is_finite()) || !(max_time >= 0.0 && max_time.is_finite()) {
        return Err(Error::InvalidInput(format!("need dt > 0 and max_time >= 0, got {dt}, {max_time}")));
    }
    let mut grid = Grid::new(n, delta, grid_side)?;
    let steps = libm::floor(max_time / dt * (1.0 + 1e-12)) as u64;
    let a = alpha.coords();

    let mut fill_time = None;
    let mut samples = 0;
    for k in 0..=steps {
        let p = unwrapped(a, theta0, k, dt);
        let shift: Vec<f64> = p.iter().map(|x| libm::floor(*x)).collect();
        let cur: Vec<f64> = p.iter().zip(&shift).map(|(x, s)| x - s).collect();
        let prev: Option<Vec<f64>> =
            (k > 0).then(|| unwrapped(a, theta0, k - 1, dt).iter().zip(&shift).map(|(x, s)| x - s).collect());
        grid.mark(&cur, prev.as_deref());
        samples += 1;
        if grid.complete() {
            fill_time = Some(k as f64 * dt);
            break;
        }
    }
    Ok(CoverageResult {
        delta,
        time_step: dt,
        grid_side: grid.h,
        fill_time,
        samples,
        uncovered_cells: grid.total - grid.covered,
        max_time,
    })
}

/// Grid certification of `delta`-density for a fixed point set.
pub fn verify_delta_dense(points: &[Vec<f64>], delta: f64, grid_side: Option<f64>) -> Result<DensityVerdict> {
    let n = match points.first() {
        Some(p) => p.len(),
        None => return Err(Error::InvalidInput("empty point set".into())),
    };
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    let mut grid = Grid::new(n, delta, grid_side)?;
    for p in points {
        let p: Vec<f64> = p.iter().map(|x| x - libm::floor(*x)).collect();
        grid.mark(&p, None);
        if grid.complete() {
            return Ok(DensityVerdict::Covered);
        }
    }
    let center = grid.first_uncovered().expect("incomplete grid has an uncovered cell");
    if points.iter().all(|p| torus_distance(&center, p) > delta) {
        Ok(DensityVerdict::EmptyBall { center })
    } else {
        Ok(DensityVerdict::Inconclusive { center })
    }
}

/// The resonant direction `N(q, 1)` with its filling radius and time.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResonantReference {
    pub q: u32,
    pub alpha: DirectionVector,
    /// `1 / (2 sqrt(q^2 + 1))`
    pub delta: f64,
    /// `sqrt(q^2 + 1)`
    pub expected_time: f64,
}

pub fn resonant_reference(q: u32) -> Result<ResonantReference> {
    if q == 0 {
        return Err(Error::InvalidInput("q must be at least 1".into()));
    }
    let qf = q as f64;
    let len = libm::hypot(qf, 1.0);
    Ok(ResonantReference {
        q,
        alpha: DirectionVector::new(vec![qf / len, 1.0 / len])?,
        delta: 1.0 / (2.0 * len),
        expected_time: len,
    })
}

/// Simulation settings for a resonant reference: the grid shrink
/// `h sqrt(n) / 2` is at most `delta / 800`, `delta` is raised by twice that
/// shrink, and `dt = delta / 10`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResonantSetup {
    pub delta: f64,
    pub options: FillOptions,
}

impl ResonantReference {
    pub fn setup(&self) -> ResonantSetup {
        let shrink = self.delta / 800.0;
        let n = self.alpha.dim() as f64;
        let delta = self.delta + 2.0 * shrink;
        ResonantSetup {
            delta,
            options: FillOptions {
                dt: delta / 10.0,
                max_time: 2.0 * self.expected_time,
                grid_side: Some(2.0 * shrink / libm::sqrt(n)),
            },
        }
    }
}
