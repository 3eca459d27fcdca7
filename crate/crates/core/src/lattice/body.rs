use crate::direction::DirectionVector;
use crate::error::{Error, Result};

/// A compact convex body symmetric about the origin and about its axis,
/// described by its gauge function.
///
/// Enumeration uses the quadratic form
/// `Q(p) = axial_weight * u^2 + radial_weight * |v|^2`, where `u` and `v` are
/// the axial and radial parts of `p`, together with a constant `slack` such
/// that `gauge(p) <= lambda` implies `Q(p) <= slack * lambda^2`.
pub trait AxialBody {
    fn axis(&self) -> &DirectionVector;

    /// Gauge from the axial coordinate magnitude and the radial norm.
    fn gauge_parts(&self, axial: f64, radial: f64) -> f64;

    fn axial_weight(&self) -> f64;
    fn radial_weight(&self) -> f64;
    fn slack(&self) -> f64;

    /// Upper bound on `|p|` for points with `gauge(p) <= lambda`.
    fn norm_bound(&self, lambda: f64) -> f64;

    fn dim(&self) -> usize {
        self.axis().dim()
    }

    /// Smallest `lambda` with `p` in `lambda * body`.
    fn gauge(&self, p: &[i64]) -> f64 {
        let (u, v) = self.axis().split_norms(p);
        self.gauge_parts(u, v)
    }
}

fn check_extents(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidInput(alloc::format!(
            "body half-extents must be positive and finite (got {a}, {b})"
        )));
    }
    Ok(())
}

/// Solid cylinder `{x alpha + y : y ⟂ alpha, |x| <= a, |y| <= b}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CylinderBody {
    axis: DirectionVector,
    axial_half: f64,
    radial_half: f64,
}

impl CylinderBody {
    pub fn new(axis: DirectionVector, axial_half: f64, radial_half: f64) -> Result<Self> {
        check_extents(axial_half, radial_half)?;
        Ok(Self { axis, axial_half, radial_half })
    }

    pub fn axial_half(&self) -> f64 {
        self.axial_half
    }

    pub fn radial_half(&self) -> f64 {
        self.radial_half
    }

    /// Membership of a real point, with absolute slack `1e-12`.
    pub fn contains(&self, p: &[f64]) -> bool {
        let (u, v) = real_split(&self.axis, p);
        u <= self.axial_half + 1e-12 && v <= self.radial_half + 1e-12
    }

    /// Scale both half-extents by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.axis.clone(), self.axial_half * s, self.radial_half * s)
    }
}

impl AxialBody for CylinderBody {
    fn axis(&self) -> &DirectionVector {
        &self.axis
    }
    fn gauge_parts(&self, axial: f64, radial: f64) -> f64 {
        (axial / self.axial_half).max(radial / self.radial_half)
    }
    fn axial_weight(&self) -> f64 {
        1.0 / (self.axial_half * self.axial_half)
    }
    fn radial_weight(&self) -> f64 {
        1.0 / (self.radial_half * self.radial_half)
    }
    fn slack(&self) -> f64 {
        2.0
    }
    fn norm_bound(&self, lambda: f64) -> f64 {
        lambda * libm::hypot(self.axial_half, self.radial_half)
    }
}

/// Double cone `{p : a |p.alpha| + b |p_perp| <= 1}`: the polar body of
/// `CylinderBody(alpha, a, b)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiamondBody {
    axis: DirectionVector,
    axial_half: f64,
    radial_half: f64,
}

impl DiamondBody {
    pub fn new(axis: DirectionVector, axial_half: f64, radial_half: f64) -> Result<Self> {
        check_extents(axial_half, radial_half)?;
        Ok(Self { axis, axial_half, radial_half })
    }

    pub fn axial_half(&self) -> f64 {
        self.axial_half
    }

    pub fn radial_half(&self) -> f64 {
        self.radial_half
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let (u, v) = real_split(&self.axis, p);
        self.axial_half * u + self.radial_half * v <= 1.0 + 1e-12
    }

    /// Gauge of a real point.
    pub fn gauge_real(&self, p: &[f64]) -> f64 {
        let (u, v) = real_split(&self.axis, p);
        self.axial_half * u + self.radial_half * v
    }

    /// Polar of the diamond: the cylinder it came from.
    pub fn polar(&self) -> CylinderBody {
        CylinderBody { axis: self.axis.clone(), axial_half: self.axial_half, radial_half: self.radial_half }
    }
}

impl AxialBody for DiamondBody {
    fn axis(&self) -> &DirectionVector {
        &self.axis
    }
    fn gauge_parts(&self, axial: f64, radial: f64) -> f64 {
        self.axial_half * axial + self.radial_half * radial
    }
    fn axial_weight(&self) -> f64 {
        self.axial_half * self.axial_half
    }
    fn radial_weight(&self) -> f64 {
        self.radial_half * self.radial_half
    }
    fn slack(&self) -> f64 {
        1.0
    }
    fn norm_bound(&self, lambda: f64) -> f64 {
        lambda / self.axial_half.min(self.radial_half)
    }
}

/// `(|p.alpha|, |p_perp|)` for a real point.
pub(crate) fn real_split(axis: &DirectionVector, p: &[f64]) -> (f64, f64) {
    let a = axis.coords();
    let u: f64 = a.iter().zip(p).map(|(x, y)| x * y).sum();
    let v2: f64 = p
        .iter()
        .zip(a)
        .map(|(pi, ai)| {
            let d = pi - u * ai;
            d * d
        })
        .sum();
    (u.abs(), libm::sqrt(v2))
}

/// Exact polar body of a cylinder.
pub fn polar_body(body: &CylinderBody) -> DiamondBody {
    DiamondBody { axis: body.axis.clone(), axial_half: body.axial_half, radial_half: body.radial_half }
}

/// The coreciprocal cylinder `CylinderBody(alpha, 1/a, 1/b)`, which contains
/// the exact polar.
pub fn coreciprocal_cylinder(body: &CylinderBody) -> CylinderBody {
    CylinderBody { axis: body.axis.clone(), axial_half: 1.0 / body.axial_half, radial_half: 1.0 / body.radial_half }
}
