use alloc::format;
use alloc::vec::Vec;

use super::body::AxialBody;
use super::enumerate::{enumerate_reduced, reduce, Budget};
use crate::error::{Error, Result};
use crate::intmat;

/// Successive minima `lambda_1 <= ... <= lambda_n` of a body with respect to
/// `Z^n`, with linearly independent witnesses `k_j` of dilation `lambda_j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MinimaResult {
    pub lambdas: Vec<f64>,
    pub witnesses: Vec<Vec<i64>>,
}

impl MinimaResult {
    pub fn last(&self) -> f64 {
        *self.lambdas.last().expect("minima of an empty body")
    }
}

/// Computes the successive minima exactly (up to the floating evaluation of
/// the gauge).
///
/// Lattice points are scanned in increasing dilation and picked greedily when
/// they are independent of the points already picked; for a linear matroid
/// this greedy order attains every minimum. The scan radius starts at the
/// shortest reduced basis vector and doubles until `n` independent points are
/// found; the reduced basis itself bounds `lambda_n` from above, so the loop
/// terminates.
pub fn successive_minima<B: AxialBody + ?Sized>(body: &B, budget: Budget) -> Result<MinimaResult> {
    let n = body.dim();
    let red = reduce(body)?;
    let gauges: Vec<f64> = red.vectors.iter().map(|v| body.gauge(v)).collect();
    let upper = gauges.iter().cloned().fold(0.0, f64::max);
    let mut radius = gauges.iter().cloned().fold(f64::INFINITY, f64::min);

    loop {
        let points = enumerate_reduced(body, &red, radius, true, budget)?;
        let mut witnesses: Vec<Vec<i64>> = Vec::with_capacity(n);
        let mut lambdas = Vec::with_capacity(n);
        for p in points {
            witnesses.push(p.k);
            if intmat::rank(&witnesses)? == witnesses.len() {
                lambdas.push(p.dilation);
                if witnesses.len() == n {
                    return Ok(MinimaResult { lambdas, witnesses });
                }
            } else {
                witnesses.pop();
            }
        }
        if radius >= upper {
            return Err(Error::Internal(format!(
                "only {} independent points within the reduced-basis bound {upper}",
                witnesses.len()
            )));
        }
        radius = (2.0 * radius).min(upper);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::DirectionVector;
    use crate::lattice::body::{CylinderBody, DiamondBody};
    use alloc::vec;

    #[test]
    fn axis_aligned_cylinder() {
        let a = DirectionVector::new(vec![1.0, 0.0]).unwrap();
        let c = CylinderBody::new(a, 3.0, 0.4).unwrap();
        let m = successive_minima(&c, Budget::default()).unwrap();
        assert_eq!(m.lambdas, vec![1.0 / 3.0, 2.5]);
        assert_eq!(m.witnesses, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn axis_aligned_diamond() {
        let a = DirectionVector::new(vec![1.0, 0.0]).unwrap();
        let d = DiamondBody::new(a, 3.0, 0.4).unwrap();
        let m = successive_minima(&d, Budget::default()).unwrap();
        assert_eq!(m.lambdas, vec![0.4, 3.0]);
        assert_eq!(m.witnesses, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn scaling_divides_minima() {
        let a = DirectionVector::normalize(&[0.2, 0.9, 0.4]).unwrap();
        let c = CylinderBody::new(a, 5.0, 0.7).unwrap();
        let m1 = successive_minima(&c, Budget::default()).unwrap();
        let m2 = successive_minima(&c.scaled(4.0).unwrap(), Budget::default()).unwrap();
        for (l1, l2) in m1.lambdas.iter().zip(&m2.lambdas) {
            assert!((l1 / 4.0 - l2).abs() <= 1e-12 * l1);
        }
    }
}
