use alloc::format;
use alloc::vec::Vec;

use super::body::AxialBody;
use super::enumerate::{lattice_points_in_canonical, Budget};
use super::minima::MinimaResult;
use crate::error::{Error, Result};
use crate::intmat;

/// Largest coordinate magnitude accepted for basis candidates.
pub const ENTRY_LIMIT: i64 = 1 << 30;

/// `n` integer column vectors forming a basis of `Z^n` (determinant ±1).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegerBasis {
    columns: Vec<Vec<i64>>,
}

impl IntegerBasis {
    pub fn new(columns: Vec<Vec<i64>>) -> Result<Self> {
        let n = columns.len();
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        let det = intmat::determinant(&columns)?;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self { columns })
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn determinant(&self) -> i128 {
        intmat::determinant(&self.columns).expect("validated at construction")
    }

    /// Negate column `j`.
    pub fn flip(&mut self, j: usize) {
        self.columns[j].iter_mut().for_each(|v| *v = -*v);
    }

    /// Coordinates of an integer vector in this basis: the exact inverse as
    /// rows.
    pub fn inverse(&self) -> Vec<Vec<i128>> {
        intmat::unimodular_inverse(&self.columns).expect("validated at construction")
    }
}

const BACKTRACK_NODES: usize = 1_000_000;

fn extends(chosen: &[Vec<i64>]) -> Result<bool> {
    Ok(intmat::rank(chosen)? == chosen.len() && intmat::is_primitive(chosen)?)
}

fn backtrack(
    candidates: &[Vec<i64>],
    start: usize,
    n: usize,
    chosen: &mut Vec<Vec<i64>>,
    nodes: &mut usize,
) -> Result<bool> {
    if chosen.len() == n {
        return Ok(true);
    }
    for i in start..candidates.len() {
        if candidates.len() - i < n - chosen.len() {
            break;
        }
        *nodes += 1;
        if *nodes > BACKTRACK_NODES {
            return Ok(false);
        }
        chosen.push(candidates[i].clone());
        if extends(chosen)? && backtrack(candidates, i + 1, n, chosen, nodes)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// Extracts a basis of `Z^n` from `n * lambda_n * body`.
///
/// Returns the minima witnesses unchanged when they are already unimodular.
/// Otherwise candidates are taken in increasing dilation and kept whenever
/// the kept set stays primitive (extendable to a basis, i.e. the gcd of its
/// maximal minors is 1); a depth-first search over the same list is the
/// fallback when the greedy pass gets stuck.
pub fn extract_zbasis<B: AxialBody + ?Sized>(body: &B, minima: &MinimaResult, budget: Budget) -> Result<IntegerBasis> {
    let n = body.dim();
    if minima.witnesses.len() != n || minima.lambdas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: minima.witnesses.len() });
    }
    if intmat::determinant(&minima.witnesses)?.abs() == 1 {
        return IntegerBasis::new(minima.witnesses.clone());
    }

    let limit = n as f64 * minima.last();
    let candidates: Vec<Vec<i64>> = lattice_points_in_canonical(body, limit, budget)?
        .into_iter()
        .map(|p| p.k)
        .filter(|k| k.iter().all(|v| v.abs() <= ENTRY_LIMIT))
        .collect();

    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(n);
    for c in &candidates {
        chosen.push(c.clone());
        if !extends(&chosen)? {
            chosen.pop();
        } else if chosen.len() == n {
            return IntegerBasis::new(chosen);
        }
    }

    chosen.clear();
    let mut nodes = 0;
    if backtrack(&candidates, 0, n, &mut chosen, &mut nodes)? {
        return IntegerBasis::new(chosen);
    }
    Err(Error::Internal(format!("no unimodular subset among {} candidates within dilation {limit}", candidates.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::DirectionVector;
    use crate::lattice::body::CylinderBody;
    use crate::lattice::minima::successive_minima;
    use alloc::vec;

    #[test]
    fn unimodular_witnesses_pass_through() {
        let c = CylinderBody::new(DirectionVector::new(vec![1.0, 0.0]).unwrap(), 3.0, 0.4).unwrap();
        let m = successive_minima(&c, Budget::default()).unwrap();
        let b = extract_zbasis(&c, &m, Budget::default()).unwrap();
        assert_eq!(b.columns(), &m.witnesses[..]);
    }

    #[test]
    fn sublattice_witnesses_are_repaired() {
        let c = CylinderBody::new(DirectionVector::new(vec![1.0, 0.0]).unwrap(), 3.0, 0.4).unwrap();
        let m = MinimaResult { lambdas: vec![2.0 / 3.0, 2.5], witnesses: vec![vec![2, 0], vec![0, 1]] };
        let b = extract_zbasis(&c, &m, Budget::default()).unwrap();
        assert!(b.columns().contains(&vec![1, 0]));
        assert_eq!(b.determinant().abs(), 1);
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(IntegerBasis::new(vec![vec![1, 1], vec![1, -1]]), Err(Error::NotUnimodular { det: -2 })));
    }

    #[test]
    fn backtracking_finds_basis_when_greedy_stalls() {
        // Greedy commits to (1,0); neither later vector completes it, but
        // det[(1,2),(1,3)] = 1.
        let cands = vec![vec![1, 0], vec![1, 2], vec![1, 3]];
        let mut chosen = Vec::new();
        for c in &cands {
            chosen.push(c.clone());
            if !extends(&chosen).unwrap() {
                chosen.pop();
            }
        }
        assert_eq!(chosen, vec![vec![1, 0]]);

        chosen.clear();
        let mut nodes = 0;
        assert!(backtrack(&cands, 0, 2, &mut chosen, &mut nodes).unwrap());
        assert_eq!(chosen, vec![vec![1, 2], vec![1, 3]]);
    }
}
