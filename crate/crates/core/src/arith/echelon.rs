//! Sparse row echelon forms with provenance.
//!
//! Every stored row remembers how it was obtained as a combination of the
//! labelled input vectors. Reducing a vector against the basis therefore
//! yields both the residual and, when the residual vanishes, the unique
//! expression of the vector in terms of the inserted elements. The support of
//! that expression is the fundamental circuit used by the partition routines.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::scalar::Scalar;

/// Sparse vector: `(column, value)` pairs, strictly increasing columns, no zeros.
pub type SparseRow<S> = Vec<(usize, S)>;

/// `a + k * b` for sparse rows.
pub fn axpy<S: Scalar>(a: &[(usize, S)], k: &S, b: &[(usize, S)]) -> SparseRow<S> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|x| x.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|x| x.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            let v = k.mul(&b[j].1);
            if !v.is_zero() {
                out.push((cb, v));
            }
            j += 1;
        } else {
            let v = a[i].1.add(&k.mul(&b[j].1));
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale_row<S: Scalar>(a: &[(usize, S)], k: &S) -> SparseRow<S> {
    a.iter()
        .filter_map(|(c, v)| {
            let w = v.mul(k);
            (!w.is_zero()).then_some((*c, w))
        })
        .collect()
}

#[derive(Clone, Debug)]
struct Row<S> {
    vec: SparseRow<S>,
    /// The row as a combination of inserted labels.
    comb: SparseRow<S>,
}

#[derive(Clone, Debug)]
pub struct Echelon<S> {
    rows: Vec<Row<S>>,
    pivots: BTreeMap<usize, usize>,
    labels: Vec<usize>,
}

impl<S> Default for Echelon<S> {
    fn default() -> Self {
        Echelon {
            rows: Vec::new(),
            pivots: BTreeMap::new(),
            labels: Vec::new(),
        }
    }
}

/// Outcome of reducing a vector against an [`Echelon`].
pub struct Reduction<S> {
    pub residual: SparseRow<S>,
    /// `v = residual + sum comb[label] * element[label]`.
    pub comb: SparseRow<S>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Labels whose vectors were independent when inserted.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn reduce(&self, v: &[(usize, S)]) -> Reduction<S> {
        let mut residual: SparseRow<S> = v.to_vec();
        let mut comb: SparseRow<S> = Vec::new();
        let mut from_col = 0usize;
        loop {
            let hit = residual
                .iter()
                .find(|(c, _)| *c >= from_col && self.pivots.contains_key(c))
                .map(|(c, x)| (*c, x.clone()));
            let Some((col, coeff)) = hit else { break };
            let row = &self.rows[self.pivots[&col]];
            let neg = coeff.neg();
            residual = axpy(&residual, &neg, &row.vec);
            comb = axpy(&comb, &coeff, &row.comb);
            from_col = col + 1;
        }
        Reduction { residual, comb }
    }

    pub fn is_dependent(&self, v: &[(usize, S)]) -> bool {
        self.reduce(v).residual.is_empty()
    }

    /// Inserts `v` under `label`. Returns `false` (and leaves the basis
    /// unchanged) if `v` lies in the current span.
    pub fn insert(&mut self, label: usize, v: &[(usize, S)]) -> bool {
        let Reduction { residual, comb } = self.reduce(v);
        self.insert_reduced(label, residual, comb)
    }

    fn insert_reduced(&mut self, label: usize, residual: SparseRow<S>, comb: SparseRow<S>) -> bool {
        let Some((pivot, pv)) = residual.first().cloned() else {
            return false;
        };
        let inv = pv.one_like().div(&pv);
        let vec = scale_row(&residual, &inv);
        // residual = v - comb·elements, so the new row is (e_label - comb) / pv.
        let unit: SparseRow<S> = alloc::vec![(label, pv.one_like())];
        let neg_one = pv.one_like().neg();
        let comb = scale_row(&axpy(&unit, &neg_one, &comb), &inv);
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(Row { vec, comb });
        self.labels.push(label);
        true
    }
}

/// Rank of a list of sparse rows.
pub fn rank_of<'a, S: Scalar + 'a>(rows: impl IntoIterator<Item = &'a SparseRow<S>>) -> usize {
    let mut e = Echelon::new();
    for (i, r) in rows.into_iter().enumerate() {
        e.insert(i, r);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Q;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn row(v: &[i64]) -> SparseRow<Q> {
        v.iter()
            .enumerate()
            .filter(|(_, x)| **x != 0)
            .map(|(i, x)| (i, q(*x)))
            .collect()
    }

    #[test]
    fn circuit_is_support_of_combination() {
        let mut e = Echelon::new();
        assert!(e.insert(10, &row(&[1, 0, 0])));
        assert!(e.insert(11, &row(&[0, 1, 0])));
        assert!(e.insert(12, &row(&[0, 0, 1])));
        let red = e.reduce(&row(&[2, 0, 3]));
        assert!(red.residual.is_empty());
        let labels: Vec<usize> = red.comb.iter().map(|(l, _)| *l).collect();
        assert_eq!(labels, alloc::vec![10, 12]);
        assert_eq!(red.comb[0].1, q(2));
        assert_eq!(red.comb[1].1, q(3));
    }

    #[test]
    fn combination_survives_non_unit_pivots() {
        let mut e = Echelon::new();
        e.insert(0, &row(&[2, 4]));
        e.insert(1, &row(&[1, 3]));
        // (3, 7) = 1*(2,4)... solve: a*(2,4) + b*(1,3) = (3,7): a = 1, b = 1
        let red = e.reduce(&row(&[3, 7]));
        assert!(red.residual.is_empty());
        assert_eq!(red.comb, alloc::vec![(0, q(1)), (1, q(1))]);
    }

    #[test]
    fn dependent_insert_is_rejected() {
        let mut e = Echelon::new();
        e.insert(0, &row(&[1, 2]));
        assert!(!e.insert(1, &row(&[2, 4])));
        assert_eq!(e.rank(), 1);
        assert_eq!(rank_of([&row(&[1, 0]), &row(&[2, 0]), &row(&[0, 5])]), 2);
    }
}
