use alloc::vec::Vec;

use crate::arith::echelon::{rank_of, SparseRow};
use crate::arith::{Echelon, Fp, RatFunc, Q};

use super::{GeometryKind, Payload};

/// The vectors whose linear rank realizes the matroid: the point itself for
/// linear geometries, its gradient for the function field.
#[derive(Clone, Debug)]
pub(crate) enum RowStore {
    Rational(Vec<SparseRow<Q>>),
    Finite(Vec<SparseRow<Fp>>),
    Function(Vec<SparseRow<RatFunc>>),
}

/// Runs `$body` with `$rows` bound to the concrete row vector.
macro_rules! with_rows {
    ($store:expr, $rows:ident => $body:expr) => {
        match $store {
            $crate::pregeometry::RowStore::Rational($rows) => $body,
            $crate::pregeometry::RowStore::Finite($rows) => $body,
            $crate::pregeometry::RowStore::Function($rows) => $body,
        }
    };
}
pub(crate) use with_rows;

pub(crate) fn payload_row_rational(v: &[Q]) -> SparseRow<Q> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub(crate) fn payload_row_finite(v: &[u64], q: u64) -> SparseRow<Fp> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x % q != 0)
        .map(|(i, &x)| (i, Fp::new(x, q)))
        .collect()
}

pub(crate) fn jacobian_row(f: &RatFunc) -> SparseRow<RatFunc> {
    f.vars()
        .into_iter()
        .map(|v| (v as usize, f.derivative(v)))
        .filter(|(_, d)| !d.is_zero())
        .collect()
}

impl RowStore {
    pub(crate) fn build<'a>(
        geom: &GeometryKind,
        payloads: impl Iterator<Item = &'a Payload>,
    ) -> RowStore {
        match geom {
            GeometryKind::LinearRational => RowStore::Rational(
                payloads
                    .map(|p| match p {
                        Payload::Rational(v) => payload_row_rational(v),
                        _ => unreachable!("payloads checked against geometry"),
                    })
                    .collect(),
            ),
            GeometryKind::LinearFiniteField { q } => RowStore::Finite(
                payloads
                    .map(|p| match p {
                        Payload::Finite(v) => payload_row_finite(v, *q),
                        _ => unreachable!("payloads checked against geometry"),
                    })
                    .collect(),
            ),
            GeometryKind::AlgebraicFunctionField { .. } => RowStore::Function(
                payloads
                    .map(|p| match p {
                        Payload::Function(f) => jacobian_row(f),
                        _ => unreachable!("payloads checked against geometry"),
                    })
                    .collect(),
            ),
        }
    }

    /// The rows at `idx`, in that order.
    pub(crate) fn select(&self, idx: &[usize]) -> RowStore {
        match self {
            RowStore::Rational(rows) => {
                RowStore::Rational(idx.iter().map(|&i| rows[i].clone()).collect())
            }
            RowStore::Finite(rows) => {
                RowStore::Finite(idx.iter().map(|&i| rows[i].clone()).collect())
            }
            RowStore::Function(rows) => {
                RowStore::Function(idx.iter().map(|&i| rows[i].clone()).collect())
            }
        }
    }

    pub(crate) fn rank_all(&self) -> usize {
        with_rows!(self, rows => rank_of(rows.iter()))
    }

    pub(crate) fn rank_of(&self, idx: &[usize]) -> usize {
        with_rows!(self, rows => {
            let mut e = Echelon::new();
            for &i in idx {
                e.insert(i, &rows[i]);
            }
            e.rank()
        })
    }

    pub(crate) fn push(&mut self, geom: &GeometryKind, payload: &Payload) {
        match (self, payload, geom) {
            (RowStore::Rational(rows), Payload::Rational(v), _) => {
                rows.push(payload_row_rational(v))
            }
            (RowStore::Finite(rows), Payload::Finite(v), GeometryKind::LinearFiniteField { q }) => {
                rows.push(payload_row_finite(v, *q))
            }
            (RowStore::Function(rows), Payload::Function(f), _) => rows.push(jacobian_row(f)),
            _ => unreachable!("payloads checked against geometry"),
        }
    }

    /// Ranks of all subsets of `idx`, indexed by bitmask over positions in `idx`.
    pub(crate) fn rank_table(&self, idx: &[usize]) -> Vec<u32> {
        self.rank_table_over(&[], idx)
    }

    /// `rank(base ∪ T)` for every `T ⊆ idx`, indexed by bitmask.
    pub(crate) fn rank_table_over(&self, base: &[usize], idx: &[usize]) -> Vec<u32> {
        assert!(idx.len() <= 24, "rank table too large");
        let mut table = alloc::vec![0u32; 1usize << idx.len()];
        with_rows!(self, rows => {
            fn walk<S: crate::arith::Scalar>(
                rows: &[SparseRow<S>],
                idx: &[usize],
                start: usize,
                mask: usize,
                ech: &Echelon<S>,
                table: &mut [u32],
            ) {
                table[mask] = ech.rank() as u32;
                for k in start..idx.len() {
                    let mut next = ech.clone();
                    next.insert(idx[k], &rows[idx[k]]);
                    walk(rows, idx, k + 1, mask | (1 << k), &next, table);
                }
            }
            let mut start = Echelon::new();
            for &b in base {
                start.insert(b, &rows[b]);
            }
            walk(rows, idx, 0, 0, &start, &mut table);
        });
        table
    }
}
