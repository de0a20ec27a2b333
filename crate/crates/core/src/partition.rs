//! Exact minimization of `p·r(A / base) − |A|` over subsets `A` of a ground set.
//!
//! By the matroid partition theorem the minimum equals `−|U|`, where `U` is
//! the set of ground elements left over by a maximum covering with `p`
//! independent sets of the contracted matroid. The elements reachable from
//! `U` in the exchange graph of such a covering form the unique inclusion-
//! minimal minimizer. Every minimizer `A` is spanned by `I_j ∩ A` for each
//! part `I_j` and contains `U`; both facts force it to be closed under the
//! exchange edges, hence to contain the reachable set, which itself attains
//! the minimum.
//!
//! This is what makes self-sufficiency and closures exact on structures far
//! beyond the reach of subset enumeration.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::arith::echelon::SparseRow;
use crate::arith::{Echelon, Scalar};
use crate::pregeometry::rows::with_rows;
use crate::pregeometry::RowStore;

pub(crate) struct Minimum {
    /// `min_A p·r(A/base) − |A|`, never positive.
    pub value: i64,
    /// The inclusion-minimal minimizer, as indices into the row store.
    pub minimizer: Vec<usize>,
}

pub(crate) fn minimize(store: &RowStore, base: &[usize], ground: &[usize], p: usize) -> Minimum {
    with_rows!(store, rows => minimize_rows(rows, base, ground, p))
}

fn minimize_rows<S: Scalar>(
    rows: &[SparseRow<S>],
    base: &[usize],
    ground: &[usize],
    p: usize,
) -> Minimum {
    let mut base_ech = Echelon::new();
    for &b in base {
        base_ech.insert(b, &rows[b]);
    }
    let w: Vec<SparseRow<S>> = ground
        .iter()
        .map(|&g| base_ech.reduce(&rows[g]).residual)
        .collect();
    let m = w.len();

    let mut owner: Vec<Option<usize>> = alloc::vec![None; m];
    let mut parts: Vec<Vec<usize>> = alloc::vec![Vec::new(); p];
    let mut echs: Vec<Echelon<S>> = (0..p).map(|_| Echelon::new()).collect();

    for x in 0..m {
        if w[x].is_empty() {
            continue;
        }
        let mut parent: Vec<Option<(usize, usize)>> = alloc::vec![None; m];
        let mut visited = alloc::vec![false; m];
        visited[x] = true;
        let mut queue = VecDeque::from([x]);
        let mut sink = None;
        'bfs: while let Some(y) = queue.pop_front() {
            for j in 0..p {
                if owner[y] == Some(j) {
                    continue;
                }
                let red = echs[j].reduce(&w[y]);
                if !red.residual.is_empty() {
                    sink = Some((y, j));
                    break 'bfs;
                }
                for (z, _) in red.comb {
                    if !visited[z] {
                        visited[z] = true;
                        parent[z] = Some((y, j));
                        queue.push_back(z);
                    }
                }
            }
        }
        let Some((mut y, mut j)) = sink else { continue };
        let mut touched = alloc::vec![false; p];
        loop {
            if let Some(k) = owner[y] {
                parts[k].retain(|&e| e != y);
                touched[k] = true;
            }
            parts[j].push(y);
            owner[y] = Some(j);
            touched[j] = true;
            match parent[y] {
                Some((py, pj)) => {
                    y = py;
                    j = pj;
                }
                None => break,
            }
        }
        for k in (0..p).filter(|&k| touched[k]) {
            let mut e = Echelon::new();
            for &el in &parts[k] {
                let independent = e.insert(el, &w[el]);
                debug_assert!(independent, "augmentation broke independence");
            }
            echs[k] = e;
        }
    }

    // Reachability from the uncovered elements.
    let mut reached = alloc::vec![false; m];
    let mut queue: VecDeque<usize> = (0..m).filter(|&x| owner[x].is_none()).collect();
    let uncovered = queue.len();
    for &x in &queue {
        reached[x] = true;
    }
    while let Some(y) = queue.pop_front() {
        for j in 0..p {
            if owner[y] == Some(j) {
                continue;
            }
            let red = echs[j].reduce(&w[y]);
            for (z, _) in red.comb {
                if !reached[z] {
                    reached[z] = true;
                    queue.push_back(z);
                }
            }
        }
    }
    Minimum {
        value: -(uncovered as i64),
        minimizer: (0..m).filter(|&x| reached[x]).map(|x| ground[x]).collect(),
    }
}
