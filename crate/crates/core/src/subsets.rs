//! Enumeration of index combinations in (size, lexicographic) order.

use alloc::vec::Vec;

/// All `k`-element subsets of `0..n`, as ascending index vectors, in
/// lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Every subset of `0..n`, smallest first, lexicographic within a size.
pub(crate) fn by_size(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=n).flat_map(move |k| Combinations::new(n, k))
}

/// Like [`by_size`], as bitmasks. `n` must be below 32.
pub(crate) fn masks_by_size(n: usize) -> impl Iterator<Item = u32> {
    by_size(n).map(|c| c.iter().fold(0u32, |m, &i| m | (1 << i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let all: Vec<Vec<usize>> = by_size(4).collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0], Vec::<usize>::new());
        assert_eq!(all[1], alloc::vec![0]);
        assert_eq!(all[5], alloc::vec![0, 1]);
        assert_eq!(all[6], alloc::vec![0, 2]);
        assert_eq!(all[15], alloc::vec![0, 1, 2, 3]);
        assert_eq!(Combinations::new(3, 5).count(), 0);
        assert_eq!(Combinations::new(0, 0).count(), 1);
    }
}
