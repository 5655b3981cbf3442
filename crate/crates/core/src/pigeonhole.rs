//! Constructive selection for the generalized pigeonhole bound: among `n`
//! boxes holding `r n + s` objects (`0 <= s < n`), some `m` boxes hold at
//! least `r m + min(s, m)`.
//!
//! The `m` fullest boxes always attain the maximum over all `m`-subsets, so
//! they meet the bound whenever any subset does.

use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxDistribution {
    counts: Vec<u64>,
}

impl BoxDistribution {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return invalid("a box distribution needs at least one box");
        }
        Ok(BoxDistribution { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_boxes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(r, s)` with `total = r * n_boxes + s`, `0 <= s < n_boxes`.
    pub fn decomposition(&self) -> (u64, u64) {
        let n = self.n_boxes() as u64;
        (self.total() / n, self.total() % n)
    }

    /// `r m + min(s, m)`.
    pub fn guaranteed(&self, m: usize) -> u64 {
        let (r, s) = self.decomposition();
        r * m as u64 + s.min(m as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// Chosen box indices, ascending.
    pub boxes: Vec<usize>,
    pub total: u64,
}

/// The `m` boxes with the largest counts, ties going to the lower index.
pub fn select_boxes(dist: &BoxDistribution, m: usize) -> Result<Selection> {
    if m == 0 || m > dist.n_boxes() {
        return invalid(format!("m must lie in 1..={}, got {m}", dist.n_boxes()));
    }
    let mut order: Vec<usize> = (0..dist.n_boxes()).collect();
    order.sort_by(|&a, &b| dist.counts[b].cmp(&dist.counts[a]).then(a.cmp(&b)));
    let mut boxes = order[..m].to_vec();
    boxes.sort_unstable();
    let total = boxes.iter().map(|&i| dist.counts[i]).sum();
    Ok(Selection { boxes, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let d = BoxDistribution::new(vec![3, 1, 0, 2]).unwrap();
        assert_eq!(d.decomposition(), (1, 2));
        let sel = select_boxes(&d, 2).unwrap();
        assert_eq!(sel, Selection { boxes: vec![0, 3], total: 5 });
        assert!(sel.total >= d.guaranteed(2));
        assert_eq!(d.guaranteed(2), 4);

        let uniform = BoxDistribution::new(vec![1, 1, 1, 1]).unwrap();
        let sel = select_boxes(&uniform, 2).unwrap();
        assert_eq!(sel, Selection { boxes: vec![0, 1], total: 2 });
        assert_eq!(uniform.guaranteed(2), 2);

        let whole = select_boxes(&d, 4).unwrap();
        assert_eq!(whole.total, d.total());
        assert_eq!(d.guaranteed(4), d.total());
    }

    #[test]
    fn ties_prefer_low_index() {
        let d = BoxDistribution::new(vec![2, 5, 2, 5, 2]).unwrap();
        assert_eq!(select_boxes(&d, 3).unwrap().boxes, vec![0, 1, 3]);
    }

    #[test]
    fn bad_m() {
        let d = BoxDistribution::new(vec![1, 2]).unwrap();
        assert!(select_boxes(&d, 0).is_err());
        assert!(select_boxes(&d, 3).is_err());
        assert!(BoxDistribution::new(vec![]).is_err());
    }
}
