//! Cartesian-product ("grid") subsets.
//!
//! Every built-in Følner set is a product of per-coordinate sets, and products
//! of grids are grids again, so the diagnostics can run on the factors instead
//! of materializing |F|² products. Results are always cross-checked against
//! the materialized path in the tests.

use std::collections::BTreeSet;

use crate::group::{FinSet, Group};

/// One factor of a grid. For a cyclic coordinate of period `p` an interval is
/// the arc `lo, lo+1, …, lo+len-1 (mod p)` with `lo ∈ [0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axis {
    Interval { lo: i64, len: u64 },
    Points(Vec<i64>),
}

impl Axis {
    pub fn len(&self) -> u64 {
        match self {
            Axis::Interval { len, .. } => *len,
            Axis::Points(p) => p.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn unit() -> Self {
        Axis::Interval { lo: 0, len: 1 }
    }

    /// The represented values, reduced and sorted.
    pub fn points(&self, modulus: Option<u64>) -> Vec<i64> {
        match (self, modulus) {
            (Axis::Points(p), _) => p.clone(),
            (Axis::Interval { lo, len }, None) => (*lo..*lo + *len as i64).collect(),
            (Axis::Interval { lo, len }, Some(p)) => {
                let mut v: Vec<i64> = (0..*len as i64).map(|k| (lo + k).rem_euclid(p as i64)).collect();
                v.sort_unstable();
                v
            }
        }
    }

    /// Canonical axis for a sorted, duplicate-free point list.
    pub(crate) fn from_points(points: Vec<i64>, modulus: Option<u64>) -> Self {
        if let Some(p) = modulus {
            if points.len() as u64 == p {
                return Axis::Interval { lo: 0, len: p };
            }
        }
        match (points.first(), points.last()) {
            (Some(&a), Some(&b)) if (b - a) as usize + 1 == points.len() => {
                Axis::Interval { lo: a, len: points.len() as u64 }
            }
            _ => Axis::Points(points),
        }
    }

    fn sum(&self, other: &Axis, modulus: Option<u64>) -> Axis {
        match (self, other) {
            (Axis::Interval { lo: a, len: m }, Axis::Interval { lo: b, len: n }) if *m > 0 && *n > 0 => {
                let len = m + n - 1;
                match modulus {
                    None => Axis::Interval { lo: a + b, len },
                    Some(p) if len >= p => Axis::Interval { lo: 0, len: p },
                    Some(p) => Axis::Interval { lo: (a + b).rem_euclid(p as i64), len },
                }
            }
            _ => {
                let (x, y) = (self.points(modulus), other.points(modulus));
                let sums: BTreeSet<i64> = x
                    .iter()
                    .flat_map(|a| {
                        y.iter().map(move |b| match modulus {
                            Some(p) => (a + b).rem_euclid(p as i64),
                            None => a + b,
                        })
                    })
                    .collect();
                Axis::from_points(sums.into_iter().collect(), modulus)
            }
        }
    }

    fn neg(&self, modulus: Option<u64>) -> Axis {
        match (self, modulus) {
            (Axis::Interval { lo, len }, None) => Axis::Interval { lo: -(lo + *len as i64 - 1), len: *len },
            (Axis::Interval { lo, len }, Some(p)) if *len == p => Axis::Interval { lo: 0, len: *len },
            (Axis::Interval { lo, len }, Some(p)) => Axis::Interval {
                lo: (-(lo + *len as i64 - 1)).rem_euclid(p as i64),
                len: *len,
            },
            (Axis::Points(pts), _) => {
                let mut v: Vec<i64> = pts
                    .iter()
                    .map(|x| match modulus {
                        Some(p) => (-x).rem_euclid(p as i64),
                        None => -x,
                    })
                    .collect();
                v.sort_unstable();
                v.dedup();
                Axis::from_points(v, modulus)
            }
        }
    }

    fn is_subset(&self, other: &Axis, modulus: Option<u64>) -> bool {
        match (self, other, modulus) {
            (Axis::Interval { lo: a, len: m }, Axis::Interval { lo: b, len: n }, None) => {
                *m == 0 || (b <= a && a + *m as i64 <= b + *n as i64)
            }
            (Axis::Interval { lo: a, len: m }, Axis::Interval { lo: b, len: n }, Some(p)) => {
                *m == 0 || *n == p || (*m <= *n && (a - b).rem_euclid(p as i64) + *m as i64 <= *n as i64)
            }
            _ => {
                let mine = self.points(modulus);
                let theirs = other.points(modulus);
                mine.iter().all(|x| theirs.binary_search(x).is_ok())
            }
        }
    }
}

/// A product set `A₀ × A₁ × …`; coordinates past the last axis are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Self {
        Grid { axes }
    }

    /// `{lo, …, lo+side-1}^dims`.
    pub fn cube(dims: usize, lo: i64, side: u64) -> Self {
        Grid { axes: vec![Axis::Interval { lo, len: side }; dims] }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// |grid|, saturating at `u128::MAX`.
    pub fn card(&self) -> u128 {
        self.axes.iter().fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128))
    }

    fn axis(&self, i: usize) -> Axis {
        self.axes.get(i).cloned().unwrap_or_else(Axis::unit)
    }

    /// `self · other`.
    pub fn product(&self, other: &Grid, group: &Group) -> Grid {
        let n = self.axes.len().max(other.axes.len());
        Grid { axes: (0..n).map(|i| self.axis(i).sum(&other.axis(i), group.period(i))).collect() }
    }

    pub fn inverse(&self, group: &Group) -> Grid {
        Grid { axes: self.axes.iter().enumerate().map(|(i, a)| a.neg(group.period(i))).collect() }
    }

    pub fn is_subset(&self, other: &Grid, group: &Group) -> bool {
        if self.axes.iter().any(Axis::is_empty) {
            return true;
        }
        let n = self.axes.len().max(other.axes.len());
        (0..n).all(|i| self.axis(i).is_subset(&other.axis(i), group.period(i)))
    }

    pub fn materialize(&self, group: &Group) -> FinSet {
        let lists: Vec<Vec<i64>> =
            self.axes.iter().enumerate().map(|(i, a)| a.points(group.period(i))).collect();
        if lists.iter().any(|l| l.is_empty()) {
            return FinSet::empty(group);
        }
        let dims = group.dim().unwrap_or(lists.len());
        let mut elems = Vec::with_capacity(self.card() as usize);
        let mut idx = vec![0usize; lists.len()];
        let mut coords = vec![0i64; dims];
        loop {
            for (k, (&j, l)) in idx.iter().zip(&lists).enumerate() {
                coords[k] = l[j];
            }
            elems.push(group.elem(&coords).expect("grid coordinates are valid"));
            let mut axis = lists.len();
            loop {
                if axis == 0 {
                    return FinSet::from_unsorted(group, elems);
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < lists[axis].len() {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

impl FinSet {
    /// Recognizes `self` as a grid: true when |F| equals the product of the
    /// sizes of its coordinate projections.
    pub fn to_grid(&self) -> Option<Grid> {
        if self.is_empty() {
            return None;
        }
        let group = self.group();
        let dims = group
            .dim()
            .unwrap_or_else(|| self.iter().map(|e| e.support_len()).max().unwrap_or(0));
        let mut proj: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); dims];
        for e in self.iter() {
            for (i, p) in proj.iter_mut().enumerate() {
                p.insert(e.coord(i));
            }
        }
        let card: u128 = proj.iter().map(|p| p.len() as u128).product();
        (card == self.len() as u128).then(|| Grid {
            axes: proj
                .into_iter()
                .enumerate()
                .map(|(i, p)| Axis::from_points(p.into_iter().collect(), group.period(i)))
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_matches_materialized() {
        let z2 = Group::z_power(2).unwrap();
        let a = Grid::new(vec![Axis::Interval { lo: 0, len: 3 }, Axis::Points(vec![0, 2])]);
        let b = Grid::new(vec![Axis::Points(vec![-1, 5]), Axis::Interval { lo: 1, len: 2 }]);
        let exact = a.materialize(&z2).product(&b.materialize(&z2)).unwrap();
        assert_eq!(a.product(&b, &z2).materialize(&z2), exact);
        assert_eq!(a.inverse(&z2).materialize(&z2), a.materialize(&z2).inverse());
    }

    #[test]
    fn cyclic_arcs_wrap() {
        let c = Group::cyclic_sum(vec![5]).unwrap();
        let a = Grid::new(vec![Axis::Interval { lo: 3, len: 3 }]);
        let pts = a.materialize(&c);
        assert_eq!(pts, FinSet::from_coords(&c, &[[3], [4], [0]]).unwrap());
        let b = Grid::new(vec![Axis::Interval { lo: 1, len: 2 }]);
        assert_eq!(a.product(&b, &c).materialize(&c), pts.product(&b.materialize(&c)).unwrap());
        assert_eq!(a.inverse(&c).materialize(&c), pts.inverse());
        let full = a.product(&a, &c);
        assert_eq!(full.card(), 5);
        assert!(b.is_subset(&full, &c));
        assert!(!b.is_subset(&a, &c));
    }

    #[test]
    fn grid_recognition() {
        let z = Group::z();
        let f = FinSet::ints(&z, [0, 1, 2]).unwrap();
        assert_eq!(f.to_grid(), Some(Grid::cube(1, 0, 3)));
        let z2 = Group::z_power(2).unwrap();
        let l = FinSet::from_coords(&z2, &[[0, 0], [1, 0], [0, 1]]).unwrap();
        assert!(l.to_grid().is_none());
        let s = FinSet::from_coords(&Group::ZSum, &[[0, 0], [1, 0], [0, 1], [1, 1]]).unwrap();
        assert_eq!(s.to_grid().unwrap().materialize(&Group::ZSum), s);
    }
}
