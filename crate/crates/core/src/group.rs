//! Exact arithmetic for the supported countable abelian groups and the
//! canonical finite-subset algebra built on top of it.
//!
//! Three families of groups are supported:
//!
//! * `ZPower { d }`: the lattice ℤᵈ, elements are dense integer vectors of
//!   length `d`;
//! * `CyclicSum { periods }`: the restricted direct sum ⊕ₙ ℤ/pₙ. Only a finite
//!   prefix of periods is stored; coordinates past the end of the list reuse
//!   the last period, so `[2]` is ⊕ℤ₂ and `[2, 3]` is ℤ₂ ⊕ ℤ₃ ⊕ ℤ₃ ⊕ …;
//! * `ZSum`: the restricted direct sum ⊕ℕ ℤ.
//!
//! Elements of the sum groups have finite support and are stored as a dense
//! coordinate vector with trailing zeros trimmed, which makes every element a
//! finite object with a unique encoding. Elements order lexicographically on
//! that encoding, and `FinSet` keeps its members sorted and deduplicated so
//! that equal sets compare and hash equal.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{LabError, Result};

pub type Coords = SmallVec<[i64; 8]>;

/// A group element in canonical encoding.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(Coords);

impl Elem {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Coordinate `i`, zero past the stored support.
    pub fn coord(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    #[cfg(test)]
    pub(crate) fn from_raw(coords: Coords) -> Self {
        Elem(coords)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "GroupRepr")]
pub enum Group {
    ZPower { d: usize },
    CyclicSum { periods: Vec<u64> },
    ZSum,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum GroupRepr {
    ZPower { d: usize },
    CyclicSum { periods: Vec<u64> },
    ZSum,
}

impl TryFrom<GroupRepr> for Group {
    type Error = LabError;

    fn try_from(repr: GroupRepr) -> Result<Self> {
        match repr {
            GroupRepr::ZPower { d } => Group::z_power(d),
            GroupRepr::CyclicSum { periods } => Group::cyclic_sum(periods),
            GroupRepr::ZSum => Ok(Group::ZSum),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::ZPower { d } if *d == 1 => write!(f, "Z"),
            Group::ZPower { d } => write!(f, "Z^{d}"),
            Group::CyclicSum { periods } => write!(f, "sum Z_{periods:?}"),
            Group::ZSum => write!(f, "sum Z"),
        }
    }
}

impl Group {
    pub fn z_power(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(LabError::InvalidGroup("z_power needs d >= 1".into()));
        }
        Ok(Group::ZPower { d })
    }

    pub fn cyclic_sum(periods: Vec<u64>) -> Result<Self> {
        if periods.is_empty() {
            return Err(LabError::InvalidGroup("cyclic_sum needs at least one period".into()));
        }
        if let Some(p) = periods.iter().find(|&&p| p < 2) {
            return Err(LabError::InvalidGroup(format!("period {p} < 2")));
        }
        if periods.iter().any(|&p| p > i64::MAX as u64) {
            return Err(LabError::InvalidGroup("period too large".into()));
        }
        Ok(Group::CyclicSum { periods })
    }

    pub fn z() -> Self {
        Group::ZPower { d: 1 }
    }

    /// Period of coordinate `i` for cyclic sums, `None` for integer coordinates.
    pub fn period(&self, i: usize) -> Option<u64> {
        match self {
            Group::CyclicSum { periods } => Some(periods[i.min(periods.len() - 1)]),
            _ => None,
        }
    }

    /// Number of coordinates in the dense encoding, `None` for the sum groups.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Group::ZPower { d } => Some(*d),
            _ => None,
        }
    }

    pub fn is_sum(&self) -> bool {
        !matches!(self, Group::ZPower { .. })
    }

    pub fn is_abelian(&self) -> bool {
        true
    }

    pub fn identity(&self) -> Elem {
        match self {
            Group::ZPower { d } => Elem(SmallVec::from_elem(0, *d)),
            _ => Elem(SmallVec::new()),
        }
    }

    /// Builds the canonical element with the given coordinates, reducing
    /// cyclic coordinates and trimming trailing zeros of sum-group elements.
    pub fn elem(&self, coords: &[i64]) -> Result<Elem> {
        match self {
            Group::ZPower { d } => {
                if coords.len() != *d {
                    return Err(LabError::InvalidElem {
                        coords: coords.to_vec(),
                        reason: format!("expected {d} coordinates"),
                    });
                }
                Ok(Elem(SmallVec::from_slice(coords)))
            }
            Group::CyclicSum { .. } => {
                let mut c: Coords = coords
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| v.rem_euclid(self.period(i).unwrap() as i64))
                    .collect();
                trim(&mut c);
                Ok(Elem(c))
            }
            Group::ZSum => {
                let mut c = Coords::from_slice(coords);
                trim(&mut c);
                Ok(Elem(c))
            }
        }
    }

    /// Whether `e` is a canonical element of this group.
    pub fn contains(&self, e: &Elem) -> bool {
        match self {
            Group::ZPower { d } => e.0.len() == *d,
            Group::CyclicSum { .. } => {
                e.0.last() != Some(&0)
                    && e.0
                        .iter()
                        .enumerate()
                        .all(|(i, &v)| v >= 0 && (v as u64) < self.period(i).unwrap())
            }
            Group::ZSum => e.0.last() != Some(&0),
        }
    }

    fn check(&self, e: &Elem) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(LabError::GroupMismatch(format!("{e:?} is not a canonical element of {self}")))
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn inverse(&self, a: &Elem) -> Result<Elem> {
        self.check(a)?;
        Ok(self.inverse_unchecked(a))
    }

    pub(crate) fn mul_unchecked(&self, a: &Elem, b: &Elem) -> Elem {
        match self {
            Group::ZPower { .. } => {
                Elem(a.0.iter().zip(b.0.iter()).map(|(x, y)| x + y).collect())
            }
            Group::CyclicSum { .. } => {
                let n = a.0.len().max(b.0.len());
                let mut c: Coords = (0..n)
                    .map(|i| {
                        let p = self.period(i).unwrap() as i64;
                        (a.coord(i) + b.coord(i)).rem_euclid(p)
                    })
                    .collect();
                trim(&mut c);
                Elem(c)
            }
            Group::ZSum => {
                let n = a.0.len().max(b.0.len());
                let mut c: Coords = (0..n).map(|i| a.coord(i) + b.coord(i)).collect();
                trim(&mut c);
                Elem(c)
            }
        }
    }

    pub(crate) fn inverse_unchecked(&self, a: &Elem) -> Elem {
        match self {
            Group::CyclicSum { .. } => {
                let mut c: Coords = a
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (-v).rem_euclid(self.period(i).unwrap() as i64))
                    .collect();
                trim(&mut c);
                Elem(c)
            }
            _ => Elem(a.0.iter().map(|v| -v).collect()),
        }
    }

    /// The unit vectors e₀, …, e_{k-1}; for ℤᵈ `k = d`, for the sum groups
    /// `k = width`.
    pub fn generators(&self, width: usize) -> Vec<Elem> {
        let k = self.dim().unwrap_or(width);
        (0..k)
            .map(|i| {
                let mut c = vec![0; self.dim().unwrap_or(i + 1)];
                c[i] = 1;
                self.elem(&c).expect("unit vector is canonical")
            })
            .collect()
    }

    /// Every element whose first `width` coordinates (all `d` for ℤᵈ) lie in
    /// `[lo, hi]` and whose remaining coordinates vanish, in canonical order.
    pub fn window(&self, lo: i64, hi: i64, width: usize) -> Vec<Elem> {
        let dims = self.dim().unwrap_or(width);
        let ranges: Vec<Vec<i64>> = (0..dims)
            .map(|i| match self.period(i) {
                Some(p) => (lo.max(0)..=hi.min(p as i64 - 1)).collect(),
                None => (lo..=hi).collect(),
            })
            .collect();
        if ranges.iter().any(|r| r.is_empty()) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; dims];
        loop {
            let coords: Vec<i64> = idx.iter().zip(&ranges).map(|(&k, r)| r[k]).collect();
            out.push(self.elem(&coords).expect("window coordinates are valid"));
            let mut axis = dims;
            loop {
                if axis == 0 {
                    out.sort();
                    out.dedup();
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < ranges[axis].len() {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

fn trim(c: &mut Coords) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

/// A canonical finite subset of a group: sorted, duplicate-free.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinSet {
    group: Group,
    elems: Vec<Elem>,
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl FinSet {
    pub fn new(group: &Group, elems: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let elems: Vec<Elem> = elems.into_iter().collect();
        for e in &elems {
            group.check(e)?;
        }
        Ok(Self::from_unsorted(group, elems))
    }

    pub fn from_coords<C: AsRef<[i64]>>(group: &Group, coords: &[C]) -> Result<Self> {
        let elems = coords
            .iter()
            .map(|c| group.elem(c.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_unsorted(group, elems))
    }

    /// ℤ convenience constructor.
    pub fn ints(group: &Group, values: impl IntoIterator<Item = i64>) -> Result<Self> {
        let coords: Vec<[i64; 1]> = values.into_iter().map(|v| [v]).collect();
        Self::from_coords(group, &coords)
    }

    pub fn empty(group: &Group) -> Self {
        FinSet { group: group.clone(), elems: Vec::new() }
    }

    pub fn singleton(group: &Group, e: Elem) -> Result<Self> {
        Self::new(group, [e])
    }

    pub fn identity(group: &Group) -> Self {
        FinSet { group: group.clone(), elems: vec![group.identity()] }
    }

    pub(crate) fn from_unsorted(group: &Group, mut elems: Vec<Elem>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        FinSet { group: group.clone(), elems }
    }

    pub(crate) fn from_sorted(group: &Group, elems: Vec<Elem>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        FinSet { group: group.clone(), elems }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[Elem] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Elem> {
        self.elems.iter()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn to_coords(&self) -> Vec<Vec<i64>> {
        self.elems.iter().map(|e| e.coords().to_vec()).collect()
    }

    pub fn require_non_empty(&self, what: &str) -> Result<()> {
        if self.is_empty() {
            Err(LabError::EmptySet(what.to_string()))
        } else {
            Ok(())
        }
    }

    fn same_group(&self, other: &FinSet) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(LabError::GroupMismatch(format!("{} vs {}", self.group, other.group)))
        }
    }

    /// g·F
    pub fn translate_left(&self, g: &Elem) -> Result<FinSet> {
        self.group.check(g)?;
        let elems = self.elems.iter().map(|f| self.group.mul_unchecked(g, f)).collect();
        Ok(Self::from_unsorted(&self.group, elems))
    }

    /// F·g
    pub fn translate_right(&self, g: &Elem) -> Result<FinSet> {
        self.group.check(g)?;
        let elems = self.elems.iter().map(|f| self.group.mul_unchecked(f, g)).collect();
        Ok(Self::from_unsorted(&self.group, elems))
    }

    /// The product set `self · other = {k f}`.
    pub fn product(&self, other: &FinSet) -> Result<FinSet> {
        self.same_group(other)?;
        let mut out = HashSet::with_capacity(self.len().max(other.len()));
        for k in &self.elems {
            for f in &other.elems {
                out.insert(self.group.mul_unchecked(k, f));
            }
        }
        Ok(Self::from_unsorted(&self.group, out.into_iter().collect()))
    }

    pub fn inverse(&self) -> FinSet {
        let elems = self.elems.iter().map(|e| self.group.inverse_unchecked(e)).collect();
        Self::from_unsorted(&self.group, elems)
    }

    pub fn union(&self, other: &FinSet) -> Result<FinSet> {
        self.same_group(other)?;
        Ok(self.merge(other, |a, b| a || b))
    }

    pub fn intersection(&self, other: &FinSet) -> Result<FinSet> {
        self.same_group(other)?;
        Ok(self.merge(other, |a, b| a && b))
    }

    pub fn difference(&self, other: &FinSet) -> Result<FinSet> {
        self.same_group(other)?;
        Ok(self.merge(other, |a, b| a && !b))
    }

    pub fn symmetric_difference(&self, other: &FinSet) -> Result<FinSet> {
        self.same_group(other)?;
        Ok(self.merge(other, |a, b| a != b))
    }

    pub fn is_subset(&self, other: &FinSet) -> Result<bool> {
        self.same_group(other)?;
        Ok(self.elems.iter().all(|e| other.contains(e)))
    }

    pub fn is_disjoint(&self, other: &FinSet) -> Result<bool> {
        self.same_group(other)?;
        Ok(self.elems.iter().all(|e| !other.contains(e)))
    }

    /// Sorted merge keeping elements for which `keep(in_self, in_other)`.
    fn merge(&self, other: &FinSet, keep: impl Fn(bool, bool) -> bool) -> FinSet {
        let (a, b) = (&self.elems, &other.elems);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.cmp(y),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (x_in, y_in, e) = match ord {
                Ordering::Less => {
                    i += 1;
                    (true, false, &a[i - 1])
                }
                Ordering::Greater => {
                    j += 1;
                    (false, true, &b[j - 1])
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (true, true, &a[i - 1])
                }
            };
            if keep(x_in, y_in) {
                out.push(e.clone());
            }
        }
        Self::from_sorted(&self.group, out)
    }
}

/// Bounds for `enumerate_finsets`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumBudget {
    /// Largest cardinality enumerated exhaustively.
    pub max_card: usize,
    /// Coordinate range of the enumeration window.
    pub lo: i64,
    pub hi: i64,
    /// Number of leading coordinates used for the sum groups.
    #[serde(default = "default_width")]
    pub width: usize,
    /// Hard cap on the number of exhaustively enumerated sets.
    #[serde(default = "default_max_sets")]
    pub max_sets: u64,
    /// Cubes `{lo, …, lo+m-1}^k` with `m <= box_side` are appended after the
    /// exhaustive part whenever they are larger than `max_card`.
    #[serde(default)]
    pub box_side: u64,
}

fn default_width() -> usize {
    2
}

fn default_max_sets() -> u64 {
    5_000_000
}

impl EnumBudget {
    pub fn new(max_card: usize, lo: i64, hi: i64) -> Self {
        EnumBudget { max_card, lo, hi, width: default_width(), max_sets: default_max_sets(), box_side: 0 }
    }

    pub fn with_width(mut self, width: usize) -> Self {
        self.width = width;
        self
    }

    pub fn with_boxes(mut self, side: u64) -> Self {
        self.box_side = side;
        self
    }
}

fn binomial_sum(n: u64, k: u64) -> u64 {
    let mut total: u64 = 0;
    let mut term: u128 = 1;
    for i in 1..=k.min(n) {
        term = term * (n - i + 1) as u128 / i as u128;
        total = total.saturating_add(term.min(u64::MAX as u128) as u64);
    }
    total
}

/// Deterministic stream of non-empty finite sets: all subsets of the budget
/// window with at most `max_card` elements (by cardinality, then
/// lexicographically), followed by the budget's boxes.
pub fn enumerate_finsets(group: &Group, budget: &EnumBudget) -> Result<impl Iterator<Item = FinSet>> {
    use itertools::Itertools;

    let window = group.window(budget.lo, budget.hi, budget.width);
    let count = binomial_sum(window.len() as u64, budget.max_card as u64);
    if count > budget.max_sets {
        return Err(LabError::BudgetExceeded(format!(
            "{count} sets in the exhaustive window exceed max_sets = {}",
            budget.max_sets
        )));
    }
    let dims = group.dim().unwrap_or(budget.width);
    let max_card = budget.max_card;
    let g = group.clone();
    let boxes: Vec<FinSet> = (1..=budget.box_side)
        .filter(|&m| (m as u128).pow(dims as u32) > max_card as u128)
        .filter(|&m| (0..dims).all(|i| group.period(i).is_none_or(|p| m <= p)))
        .map(|m| {
            let lo = match group {
                Group::CyclicSum { .. } => 0,
                _ => budget.lo,
            };
            crate::grid::Grid::cube(dims, lo, m).materialize(group)
        })
        .collect();
    let exhaustive = (1..=max_card).flat_map(move |k| {
        let g = g.clone();
        window
            .clone()
            .into_iter()
            .combinations(k)
            .map(move |c| FinSet::from_sorted(&g, c))
    });
    Ok(exhaustive.chain(boxes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Group {
        Group::z()
    }

    #[test]
    fn multiply_examples() {
        let g2 = Group::z_power(2).unwrap();
        let a = g2.elem(&[1, 2]).unwrap();
        let b = g2.elem(&[3, -2]).unwrap();
        assert_eq!(g2.mul(&a, &b).unwrap().coords(), &[4, 0]);

        let c3 = Group::cyclic_sum(vec![3]).unwrap();
        let x = c3.elem(&[2]).unwrap();
        assert_eq!(c3.mul(&x, &x).unwrap().coords(), &[1]);

        for g in [g2.clone(), c3.clone(), Group::ZSum] {
            let e = g.elem(&vec![1; g.dim().unwrap_or(3)]).unwrap();
            assert_eq!(g.mul(&e, &g.identity()).unwrap(), e);
        }
    }

    #[test]
    fn canonical_encoding() {
        let c = Group::cyclic_sum(vec![2, 3]).unwrap();
        let e = c.elem(&[2, 3, 4, 0]).unwrap();
        assert_eq!(e.coords(), &[0, 0, 1]);
        assert_eq!(c.period(7), Some(3));
        let s = Group::ZSum;
        assert_eq!(s.elem(&[0, 0]).unwrap(), s.identity());
        assert!(!s.contains(&Elem::from_raw(Coords::from_slice(&[1, 0]))));
    }

    #[test]
    fn group_mismatch_is_reported() {
        let g2 = Group::z_power(2).unwrap();
        let bad = Group::z().elem(&[1]).unwrap();
        assert!(matches!(g2.mul(&bad, &g2.identity()), Err(LabError::GroupMismatch(_))));
        let f = FinSet::ints(&z(), [0]).unwrap();
        let h = FinSet::identity(&g2);
        assert!(f.union(&h).is_err());
    }

    #[test]
    fn invalid_descriptors() {
        assert!(Group::z_power(0).is_err());
        assert!(Group::cyclic_sum(vec![2, 1]).is_err());
        let parsed: std::result::Result<Group, _> =
            serde_json::from_str(r#"{"kind":"cyclic_sum","periods":[1]}"#);
        assert!(parsed.is_err());
        let g: Group = serde_json::from_str(r#"{"kind":"z_power","d":2}"#).unwrap();
        assert_eq!(g, Group::ZPower { d: 2 });
        let g: Group = serde_json::from_str(r#"{"kind":"z_sum"}"#).unwrap();
        assert_eq!(g, Group::ZSum);
    }

    #[test]
    fn set_algebra_examples() {
        let k = FinSet::ints(&z(), [0, 1]).unwrap();
        let f = FinSet::ints(&z(), [0, 1, 2]).unwrap();
        assert_eq!(k.product(&f).unwrap(), FinSet::ints(&z(), 0..4).unwrap());

        let one = z().elem(&[1]).unwrap();
        let shifted = f.translate_left(&one).unwrap();
        assert_eq!(shifted, FinSet::ints(&z(), [1, 2, 3]).unwrap());
        assert_eq!(shifted.symmetric_difference(&f).unwrap(), FinSet::ints(&z(), [0, 3]).unwrap());

        assert_eq!(f.inverse(), FinSet::ints(&z(), [-2, -1, 0]).unwrap());
        assert_eq!(f.intersection(&k).unwrap(), k);
        assert_eq!(f.difference(&k).unwrap(), FinSet::ints(&z(), [2]).unwrap());
        assert!(k.is_subset(&f).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let sets: Vec<_> = enumerate_finsets(&z(), &EnumBudget::new(2, -1, 1)).unwrap().collect();
        let expected: Vec<FinSet> = [vec![-1], vec![0], vec![1], vec![-1, 0], vec![-1, 1], vec![0, 1]]
            .into_iter()
            .map(|v| FinSet::ints(&z(), v).unwrap())
            .collect();
        assert_eq!(sets, expected);

        let only: Vec<_> = enumerate_finsets(&z(), &EnumBudget::new(1, 0, 0)).unwrap().collect();
        assert_eq!(only, vec![FinSet::identity(&z())]);

        let g2 = Group::z_power(2).unwrap();
        let singles: Vec<_> = enumerate_finsets(&g2, &EnumBudget::new(1, 0, 1)).unwrap().collect();
        assert_eq!(singles.len(), 4);
        assert!(singles.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn enumeration_budget_and_boxes() {
        let err = enumerate_finsets(&z(), &EnumBudget { max_sets: 10, ..EnumBudget::new(3, 0, 9) });
        assert!(matches!(err, Err(LabError::BudgetExceeded(_))));

        let sets: Vec<_> = enumerate_finsets(&z(), &EnumBudget::new(2, 0, 3).with_boxes(6))
            .unwrap()
            .collect();
        // 4 + 6 exhaustive sets, then the boxes of length 3..=6.
        assert_eq!(sets.len(), 14);
        assert_eq!(sets.last().unwrap(), &FinSet::ints(&z(), 0..6).unwrap());
    }

    #[test]
    fn window_for_sum_groups() {
        let c = Group::cyclic_sum(vec![2]).unwrap();
        assert_eq!(c.window(0, 5, 3).len(), 8);
        assert_eq!(Group::ZSum.window(-1, 1, 2).len(), 9);
    }
}
