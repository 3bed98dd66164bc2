//! Built-in Følner sequences and exact invariance diagnostics.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{Axis, Grid};
use crate::group::{FinSet, Group};

pub type Rational = Ratio<u64>;

/// Largest number of products a materialized diagnostic may form.
pub const PRODUCT_BUDGET: u128 = 400_000_000;

/// Index of a set in a sequence. Linear indices start at 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeqIndex {
    Linear(u64),
    Tuple(Vec<u64>),
}

impl fmt::Display for SeqIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqIndex::Linear(n) => write!(f, "{n}"),
            SeqIndex::Tuple(t) => {
                let parts: Vec<String> = t.iter().map(u64::to_string).collect();
                write!(f, "({})", parts.join(";"))
            }
        }
    }
}

impl From<u64> for SeqIndex {
    fn from(n: u64) -> Self {
        SeqIndex::Linear(n)
    }
}

impl From<Vec<u64>> for SeqIndex {
    fn from(t: Vec<u64>) -> Self {
        SeqIndex::Tuple(t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeqKind {
    /// `{0, …, n-1}^d`, or a product box for a tuple index.
    ZBoxes,
    /// `{a_n, …, a_n+n-1}^d` with `a_n = coef · n^power`.
    ShiftedZBoxes { coef: i64, power: u32 },
    /// Elements supported on the first `n` coordinates of a cyclic sum.
    CyclicPrefix,
    /// `∏ {0, …, n_i - 1}` for a tuple index; linear `k` means `(k, …, k)` of length `k`.
    ZsumBoxes,
    /// An explicit finite list of sets, indexed from 1.
    Custom { sets: Vec<Vec<Vec<i64>>> },
}

impl SeqKind {
    pub fn name(&self) -> &'static str {
        match self {
            SeqKind::ZBoxes => "z_boxes",
            SeqKind::ShiftedZBoxes { .. } => "shifted_z_boxes",
            SeqKind::CyclicPrefix => "cyclic_prefix",
            SeqKind::ZsumBoxes => "zsum_boxes",
            SeqKind::Custom { .. } => "custom",
        }
    }
}

type RestrictFn = dyn Fn(&FinSet, &SeqIndex) -> Result<FinSet> + Send + Sync;

/// A rule producing `E_n ⊆ F_n`.
#[derive(Clone)]
pub enum Restriction {
    Identity,
    /// Remove the largest element.
    DropMax,
    /// `F_n ∩ ⋂_{g∈T} g⁻¹F_n`.
    Interior(FinSet),
    Custom(Arc<RestrictFn>),
}

impl fmt::Debug for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Restriction::Identity => write!(f, "Identity"),
            Restriction::DropMax => write!(f, "DropMax"),
            Restriction::Interior(t) => write!(f, "Interior({t:?})"),
            Restriction::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Restriction {
    fn apply(&self, f: &FinSet, index: &SeqIndex) -> Result<FinSet> {
        let out = match self {
            Restriction::Identity => f.clone(),
            Restriction::DropMax => {
                let mut elems = f.elems().to_vec();
                elems.pop();
                FinSet::new(f.group(), elems)?
            }
            Restriction::Interior(t) => interior(f, t)?,
            Restriction::Custom(rule) => {
                let e = rule(f, index)?;
                if !e.is_subset(f)? {
                    return Err(LabError::Config(format!("restriction at {index} is not a subset")));
                }
                e
            }
        };
        out.require_non_empty(&format!("restricted set at index {index}"))?;
        Ok(out)
    }
}

/// `F ∩ ⋂_{g∈T} g⁻¹F`: the points of `F` that stay in `F` under every `g ∈ T`.
pub fn interior(f: &FinSet, t: &FinSet) -> Result<FinSet> {
    let group = f.group();
    let kept = f
        .iter()
        .filter(|x| t.iter().all(|g| f.contains(&group.mul_unchecked(g, x))))
        .cloned()
        .collect::<Vec<_>>();
    Ok(FinSet::from_sorted(group, kept))
}

/// A Følner sequence on a fixed group.
#[derive(Clone, Debug)]
pub struct FolnerSeq {
    group: Group,
    kind: SeqKind,
    restriction: Restriction,
}

impl FolnerSeq {
    pub fn new(group: &Group, kind: SeqKind) -> Result<Self> {
        let ok = match (&kind, group) {
            (SeqKind::ZBoxes | SeqKind::ShiftedZBoxes { .. }, Group::ZPower { .. }) => true,
            (SeqKind::CyclicPrefix, Group::CyclicSum { .. }) => true,
            (SeqKind::ZsumBoxes, Group::ZSum) => true,
            (SeqKind::Custom { sets }, _) => {
                if sets.is_empty() {
                    return Err(LabError::EmptySet("custom sequence has no sets".into()));
                }
                for (i, s) in sets.iter().enumerate() {
                    FinSet::from_coords(group, s)?.require_non_empty(&format!("custom set {}", i + 1))?;
                }
                true
            }
            _ => false,
        };
        if !ok {
            return Err(LabError::Unsupported(format!("{} on {group}", kind.name())));
        }
        Ok(FolnerSeq { group: group.clone(), kind, restriction: Restriction::Identity })
    }

    pub fn z_boxes(group: &Group) -> Result<Self> {
        Self::new(group, SeqKind::ZBoxes)
    }

    pub fn cyclic_prefix(group: &Group) -> Result<Self> {
        Self::new(group, SeqKind::CyclicPrefix)
    }

    pub fn zsum_boxes() -> Self {
        FolnerSeq { group: Group::ZSum, kind: SeqKind::ZsumBoxes, restriction: Restriction::Identity }
    }

    pub fn shifted_z_boxes(group: &Group, coef: i64, power: u32) -> Result<Self> {
        Self::new(group, SeqKind::ShiftedZBoxes { coef, power })
    }

    pub fn custom(group: &Group, sets: &[FinSet]) -> Result<Self> {
        Self::new(group, SeqKind::Custom { sets: sets.iter().map(FinSet::to_coords).collect() })
    }

    /// The wrapped sequence `E_n = rule(F_n)`.
    pub fn restricted(&self, rule: Restriction) -> Self {
        FolnerSeq { restriction: rule, ..self.clone() }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn kind(&self) -> &SeqKind {
        &self.kind
    }

    pub fn is_restricted(&self) -> bool {
        !matches!(self.restriction, Restriction::Identity)
    }

    pub fn name(&self) -> String {
        if self.is_restricted() {
            format!("{}[restricted]", self.kind.name())
        } else {
            self.kind.name().to_string()
        }
    }

    /// Largest valid linear index, if finite.
    pub fn max_index(&self) -> Option<u64> {
        match &self.kind {
            SeqKind::Custom { sets } => Some(sets.len() as u64),
            _ => None,
        }
    }

    fn out_of_domain(&self, index: &SeqIndex) -> LabError {
        LabError::IndexOutOfDomain { sequence: self.name(), index: index.to_string() }
    }

    /// The side lengths of the box at `index` (built-in box sequences).
    pub fn box_sides(&self, index: &SeqIndex) -> Result<Vec<u64>> {
        let bad = || self.out_of_domain(index);
        match (&self.kind, index) {
            (SeqKind::ZBoxes | SeqKind::ShiftedZBoxes { .. }, SeqIndex::Linear(n)) if *n >= 1 => {
                Ok(vec![*n; self.group.dim().unwrap()])
            }
            (SeqKind::ZBoxes, SeqIndex::Tuple(t))
                if t.len() == self.group.dim().unwrap() && t.iter().all(|&v| v >= 1) =>
            {
                Ok(t.clone())
            }
            (SeqKind::CyclicPrefix, SeqIndex::Linear(n)) if *n >= 1 => {
                Ok((0..*n as usize).map(|i| self.group.period(i).unwrap()).collect())
            }
            (SeqKind::ZsumBoxes, SeqIndex::Linear(k)) if *k >= 1 => Ok(vec![*k; *k as usize]),
            (SeqKind::ZsumBoxes, SeqIndex::Tuple(t)) if !t.is_empty() && t.iter().all(|&v| v >= 1) => {
                Ok(t.clone())
            }
            _ => Err(bad()),
        }
    }

    /// The unrestricted set at `index` as a grid, when it is one.
    pub fn base_grid(&self, index: &SeqIndex) -> Result<Option<Grid>> {
        match &self.kind {
            SeqKind::Custom { .. } => Ok(self.base_set(index)?.to_grid()),
            SeqKind::ShiftedZBoxes { coef, power } => {
                let sides = self.box_sides(index)?;
                let n = sides[0];
                let lo = shift_offset(*coef, *power, n).ok_or_else(|| self.out_of_domain(index))?;
                Ok(Some(Grid::cube(sides.len(), lo, n)))
            }
            _ => {
                let sides = self.box_sides(index)?;
                Ok(Some(Grid::new(sides.into_iter().map(|len| Axis::Interval { lo: 0, len }).collect())))
            }
        }
    }

    /// The set at `index` as a grid, if it is one. Restricted sequences are
    /// inspected after materialization.
    pub fn grid(&self, index: &SeqIndex) -> Result<Option<Grid>> {
        if self.is_restricted() {
            return Ok(self.generate(index)?.to_grid());
        }
        self.base_grid(index)
    }

    fn base_set(&self, index: &SeqIndex) -> Result<FinSet> {
        match &self.kind {
            SeqKind::Custom { sets } => match index {
                SeqIndex::Linear(n) if *n >= 1 && *n as usize <= sets.len() => {
                    FinSet::from_coords(&self.group, &sets[*n as usize - 1])
                }
                _ => Err(self.out_of_domain(index)),
            },
            _ => {
                let grid = self.base_grid(index)?.expect("built-in sets are grids");
                if grid.card() > PRODUCT_BUDGET {
                    return Err(LabError::BudgetExceeded(format!("|F_{index}| = {}", grid.card())));
                }
                Ok(grid.materialize(&self.group))
            }
        }
    }

    pub fn generate(&self, index: &SeqIndex) -> Result<FinSet> {
        let base = self.base_set(index)?;
        self.restriction.apply(&base, index)
    }

    /// `F_n` for a linear index.
    pub fn set(&self, n: u64) -> Result<FinSet> {
        self.generate(&SeqIndex::Linear(n))
    }

    /// |F_n| without materializing, where possible.
    pub fn card(&self, index: &SeqIndex) -> Result<u128> {
        match self.grid(index)? {
            Some(g) => Ok(g.card()),
            None => Ok(self.generate(index)?.len() as u128),
        }
    }
}

fn shift_offset(coef: i64, power: u32, n: u64) -> Option<i64> {
    i64::try_from(n).ok()?.checked_pow(power)?.checked_mul(coef)
}

fn ratio(num: u128, den: u128) -> Result<Rational> {
    let num = u64::try_from(num).map_err(|_| LabError::BudgetExceeded("ratio overflow".into()))?;
    let den = u64::try_from(den).map_err(|_| LabError::BudgetExceeded("ratio overflow".into()))?;
    Ok(Rational::new(num, den))
}

fn check_budget(a: usize, b: usize, what: &str) -> Result<()> {
    let work = a as u128 * b as u128;
    if work > PRODUCT_BUDGET {
        Err(LabError::BudgetExceeded(format!("{what}: {work} products")))
    } else {
        Ok(())
    }
}

/// `|F Δ KF| / |F|`.
pub fn folner_defect(k: &FinSet, f: &FinSet) -> Result<Rational> {
    f.require_non_empty("Følner defect denominator")?;
    k.require_non_empty("Følner defect translating set")?;
    check_budget(k.len(), f.len(), "Følner defect")?;
    let kf = k.product(f)?;
    ratio(f.symmetric_difference(&kf)?.len() as u128, f.len() as u128)
}

/// Outcome of a `(K, δ)`-invariance test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    /// `|K⁻¹A ∩ K⁻¹(G∖A)|`.
    pub boundary: u64,
    pub card: u64,
    pub invariant: bool,
}

/// Tests `|K⁻¹A ∩ K⁻¹(G∖A)| < δ|A|` exactly. A point `x ∈ K⁻¹A` lies in
/// `K⁻¹(G∖A)` iff some `k ∈ K` sends it outside `A`.
pub fn invariance_check(a: &FinSet, k: &FinSet, delta: Rational) -> Result<InvarianceReport> {
    a.require_non_empty("invariance set")?;
    k.require_non_empty("invariance translating set")?;
    check_budget(k.len(), a.len(), "invariance check")?;
    let group = a.group();
    let candidates = k.inverse().product(a)?;
    let boundary = candidates
        .iter()
        .filter(|x| k.iter().any(|kk| !a.contains(&group.mul_unchecked(kk, x))))
        .count() as u64;
    let card = a.len() as u64;
    let invariant = (boundary as u128) * (*delta.denom() as u128) < (*delta.numer() as u128) * card as u128;
    Ok(InvarianceReport { boundary, card, invariant })
}

/// `|(⋃_{k≤n} F_k)⁻¹ F_target| / |F_target|`; equals the size of the union of
/// the `F_k⁻¹F_target` because products distribute over unions.
fn union_ratio(seq: &FolnerSeq, n: u64, target: u64) -> Result<Rational> {
    let group = seq.group();
    let grids = (1..=n)
        .map(|k| seq.grid(&SeqIndex::Linear(k)))
        .collect::<Result<Vec<_>>>()?;
    let target_grid = seq.grid(&SeqIndex::Linear(target))?;
    if let (Some(gs), Some(tg)) = (grids.iter().cloned().collect::<Option<Vec<Grid>>>(), target_grid) {
        let nested = gs.windows(2).all(|w| w[0].is_subset(&w[1], group));
        if nested {
            let last = gs.last().unwrap();
            return ratio(last.inverse(group).product(&tg, group).card(), tg.card());
        }
    }
    let mut union = FinSet::empty(group);
    for k in 1..=n {
        union = union.union(&seq.set(k)?)?;
    }
    let target_set = seq.set(target)?;
    check_budget(union.len(), target_set.len(), "union ratio")?;
    let prod = union.inverse().product(&target_set)?;
    ratio(prod.len() as u128, target_set.len() as u128)
}

/// The materialized oracle for `tempelman_ratio`, forming every `F_k⁻¹F_n`.
pub fn tempelman_ratio_materialized(seq: &FolnerSeq, n: u64) -> Result<Rational> {
    let fnn = seq.set(n)?;
    let mut union = FinSet::empty(seq.group());
    for k in 1..=n {
        let fk = seq.set(k)?;
        check_budget(fk.len(), fnn.len(), "Tempelman ratio")?;
        union = union.union(&fk.inverse().product(&fnn)?)?;
    }
    ratio(union.len() as u128, fnn.len() as u128)
}

/// `|⋃_{k≤n} F_k⁻¹F_n| / |F_n|`.
pub fn tempelman_ratio(seq: &FolnerSeq, n: u64) -> Result<Rational> {
    union_ratio(seq, n, n)
}

/// `|⋃_{k≤n} F_k⁻¹F_{n+1}| / |F_{n+1}|`.
pub fn tempered_ratio(seq: &FolnerSeq, n: u64) -> Result<Rational> {
    union_ratio(seq, n, n + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    /// `(n, ratio)` for every checked index.
    pub ratios: Vec<(u64, Rational)>,
    /// The maximum ratio.
    pub bound: Rational,
    /// Index attaining the maximum.
    pub argmax: u64,
}

fn max_report(ratios: Vec<(u64, Rational)>) -> BoundReport {
    let (argmax, bound) = ratios.iter().copied().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).unwrap();
    BoundReport { ratios, bound, argmax }
}

/// Maximum Tempelman ratio over `1 ≤ n ≤ big_n`.
pub fn tempelman_bound(seq: &FolnerSeq, big_n: u64) -> Result<BoundReport> {
    if big_n == 0 {
        return Err(LabError::Config("tempelman_bound needs N >= 1".into()));
    }
    let ratios = (1..=big_n).map(|n| Ok((n, tempelman_ratio(seq, n)?))).collect::<Result<Vec<_>>>()?;
    Ok(max_report(ratios))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TemperedReport {
    pub ratios: Vec<(u64, Rational)>,
    /// Smallest `M` valid for every checked index.
    pub witness: Rational,
    /// Whether `witness ≤ cap`.
    pub bounded: bool,
}

/// Tempered ratios for `1 ≤ n < big_n` (so the shifted index reaches `F_N`).
/// A single-set sequence is trivially tempered with witness 1.
pub fn tempered_check(seq: &FolnerSeq, big_n: u64, cap: Rational) -> Result<TemperedReport> {
    if big_n == 0 {
        return Err(LabError::Config("tempered_check needs N >= 1".into()));
    }
    let ratios = (1..big_n).map(|n| Ok((n, tempered_ratio(seq, n)?))).collect::<Result<Vec<_>>>()?;
    let witness = ratios.iter().map(|r| r.1).max().unwrap_or(Rational::from_integer(1));
    Ok(TemperedReport { ratios, witness, bounded: witness <= cap })
}

/// Per-generator defects `|F_n Δ gF_n| / |F_n|`.
pub fn generator_defects(seq: &FolnerSeq, index: &SeqIndex, gens: &[crate::group::Elem]) -> Result<Vec<Rational>> {
    let f = seq.generate(index)?;
    gens.iter()
        .map(|g| folner_defect(&FinSet::singleton(seq.group(), g.clone())?, &f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Group {
        Group::z()
    }

    fn q(a: u64, b: u64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn generate_examples() {
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        assert_eq!(seq.set(4).unwrap(), FinSet::ints(&z(), 0..4).unwrap());

        let c2 = Group::cyclic_sum(vec![2]).unwrap();
        let f3 = FolnerSeq::cyclic_prefix(&c2).unwrap().set(3).unwrap();
        assert_eq!(f3.len(), 8);
        assert!(f3.iter().all(|e| e.support_len() <= 3));

        let zs = FolnerSeq::zsum_boxes();
        let f = zs.generate(&SeqIndex::Tuple(vec![2, 3])).unwrap();
        let want: Vec<[i64; 2]> = (0..2).flat_map(|a| (0..3).map(move |b| [a, b])).collect();
        assert_eq!(f, FinSet::from_coords(&Group::ZSum, &want).unwrap());
        assert_eq!(zs.set(3).unwrap().len(), 27);
    }

    #[test]
    fn domain_errors() {
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        assert!(matches!(seq.set(0), Err(LabError::IndexOutOfDomain { .. })));
        assert!(seq.generate(&SeqIndex::Tuple(vec![1, 2])).is_err());
        assert!(FolnerSeq::cyclic_prefix(&z()).is_err());
        let c = FolnerSeq::custom(&z(), &[FinSet::identity(&z())]).unwrap();
        assert!(c.set(2).is_err());
    }

    #[test]
    fn defect_examples() {
        let k = FinSet::ints(&z(), [0, 1]).unwrap();
        let f = FinSet::ints(&z(), 0..10).unwrap();
        assert_eq!(folner_defect(&k, &f).unwrap(), q(1, 10));
        assert_eq!(folner_defect(&FinSet::identity(&z()), &f).unwrap(), q(0, 1));

        let z2 = Group::z_power(2).unwrap();
        let k2 = FinSet::from_coords(&z2, &[[0, 0], [1, 0]]).unwrap();
        let box5 = FolnerSeq::z_boxes(&z2).unwrap().set(5).unwrap();
        assert_eq!(folner_defect(&k2, &box5).unwrap(), q(5, 25));
    }

    #[test]
    fn invariance_examples() {
        let k = FinSet::ints(&z(), [0, 1]).unwrap();
        let a = FinSet::ints(&z(), 0..100).unwrap();
        let r = invariance_check(&a, &k, q(1, 20)).unwrap();
        // K⁻¹A = {-1..99}; the points -1 and 99 leave A under some k.
        assert_eq!(r.boundary, 2);
        assert!(r.invariant);

        let e = FinSet::identity(&z());
        let r = invariance_check(&e, &e, q(1, 2)).unwrap();
        assert_eq!((r.boundary, r.invariant), (0, true));

        let evens = FinSet::ints(&z(), (0..50).map(|i| 2 * i)).unwrap();
        let r = invariance_check(&evens, &k, q(1, 10)).unwrap();
        assert_eq!(r.boundary, 100);
        assert!(!r.invariant);
    }

    #[test]
    fn tempelman_examples() {
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        assert_eq!(tempelman_ratio(&seq, 3).unwrap(), q(5, 3));
        assert_eq!(tempelman_ratio_materialized(&seq, 3).unwrap(), q(5, 3));
        let b = tempelman_bound(&seq, 50).unwrap();
        assert!(b.bound <= q(2, 1));

        let c3 = Group::cyclic_sum(vec![3]).unwrap();
        let cp = FolnerSeq::cyclic_prefix(&c3).unwrap();
        assert_eq!(tempelman_bound(&cp, 6).unwrap().bound, q(1, 1));
    }

    #[test]
    fn tempered_examples() {
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let r = tempered_check(&seq, 20, q(2, 1)).unwrap();
        assert!(r.bounded);
        assert!(r.witness <= q(2, 1));

        let singles = FolnerSeq::custom(&z(), &vec![FinSet::identity(&z()); 5]).unwrap();
        let r = tempered_check(&singles, 5, q(1, 1)).unwrap();
        assert_eq!(r.witness, q(1, 1));
        assert!(r.bounded);

        let shifted = FolnerSeq::shifted_z_boxes(&z(), 1, 2).unwrap();
        assert_eq!(shifted.set(3).unwrap(), FinSet::ints(&z(), 9..12).unwrap());
        let r = tempered_check(&shifted, 12, q(1000, 1)).unwrap();
        for &(n, got) in &r.ratios {
            // The union of n disjoint blocks of lengths 1..n reflected against
            // the block of length n+1.
            assert_eq!(got, tempered_oracle_shifted(n));
        }
    }

    /// Brute-force enumeration of `⋃_{k≤n} F_k⁻¹F_{n+1}` for `a_n = n²`.
    fn tempered_oracle_shifted(n: u64) -> Rational {
        let mut pts = std::collections::BTreeSet::new();
        let m = n + 1;
        let am = (m * m) as i64;
        for k in 1..=n {
            let ak = (k * k) as i64;
            for x in ak..ak + k as i64 {
                for y in am..am + m as i64 {
                    pts.insert(y - x);
                }
            }
        }
        q(pts.len() as u64, m)
    }

    #[test]
    fn restriction_examples() {
        let seq = FolnerSeq::z_boxes(&z()).unwrap();
        let same = seq.restricted(Restriction::Identity);
        assert_eq!(tempelman_bound(&same, 10).unwrap(), tempelman_bound(&seq, 10).unwrap());

        let dropped = seq.restricted(Restriction::DropMax);
        assert_eq!(dropped.set(5).unwrap(), FinSet::ints(&z(), 0..4).unwrap());
        assert!(dropped.set(1).is_err());
        let k = FinSet::ints(&z(), [0, 1]).unwrap();
        let d: Vec<Rational> = (2..40).map(|n| folner_defect(&k, &dropped.set(n).unwrap()).unwrap()).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0]));
        assert!(*d.last().unwrap() < q(1, 20));

        let interior = seq.restricted(Restriction::Interior(k));
        for n in 2..30u64 {
            let e = interior.set(n).unwrap();
            assert_eq!(q(e.len() as u64, n), q(n - 1, n));
        }
    }

    #[test]
    fn grid_and_materialized_agree() {
        let z2 = Group::z_power(2).unwrap();
        let seq = FolnerSeq::z_boxes(&z2).unwrap();
        for n in 1..6 {
            assert_eq!(tempelman_ratio(&seq, n).unwrap(), tempelman_ratio_materialized(&seq, n).unwrap());
        }
        let zs = FolnerSeq::zsum_boxes();
        for n in 1..4 {
            assert_eq!(tempelman_ratio(&zs, n).unwrap(), tempelman_ratio_materialized(&zs, n).unwrap());
        }
        let shifted = FolnerSeq::shifted_z_boxes(&Group::z(), 1, 2).unwrap();
        for n in 1..8 {
            assert_eq!(tempelman_ratio(&shifted, n).unwrap(), tempelman_ratio_materialized(&shifted, n).unwrap());
        }
    }
}
