//! Tiling certificates, exact window cover checks and self-similar
//! composition `T·π(F)`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::folner::{folner_defect, FolnerSeq, Rational, SeqIndex, SeqKind, PRODUCT_BUDGET};
use crate::grid::{Axis, Grid};
use crate::group::{Elem, FinSet, Group};

/// A set of tile centers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CenterSet {
    /// `{c : c_i ≡ r_i (mod moduli_i) for i < moduli.len()}` for some residue
    /// vector `r`; later coordinates are unconstrained.
    Periodic { moduli: Vec<u64>, residues: Vec<Vec<i64>> },
    /// A finite list of centers.
    Explicit { points: Vec<Vec<i64>> },
}

impl CenterSet {
    /// The subgroup `⊕ m_i ℤ` (with unconstrained tail).
    pub fn lattice(moduli: Vec<u64>) -> Self {
        let zero = vec![0; moduli.len()];
        CenterSet::Periodic { moduli, residues: vec![zero] }
    }

    pub fn validate(&self, group: &Group) -> Result<()> {
        match self {
            CenterSet::Periodic { moduli, residues } => {
                if moduli.contains(&0) {
                    return Err(LabError::InvalidCert("modulus 0".into()));
                }
                if let Some(d) = group.dim() {
                    if moduli.len() > d {
                        return Err(LabError::InvalidCert(format!("{} moduli for {group}", moduli.len())));
                    }
                }
                if residues.is_empty() || residues.iter().any(|r| r.len() != moduli.len()) {
                    return Err(LabError::InvalidCert("each residue needs one entry per modulus".into()));
                }
                Ok(())
            }
            CenterSet::Explicit { points } => {
                FinSet::from_coords(group, points)?.require_non_empty("explicit centers")
            }
        }
    }

    pub fn contains(&self, c: &Elem) -> bool {
        match self {
            CenterSet::Periodic { moduli, residues } => residues.iter().any(|r| {
                moduli
                    .iter()
                    .zip(r)
                    .enumerate()
                    .all(|(i, (&m, &ri))| (c.coord(i) - ri).rem_euclid(m as i64) == 0)
            }),
            CenterSet::Explicit { points } => {
                let support = c.support_len();
                points.iter().any(|p| {
                    (0..p.len().max(support)).all(|i| p.get(i).copied().unwrap_or(0) == c.coord(i))
                })
            }
        }
    }

    /// Whether this is a subgroup of the form `⊕ m_i ℤ ⊕ (free tail)`.
    fn lattice_moduli(&self) -> Option<&[u64]> {
        match self {
            CenterSet::Periodic { moduli, residues }
                if residues.len() == 1 && residues[0].iter().zip(moduli).all(|(r, m)| r.rem_euclid(*m as i64) == 0) =>
            {
                Some(moduli)
            }
            _ => None,
        }
    }
}

/// An injective homomorphism from the group onto the center subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelfSimilarIso {
    /// Multiply coordinate `i` by `factors[i]`; later coordinates are fixed.
    Scale { factors: Vec<i64> },
    /// Move coordinate `i` to `i + by`.
    Shift { by: usize },
}

impl SelfSimilarIso {
    pub fn validate(&self, group: &Group) -> Result<()> {
        match (self, group) {
            (SelfSimilarIso::Scale { factors }, Group::ZPower { d }) if factors.len() == *d => {}
            (SelfSimilarIso::Scale { .. }, Group::ZSum) => {}
            (SelfSimilarIso::Shift { .. }, Group::ZSum) => {}
            (SelfSimilarIso::Shift { .. }, Group::CyclicSum { periods }) if periods.iter().all(|&p| p == periods[0]) => {}
            _ => return Err(LabError::InvalidCert(format!("{self:?} is not an injective endomorphism of {group}"))),
        }
        if let SelfSimilarIso::Scale { factors } = self {
            if factors.contains(&0) {
                return Err(LabError::InvalidCert("zero scale factor".into()));
            }
        }
        Ok(())
    }

    pub fn apply(&self, group: &Group, g: &Elem) -> Elem {
        let coords: Vec<i64> = match self {
            SelfSimilarIso::Scale { factors } => {
                let n = g.support_len().max(factors.len());
                (0..n).map(|i| g.coord(i) * factors.get(i).copied().unwrap_or(1)).collect()
            }
            SelfSimilarIso::Shift { by } => std::iter::repeat_n(0, *by).chain(g.coords().iter().copied()).collect(),
        };
        group.elem(&coords).expect("image of a valid element")
    }

    /// `π⁻¹(c)` when `c` lies in the image.
    pub fn preimage(&self, group: &Group, c: &Elem) -> Option<Elem> {
        let coords: Vec<i64> = match self {
            SelfSimilarIso::Scale { factors } => {
                let n = c.support_len().max(factors.len());
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let f = factors.get(i).copied().unwrap_or(1);
                    let v = c.coord(i);
                    if v % f != 0 {
                        return None;
                    }
                    out.push(v / f);
                }
                out
            }
            SelfSimilarIso::Shift { by } => {
                if (0..*by).any(|i| c.coord(i) != 0) {
                    return None;
                }
                c.coords().iter().skip(*by).copied().collect()
            }
        };
        if let Some(d) = group.dim() {
            if coords.len() != d {
                return None;
            }
        }
        group.elem(&coords).ok()
    }

    pub fn apply_set(&self, f: &FinSet) -> FinSet {
        FinSet::from_unsorted(f.group(), f.iter().map(|g| self.apply(f.group(), g)).collect())
    }

    pub fn apply_grid(&self, grid: &Grid) -> Grid {
        match self {
            SelfSimilarIso::Scale { factors } => Grid::new(
                grid.axes()
                    .iter()
                    .enumerate()
                    .map(|(i, a)| match factors.get(i).copied().unwrap_or(1) {
                        1 => a.clone(),
                        s => {
                            let mut pts: Vec<i64> = a.points(None).into_iter().map(|v| v * s).collect();
                            pts.sort_unstable();
                            Axis::from_points(pts, None)
                        }
                    })
                    .collect(),
            ),
            SelfSimilarIso::Shift { by } => Grid::new(
                std::iter::repeat_n(Axis::Interval { lo: 0, len: 1 }, *by)
                    .chain(grid.axes().iter().cloned())
                    .collect(),
            ),
        }
    }
}

/// Result of an exact window cover check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub window: usize,
    /// Window points covered by no translate.
    pub gaps: usize,
    /// Window points covered more than once.
    pub overlaps: usize,
}

impl CoverReport {
    pub fn exact(&self) -> bool {
        self.gaps == 0 && self.overlaps == 0
    }
}

/// Checks that the translates `T·c` cover each point of `window` exactly
/// once, counting for each `w` the tiles `t` with `t⁻¹w` a center.
pub fn tiles_window(tile: &FinSet, centers: &CenterSet, window: &FinSet) -> Result<CoverReport> {
    tile.require_non_empty("tile")?;
    if tile.len() as u128 * window.len() as u128 > PRODUCT_BUDGET {
        return Err(LabError::BudgetExceeded(format!("window of {} points", window.len())));
    }
    let group = tile.group();
    let inv: Vec<Elem> = tile.inverse().elems().to_vec();
    let (mut gaps, mut overlaps) = (0, 0);
    for w in window.iter() {
        let hits = inv.iter().filter(|ti| centers.contains(&group.mul_unchecked(ti, w))).count();
        match hits {
            0 => gaps += 1,
            1 => {}
            _ => overlaps += 1,
        }
    }
    Ok(CoverReport { window: window.len(), gaps, overlaps })
}

/// A tile, its centers and an optional self-similarity.
#[derive(Clone, Debug, PartialEq)]
pub struct TilingCert {
    pub tile: FinSet,
    pub centers: CenterSet,
    pub iso: Option<SelfSimilarIso>,
}

impl TilingCert {
    pub fn new(tile: FinSet, centers: CenterSet, iso: Option<SelfSimilarIso>) -> Result<Self> {
        tile.require_non_empty("tile")?;
        centers.validate(tile.group())?;
        if let Some(iso) = &iso {
            iso.validate(tile.group())?;
        }
        Ok(TilingCert { tile, centers, iso })
    }

    pub fn group(&self) -> &Group {
        self.tile.group()
    }

    pub fn tiles_window(&self, window: &FinSet) -> Result<CoverReport> {
        tiles_window(&self.tile, &self.centers, window)
    }

    fn iso(&self) -> Result<&SelfSimilarIso> {
        self.iso.as_ref().ok_or_else(|| LabError::InvalidCert("certificate has no self-similarity".into()))
    }

    /// Checks the homomorphism laws of the iso on `sample` and that its image
    /// lies in the centers.
    pub fn check_iso(&self, sample: &[Elem]) -> Result<bool> {
        let iso = self.iso()?;
        let g = self.group();
        if iso.apply(g, &g.identity()) != g.identity() {
            return Ok(false);
        }
        for a in sample {
            let pa = iso.apply(g, a);
            if !self.centers.contains(&pa) || iso.preimage(g, &pa).as_ref() != Some(a) {
                return Ok(false);
            }
            for b in sample {
                if iso.apply(g, &g.mul_unchecked(a, b)) != g.mul_unchecked(&pa, &iso.apply(g, b)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `T·π(F)`, refusing when the translates overlap.
    pub fn compose(&self, f: &FinSet) -> Result<FinSet> {
        f.require_non_empty("composed set")?;
        let iso = self.iso()?;
        if let (Some(tg), Some(fg)) = (self.tile.to_grid(), f.to_grid()) {
            let grid = self.compose_grid(&tg, &fg)?;
            if grid.card() > PRODUCT_BUDGET {
                return Err(LabError::BudgetExceeded(format!("|T·π(F)| = {}", grid.card())));
            }
            return Ok(grid.materialize(self.group()));
        }
        if self.tile.len() as u128 * f.len() as u128 > PRODUCT_BUDGET {
            return Err(LabError::BudgetExceeded("T·π(F)".into()));
        }
        let out = self.tile.product(&iso.apply_set(f))?;
        if out.len() != self.tile.len() * f.len() {
            return Err(LabError::InvalidCert(format!(
                "translates overlap: |T·π(F)| = {} < {}·{}",
                out.len(),
                self.tile.len(),
                f.len()
            )));
        }
        Ok(out)
    }

    /// Grid form of `compose` for grid tiles and grid sets.
    pub fn compose_grid(&self, tile: &Grid, f: &Grid) -> Result<Grid> {
        let iso = self.iso()?;
        let out = tile.product(&iso.apply_grid(f), self.group());
        if out.card() != tile.card().saturating_mul(f.card()) {
            return Err(LabError::InvalidCert("translates overlap".into()));
        }
        Ok(out)
    }
}

/// The certificate of a built-in sequence at `index`.
pub fn standard_cert(seq: &FolnerSeq, index: &SeqIndex) -> Result<TilingCert> {
    if seq.is_restricted() {
        return Err(LabError::Unsupported("no standard certificate for restricted sequences".into()));
    }
    let group = seq.group();
    let tile = seq.generate(index)?;
    let sides = match seq.kind() {
        SeqKind::Custom { .. } => {
            return Err(LabError::Unsupported("no standard certificate for custom sequences".into()))
        }
        _ => seq.box_sides(index)?,
    };
    let (centers, iso) = match seq.kind() {
        SeqKind::CyclicPrefix => {
            let centers = CenterSet::lattice(sides.clone());
            let iso = SelfSimilarIso::Shift { by: sides.len() };
            (centers, iso.validate(group).is_ok().then_some(iso))
        }
        _ => {
            let factors = sides.iter().map(|&s| s as i64).collect();
            (CenterSet::lattice(sides), Some(SelfSimilarIso::Scale { factors }))
        }
    };
    TilingCert::new(tile, centers, iso)
}

/// `n*`: the index of `F_n π(F_n′)` for ⊕ℤ boxes.
pub fn nstar(n: &[u64], n2: &[u64]) -> Vec<u64> {
    zip_longest(n, n2, |a, b| a * b)
}

/// `n**`: the index of `F_n F_n′`.
pub fn nstarstar(n: &[u64], n2: &[u64]) -> Vec<u64> {
    zip_longest(n, n2, |a, b| a + b - 1)
}

/// `n***`: the index of `F_n ∪ F_n′`.
pub fn nstarstarstar(n: &[u64], n2: &[u64]) -> Vec<u64> {
    zip_longest(n, n2, |a, b| a.max(b))
}

fn zip_longest(a: &[u64], b: &[u64], f: impl Fn(u64, u64) -> u64) -> Vec<u64> {
    (0..a.len().max(b.len()))
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(&x), Some(&y)) => f(x, y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        })
        .collect()
}

/// The index `k` with `F_m π(F_n) = F_k` for the built-in sequences.
pub fn composed_index(seq: &FolnerSeq, m: &SeqIndex, n: &SeqIndex) -> Result<SeqIndex> {
    match (seq.kind(), m, n) {
        (SeqKind::ZBoxes, SeqIndex::Linear(a), SeqIndex::Linear(b)) => Ok(SeqIndex::Linear(a * b)),
        (SeqKind::ZBoxes, _, _) => Ok(SeqIndex::Tuple(nstar(&seq.box_sides(m)?, &seq.box_sides(n)?))),
        (SeqKind::CyclicPrefix, SeqIndex::Linear(a), SeqIndex::Linear(b)) => Ok(SeqIndex::Linear(a + b)),
        (SeqKind::ZsumBoxes, _, _) => Ok(SeqIndex::Tuple(nstar(&seq.box_sides(m)?, &seq.box_sides(n)?))),
        _ => Err(LabError::Unsupported(format!("no composition rule for {}", seq.name()))),
    }
}

/// Witness for the sandwich `F_m π(F_{n1}) ⊇ F_p ⊇ F_m π(F_{n2})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionB {
    pub m: u64,
    pub p: u64,
    pub n1: u64,
    pub n2: u64,
    /// `(|F_{n1}| − |F_{n2}|)·|F_m| / |F_p|`.
    pub gap: Rational,
}

enum Shape {
    Grid(Grid),
    Set(FinSet),
}

fn shape(seq: &FolnerSeq, n: u64) -> Result<Shape> {
    match seq.grid(&SeqIndex::Linear(n))? {
        Some(g) => Ok(Shape::Grid(g)),
        None => Ok(Shape::Set(seq.set(n)?)),
    }
}

fn composed_relation(cert: &TilingCert, tile: &Shape, f: &Shape, target: &Shape) -> Result<(bool, bool)> {
    let group = cert.group();
    if let (Shape::Grid(t), Shape::Grid(fg), Shape::Grid(p)) = (tile, f, target) {
        let c = cert.compose_grid(t, fg)?;
        return Ok((p.is_subset(&c, group), c.is_subset(p, group)));
    }
    let as_set = |s: &Shape| match s {
        Shape::Grid(g) => g.materialize(group),
        Shape::Set(s) => s.clone(),
    };
    let c = cert.compose(&as_set(f))?;
    let p = as_set(target);
    Ok((p.is_subset(&c)?, c.is_subset(&p)?))
}

/// Smallest `n1` and largest `n2 ≤ search_limit` with
/// `F_m π(F_{n1}) ⊇ F_p ⊇ F_m π(F_{n2})`.
pub fn condition_b_witness(seq: &FolnerSeq, m: u64, p: u64, search_limit: u64) -> Result<ConditionB> {
    let cert = standard_cert(seq, &SeqIndex::Linear(m))?;
    let tile = shape(seq, m)?;
    let target = shape(seq, p)?;
    let card_m = seq.card(&SeqIndex::Linear(m))?;
    let card_p = seq.card(&SeqIndex::Linear(p))?;
    let (mut n1, mut n2) = (None, None);
    for n in 1..=search_limit {
        let card_n = seq.card(&SeqIndex::Linear(n))?;
        let composed = card_m.saturating_mul(card_n);
        if n1.is_some() && composed > card_p {
            break;
        }
        let f = shape(seq, n)?;
        let (sup, sub) = composed_relation(&cert, &tile, &f, &target)?;
        if sub {
            n2 = Some((n, card_n));
        }
        if sup && n1.is_none() {
            n1 = Some((n, card_n));
        }
    }
    let ((n1, c1), (n2, c2)) = match (n1, n2) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(LabError::NoWitness(format!(
                "condition (b) sandwich for m={m}, p={p} within n <= {search_limit}"
            )))
        }
    };
    let num = c1
        .checked_sub(c2)
        .and_then(|d| d.checked_mul(card_m))
        .and_then(|v| u64::try_from(v).ok())
        .ok_or_else(|| LabError::BudgetExceeded("condition (b) gap overflow".into()))?;
    let den = u64::try_from(card_p).map_err(|_| LabError::BudgetExceeded("|F_p| overflow".into()))?;
    Ok(ConditionB { m, p, n1, n2, gap: Rational::new(num, den) })
}

/// Decides `A + B = G` for two lattice center subgroups coordinatewise:
/// the sum is everything iff `gcd(a_i, b_i, period_i) = 1` on every axis.
/// `None` when either center set is not such a subgroup.
pub fn subgroup_product_is_whole(a: &CenterSet, b: &CenterSet, group: &Group) -> Option<bool> {
    let (ma, mb) = (a.lattice_moduli()?, b.lattice_moduli()?);
    let n = ma.len().max(mb.len());
    Some((0..n).all(|i| {
        let x = ma.get(i).copied().unwrap_or(1);
        let y = mb.get(i).copied().unwrap_or(1);
        let g = x.gcd(&y);
        match group.period(i) {
            Some(p) => g.gcd(&p) == 1,
            None => g == 1,
        }
    }))
}

/// Window-only check of `A + B ⊇ window`, for center sets that are not
/// lattices. Every window point must split as `a + b` with `a ∈ A` drawn from
/// `search`.
pub fn subgroup_product_covers_window(a: &CenterSet, b: &CenterSet, search: &FinSet, window: &FinSet) -> bool {
    let group = window.group();
    let candidates: Vec<&Elem> = search.iter().filter(|x| a.contains(x)).collect();
    window.iter().all(|w| {
        candidates
            .iter()
            .any(|x| b.contains(&group.mul_unchecked(&group.inverse_unchecked(x), w)))
    })
}

/// `G_{F_m} G_{F_p} = G` for a built-in sequence.
pub fn condition_iii(seq: &FolnerSeq, m: u64, p: u64) -> Result<Option<bool>> {
    let a = standard_cert(seq, &SeqIndex::Linear(m))?;
    let b = standard_cert(seq, &SeqIndex::Linear(p))?;
    Ok(subgroup_product_is_whole(&a.centers, &b.centers, seq.group()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop51Report {
    /// `{T g : g ∈ G_{T2}}` partitions `G_{T1}` on the window.
    pub hypothesis: bool,
    /// `(n, max over generators of the defect of T π_{T2}(F_n) in G_{T1})`.
    pub defects: Vec<(u64, Rational)>,
    /// Whether `T π_{T2}(F_n)` tiles `G_{T1}` on the window.
    pub tiles: Vec<bool>,
    pub non_increasing: bool,
}

/// Composes the sequence through a tile `T` of `G_{T1}` whose
/// `G_{T2}`-translates partition `G_{T1}`, and reports the defects of the
/// composed sets inside `G_{T1}` together with their tiling property.
pub fn prop51_check(
    cert1: &TilingCert,
    cert2: &TilingCert,
    t: &FinSet,
    seq: &FolnerSeq,
    big_n: u64,
    window: &FinSet,
) -> Result<Prop51Report> {
    let group = seq.group();
    let iso1 = cert1.iso()?;
    let iso2 = cert2.iso()?;
    let sub_window: Vec<Elem> = window.iter().filter(|w| cert1.centers.contains(w)).cloned().collect();
    let sub_window = FinSet::from_sorted(group, sub_window);
    let inside = t.iter().all(|x| cert1.centers.contains(x));
    let hypothesis = inside && tiles_window(t, &cert2.centers, &sub_window)?.exact();
    if !hypothesis {
        return Err(LabError::GateRefused {
            hypothesis: "partition of G_T1 by translates of T".into(),
            detail: "fails on the verification window".into(),
        });
    }
    let composer = TilingCert { tile: t.clone(), centers: cert2.centers.clone(), iso: Some(iso2.clone()) };
    let gens: Vec<FinSet> = group
        .generators(2)
        .iter()
        .map(|g| FinSet::singleton(group, iso1.apply(group, g)))
        .collect::<Result<_>>()?;
    let mut defects = Vec::new();
    let mut tiles = Vec::new();
    for n in 1..=big_n {
        let idx = SeqIndex::Linear(n);
        let h = composer.compose(&seq.generate(&idx)?)?;
        let d = gens.iter().map(|g| folner_defect(g, &h)).collect::<Result<Vec<_>>>()?;
        defects.push((n, d.into_iter().max().unwrap()));
        let base = standard_cert(seq, &idx)?;
        let inv = h.inverse();
        let exact = sub_window.iter().all(|w| {
            inv.iter()
                .filter(|hi| {
                    iso2.preimage(group, &group.mul_unchecked(hi, w))
                        .is_some_and(|c| base.centers.contains(&c))
                })
                .count()
                == 1
        });
        tiles.push(exact);
    }
    let non_increasing = defects.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(Prop51Report { hypothesis, defects, tiles, non_increasing })
}

/// Bounds for `enumerate_tiles`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileBudget {
    /// Largest box side and progression length.
    pub max_side: u64,
    /// Largest step of arithmetic-progression tiles on ℤ.
    #[serde(default)]
    pub max_step: u64,
    /// Coordinates used for the sum groups.
    #[serde(default = "one")]
    pub width: usize,
}

fn one() -> usize {
    1
}

impl TileBudget {
    pub fn new(max_side: u64) -> Self {
        TileBudget { max_side, max_step: 0, width: 1 }
    }
}

fn side_tuples(dims: usize, choices: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for c in choices.iter().take(dims) {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Tiling sets with verified certificates: boxes (side tuples for up to two
/// axes, cubes beyond) and, on ℤ, arithmetic progressions `{0, k, …, (m−1)k}`
/// with centers `{0, …, k−1} + mkℤ`. Every certificate is checked on a window
/// before it is returned.
pub fn enumerate_tiles(group: &Group, budget: &TileBudget) -> Result<Vec<TilingCert>> {
    let dims = group.dim().unwrap_or(budget.width);
    let choices: Vec<Vec<u64>> = (0..dims)
        .map(|i| {
            (1..=budget.max_side)
                .filter(|&a| group.period(i).is_none_or(|p| p % a == 0))
                .collect()
        })
        .collect();
    let tuples: Vec<Vec<u64>> = if dims <= 2 {
        side_tuples(dims, &choices)
    } else {
        (1..=budget.max_side)
            .filter(|a| choices.iter().all(|c| c.contains(a)))
            .map(|a| vec![a; dims])
            .collect()
    };
    // Centers are periodic with these moduli, so two periods per axis
    // contain every residue class with its full neighbourhood.
    let verified = |cert: TilingCert, moduli: &[u64]| -> Result<TilingCert> {
        let window = Grid::new(moduli.iter().map(|&m| Axis::Interval { lo: -(m as i64), len: 2 * m }).collect());
        let report = cert.tiles_window(&window.materialize(group))?;
        if !report.exact() {
            return Err(LabError::InvalidCert(format!("enumerated tile {:?}: {report:?}", cert.tile)));
        }
        Ok(cert)
    };
    let mut certs = Vec::new();
    for sides in tuples {
        let grid = Grid::new(sides.iter().map(|&len| Axis::Interval { lo: 0, len }).collect());
        let tile = grid.materialize(group);
        let iso = match group {
            Group::CyclicSum { .. } => None,
            _ => Some(SelfSimilarIso::Scale { factors: sides.iter().map(|&s| s as i64).collect() }),
        };
        certs.push(verified(TilingCert::new(tile, CenterSet::lattice(sides.clone()), iso)?, &sides)?);
    }
    if group.dim() == Some(1) {
        for k in 2..=budget.max_step {
            for m in 1..=budget.max_side {
                let tile = FinSet::ints(group, (0..m as i64).map(|i| i * k as i64))?;
                let residues = (0..k as i64).map(|r| vec![r]).collect();
                let centers = CenterSet::Periodic { moduli: vec![m * k], residues };
                certs.push(verified(TilingCert::new(tile, centers, None)?, &[m * k])?);
            }
        }
    }
    Ok(certs)
}
