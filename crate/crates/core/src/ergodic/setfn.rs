use serde::{Deserialize, Serialize};

use super::{check_schedule, refuse};
use crate::error::{LabError, Result};
use crate::families::{classify_props, ClassifyConfig, Concave, Property, SetFamily};
use crate::folner::{FolnerSeq, SeqIndex};
use crate::group::{enumerate_finsets, EnumBudget, Elem, FinSet, Group};
use crate::systems::{Point, System};
use crate::tiling::{enumerate_tiles, standard_cert, TileBudget};

/// A deterministic function of finite sets, invariant under right
/// translation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetFunction {
    /// `c·|F|`.
    Scaled { c: f64 },
    /// `a·|F| + b` on non-empty sets.
    Affine { a: f64, b: f64 },
    /// `γ(|F|)`.
    Concave { gamma: Concave },
    /// `c·|F| + γ(|F|)`.
    CardPlusConcave { c: f64, gamma: Concave },
    /// `⌈|F|/2⌉`.
    HalfCeil,
    /// Number of maximal runs of consecutive integers along the first axis.
    Runs,
    /// `|F Δ (F + e₀)|`.
    Boundary,
    /// Number of lattice edges with exactly one endpoint in `F`.
    EdgeBoundary,
}

impl SetFunction {
    pub fn name(&self) -> &'static str {
        match self {
            SetFunction::Scaled { .. } => "scaled",
            SetFunction::Affine { .. } => "affine",
            SetFunction::Concave { .. } => "concave",
            SetFunction::CardPlusConcave { .. } => "card_plus_concave",
            SetFunction::HalfCeil => "half_ceil",
            SetFunction::Runs => "runs",
            SetFunction::Boundary => "boundary",
            SetFunction::EdgeBoundary => "edge_boundary",
        }
    }

    fn shifted_out(f: &FinSet, axis: usize) -> usize {
        let group = f.group();
        let mut step = vec![0i64; group.dim().unwrap_or(axis + 1)];
        step[axis] = 1;
        let g = group.elem(&step).expect("unit step");
        f.iter().filter(|x| !f.contains(&group.mul_unchecked(x, &g))).count()
    }

    pub fn value(&self, f: &FinSet) -> f64 {
        if f.is_empty() {
            return 0.0;
        }
        let n = f.len();
        match self {
            SetFunction::Scaled { c } => c * n as f64,
            SetFunction::Affine { a, b } => a * n as f64 + b,
            SetFunction::Concave { gamma } => gamma.eval(n),
            SetFunction::CardPlusConcave { c, gamma } => c * n as f64 + gamma.eval(n),
            SetFunction::HalfCeil => n.div_ceil(2) as f64,
            SetFunction::Runs => Self::shifted_out(f, 0) as f64,
            SetFunction::Boundary => 2.0 * Self::shifted_out(f, 0) as f64,
            SetFunction::EdgeBoundary => {
                let axes = f.group().dim().unwrap_or_else(|| f.iter().map(Elem::support_len).max().unwrap_or(1));
                (0..axes).map(|i| 2 * Self::shifted_out(f, i)).sum::<usize>() as f64
            }
        }
    }

    fn validate(&self, group: &Group) -> Result<()> {
        let periodic = (0..group.dim().unwrap_or(1)).any(|i| group.period(i).is_some());
        match self {
            SetFunction::Runs | SetFunction::Boundary | SetFunction::EdgeBoundary if periodic => {
                Err(LabError::Unsupported(format!("{} needs torsion-free axes", self.name())))
            }
            SetFunction::Runs if group.dim() != Some(1) => Err(LabError::Unsupported("runs are defined on Z".into())),
            _ => Ok(()),
        }
    }
}

impl SetFamily for SetFunction {
    fn eval(&self, _sys: &System, f: &FinSet, _y: &Point) -> Result<f64> {
        Ok(self.value(f))
    }

    fn label(&self) -> String {
        self.name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitStatus {
    Converged,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetFnLimit {
    /// `(n, f(F_n)/|F_n|)`.
    pub sequence: Vec<(u64, f64)>,
    /// The value at the largest index.
    pub limit: f64,
    /// Smallest `f(T)/|T|` over the enumerated collection.
    pub inf: f64,
    pub inf_card: usize,
    pub candidates: usize,
    pub gap: f64,
    pub status: LimitStatus,
}

fn gate(f: &SetFunction, group: &Group, cfg: &ClassifyConfig, props: &[Property]) -> Result<()> {
    f.validate(group)?;
    let sys = System::bernoulli(group, vec![1.0], 0)?;
    let report = classify_props(f, &sys, cfg, props)?;
    if let Some(c) = report.first_failure(props) {
        return Err(refuse(&c.property.to_string(), format!("{}: lhs {} vs rhs {}", f.name(), c.lhs, c.rhs)));
    }
    Ok(())
}

fn conclude(f: &SetFunction, seq: &FolnerSeq, schedule: &[u64], sets: impl Iterator<Item = FinSet>, tol: f64) -> Result<SetFnLimit> {
    check_schedule(schedule)?;
    let sequence: Vec<(u64, f64)> = schedule
        .iter()
        .map(|&n| {
            let s = seq.set(n)?;
            Ok((n, f.value(&s) / s.len() as f64))
        })
        .collect::<Result<_>>()?;
    let mut inf = f64::INFINITY;
    let mut inf_card = 0;
    let mut candidates = 0;
    for s in sets {
        candidates += 1;
        let v = f.value(&s) / s.len() as f64;
        if v < inf {
            inf = v;
            inf_card = s.len();
        }
    }
    if candidates == 0 {
        return Err(LabError::Config("empty enumeration".into()));
    }
    let limit = sequence.last().unwrap().1;
    let gap = (limit - inf).abs();
    let status = if gap <= tol * (1.0 + limit.abs()) { LimitStatus::Converged } else { LimitStatus::Inconclusive };
    Ok(SetFnLimit { sequence, limit, inf, inf_card, candidates, gap, status })
}

/// `lim f(F_n)/|F_n|` along a tiling sequence, next to the infimum over
/// enumerated tiles. Needs `f` sub-additive and right-invariant.
pub fn setfn_limit_tiling(
    f: &SetFunction,
    seq: &FolnerSeq,
    schedule: &[u64],
    tiles: &TileBudget,
    cfg: &ClassifyConfig,
    tol: f64,
) -> Result<SetFnLimit> {
    gate(f, seq.group(), cfg, &[Property::Subadditive, Property::Invariant])?;
    for &n in schedule {
        standard_cert(seq, &SeqIndex::Linear(n)).map_err(|e| refuse("tiling", format!("F_{n}: {e}")))?;
    }
    let certs = enumerate_tiles(seq.group(), tiles)?;
    conclude(f, seq, schedule, certs.into_iter().map(|c| c.tile), tol)
}

/// `lim f(F_n)/|F_n|` along any Følner sequence, next to the infimum over
/// enumerated finite sets. Needs `f` strongly sub-additive and right-invariant.
pub fn setfn_limit_strong(
    f: &SetFunction,
    seq: &FolnerSeq,
    schedule: &[u64],
    budget: &EnumBudget,
    cfg: &ClassifyConfig,
    tol: f64,
) -> Result<SetFnLimit> {
    gate(f, seq.group(), cfg, &[Property::StronglySubadditive, Property::Invariant])?;
    let sets = enumerate_finsets(seq.group(), budget)?;
    conclude(f, seq, schedule, sets, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Group {
        Group::z()
    }

    fn cfg() -> ClassifyConfig {
        ClassifyConfig { trials: 400, ..Default::default() }
    }

    fn boxes() -> FolnerSeq {
        FolnerSeq::z_boxes(&z()).unwrap()
    }

    const SCHEDULE: [u64; 6] = [1, 2, 4, 8, 16, 32];

    #[test]
    fn values() {
        let f = FinSet::ints(&z(), [0, 1, 2, 5, 7, 8]).unwrap();
        assert_eq!(SetFunction::Runs.value(&f), 3.0);
        assert_eq!(SetFunction::Boundary.value(&f), 6.0);
        assert_eq!(SetFunction::HalfCeil.value(&f), 3.0);
        let sq = FinSet::from_coords(&Group::z_power(2).unwrap(), &[[0, 0], [0, 1], [1, 0], [1, 1]]).unwrap();
        assert_eq!(SetFunction::EdgeBoundary.value(&sq), 8.0);
    }

    #[test]
    fn card_plus_one_decreases_to_one() {
        let f = SetFunction::Affine { a: 1.0, b: 1.0 };
        let r = setfn_limit_tiling(&f, &boxes(), &SCHEDULE, &TileBudget::new(32), &cfg(), 0.05).unwrap();
        for (n, v) in &r.sequence {
            assert_eq!(*v, (*n as f64 + 1.0) / *n as f64);
        }
        assert_eq!(r.inf, 33.0 / 32.0);
        assert_eq!(r.status, LimitStatus::Converged);
    }

    #[test]
    fn scaled_is_constant() {
        let f = SetFunction::Scaled { c: 3.0 };
        let r = setfn_limit_tiling(&f, &boxes(), &SCHEDULE, &TileBudget::new(8), &cfg(), 0.05).unwrap();
        assert!(r.sequence.iter().all(|(_, v)| *v == 3.0));
        assert_eq!((r.limit, r.inf, r.gap), (3.0, 3.0, 0.0));
    }

    #[test]
    fn runs_vanish() {
        let r = setfn_limit_tiling(&SetFunction::Runs, &boxes(), &SCHEDULE, &TileBudget::new(32), &cfg(), 0.05).unwrap();
        assert_eq!(r.limit, 1.0 / 32.0);
        assert_eq!(r.inf, 1.0 / 32.0);
    }

    #[test]
    fn strong_limits() {
        let sqrt = SetFunction::Concave { gamma: Concave::sqrt() };
        let budget = EnumBudget::new(3, -2, 2).with_boxes(64);
        let schedule = [1, 4, 16, 64];
        let a = setfn_limit_strong(&sqrt, &boxes(), &schedule, &budget, &cfg(), 0.05).unwrap();
        let shifted = FolnerSeq::shifted_z_boxes(&z(), 1, 2).unwrap();
        let b = setfn_limit_strong(&sqrt, &shifted, &schedule, &budget, &cfg(), 0.05).unwrap();
        assert_eq!(a.sequence, b.sequence);
        assert_eq!(a.inf, 1.0 / 8.0);
        assert_eq!(a.status, LimitStatus::Converged);
        let small = EnumBudget::new(3, -2, 2).with_boxes(4);
        let c = setfn_limit_strong(&sqrt, &boxes(), &schedule, &small, &cfg(), 0.05).unwrap();
        assert_eq!(c.status, LimitStatus::Inconclusive);

        let card = SetFunction::Scaled { c: 1.0 };
        let r = setfn_limit_strong(&card, &boxes(), &schedule, &budget, &cfg(), 0.05).unwrap();
        assert_eq!((r.limit, r.inf), (1.0, 1.0));
    }

    #[test]
    fn half_ceil_is_not_strongly_subadditive() {
        let r = setfn_limit_strong(&SetFunction::HalfCeil, &boxes(), &SCHEDULE, &EnumBudget::new(3, -2, 2), &cfg(), 0.05);
        assert!(matches!(r, Err(LabError::GateRefused { .. })), "{r:?}");
        let r = setfn_limit_tiling(&SetFunction::HalfCeil, &boxes(), &SCHEDULE, &TileBudget::new(32), &cfg(), 0.05).unwrap();
        assert_eq!((r.limit, r.inf), (0.5, 0.5));
    }
}
