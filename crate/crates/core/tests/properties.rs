use folner_lab::ergodic::{greedy_cover, setfn_limit_strong, SetFunction};
use folner_lab::families::{ClassifyConfig, Concave, Family, SetFamily};
use folner_lab::folner::{folner_defect, tempelman_bound, tempered_check, FolnerSeq, Rational, SeqIndex};
use folner_lab::systems::{Observable, System};
use folner_lab::tiling::{composed_index, enumerate_tiles, standard_cert, TileBudget};
use folner_lab::{Elem, EnumBudget, FinSet, Group};
use proptest::prelude::*;

fn groups() -> Vec<Group> {
    vec![
        Group::z(),
        Group::z_power(2).unwrap(),
        Group::z_power(3).unwrap(),
        Group::cyclic_sum(vec![2, 3, 3]).unwrap(),
        Group::ZSum,
    ]
}

/// Coordinates for group `k`, reduced by `Group::elem` where periodic.
fn elem_of(g: &Group, raw: &[i64]) -> Elem {
    let coords: Vec<i64> = match g.dim() {
        Some(d) => raw[..d].to_vec(),
        None => raw.to_vec(),
    };
    let coords: Vec<i64> = coords
        .iter()
        .enumerate()
        .map(|(i, c)| match g.period(i) {
            Some(p) => c.rem_euclid(p as i64),
            None => *c,
        })
        .collect();
    g.elem(&coords).unwrap()
}

fn raw_elem() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, 4)
}

fn raw_set() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(raw_elem(), 1..8)
}

fn set_of(g: &Group, raw: &[Vec<i64>]) -> FinSet {
    FinSet::new(g, raw.iter().map(|r| elem_of(g, r))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn group_laws(k in 0usize..5, a in raw_elem(), b in raw_elem(), c in raw_elem()) {
        let g = &groups()[k];
        let (a, b, c) = (elem_of(g, &a), elem_of(g, &b), elem_of(g, &c));
        let e = g.identity();
        let ab = g.mul(&a, &b).unwrap();
        prop_assert_eq!(g.mul(&ab, &c).unwrap(), g.mul(&a, &g.mul(&b, &c).unwrap()).unwrap());
        prop_assert_eq!(g.mul(&a, &e).unwrap(), a.clone());
        prop_assert_eq!(g.mul(&e, &a).unwrap(), a.clone());
        prop_assert_eq!(g.mul(&a, &g.inverse(&a).unwrap()).unwrap(), e);
        prop_assert_eq!(ab, g.mul(&b, &a).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn translates_preserve_cardinality_and_invert(k in 0usize..5, f in raw_set(), g in raw_elem()) {
        let grp = &groups()[k];
        let f = set_of(grp, &f);
        let g = elem_of(grp, &g);
        let gi = grp.inverse(&g).unwrap();
        let left = f.translate_left(&g).unwrap();
        prop_assert_eq!(left.len(), f.len());
        prop_assert_eq!(left.translate_left(&gi).unwrap(), f.clone());
        let right = f.translate_right(&g).unwrap();
        prop_assert_eq!(right.len(), f.len());
        prop_assert_eq!(right.translate_right(&gi).unwrap(), f);
    }

    #[test]
    fn identity_product_and_double_inverse(k in 0usize..5, f in raw_set()) {
        let grp = &groups()[k];
        let f = set_of(grp, &f);
        let e = FinSet::identity(grp);
        prop_assert_eq!(e.product(&f).unwrap(), f.clone());
        prop_assert_eq!(f.product(&e).unwrap(), f.clone());
        prop_assert_eq!(f.inverse().inverse(), f);
    }

    #[test]
    fn families_are_invariant_and_bi_invariant(
        f in prop::collection::vec(raw_elem(), 1..6),
        g in raw_elem(),
        which in 0usize..4,
        index in 0u64..1000,
    ) {
        let grp = Group::z_power(2).unwrap();
        let sys = System::bernoulli(&grp, vec![0.3, 0.7], 9).unwrap();
        let obs = Observable::SymbolValue { values: vec![1.5, -0.25] };
        let fam = match which {
            0 => Family::additive(obs),
            1 => Family::Max { observable: Observable::Indicator { symbol: 1 } },
            2 => Family::AdditivePlus { observable: obs, beta: 1.0, gamma: Concave::sqrt() },
            _ => Family::MaxOfAdditives { first: obs, second: Observable::Indicator { symbol: 0 } },
        };
        let f = set_of(&grp, &f);
        let g = elem_of(&grp, &g);
        let y = sys.sample(4, index);
        let fg = f.translate_right(&g).unwrap();
        let lhs = fam.evaluate(&sys, &fg, &y).unwrap();
        let rhs = fam.evaluate(&sys, &f, &sys.apply(&g, &y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        let gf = f.translate_left(&g).unwrap();
        prop_assert_eq!(fam.evaluate(&sys, &gf, &y).unwrap(), lhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tempered_never_exceeds_tempelman(which in 0usize..5, big_n in 2u64..9) {
        let seq = match which {
            0 => FolnerSeq::z_boxes(&Group::z()).unwrap(),
            1 => FolnerSeq::z_boxes(&Group::z_power(2).unwrap()).unwrap(),
            2 => FolnerSeq::cyclic_prefix(&Group::cyclic_sum(vec![2, 3]).unwrap()).unwrap(),
            3 => FolnerSeq::shifted_z_boxes(&Group::z(), 1, 2).unwrap(),
            _ => FolnerSeq::zsum_boxes(),
        };
        let big_n = if which == 4 { big_n.min(4) } else { big_n };
        let bound = tempelman_bound(&seq, big_n).unwrap().bound;
        let tempered = tempered_check(&seq, big_n, bound).unwrap();
        prop_assert!(tempered.witness <= bound);
        prop_assert!(tempered.bounded);
    }

    #[test]
    fn window_cover_is_monotone(side in 1u64..6, step in 1u64..4, r in 2i64..12, lo in -12i64..0, hi in 0i64..12) {
        let budget = TileBudget { max_side: side, max_step: step, width: 1 };
        let big = FinSet::new(&Group::z(), Group::z().window(-r, r, 1)).unwrap();
        let small = FinSet::new(&Group::z(), Group::z().window(lo.max(-r), hi.min(r), 1)).unwrap();
        for cert in enumerate_tiles(&Group::z(), &budget).unwrap() {
            if cert.tiles_window(&big).unwrap().exact() {
                prop_assert!(cert.tiles_window(&small).unwrap().exact());
            }
        }
    }

    #[test]
    fn composition_matches_product_index(which in 0usize..3, m in 1u64..6, n in 1u64..6) {
        let seq = match which {
            0 => FolnerSeq::z_boxes(&Group::z()).unwrap(),
            1 => FolnerSeq::z_boxes(&Group::z_power(2).unwrap()).unwrap(),
            _ => FolnerSeq::cyclic_prefix(&Group::cyclic_sum(vec![2]).unwrap()).unwrap(),
        };
        let cert = standard_cert(&seq, &SeqIndex::Linear(m)).unwrap();
        let k = composed_index(&seq, &SeqIndex::Linear(m), &SeqIndex::Linear(n)).unwrap();
        prop_assert_eq!(cert.compose(&seq.set(n).unwrap()).unwrap(), seq.generate(&k).unwrap());
    }

    #[test]
    fn greedy_cover_inequality_is_exact(
        planar in any::<bool>(),
        big_n in 1u64..6,
        extra in 0u64..7,
        p in 0.1f64..0.9,
        alpha_scale in 1.0f64..3.0,
        index in 0u64..10_000,
    ) {
        let grp = if planar { Group::z_power(2).unwrap() } else { Group::z() };
        let seq = FolnerSeq::z_boxes(&grp).unwrap();
        let sys = System::bernoulli(&grp, vec![p, 1.0 - p], 21).unwrap();
        let fam = Family::additive(Observable::Indicator { symbol: 0 });
        let y = sys.sample(8, index);
        let n = big_n + extra;
        let alpha = alpha_scale * p;
        let cover = greedy_cover(&fam as &dyn SetFamily, &sys, &y, &seq, n, alpha, big_n, 1 << grp.dim().unwrap()).unwrap();
        prop_assert!(cover.holds(), "{:?}", cover);
    }

    #[test]
    fn strong_limits_agree_across_sequences(c in 1u32..5, coef in 1i64..4) {
        let f = SetFunction::CardPlusConcave { c: c as f64, gamma: Concave::sqrt() };
        let z = Group::z();
        let cfg = ClassifyConfig { trials: 200, ..Default::default() };
        let budget = EnumBudget::new(2, -2, 2).with_boxes(32);
        let schedule = [1, 2, 8, 32];
        let a = setfn_limit_strong(&f, &FolnerSeq::z_boxes(&z).unwrap(), &schedule, &budget, &cfg, 0.05).unwrap();
        let b = setfn_limit_strong(&f, &FolnerSeq::shifted_z_boxes(&z, coef, 1).unwrap(), &schedule, &budget, &cfg, 0.05).unwrap();
        prop_assert!((a.limit - b.limit).abs() <= 1e-9);
    }
}

#[test]
fn folner_defects_shrink_below_every_tested_delta() {
    let z2 = Group::z_power(2).unwrap();
    let seq = FolnerSeq::z_boxes(&z2).unwrap();
    let k = FinSet::from_coords(&z2, &[[0, 0], [1, 0], [0, 1]]).unwrap();
    let defects: Vec<Rational> = (1..=120).map(|n| folner_defect(&k, &seq.set(n).unwrap()).unwrap()).collect();
    assert!(defects[4..].windows(2).all(|w| w[1] <= w[0]));
    for delta in [Rational::new(1, 2), Rational::new(1, 10), Rational::new(1, 50)] {
        assert!(defects.iter().any(|d| *d < delta), "{delta}");
    }
}

#[test]
fn shifts_preserve_the_measure() {
    let z = Group::z();
    let sys = System::bernoulli(&z, vec![0.3, 0.7], 2).unwrap();
    let obs = Observable::Indicator { symbol: 0 };
    let samples = 10_000u64;
    let base: Vec<f64> = (0..samples).map(|i| sys.eval(&obs, &sys.sample(1, i)).unwrap()).collect();
    let m0 = base.iter().sum::<f64>() / samples as f64;
    for shift in 1..=20i64 {
        let g = z.elem(&[shift * 37 - 300]).unwrap();
        let v: Vec<f64> = (0..samples).map(|i| sys.eval_at(&obs, &sys.sample(1, i), &g).unwrap()).collect();
        let m = v.iter().sum::<f64>() / samples as f64;
        let se = (0.21f64 / samples as f64).sqrt() * 2f64.sqrt();
        assert!((m - m0).abs() <= 4.0 * se, "shift {shift}: {m} vs {m0}");
    }
}
