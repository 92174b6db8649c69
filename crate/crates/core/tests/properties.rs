use iwasawa_core::bernoulli::bernoulli_mod;
use iwasawa_core::kida::{build_q_set, PrimeDatum, TowerData};
use iwasawa_core::lab::blocks::{lattice_module, BlockKind};
use iwasawa_core::lab::{
    alternating_log_order, check_exactness, lattice_decomposition, split_sequence, tate_cohomology, AbelianPGroup, Hom,
};
use iwasawa_core::padic::{is_prime, newton_polygon, ResidueRing, TruncatedSeries};
use iwasawa_core::rank::{
    class_group_rank_from_terms, selmer_rank, EllipticLocalData, Hypotheses, LocalRecord, Reduction,
};
use proptest::prelude::*;

const H: Hypotheses = Hypotheses { mu_zero: true, strongly_admissible: true, good_ordinary: true };

fn series_triple() -> impl Strategy<Value = (u64, u32, usize, [Vec<i64>; 3])> {
    (prop::sample::select(vec![3u64, 5, 7]), 1u32..=3, 0usize..8).prop_flat_map(|(p, m, cap)| {
        let c = || prop::collection::vec(-100i64..100, cap + 1);
        (Just(p), Just(m), Just(cap), [c(), c(), c()])
    })
}

fn series(p: u64, m: u32, cap: usize, c: &[i64]) -> TruncatedSeries {
    let coeffs: Vec<i128> = c.iter().map(|&x| x as i128).collect();
    TruncatedSeries::from_coeffs(ResidueRing::new(p, m).unwrap(), cap, &coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn series_ring_axioms((p, m, cap, cs) in series_triple()) {
        let [a, b, c] = [0, 1, 2].map(|i| series(p, m, cap, &cs[i]));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    /// The readings add when the product's leading data lies inside the cap
    /// and precision; beyond that, truncation can hide the true product.
    #[test]
    fn newton_readings_add((p, m, cap, cs) in series_triple()) {
        let (f, g) = (series(p, m, cap, &cs[0]), series(p, m, cap, &cs[1]));
        if let (Ok(a), Ok(b)) = (newton_polygon(&f), newton_polygon(&g)) {
            if a.certified && b.certified && a.lambda + b.lambda < cap && a.mu + b.mu < m {
                let c = newton_polygon(&f.mul(&g).unwrap()).unwrap();
                prop_assert!(c.certified);
                prop_assert_eq!((c.lambda, c.mu), (a.lambda + b.lambda, a.mu + b.mu));
            }
        }
    }

    #[test]
    fn class_group_rank_zero_iff_pseudo_null(lambda_k in 0u64..=5, delta in 0u8..=1, q in 0usize..=4) {
        match class_group_rank_from_terms(lambda_k, delta, q, H) {
            Ok(v) => {
                prop_assert_eq!(v.rank == 0, v.pseudo_null);
                prop_assert_eq!(v.rank as i64, lambda_k as i64 - delta as i64 + q as i64);
            }
            Err(_) => prop_assert!(lambda_k + (q as u64) < delta as u64),
        }
    }

    #[test]
    fn rank_specializations(lambda_k in 1u64..50, t_plus in 0usize..6) {
        prop_assert_eq!(class_group_rank_from_terms(lambda_k, 1, 0, H).unwrap().rank, lambda_k - 1);
        prop_assert_eq!(class_group_rank_from_terms(lambda_k, 1, t_plus, H).unwrap().rank, lambda_k + t_plus as u64 - 1);
    }

    #[test]
    fn selmer_rank_is_additive(
        corank in 0u64..5,
        xs in prop::collection::vec((any::<bool>(), 0usize..4, any::<bool>()), 0..8),
        ys in prop::collection::vec((any::<bool>(), 0usize..4, any::<bool>()), 0..8),
    ) {
        let kinds = [Reduction::Good, Reduction::SplitMultiplicative, Reduction::NonsplitMultiplicative, Reduction::Additive];
        let records = |v: &[(bool, usize, bool)], tag: &str| -> Vec<LocalRecord> {
            v.iter().enumerate().map(|(i, &(ram, r, tor))| LocalRecord {
                prime: format!("{tag}{i}"),
                ramified_in_l: ram,
                above_p: false,
                reduction: kinds[r],
                torsion_nontrivial: tor,
            }).collect()
        };
        let data = |rs: Vec<LocalRecord>, c| EllipticLocalData { label: "t".into(), records: rs, selmer_corank_k: c };
        let a = selmer_rank(&data(records(&xs, "a"), corank), H).unwrap().rank;
        let b = selmer_rank(&data(records(&ys, "b"), 0), H).unwrap().rank;
        let mut both = records(&xs, "a");
        both.extend(records(&ys, "b"));
        prop_assert_eq!(selmer_rank(&data(both, corank), H).unwrap().rank, a + b);
    }

    #[test]
    fn moving_into_t_switches_criterion(d_exp in 1u32..=3, splits in any::<bool>()) {
        let prime = |in_t, i| PrimeDatum {
            id: "v".into(), splits_in_k: splits, above_p: false, in_t,
            decomposition_order: 3u64.pow(d_exp), inertia_order: i,
        };
        let tower = |v| TowerData { p: 3, degree: 27, delta: 1, primes: vec![v], lambda_k: 1, mu_k: 0, theta_ok: true };
        // Unramified with nontrivial decomposition group: only T notices it.
        prop_assert_eq!(build_q_set(&tower(prime(false, 1))).unwrap().len(), 0);
        prop_assert_eq!(build_q_set(&tower(prime(true, 1))).unwrap().len(), splits as usize);
    }

    #[test]
    fn bernoulli_precision_reduces(idx in 0usize..40) {
        let p = (5u64..400).filter(|&p| is_prime(p)).nth(idx).unwrap();
        let (hi, lo) = (bernoulli_mod(p, 2).unwrap(), bernoulli_mod(p, 1).unwrap());
        for (k, v) in hi {
            prop_assert_eq!(v % p, lo[&k]);
        }
    }
}

fn block() -> impl Strategy<Value = BlockKind> {
    prop::sample::select(vec![BlockKind::Trivial, BlockKind::Regular, BlockKind::Augmentation])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lattice_signature(p in prop::sample::select(vec![3u64, 5]), blocks in prop::collection::vec(block(), 1..5)) {
        let count = |k| blocks.iter().filter(|&&b| b == k).count() as u64;
        let d = lattice_decomposition(&lattice_module(p, 3, &blocks).unwrap()).unwrap();
        prop_assert_eq!((d.a, d.b, d.c), (count(BlockKind::Regular), count(BlockKind::Augmentation), count(BlockKind::Trivial)));
        prop_assert_eq!(d.rank_coinvariants, d.a + d.c);
        prop_assert_eq!(d.herbrand_log, d.c as i64 - d.b as i64);
    }

    /// Finite reductions of lattices still have trivial Herbrand quotient.
    #[test]
    fn finite_reductions_have_trivial_herbrand(blocks in prop::collection::vec(block(), 1..4), s in 1u32..=3) {
        let t = tate_cohomology(&lattice_module(3, s, &blocks).unwrap()).unwrap();
        prop_assert_eq!(t.herbrand_log, 0);
    }

    #[test]
    fn split_sequences_exact_and_mutations_fail(
        p in prop::sample::select(vec![3u64, 5]),
        a in prop::collection::vec(1u32..=3, 1..3),
        b in prop::collection::vec(1u32..=3, 1..3),
        extra in 1u32..=2,
    ) {
        let (ga, gb) = (AbelianPGroup::new(p, a).unwrap(), AbelianPGroup::new(p, b).unwrap());
        let (groups, maps) = split_sequence(&ga, &gb).unwrap();
        prop_assert!(check_exactness(&groups, &maps).unwrap().exact);
        prop_assert_eq!(alternating_log_order(&groups), 0);

        // Enlarge the middle term by Z/p^extra, extending both maps by zero.
        let bump = AbelianPGroup::new(p, vec![extra]).unwrap();
        let mid = groups[2].direct_sum(&bump).unwrap();
        let widen = |f: &Hom, rows: bool| -> Hom {
            let mut m: Vec<Vec<i128>> = f.matrix.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
            if rows {
                m.push(vec![0; f.src.dim()]);
                Hom::new(&f.src, &mid, &m).unwrap()
            } else {
                m.iter_mut().for_each(|r| r.push(0));
                Hom::new(&mid, &f.dst, &m).unwrap()
            }
        };
        let mutated = vec![groups[0].clone(), groups[1].clone(), mid.clone(), groups[3].clone(), groups[4].clone()];
        let ms = vec![maps[0].clone(), widen(&maps[1], true), widen(&maps[2], false), maps[3].clone()];
        prop_assert_ne!(alternating_log_order(&mutated), 0);
        let r = check_exactness(&mutated, &ms).unwrap();
        prop_assert!(!r.exact);
        prop_assert_eq!(r.first_failure, Some(2));

        // Zeroing the inclusion breaks exactness at the first interior node.
        let mut zeroed = maps.clone();
        zeroed[1] = Hom::zero(&groups[1], &groups[2]);
        prop_assert!(!check_exactness(&groups, &zeroed).unwrap().exact);
    }
}

#[test]
fn truncation_can_hide_the_product_reading() {
    // (T^2 + 3)^2 = T^4 + 6T^2 + 9: both factors read (2, 0), but at cap 3
    // and precision 2 the product truncates to 6T^2, which reads (2, 1).
    let f = series(3, 2, 3, &[3, 0, 1]);
    let a = newton_polygon(&f).unwrap();
    assert!(a.certified);
    let c = newton_polygon(&f.mul(&f).unwrap()).unwrap();
    assert_eq!((c.lambda, c.mu, c.certified), (2, 1, true));
}
