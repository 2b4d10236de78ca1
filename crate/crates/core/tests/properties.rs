use agss_core::curve::Curve;
use agss_core::group::{subset_sum_count, PointSet};
use agss_core::lab::{exact_proportion_elliptic, mc_proportion};
use agss_core::scheme::{for_each_combination, Oracle, Scheme};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn schemes() -> Vec<Scheme> {
    vec![
        Scheme::standard(Curve::parse("ec:p=11,a=1,b=3").unwrap(), 4).unwrap(),
        Scheme::standard(Curve::parse("ec:p=17,a=-1,b=0").unwrap(), 6).unwrap(),
        Scheme::standard(Curve::parse("hyp:p=11,f=1,0,0,0,0,1").unwrap(), 4).unwrap(),
        Scheme::standard(Curve::parse("hyp:p=13,f=1,1,0,0,0,1").unwrap(), 7).unwrap(),
    ]
}

#[test]
fn code_dimensions() {
    for s in schemes() {
        let g = s.genus();
        assert_eq!(s.dim_c_l(), s.m() + 1 - g);
        assert_eq!(s.dim_c_omega(), s.n() - s.m() + g);
    }
}

#[test]
fn gray_zone_confinement_and_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for s in schemes() {
        let (n, m, g) = (s.n(), s.m(), s.genus());
        let mut idx: Vec<usize> = (0..n).collect();
        for _ in 0..400 {
            idx.shuffle(&mut rng);
            let t = rng.gen_range(0..=n.min(m + 2));
            let mut removed = idx[..t].to_vec();
            removed.sort_unstable();
            let subset = s.complement(&removed);
            let q = s.is_qualified_kernel(&subset).unwrap().is_qualified();
            assert_eq!(q, s.is_qualified_dual(&subset).unwrap().is_qualified());
            if t + 2 * g <= m {
                assert!(q);
            }
            if t > m {
                assert!(!q);
            }
            if q && t > 0 {
                // Adding a player back keeps the set qualified.
                let mut bigger = subset.clone();
                bigger.push(removed[0]);
                bigger.sort_unstable();
                assert!(s.is_qualified_kernel(&bigger).unwrap().is_qualified());
            }
        }
    }
}

#[test]
fn enumeration_at_t_equals_m_is_a_subset_sum_count() {
    for s in schemes().into_iter().filter(|s| s.curve().is_elliptic()) {
        let table = s.group_table().unwrap();
        let group = table.group();
        let players = s.players().iter().map(|p| table.element(p).unwrap()).collect();
        let set = PointSet::new(&group, players).unwrap();
        let dp = subset_sum_count(&group, &set, s.m(), &group.identity()).unwrap();
        let counted = s.enumerate_access(s.m(), Oracle::Clx).unwrap();
        assert_eq!(dp, counted.qualified.into());
        assert_eq!(counted, s.enumerate_access(s.m(), Oracle::Kernel).unwrap());
    }
}

#[test]
fn wilson_intervals_cover_the_exact_value() {
    let s = Scheme::standard(Curve::parse("ec:p=13,a=1,b=1").unwrap(), 5).unwrap();
    for t in [4, 5] {
        let exact = exact_proportion_elliptic(&s, t).unwrap().p_hat;
        let runs = 100;
        let covered = (0..runs)
            .filter(|&seed| {
                let e = mc_proportion(&s, t, 400, seed, Oracle::Kernel, 1).unwrap();
                e.ci_lo <= exact && exact <= e.ci_hi
            })
            .count();
        assert!(covered as u64 * 100 >= 93 * runs, "t={t}: {covered}/{runs}");
    }
}

#[test]
fn sampling_everything_recovers_the_exhaustive_ratio() {
    let s = Scheme::standard(Curve::parse("ec:p=11,a=1,b=3").unwrap(), 4).unwrap();
    let exhaustive = s.enumerate_access(3, Oracle::Kernel).unwrap();
    let exact = exhaustive.qualified as f64 / exhaustive.total as f64;
    let sampled = mc_proportion(&s, 3, 200_000, 5, Oracle::Kernel, 1).unwrap();
    assert!((sampled.p_hat - exact).abs() < 0.01);
    let mut all = 0;
    for_each_combination(s.n(), 3, |_| all += 1);
    assert_eq!(all, exhaustive.total);
}
