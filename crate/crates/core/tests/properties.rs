mod common;

use common::*;
use muckenhoupt::extension::{restrict_weight_report, wolff_extend};
use muckenhoupt::factorization::{jones_factorize, rdf_apply_t, Branch, DEFAULT_TOL};
use muckenhoupt::io::{parse_space, space_to_string};
use muckenhoupt::maximal::{coifman_rochberg_weight, maximal_fn};
use muckenhoupt::scenario::BoxUnion;
use muckenhoupt::weights::{
    a_infinity_report, ap_characteristic, ap_domain_characteristic, ap_tilde_characteristic,
    reverse_holder_constant, Scope,
};
use muckenhoupt::whitney::{check_cover_invariants, whitney_cover, QhGraph};
use muckenhoupt::{MetricMeasureSpace, Subset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Slack for inequalities that hold exactly in exact arithmetic.
const SLACK: f64 = 1e-12;
/// Slack for inequalities that compare powers of computed characteristics.
const POWER_SLACK: f64 = 1e-10;

struct Fixture {
    rng: ChaCha8Rng,
    space: MetricMeasureSpace,
    w: Vec<f64>,
    e: Subset,
}

fn fixture(seed: u64, n: usize) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = random_graph_space(&mut rng, n);
    let w = log_normal_weight(&mut rng, n, 0.8);
    let e = random_subset(&mut rng, n, 0.5);
    Fixture { rng, space, w, e }
}

fn le(a: f64, b: f64, slack: f64) -> bool {
    a <= b * (1.0 + slack) + f64::MIN_POSITIVE
}

fn members(s: &MetricMeasureSpace, c: usize, k: usize) -> Vec<usize> {
    s.balls().unwrap().members(c, k).iter().map(|&y| y as usize).collect()
}

fn all_balls(s: &MetricMeasureSpace) -> Vec<Vec<usize>> {
    let balls = s.balls().unwrap();
    (0..s.len()).flat_map(|c| (0..balls.prefix_count(c)).map(move |k| (c, k))).map(|(c, k)| members(s, c, k)).collect()
}

fn sum(s: &MetricMeasureSpace, set: &[usize], f: impl Fn(usize) -> f64) -> f64 {
    set.iter().map(|&y| f(y) * s.mu()[y]).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn maximal_sandwich_for_a1_weights(seed in any::<u64>(), n in 2usize..30, eps in 0.05f64..0.95) {
        let mut fx = fixture(seed, n);
        let f: Vec<f64> = (0..n).map(|_| if fx.rng.gen_bool(0.3) { fx.rng.gen_range(0.0..5.0) } else { 0.0 }).collect();
        prop_assume!(f.iter().any(|&v| v > 0.0));
        let w = coifman_rochberg_weight(&fx.space, &f, eps, &vec![1.0; n]).unwrap().weight;
        let k = ap_tilde_characteristic(&fx.space, &fx.e, &w, 1.0).unwrap().value;
        let m = maximal_fn(&fx.space, &w, Some(&fx.e), None).unwrap();
        for &x in fx.e.ids() {
            prop_assert!(le(w[x], m[x], SLACK));
            prop_assert!(le(m[x], k * w[x], SLACK));
        }
    }

    #[test]
    fn maximal_lower_bound_cap_and_localization(seed in any::<u64>(), n in 2usize..30, cap in 0.3f64..4.0) {
        let fx = fixture(seed, n);
        let m = maximal_fn(&fx.space, &fx.w, None, None).unwrap();
        prop_assert!(fx.w.iter().zip(&m).all(|(f, mf)| le(*f, *mf, SLACK)));
        let capped = maximal_fn(&fx.space, &fx.w, None, Some(cap)).unwrap();
        prop_assert!(capped.iter().zip(&m).all(|(c, u)| c <= u));
        let masked = fx.e.mask_values(&fx.w);
        prop_assert_eq!(maximal_fn(&fx.space, &fx.w, Some(&fx.e), None).unwrap(), maximal_fn(&fx.space, &masked, None, None).unwrap());
    }

    #[test]
    fn exponent_monotonicity(seed in any::<u64>(), n in 2usize..25, p in 1.0f64..4.0, q in 1.0f64..4.0, t in 0.0f64..1.0) {
        let fx = fixture(seed, n);
        let delta = if p == 1.0 { t } else { t * 1f64.min((q - 1.0) / (p - 1.0)) };
        let vd: Vec<f64> = fx.w.iter().map(|v| v.powf(delta)).collect();
        let lhs = ap_tilde_characteristic(&fx.space, &fx.e, &vd, q).unwrap().value;
        let rhs = ap_tilde_characteristic(&fx.space, &fx.e, &fx.w, p).unwrap().value.powf(delta);
        prop_assert!(le(lhs, rhs, POWER_SLACK), "{lhs} > {rhs}");
        if p <= q {
            let at_q = ap_tilde_characteristic(&fx.space, &fx.e, &fx.w, q).unwrap().value;
            let at_p = ap_tilde_characteristic(&fx.space, &fx.e, &fx.w, p).unwrap().value;
            prop_assert!(le(at_q, at_p, POWER_SLACK));
        }
    }

    #[test]
    fn duality(seed in any::<u64>(), n in 2usize..25, p in 1.1f64..5.0) {
        let fx = fixture(seed, n);
        let pc = p / (p - 1.0);
        let dual: Vec<f64> = fx.w.iter().map(|v| v.powf(1.0 - pc)).collect();
        let a = ap_characteristic(&fx.space, &fx.w, p).unwrap().value;
        let b = ap_characteristic(&fx.space, &dual, pc).unwrap().value.powf(p - 1.0);
        prop_assert!(rel_close(a, b, POWER_SLACK), "{a} vs {b}");
    }

    #[test]
    fn domain_bounds(seed in any::<u64>(), n in 2usize..25, p in 1.0f64..4.0) {
        let mut fx = fixture(seed, n);
        let d = &fx.e;
        let k = ap_domain_characteristic(&fx.space, d, &fx.w, p).unwrap().value;
        let w = &fx.w;
        for b in all_balls(&fx.space).into_iter().filter(|b| b.iter().all(|&y| d.contains(y))) {
            let mb = sum(&fx.space, &b, |_| 1.0);
            let avg = sum(&fx.space, &b, |y| w[y]) / mb;
            let geo = (sum(&fx.space, &b, |y| w[y].ln()) / mb).exp();
            prop_assert!(le(avg, k * geo, SLACK));
            for _ in 0..5 {
                let s: Vec<usize> = b.iter().copied().filter(|_| fx.rng.gen_bool(0.5)).collect();
                if s.is_empty() {
                    continue;
                }
                let ms = sum(&fx.space, &s, |_| 1.0);
                prop_assert!(le(sum(&fx.space, &b, |y| w[y]), k * (mb / ms).powf(p) * sum(&fx.space, &s, |y| w[y]), SLACK));
            }
        }
    }

    #[test]
    fn averages_against_the_characteristic(seed in any::<u64>(), n in 2usize..20, qi in 0usize..4) {
        let mut fx = fixture(seed, n);
        let q = [1.0, 1.5, 2.0, 3.0][qi];
        let k = ap_tilde_characteristic(&fx.space, &fx.e, &fx.w, q).unwrap().value;
        let balls = all_balls(&fx.space);
        for _ in 0..100 {
            let g: Vec<f64> = (0..n).map(|_| fx.rng.gen_range(-2.0..2.0)).collect();
            for b in &balls {
                let be: Vec<usize> = b.iter().copied().filter(|&y| fx.e.contains(y)).collect();
                let mb = sum(&fx.space, b, |_| 1.0);
                let lhs = sum(&fx.space, &be, |y| fx.w[y]) * (sum(&fx.space, &be, |y| g[y].abs()) / mb).powf(q);
                let rhs = k * sum(&fx.space, &be, |y| g[y].abs().powf(q) * fx.w[y]);
                prop_assert!(le(lhs, rhs, POWER_SLACK), "{lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn restriction_never_increases_the_characteristic(seed in any::<u64>(), n in 2usize..25, p in 1.0f64..4.0) {
        let fx = fixture(seed, n);
        let global = ap_characteristic(&fx.space, &fx.w, p).unwrap().value;
        let induced = ap_tilde_characteristic(&fx.space, &fx.e, &fx.w, p).unwrap().value;
        prop_assert!(le(induced, global, SLACK));
        let rh = reverse_holder_constant(&fx.space, &fx.w, 0.5, Scope::All).unwrap().value;
        prop_assert!(rh >= 1.0 - SLACK);
    }

    #[test]
    fn a_infinity_pair_exists(seed in any::<u64>(), n in 3usize..25) {
        let fx = fixture(seed, n);
        let r = a_infinity_report(&fx.space, &fx.e, &fx.w, 200, seed, &[0.05, 0.1, 0.25, 0.5], 1e6).unwrap();
        prop_assert!(r.delta > 0.0);
        prop_assert_eq!(r.violations, 0);
    }

    #[test]
    fn factorization_recomposes(seed in any::<u64>(), n in 2usize..25, pi in 0usize..3) {
        let fx = fixture(seed, n);
        let p = [1.5, 2.0, 3.0][pi];
        let r = jones_factorize(&fx.space, &fx.e, &fx.w, p, DEFAULT_TOL).unwrap();
        let c = r.c.unwrap();
        let m1 = maximal_fn(&fx.space, &r.v1, Some(&fx.e), None).unwrap();
        let m2 = maximal_fn(&fx.space, &r.v2, Some(&fx.e), None).unwrap();
        for &x in fx.e.ids() {
            prop_assert!(rel_close(r.v1[x] * r.v2[x].powf(1.0 - p), fx.w[x], 1e-9));
            prop_assert!(le(m1[x], (2.0 * c).powf(p - 1.0) * r.v1[x], SLACK));
            prop_assert!(le(m2[x], 2.0 * c * r.v2[x], SLACK));
        }
        let (u, pu): (Vec<f64>, f64) = if r.branch == Branch::Small {
            let pc = p / (p - 1.0);
            (fx.w.iter().map(|v| v.powf(1.0 - pc)).collect(), pc)
        } else {
            (fx.w.clone(), p)
        };
        let t = rdf_apply_t(&fx.space, &fx.e, &u, pu, &r.eta).unwrap();
        let oc = r.operator_c.unwrap();
        for &x in fx.e.ids() {
            prop_assert!(le(t[x], 2.0 * oc * r.eta[x], SLACK));
        }
    }

    #[test]
    fn extension_agrees_and_bounds_g(seed in any::<u64>(), n in 2usize..25, pi in 0usize..4, eps in 0.1f64..2.0) {
        let fx = fixture(seed, n);
        let p = [1.0, 1.5, 2.0, 3.0][pi];
        let r = wolff_extend(&fx.space, &fx.e, &fx.w, p, eps, DEFAULT_TOL).unwrap();
        prop_assert!(r.agreement_error <= 1e-9);
        for &x in fx.e.ids() {
            prop_assert!(rel_close(r.w_ext[x], fx.w[x], 1e-9));
        }
        for g in std::iter::once(&r.g1).chain(r.g2.as_ref()) {
            for x in 0..n {
                if fx.e.contains(x) {
                    prop_assert!(g.values[x] <= 1.0 * (1.0 + SLACK) && g.values[x] * g.a1_constant >= 1.0 - SLACK);
                } else {
                    prop_assert_eq!(g.values[x], 1.0);
                }
            }
        }
        prop_assert_eq!(r.g2.is_none(), p == 1.0);
        let rr = restrict_weight_report(&fx.space, &fx.e, &r.w_ext, p, 0.0).unwrap();
        prop_assert!(rr.max_ratio <= 1.0 + SLACK);
        prop_assert!(le(ap_tilde_characteristic(&fx.space, &fx.e, &fx.w, p).unwrap().value, r.ap_constant_w, SLACK));
    }

    #[test]
    fn space_files_round_trip(seed in any::<u64>(), n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_graph_space(&mut rng, n);
        let back = parse_space(&space_to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back.distance_rows(), s.distance_rows());
        prop_assert_eq!(back.mu(), s.mu());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn whitney_invariants_on_box_unions(seed in any::<u64>(), dim in 1usize..=2, side in 8usize..40) {
        let (space, domain) = BoxUnion::random(dim, seed).discretize(side).unwrap();
        let cover = whitney_cover(&space, &domain).unwrap();
        prop_assert!(check_cover_invariants(&space, &domain, &cover).is_ok());
    }

    #[test]
    fn quasihyperbolic_distance_is_a_metric(seed in any::<u64>(), side in 6usize..20) {
        let (space, domain) = BoxUnion::random(2, seed).discretize(side).unwrap();
        let qh = QhGraph::new(&space, &domain).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ids = domain.set().ids();
        for _ in 0..10 {
            let (x, y, z) = (ids[rng.gen_range(0..ids.len())], ids[rng.gen_range(0..ids.len())], ids[rng.gen_range(0..ids.len())]);
            let (Ok(xy), Ok(yz), Ok(xz)) = (qh.distance(x, y), qh.distance(y, z), qh.distance(x, z)) else { continue };
            prop_assert_eq!(xy, qh.distance(y, x).unwrap());
            prop_assert!(le(xz, xy + yz, SLACK));
        }
    }
}
