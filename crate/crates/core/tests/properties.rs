use kinex_core::empirical::{derive, CountryRecord};
use kinex_core::metrics::kendall_pair_counts;
use kinex_core::*;
use proptest::prelude::*;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// O(N^2) enumeration of concordant minus discordant pairs.
fn brute_k_minus_l(a: &[f64], b: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let x = (a[i] - a[j]).signum() * if a[i] == a[j] { 0.0 } else { 1.0 };
            let y = (b[i] - b[j]).signum() * if b[i] == b[j] { 0.0 } else { 1.0 };
            s += (x * y) as i64;
        }
    }
    s
}

fn assets() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..100.0, 2..60)
}

proptest! {
    #[test]
    fn exchange_conserves_and_stays_non_negative(
        mi in 0.0f64..1e6, mj in 0.0f64..1e6,
        lambda in 0.0f64..=1.0, gamma in 0.0f64..=1.0, eps in 0.0f64..=1.0,
    ) {
        let t = exchange_step(mi, mj, lambda, gamma, eps).unwrap();
        prop_assert!(t.new_mi >= 0.0 && t.new_mj >= 0.0);
        prop_assert!(t.pool >= 0.0);
        let before = mi + mj;
        prop_assert!((t.new_mi + t.new_mj - before).abs() <= 1e-12 * before.max(1e-300));
        // each side keeps at least its saved share before receiving anything
        let (poor, rich) = (mi.min(mj), mi.max(mj));
        let pool = (1.0 - lambda) * (2.0 * poor + gamma * (rich - poor));
        prop_assert!(rel_close(t.pool, pool, 1e-12) || t.pool == pool);
    }

    #[test]
    fn exchange_symmetry(
        a in 0.0f64..1e3, b in 0.0f64..1e3,
        lambda in 0.0f64..=1.0, gamma in 0.0f64..=1.0, eps in 0.0f64..=1.0,
    ) {
        let t1 = exchange_step(a, b, lambda, gamma, eps).unwrap();
        let t2 = exchange_step(b, a, lambda, gamma, 1.0 - eps).unwrap();
        let tol = 1e-12 * (a + b).max(1.0);
        prop_assert!((t1.new_mi - t2.new_mj).abs() <= tol);
        prop_assert!((t1.new_mj - t2.new_mi).abs() <= tol);
    }

    #[test]
    fn exchange_endpoints(
        a in 0.0f64..1e3, b in 0.0f64..1e3, lambda in 0.0f64..=1.0, eps in 0.0f64..=1.0,
    ) {
        let (poor, tol) = (a.min(b), 1e-12 * (a + b).max(1.0));
        // no surplus contribution: both stake the poorer agent's surplus
        let kk = exchange_step(a, b, lambda, 0.0, eps).unwrap();
        let stake = (1.0 - lambda) * poor;
        prop_assert!((kk.new_mi - (a - stake + eps * 2.0 * stake)).abs() <= tol);
        prop_assert!((kk.new_mj - (b - stake + (1.0 - eps) * 2.0 * stake)).abs() <= tol);
        // full surplus contribution: each stakes its own full surplus
        let cc = exchange_step(a, b, lambda, 1.0, eps).unwrap();
        let pool = (1.0 - lambda) * (a + b);
        prop_assert!((cc.new_mi - (lambda * a + eps * pool)).abs() <= tol);
        prop_assert!((cc.new_mj - (lambda * b + (1.0 - eps) * pool)).abs() <= tol);
    }

    #[test]
    fn gini_scale_and_permutation_invariant(mut v in assets(), c in 0.01f64..1e4, rot in 0usize..60) {
        prop_assume!(v.iter().sum::<f64>() > 0.0);
        let g = gini(&v).unwrap().0;
        prop_assert!(g >= 0.0 && g <= (v.len() as f64 - 1.0) / v.len() as f64 + 1e-12);
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert!((gini(&scaled).unwrap().0 - g).abs() < 1e-12);
        let k = rot % v.len();
        v.rotate_left(k);
        v.reverse();
        prop_assert!((gini(&v).unwrap().0 - g).abs() < 1e-12);
    }

    #[test]
    fn tau_symmetric_and_rank_invariant(pairs in prop::collection::vec((0u8..20, 0u8..20), 2..80)) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let t = kendall_tau(&a, &b).unwrap().0;
        prop_assert!(t.abs() <= 1.0);
        prop_assert_eq!(t, kendall_tau(&b, &a).unwrap().0);
        let ta: Vec<f64> = a.iter().map(|x| (x * 0.3).exp() + 7.0).collect();
        prop_assert_eq!(t, kendall_tau(&ta, &b).unwrap().0);
        let c = kendall_pair_counts(&a, &b).unwrap();
        prop_assert_eq!(c.concordant as i64 - c.discordant as i64, brute_k_minus_l(&a, &b));
    }

    #[test]
    fn fit_recovers_exact_lines(
        slope in -50.0f64..50.0, intercept in -50.0f64..50.0,
        xs in prop::collection::btree_set(-1000i32..1000, 2..40),
    ) {
        let pts: Vec<XYPoint> = xs.iter().map(|&x| XYPoint::new(x as f64 / 10.0, slope * x as f64 / 10.0 + intercept)).collect();
        let fit = fit_linear(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() <= 1e-12 * slope.abs().max(1.0) * 10.0);
        prop_assert!((fit.intercept - intercept).abs() <= 1e-12 * intercept.abs().max(1.0) * 1e3);
    }

    #[test]
    fn fit_ignores_point_order(pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..30)) {
        let pts: Vec<XYPoint> = pts.into_iter().map(|(x, y)| XYPoint::new(x, y)).collect();
        prop_assume!(pts.iter().any(|p| p.x != pts[0].x));
        let a = fit_linear(&pts).unwrap();
        let mut rev = pts.clone();
        rev.reverse();
        let b = fit_linear(&rev).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-9 && (a.intercept - b.intercept).abs() < 1e-9);
        prop_assert!(a.r_squared >= 0.0 && a.r_squared <= 1.0);
    }

    #[test]
    fn derive_recomputes_from_fields(rows in prop::collection::vec((1.0f64..2000.0, 0.01f64..0.99, 0.0f64..1.0, 0.0f64..1.0), 1..20)) {
        let records: Vec<CountryRecord> = rows.iter().enumerate().map(|(k, &(f, g, l, c))| CountryRecord {
            name: format!("c{k}"), f, g: Some(g), lambda: Some(l), gamma: Some(c), invalid_fields: vec![],
        }).collect();
        let d = derive(&records).unwrap().records;
        prop_assert_eq!(d.len(), rows.len());
        let f_max = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        prop_assert_eq!(d.iter().filter(|r| r.f_norm == 1.0).count() >= 1, true);
        for (r, row) in d.iter().zip(&rows) {
            prop_assert_eq!(r.x, (1.0 - row.2) * row.3);
            prop_assert_eq!(r.f_norm, row.0 / f_max);
            prop_assert_eq!(r.y, r.f_norm / row.1);
            prop_assert!(r.f_norm <= 1.0 && (0.0..=1.0).contains(&r.x));
        }
        prop_assert_eq!(derive(&records).unwrap().records, d);
    }
}
