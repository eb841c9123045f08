//! Statistical and brute-force cross-checks of the simulator and metrics.

use kinex_core::metrics::kendall_pair_counts;
use kinex_core::*;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Gamma};

fn brute_k_minus_l(a: &[f64], b: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let x = a[i].partial_cmp(&a[j]).unwrap() as i64;
            let y = b[i].partial_cmp(&b[j]).unwrap() as i64;
            s += x * y;
        }
    }
    s
}

/// Chi-square statistic against a uniform expectation.
fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn pair_indices_are_uniform() {
    let n = 1000;
    let draws = 1_000_000;
    let mut rng = SimRng::from_seed(2024);
    let (mut first, mut second) = (vec![0u64; n], vec![0u64; n]);
    for _ in 0..draws {
        let (i, j) = sample_pair(&mut rng, n).unwrap();
        assert_ne!(i, j);
        first[i] += 1;
        second[j] += 1;
    }
    // 999 degrees of freedom: mean 999, sd ~44.7; 5 sd bound
    for counts in [&first, &second] {
        assert!(chi_square(counts) < 999.0 + 5.0 * 44.7);
        let p = 1.0 / n as f64;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for &c in counts.iter() {
            assert!((c as f64 - draws as f64 * p).abs() < 5.0 * sigma);
        }
    }
}

#[test]
fn ordered_pairs_are_uniform() {
    let n = 5;
    let mut rng = SimRng::from_seed(11);
    let mut counts = vec![0u64; n * n];
    for _ in 0..200_000 {
        let (i, j) = sample_pair(&mut rng, n).unwrap();
        counts[i * n + j] += 1;
    }
    let off_diag: Vec<u64> = (0..n * n).filter(|k| k / n != k % n).map(|k| counts[k]).collect();
    assert_eq!(off_diag.len(), 20);
    // 19 dof: 99.99th percentile is ~45.0
    assert!(chi_square(&off_diag) < 45.0);
}

#[test]
fn merge_count_tau_matches_enumeration() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let n = if case < 10 { 2000 } else { rng.random_range(2..=400) };
        // coarse values in some cases to exercise ties
        let coarse = case % 3 == 0;
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
            if coarse { rng.random_range(0..25) as f64 } else { rng.random::<f64>() }
        };
        let a: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let c = kendall_pair_counts(&a, &b).unwrap();
        assert_eq!(c.concordant as i64 - c.discordant as i64, brute_k_minus_l(&a, &b), "case {case}, n {n}");
        let expected = brute_k_minus_l(&a, &b) as f64 / (n * (n - 1) / 2) as f64;
        assert_eq!(kendall_tau(&a, &b).unwrap().0, expected);
    }
}

#[test]
fn gamma_fit_recovers_known_parameters() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for (k, theta) in [(1.0, 1.0), (2.5, 0.4), (4.0, 2.0), (0.7, 3.0)] {
        let dist = Gamma::new(k, theta).unwrap();
        let sample: Vec<f64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
        let fit = gamma_fit(&sample).unwrap();
        assert!((fit.shape_k - k).abs() / k < 0.05, "k {k}: got {}", fit.shape_k);
        assert!((fit.scale_theta - theta).abs() / theta < 0.05, "theta {theta}: got {}", fit.scale_theta);
        let mean = sample.iter().sum::<f64>() / sample.len() as f64;
        assert!((fit.shape_k * fit.scale_theta - mean).abs() <= 1e-9 * mean);
        let h = histogram(&sample, 50, None).unwrap();
        assert_eq!(h.total(), 100_000);
    }
}

#[test]
fn runs_conserve_total_wealth() {
    for (k, (lambda, gamma)) in [(0.0, 0.0), (0.25, 0.5), (0.9, 1.0), (0.4, 0.1)].into_iter().enumerate() {
        let params = SimulationParams::new(1000, lambda, gamma, 100_000, k as u64).unwrap();
        let run = run_simulation(&params).unwrap();
        let total = run.last_snapshot().unwrap().1.total();
        assert!((total - 1000.0).abs() <= 1e-9 * 1000.0, "total {total}");
        assert!(run.last_snapshot().unwrap().1.assets().iter().all(|&m| m >= 0.0));
    }
}

#[test]
fn runs_are_deterministic() {
    let params = SimulationParams::new(200, 0.3, 0.6, 20_000, 0)
        .unwrap()
        .with_snapshots(vec![0, 10_000, 20_000])
        .unwrap();
    let a = run_simulation(&params).unwrap();
    let b = run_simulation(&params).unwrap();
    assert_eq!(a, b);
    for (pa, pb) in a.snapshots.values().zip(b.snapshots.values()) {
        let bits = |p: &Population| p.assets().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(pa), bits(pb));
    }
    assert_eq!(a.cumulative_pool.to_bits(), b.cumulative_pool.to_bits());
}

#[test]
fn surplus_free_exchange_keeps_concentrating() {
    let params = SimulationParams::new(1000, 0.4, 0.0, 1_000_000, 8).unwrap();
    let series = gini_time_series(&params, &[100_000, 1_000_000]).unwrap();
    assert!(series.g_values[1] > series.g_values[0]);
    assert!(series.g_values[1] >= 0.9);
}

#[test]
fn full_surplus_gini_settles() {
    let params = SimulationParams::new(1000, 0.4, 1.0, 100_000, 8).unwrap();
    let series = gini_time_series(&params, &[0, 50_000, 100_000]).unwrap();
    assert_eq!(series.g_values[0], 0.0);
    assert!((series.g_values[2] - series.g_values[1]).abs() < 0.05);
}

#[test]
fn flow_of_a_single_exchange() {
    // one exchange between equal holders with lambda 0.25, gamma 0.5
    let t = exchange_step(1.0, 1.0, 0.25, 0.5, 0.3).unwrap();
    assert_eq!(t.pool, 1.5);
    assert_eq!(total_exchange(t.pool, 1).unwrap().0, 0.75);
}

#[test]
fn sweep_disparity_falls_with_surplus_rate() {
    // holds on these gamma points; near gamma = 1 with low lambda the pool grows and g can rise again
    let spec = SweepSpec::new(vec![0.4, 0.8], vec![0.0, 0.1, 0.5, 1.0]).with_seed(11);
    let cells = run_sweep(&spec).unwrap();
    for row in cells.chunks(4) {
        for w in row.windows(2) {
            assert!(w[1].mean_g < w[0].mean_g, "lambda {}: {} vs {}", w[0].lambda, w[0].mean_g, w[1].mean_g);
        }
    }
}

#[test]
fn sweep_flow_rises_with_surplus_rate() {
    let spec = SweepSpec::new(vec![0.25], vec![0.0, 0.25, 0.5, 0.75, 1.0]).with_replicates(2);
    let cells = run_sweep(&spec).unwrap();
    assert!(cells.windows(2).all(|w| w[1].mean_f > w[0].mean_f));
}
