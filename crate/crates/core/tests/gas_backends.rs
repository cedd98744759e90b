use std::collections::BTreeMap;

use hubo_gas::analysis::five_four_instance;
use hubo_gas::gas::*;
use hubo_gas::problems::{gcp_hubo, gcp_qubo, Strategy};

fn house(strategy: Strategy) -> GasProblem {
    let g = five_four_instance();
    let f = match strategy {
        Strategy::Qubo => gcp_qubo(&g),
        s => gcp_hubo(&g, s),
    };
    GasProblem::from_formulation(&f.unwrap()).unwrap()
}

#[test]
fn backends_share_exact_distributions() {
    let p = house(Strategy::Pf);
    for y in p.min()..=p.max() + 1 {
        let sv = p.statevector_distributions(y, 5).unwrap();
        for l in 0..=5u64 {
            let a = p.analytic_distribution(y, l);
            let worst = a.iter().zip(&sv[l as usize]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "y={y} L={l} off by {worst}");
        }
    }
}

/// Total variation between two empirical distributions over objective values.
fn tv(a: &BTreeMap<i64, u32>, b: &BTreeMap<i64, u32>, n: f64) -> f64 {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .map(|k| (*a.get(k).unwrap_or(&0) as f64 - *b.get(k).unwrap_or(&0) as f64).abs() / n)
        .sum::<f64>()
        / 2.0
}

#[test]
fn sampled_values_agree_in_total_variation() {
    let p = house(Strategy::Pf);
    let draws = 100_000;
    for (y, l) in [(1, 0), (1, 2), (2, 1), (3, 3)] {
        let mut ra = trial_rng(11, l);
        let mut rs = trial_rng(12, l);
        let (mut ha, mut hs) = (BTreeMap::new(), BTreeMap::new());
        for _ in 0..draws {
            *ha.entry(p.value(p.sample_analytic(y, l, &mut ra))).or_insert(0) += 1;
            *hs.entry(p.value(p.sample_statevector(y, l, &mut rs).unwrap())).or_insert(0) += 1;
        }
        let d = tv(&ha, &hs, draws as f64);
        assert!(d <= 0.02, "y={y} L={l} tv={d}");
    }
}

#[test]
fn runs_are_reproducible() {
    let p = house(Strategy::Asc);
    let cfg = GasConfig { seed: 5, ..GasConfig::default() };
    assert_eq!(p.run_trials(&cfg, 8).unwrap(), p.run_trials(&cfg, 8).unwrap());
    let other = GasConfig { seed: 6, ..cfg.clone() };
    assert_ne!(p.run_trials(&cfg, 8).unwrap(), p.run_trials(&other, 8).unwrap());
}

#[test]
fn traces_respect_the_schedule() {
    let p = house(Strategy::Qubo);
    let cap = p.max_rotations();
    let cfg = GasConfig { max_total_rotations: 300, ..GasConfig::default() };
    for t in p.run_trials(&cfg, 50).unwrap() {
        let mut prev_cum = 0;
        let mut prev_y = i64::MAX;
        for s in &t.steps {
            assert_eq!(s.cumulative_rotations, prev_cum + s.rotations);
            assert!(s.rotations <= cap);
            assert!(s.threshold <= prev_y);
            assert_eq!(s.accepted, s.threshold == s.value && s.value < prev_y);
            prev_cum = s.cumulative_rotations;
            prev_y = s.threshold;
        }
        assert!(prev_cum <= 300);
        match t.converged_at {
            Some(r) => assert_eq!((r, t.final_threshold()), (prev_cum, Some(p.min()))),
            None => assert!(t.final_threshold().unwrap() > p.min()),
        }
    }
}

#[test]
fn statevector_runs_match_analytic_in_aggregate() {
    let p = house(Strategy::Pf);
    let base = GasConfig { max_total_rotations: 64, ..GasConfig::default() };
    let sv = GasConfig { backend: Backend::Statevector, seed: 1, ..base.clone() };
    let a = success_cdf(&p.run_trials(&base, 300).unwrap());
    let s = success_cdf(&p.run_trials(&sv, 300).unwrap());
    for r in [0, 2, 8, 32] {
        assert!((cdf_at(&a, r) - cdf_at(&s, r)).abs() < 0.12, "r={r}");
    }
}
