//! Cross-module checks against independent oracles.

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use spinsqueeze::analytic::{ku_minimum, lnl_xi, xi_y_at_ts, KappaSign};
use spinsqueeze::dynamics::{run_series, Model, NPolicy, Scenario, SeriesConfig, TimeGrid};
use spinsqueeze::hamiltonians::{build_full, spectrum};
use spinsqueeze::{CConst, FieldParams};

/// Number of eigenvalues of the real symmetric `a` below `sigma`, from the
/// signs of the LDLᵀ pivots of `a − σI`.
fn count_below(a: &[Vec<f64>], sigma: f64) -> usize {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= sigma;
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut d = m[k][k];
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            negatives += 1;
        }
        let pivot_row = m[k].clone();
        for row in m.iter_mut().skip(k + 1) {
            let l = row[k] / d;
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(k + 1) {
                *x -= l * p;
            }
        }
    }
    negatives
}

fn bisection_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let bound: f64 = a
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    (0..a.len())
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(a, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

fn real_rows(p: &FieldParams) -> Vec<Vec<f64>> {
    let h = build_full(p);
    (0..8)
        .map(|i| {
            (0..8)
                .map(|j| {
                    assert_eq!(h[(i, j)].im, 0.0);
                    h[(i, j)].re
                })
                .collect()
        })
        .collect()
}

#[test]
fn full_spectrum_matches_inertia_bisection() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..40 {
        let theta = if rng.gen_bool(0.3) {
            0.0
        } else {
            rng.gen_range(0.0..PI)
        };
        let p = FieldParams::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.0..1.0),
            theta,
            CConst::Plus,
        )
        .unwrap();
        let oracle = bisection_eigenvalues(&real_rows(&p));
        let got = spectrum(&build_full(&p)).unwrap();
        for (a, b) in oracle.iter().zip(&got) {
            assert!((a - b).abs() < 1e-10, "{oracle:?} vs {got:?}");
        }
    }
}

#[test]
fn zero_field_spectrum_is_two_quartets() {
    let p = FieldParams::new(1.0, 0.0, 0.0, 0.0, CConst::Plus).unwrap();
    let ev = spectrum(&build_full(&p)).unwrap();
    assert!(ev[..4].iter().all(|x| (x + 1.0).abs() < 1e-14));
    assert!(ev[4..].iter().all(|x| (x - 1.0).abs() < 1e-14));
}

#[test]
fn lnl_closed_form_holds_for_signed_kappa_only() {
    for c in [CConst::Plus, CConst::Minus] {
        let p = FieldParams::from_twist_ratio(0.2, 2.0, FRAC_PI_2, c).unwrap();
        let s = run_series(&SeriesConfig::new(Scenario::Lnl, Model::FourDim, p)).unwrap();
        let err = |kappa: f64| {
            s.records
                .iter()
                .map(|r| {
                    let (x, y) = lnl_xi(kappa, p.b_field, r.time).unwrap();
                    (x - r.xi.0).abs().max((y - r.xi.1).abs())
                })
                .fold(0.0, f64::max)
        };
        assert!(err(p.kappa()) < 1e-9, "signed kappa with C = {c}");
        assert!(err(-p.kappa()) > 1e-3, "flipped kappa with C = {c}");
    }
}

#[test]
fn ts_formula_matches_numerics_for_positive_kappa() {
    let c = KappaSign::Positive.c_const();
    for r in [0.5, 1.0, 3.3, 8.0] {
        let p = FieldParams::from_twist_ratio(0.1, r, FRAC_PI_2, c).unwrap();
        // grid of 5 nodes on [0, π/4] lands exactly on P t_S = π/4
        let cfg = SeriesConfig::new(Scenario::Lnl, Model::FourDim, p)
            .with_grid(TimeGrid::new(PI / 4.0, 5).unwrap());
        let s = run_series(&cfg).unwrap();
        let last = s.records.last().unwrap();
        assert!((last.xi.1 - xi_y_at_ts(r)).abs() < 1e-9, "r={r}");
    }
}

#[test]
fn ku_series_minimum_close_to_grid_oracle() {
    let p = FieldParams::from_ratios(0.25, 0.0, 0.0, CConst::Plus).unwrap();
    let cfg = SeriesConfig::new(Scenario::Ku, Model::FourDim, p)
        .with_n_policy(NPolicy::Scan)
        .with_grid(TimeGrid::new(FRAC_PI_2, 4001).unwrap());
    let (_, numeric) = run_series(&cfg).unwrap().min_first().unwrap();
    let (_, analytic) = ku_minimum();
    assert!((numeric - analytic).abs() < 1e-6, "{numeric} vs {analytic}");
}

#[test]
fn series_are_deterministic() {
    let p = FieldParams::from_ratios(0.25, 0.05, 0.4, CConst::Plus).unwrap();
    let cfg = SeriesConfig::new(Scenario::General, Model::EightDim, p);
    let a = run_series(&cfg).unwrap();
    let b = run_series(&cfg).unwrap();
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(x.xi.0.to_bits(), y.xi.0.to_bits());
        assert_eq!(x.xi.1.to_bits(), y.xi.1.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adiabatic_limit_reaches_same_minimum(e in 0.002f64..0.01) {
        // the full model twists at half the adiabatic rate, so only the
        // minimum values are compared
        let p = FieldParams::from_ratios(e, 0.0, 0.0, CConst::Plus).unwrap();
        let run = |model, t_max| {
            let cfg = SeriesConfig::new(Scenario::Ku, model, p)
                .with_grid(TimeGrid::new(t_max, 801).unwrap())
                .with_n_policy(NPolicy::Scan);
            run_series(&cfg).unwrap().min_first().unwrap()
        };
        let (t4, xi4) = run(Model::FourDim, 0.8);
        let (t8, xi8) = run(Model::EightDim, 1.6);
        prop_assert!((xi4 - xi8).abs() < 2e-3, "{xi4} {xi8}");
        prop_assert!((t8 / t4 - 2.0).abs() < 0.05, "{t4} {t8}");
    }
}
