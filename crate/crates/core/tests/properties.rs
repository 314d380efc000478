mod common;

use gapsolve::dirac::{assemble, BasisConfig, ChannelSpec};
use gapsolve::gap::{
    all_levels, minmax_iterate, orthonormalize, schur_pair, BlockOperator, SolverOptions,
};
use gapsolve::runner::{emit_scan, linspace};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (BlockOperator, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index = rng.gen_range(0..5);
    (common::random_block(&mut rng, index, 6), rng)
}

fn top(op: &BlockOperator) -> f64 {
    common::direct_levels(op)
        .into_iter()
        .flatten()
        .fold(op.lambda0() + 1.0, f64::max)
        + 1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_norms_and_forms_are_ordered(seed in any::<u64>(), a in 0.05f64..1.0, b in 0.01f64..1.0) {
        let (op, mut rng) = instance(seed);
        let (l0, span) = (op.lambda0(), top(&op) - op.lambda0());
        let e = l0 + a * span;
        let ep = e + b * span;
        let (pe, pp) = (schur_pair(&op, e).unwrap(), schur_pair(&op, ep).unwrap());
        let x = DVector::from_fn(op.n_plus(), |_, _| rng.gen_range(-1.0..1.0));
        let (ne, np) = (pe.n.quad_form(&x), pp.n.quad_form(&x));
        let (qe, qp) = (pe.m.quad_form(&x), pp.m.quad_form(&x));
        let tol = 1e-9 * op.scale() * (1.0 + ne);
        prop_assert!(np.sqrt() <= ne.sqrt() + tol);
        prop_assert!(ne.sqrt() <= (ep - l0) / (e - l0) * np.sqrt() + tol);
        prop_assert!((ep - e) * np <= qe - qp + tol);
        prop_assert!(qe - qp <= (ep - e) * ne + tol);
    }

    #[test]
    fn levels_lie_between_the_bounds(seed in any::<u64>(), a in 0.02f64..1.0) {
        let (op, _) = instance(seed);
        let l0 = op.lambda0();
        let lam = l0 + a * (top(&op) - l0);
        let levels = all_levels(&op, lam).unwrap();
        let tol = 1e-9 * op.scale();
        for (k, lk) in common::direct_levels(&op).into_iter().enumerate() {
            let Some(lk) = lk else { continue };
            prop_assert!(levels[k] <= lk - lam + tol);
            prop_assert!(levels[k] >= (lk - lam) * ((lam - l0) / (lk - l0)).powi(2) - tol);
        }
    }

    #[test]
    fn levels_are_congruence_invariant(seed in any::<u64>(), a in 0.05f64..1.0) {
        let (op, _) = instance(seed);
        let e = op.lambda0() + a * (top(&op) - op.lambda0());
        let on = orthonormalize(&op).unwrap();
        prop_assert!((on.lambda0() - op.lambda0()).abs() <= 1e-10 * op.scale());
        let (x, y) = (all_levels(&op, e).unwrap(), all_levels(&on, e).unwrap());
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() <= 1e-10 * op.scale().max(p.abs()));
        }
    }

    #[test]
    fn scan_columns_change_sign_once_and_fall_below_zero(seed in any::<u64>()) {
        let (op, _) = instance(seed);
        let l0 = op.lambda0();
        let grid = linspace(l0 + 0.01, top(&op), 25);
        let rows = emit_scan(&op, &grid, op.n_plus()).unwrap();
        let tol = 1e-12 * op.scale();
        for w in rows.windows(2) {
            let (a, b) = (w[0].levels.as_ref().unwrap(), w[1].levels.as_ref().unwrap());
            let step = w[1].e - w[0].e;
            for (x, y) in a.iter().zip(b) {
                prop_assert!(!(*x <= 0.0 && *y > 0.0));
                if *x <= 0.0 {
                    prop_assert!(*y <= x - step + tol);
                }
            }
        }
    }

    #[test]
    fn solver_finds_zero_crossings_from_below(seed in any::<u64>()) {
        let (op, _) = instance(seed);
        for (k, lk) in common::direct_levels(&op).into_iter().enumerate() {
            let Some(lk) = lk else { continue };
            let e0 = op.lambda0() + 0.5 * (lk - op.lambda0());
            let t = minmax_iterate(&op, k + 1, &SolverOptions::default().with_e0(e0)).unwrap();
            prop_assert!(t.converged);
            prop_assert!((t.lambda - lk).abs() <= 1e-9 * op.scale());
            let at = all_levels(&op, t.lambda).unwrap()[k];
            prop_assert!(at.abs() <= 1e-9 * op.scale());
            let rising: Vec<_> = t.iterates.iter().take_while(|i| i.level > 0.0).collect();
            prop_assert!(rising.windows(2).all(|w| w[1].e > w[0].e));
        }
    }
}

#[test]
fn dirac_iteration_is_quadratic_and_monotone() {
    let spec = ChannelSpec::coulomb(0.5, -1, BasisConfig::default());
    let op = assemble(&spec).unwrap();
    let t = minmax_iterate(&op, 1, &SolverOptions::default().with_gap_edge(1.0)).unwrap();
    assert!(t.converged);
    let es: Vec<f64> = t.iterates.iter().map(|i| i.e).collect();
    assert!(es.windows(2).all(|w| w[1] > w[0]));
    let errs: Vec<f64> = es.iter().map(|e| (e - t.lambda).abs()).collect();
    let ratios: Vec<f64> = errs
        .windows(2)
        .filter(|w| w[1] > 1e-13)
        .map(|w| w[1] / (w[0] * w[0]))
        .collect();
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    assert!(!tail.is_empty());
    assert!(tail.iter().all(|&r| r < 10.0), "{ratios:?}");
}

#[test]
fn positive_levels_need_not_decrease() {
    let mut rng = ChaCha8Rng::seed_from_u64(14227285);
    let index = rng.gen_range(0..5);
    let op = common::random_block(&mut rng, index, 6);
    let l0 = op.lambda0();
    let grid = linspace(l0 + 0.01, top(&op), 25);
    let rows = emit_scan(&op, &grid, 1).unwrap();
    let l1: Vec<f64> = rows.iter().map(|r| r.levels.as_ref().unwrap()[0]).collect();
    assert!(l1[1] > l1[0] && l1[0] > 0.0, "{l1:?}");
    let lam = minmax_iterate(&op, 1, &SolverOptions::default()).unwrap().lambda;
    for (r, l) in rows.iter().zip(&l1) {
        assert_eq!(*l > 0.0, r.e < lam);
    }
}
