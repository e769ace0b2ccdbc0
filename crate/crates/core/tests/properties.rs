use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pa_bootstrap::experiments::{run_sweep, summarize, SeedingRule, SweepConfig};
use pa_bootstrap::graph::grow_pam_direct;
use pa_bootstrap::numerics::{integral_i, log_gamma};
use pa_bootstrap::percolation::{folklore_bound, run, seed_infection};
use pa_bootstrap::thresholds as th;
use pa_bootstrap::witness::{bound_check, weight_f, Valuation, WitnessTreeSpec};
use pa_bootstrap::{Integral, Params, RngStream};

#[test]
fn percolation_is_monotone_in_the_seed_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g_seed in 0..5u64 {
        let t = 400;
        let g = grow_pam_direct(t, Params::new(2, 0.0).unwrap(), RngStream::new(g_seed, 0)).unwrap();
        for _ in 0..100 {
            let b: Vec<usize> = (1..=t).filter(|_| rng.random_bool(0.08)).collect();
            let a: Vec<usize> = b.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
            let fa = run(g.graph(), 2, &a).unwrap();
            let fb = run(g.graph(), 2, &b).unwrap();
            for v in 1..=t {
                assert!(!fa.state.is_infected(v) || fb.state.is_infected(v));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folklore_bound_holds_on_pa_graphs(
        seed in any::<u64>(),
        m in 1usize..4,
        extra in 1usize..3,
        p in 0.001f64..0.3,
        frac in -0.9f64..2.0,
    ) {
        let r = m + extra;
        let params = Params::new(m, frac * m as f64).unwrap();
        let g = grow_pam_direct(2000, params, RngStream::new(seed, 0)).unwrap();
        let initial = seed_infection(2000, p, RngStream::new(seed, 1)).unwrap();
        let res = run(g.graph(), r, &initial).unwrap();
        prop_assert!(res.final_count <= folklore_bound(r, m, res.initial).unwrap());
    }

    #[test]
    fn log_gamma_recurrence(x in 0.5f64..1e6) {
        let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        let tol = 1e-10 + 4.0 * f64::EPSILON * log_gamma(x + 1.0).unwrap().abs();
        prop_assert!((lhs - x.ln()).abs() <= tol);
    }

    #[test]
    fn weight_decreases_in_omega(depth in 1usize..3, r in 2usize..4, w in 1.0f64..20.0) {
        let spec = WitnessTreeSpec::all_up(r, depth).unwrap();
        let lo = weight_f(&spec, 300, w, 0.4).unwrap();
        let hi = weight_f(&spec, 300, 2.0 * w, 0.4).unwrap();
        for i in 1..=300 {
            prop_assert!(hi[i] <= lo[i]);
        }
    }
}

fn integral_grid() -> Vec<Integral> {
    let mut out = Vec::new();
    for k in 0..=4 {
        for a in 0..5 {
            for jj in 0..5 {
                let alpha = 0.2 + 0.45 * a as f64;
                let j = (2.0 + jj as f64 * (1e4f64.ln() - 2.0) / 4.0).exp();
                out.push(Integral::new(k, alpha, j, 1e6).unwrap());
            }
        }
    }
    out
}

#[test]
fn integral_recursion_on_grid() {
    for p in integral_grid().into_iter().filter(|p| p.k > 0) {
        let lj = p.j.ln();
        let prev = Integral::new(p.k - 1, p.alpha, p.j, p.t).unwrap();
        let rhs = lj.powi(p.k as i32) / (p.alpha * p.j.powf(p.alpha))
            + p.k as f64 / p.alpha * integral_i(&prev).unwrap();
        let lhs = integral_i(&p).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-12), "{p:?}: {lhs} > {rhs}");
    }
}

#[test]
fn integral_monotone_on_grid() {
    for p in integral_grid() {
        let base = integral_i(&p).unwrap();
        let later_j = integral_i(&Integral::new(p.k, p.alpha, p.j * 1.5, p.t).unwrap()).unwrap();
        let later_t = integral_i(&Integral::new(p.k, p.alpha, p.j, p.t * 2.0).unwrap()).unwrap();
        assert!(later_j <= base && base <= later_t, "{p:?}");
    }
}

/// The root's down child is an original leaf, so `f_0(1) = 0` and the
/// ratio cannot be pinned at `i = 1`; instead its supremum over `i` must not
/// grow with `t`.
#[test]
fn down_leaf_ratio_stays_bounded_in_t() {
    let spec = WitnessTreeSpec::from_nodes(
        2,
        &[
            (None, None, Valuation::Trivial),
            (Some(0), Some(true), Valuation::Leaf),
            (Some(0), Some(false), Valuation::Leaf),
        ],
    )
    .unwrap();
    let sup: Vec<f64> = [1_000usize, 10_000, 100_000]
        .iter()
        .map(|&t| bound_check(&spec, t, (t as f64).ln(), 0.5).unwrap().max_ratio)
        .collect();
    assert!(sup[0] > 0.0);
    for w in sup.windows(2) {
        assert!(w[1] <= th::BOUND_RATIO_FACTOR * w[0], "{sup:?}");
    }
}

#[test]
fn outbreak_grows_with_lambda() {
    let rule = SeedingRule::Lambda(vec![0.1, 30.0]);
    let cfg = SweepConfig::new(10_000, Params::new(3, 0.0).unwrap(), 2, rule, 30, 4).unwrap();
    let s = summarize(&run_sweep(&cfg).unwrap());
    assert!(s[1].full_fraction >= s[0].full_fraction, "{} < {}", s[1].full_fraction, s[0].full_fraction);
}
