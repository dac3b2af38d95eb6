use proptest::prelude::*;

use plankton_fde::analysis::{
    empirical_lipschitz, gronwall_bound_constant_q, gronwall_bound_ml, lipschitz_constants, GronwallProblem,
    StateBox,
};
use plankton_fde::model::{rhs_full, rhs_nonlinear, ModelParams, State};

fn params() -> impl Strategy<Value = ModelParams<f64>> {
    prop::array::uniform16(0.2f64..3.0).prop_map(|v| ModelParams {
        c0: v[0],
        c1: v[1],
        c2: v[2],
        c3: v[3],
        c4: v[4],
        h: v[5],
        big_h: v[6],
        delta: v[7],
        v: v[8],
        big_b: v[9],
        beta_pred: v[10],
        xi: v[11],
        m: v[12],
        gamma: v[13],
        sigma: v[14],
        mu: v[15],
    })
}

fn state_box() -> impl Strategy<Value = StateBox<f64>> {
    (0.1f64..4.0, 0.1f64..4.0, 0.1f64..4.0).prop_map(|(a, b, c)| StateBox::new(a, b, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lipschitz_assembly(p in params(), b in state_box()) {
        let r = lipschitz_constants(&p, &b).unwrap();
        let k = r.k;
        prop_assert!(k.iter().all(|v| *v >= 0.0 && v.is_finite()));
        prop_assert_eq!(r.l1, k[0] + k[2] + k[4] + k[6] + k[10]);
        prop_assert_eq!(r.l2, k[1] + k[3] + k[7] + k[8] + k[11]);
        prop_assert_eq!(r.l3, k[5] + k[9] + k[12]);
        prop_assert_eq!(r.l, r.l1.max(r.l2).max(r.l3));
    }

    #[test]
    fn lipschitz_grows_with_the_box(p in params(), b in state_box(), s in 1.0f64..3.0) {
        let small = lipschitz_constants(&p, &b).unwrap();
        let big = lipschitz_constants(&p, &b.scaled(s).unwrap()).unwrap();
        for (a, c) in small.k.iter().zip(big.k.iter()) {
            prop_assert!(a <= c, "{a} > {c}");
        }
        prop_assert!(small.l <= big.l);
    }

    #[test]
    fn sampled_ratio_below_lipschitz(p in params(), b in state_box(), seed in any::<u64>()) {
        let r = lipschitz_constants(&p, &b).unwrap();
        let e = empirical_lipschitz(&p, &b, 2_000, seed).unwrap();
        prop_assert!(e <= r.l * (1.0 + 1e-12), "sampled {e} above L = {}", r.l);
    }

    #[test]
    fn oxygen_free_zooplankton_rate_nonnegative(p in params(), x in prop::array::uniform3(0.0f64..5.0)) {
        let f = rhs_nonlinear(&p, &State(x)).unwrap();
        prop_assert!(f[2] >= 0.0);
    }

    #[test]
    fn full_rhs_reduces_without_linear_losses(p in params(), x in prop::array::uniform3(0.0f64..5.0)) {
        let q = ModelParams { m: 0.0, sigma: 0.0, mu: 0.0, ..p };
        prop_assert_eq!(rhs_full(&q, &State(x)).unwrap(), rhs_nonlinear(&q, &State(x)).unwrap());
    }

    #[test]
    fn linear_part_norm(p in params()) {
        let a = p.linear_part();
        prop_assert_eq!(a.one_norm(), p.m + p.sigma + p.mu);
        prop_assert_eq!(a.diag, [-p.m, -p.sigma, -p.mu]);
    }

    #[test]
    fn gronwall_bounds_dominate_forcing(
        h0 in 0.0f64..5.0,
        b in 0.0f64..1.5,
        beta in 0.5f64..1.0,
        t in 0.0f64..1.0,
    ) {
        let prob = GronwallProblem::constant(h0, b, beta, 1.0).unwrap();
        let s = gronwall_bound_constant_q(&prob, t, 200).unwrap();
        prop_assert!(s.value >= h0);
        prop_assert!(s.remainder >= 0.0);
        let ml = gronwall_bound_ml(h0, b, beta, t).unwrap();
        prop_assert!(ml >= h0);
        prop_assert!((ml - s.value).abs() <= s.remainder + 1e-12 * ml.max(1.0));
    }

    #[test]
    fn gronwall_monotone_in_coefficient(h0 in 0.1f64..5.0, b in 0.0f64..2.0, db in 0.0f64..1.0, beta in 0.5f64..1.0) {
        let lo = gronwall_bound_ml(h0, b, beta, 1.0).unwrap();
        let hi = gronwall_bound_ml(h0, b + db, beta, 1.0).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-13));
    }
}
