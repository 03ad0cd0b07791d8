use gauss_reliability::bounds::Bounds;
use gauss_reliability::codes::{decode, gen_code, ml_decode_error_mc, pairwise_error, CodeKind};
use gauss_reliability::functions::{capacity, t_of_rate, tau_of_t, ChannelParams};
use gauss_reliability::geometry::{lemma4_bound_log, opt_sr, triple_coordinates, z_of};
use gauss_reliability::spectrum::projection_condition;
use proptest::prelude::*;

fn p(a: f64) -> ChannelParams {
    ChannelParams::new(a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn z_at_optimal_sr_is_one(ln_a in -4.0f64..4.6, rho in -0.999f64..0.999) {
        let pa = p(ln_a.exp());
        let (s, r) = opt_sr(rho, pa);
        let z = z_of(s, r, rho, pa).unwrap();
        prop_assert!((z - 1.0).abs() < 1e-9, "z = {z}");
    }

    #[test]
    fn triple_residual_matches_z(ln_a in -3.0f64..3.0, rho in -0.99f64..0.99, s in 0.0f64..5.0, r in 0.0f64..5.0) {
        let pa = p(ln_a.exp());
        let z = z_of(s, r, rho, pa).unwrap();
        match triple_coordinates(pa, rho, s, r) {
            Ok(g) => {
                let scale = 1.0 + r + s + pa.a();
                prop_assert!((g.r1 - z).abs() < 1e-9 * scale);
                prop_assert!((g.point_distance_sq() - s).abs() < 1e-9 * scale);
                prop_assert!((g.x1 * g.x1 + g.x2 * g.x2 - pa.a()).abs() < 1e-12 * scale);
                prop_assert!((g.codeword_distance_sq() - 2.0 * pa.a() * (1.0 - rho)).abs() < 1e-12 * scale);
            }
            Err(_) => prop_assert!(z < 0.0),
        }
    }

    #[test]
    fn lemma4_bound_increases_with_mu(n in 1usize..200, mu in 0.0f64..0.99, dmu in 1e-6f64..0.009) {
        prop_assert!(lemma4_bound_log(n, mu + dmu).unwrap() > lemma4_bound_log(n, mu).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn bounds_nonincreasing_and_ordered(ln_a in -4.0f64..4.6, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let b = Bounds::new(p(ln_a.exp())).unwrap();
        let c = b.thresholds().capacity;
        let (r1, r2) = ((x.min(y)) * c, (x.max(y)) * c);
        for f in [Bounds::upper_t1, Bounds::upper_t2, Bounds::lower] {
            prop_assert!(f(&b, r2).unwrap() <= f(&b, r1).unwrap() + 1e-12);
        }
        let lo = b.lower(r1).unwrap();
        prop_assert!(lo <= b.upper_t2(r1).unwrap());
        prop_assert!(b.upper_t2(r1).unwrap() <= b.upper_t1(r1).unwrap());
    }

    #[test]
    fn decoding_is_scale_invariant(seed in 0u64..1_000_000, k in -3i32..4, n in 1usize..12, m in 2usize..20) {
        let code = gen_code(CodeKind::RandomUniform, n, m, p(1.0), seed).unwrap();
        // powers of two scale every distance exactly
        let c = 2f64.powi(k);
        let big = code.scaled(c).unwrap();
        let y: Vec<f64> = (0..n).map(|i| ((seed as f64 + 1.3) * (i as f64 + 0.7)).sin() * 2.0).collect();
        let yc: Vec<f64> = y.iter().map(|v| v * c).collect();
        prop_assert_eq!(decode(&code, &y), decode(&big, &yc));
    }

    #[test]
    fn inner_max_at_tau_under_projection_condition(ln_a in -1.0f64..3.0, x in 0.02f64..1.0, y in 0.05f64..1.0) {
        let a = ln_a.exp();
        let b = Bounds::new(p(a)).unwrap();
        let r = y * b.thresholds().r_crit;
        let u = x * r;
        if projection_condition(u, r, p(a)).unwrap() {
            let (rho, _, tau) = b.minmax_inner(r, u).unwrap();
            let tau_u = tau_of_t(t_of_rate(u).unwrap()).unwrap();
            prop_assert!((tau - tau_u).abs() < 1e-12);
            prop_assert!((rho - tau).abs() < 1e-6, "rho = {rho}, tau_u = {tau}");
        }
    }
}

#[test]
fn monte_carlo_is_unbiased_across_seeds() {
    let n = 4;
    let d = 1.0;
    let code = gen_code(CodeKind::Pair { rho: 1.0 - d / 2.0 }, n, 2, p(1.0), 0).unwrap();
    let q = pairwise_error(d * n as f64);
    let trials = 4_000u64;
    let mut total = 0u64;
    let mut within = 0;
    for seed in 0..50u64 {
        let est = ml_decode_error_mc(&code, trials, seed).unwrap();
        total += est.errors;
        if (est.p_e_hat - q).abs() <= est.half_width.max(1.96 * (q * (1.0 - q) / trials as f64).sqrt()) {
            within += 1;
        }
    }
    let pooled_n = 50.0 * trials as f64;
    let pooled = total as f64 / pooled_n;
    let sigma = (q * (1.0 - q) / pooled_n).sqrt();
    assert!((pooled - q).abs() <= 3.0 * sigma, "pooled {pooled} vs {q}");
    // roughly 95% of the per-seed intervals should cover the truth
    assert!(within >= 42, "{within} of 50 intervals cover Q");
}

#[test]
fn capacity_endpoint_is_zero_for_all_bounds() {
    for a in [0.01, 0.3, 2.0, 4.0, 50.0] {
        let b = Bounds::new(p(a)).unwrap();
        let c = capacity(p(a));
        for v in [b.upper_t1(c), b.upper_t2(c), b.lower(c)] {
            assert!(v.unwrap().abs() < 1e-12);
        }
    }
}
