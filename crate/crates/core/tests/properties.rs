use melkit::exact::{format_rational, parse_rational, Rational};
use melkit::melnikov::{
    reduce_to_canonical, rewrite_I, rewrite_J, BasisKind, Perturbation, PerturbationDoc,
};
use melkit::quadrature::{integrate_split, quad_I, quad_J, quad_melnikov, QuadResult};
use melkit::sim::{return_map, SimOptions, SystemSpec};
use melkit::zeros::{count_sign_changes, max_zero_bound, BoundQuery};
use proptest::prelude::*;

fn rational_text() -> impl Strategy<Value = String> {
    (-30i64..=30, 1i64..=12).prop_map(|(p, q)| format!("{p}/{q}"))
}

fn table(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(prop::collection::vec(rational_text(), cols), rows)
}

fn json_table(t: &[Vec<String>]) -> String {
    serde_json::to_string(t).unwrap()
}

/// Smooth perturbations with `n <= 2` and powers in `1..=4`.
fn smooth() -> impl Strategy<Value = Perturbation> {
    (0u32..=2, 1u32..=3, 0u32..=2)
        .prop_flat_map(|(n, s1, extra)| {
            let cols = (extra + 1) as usize;
            (Just((n, s1, s1 + extra)), table(n as usize + 1, cols), table(n as usize, cols))
        })
        .prop_map(|((n, s1, s2), a, at)| {
            Perturbation::from_json(&format!(
                r#"{{"kind":"smooth","n":{n},"s1":{s1},"s2":{s2},"a":{},"a_tilde":{}}}"#,
                json_table(&a),
                json_table(&at)
            ))
            .unwrap()
        })
}

fn piecewise() -> impl Strategy<Value = Perturbation> {
    (1u32..=2, 1u32..=2, 0u32..=2, 0u32..=2)
        .prop_flat_map(|(n, s1, e2, e3)| {
            (
                Just((n, s1, s1 + e2, s1 + e3)),
                table(n as usize + 1, e2 as usize + 1),
                table(n as usize + 1, e3 as usize + 1),
            )
        })
        .prop_map(|((n, s1, s2, s3), plus, minus)| {
            Perturbation::from_json(&format!(
                r#"{{"kind":"piecewise","n":{n},"s1":{s1},"s2":{s2},"s3":{s3},"plus":{{"a":{}}},"minus":{{"a":{}}}}}"#,
                json_table(&plus),
                json_table(&minus)
            ))
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rationals_round_trip_through_text(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = Rational::new(p.into(), q.into());
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn perturbation_json_round_trips(p in prop_oneof![smooth(), piecewise()]) {
        let doc = PerturbationDoc::from(&p);
        let text = serde_json::to_string(&doc).unwrap();
        prop_assert_eq!(Perturbation::from_json(&text).unwrap(), p);
    }

    #[test]
    fn chain_identities_hold_exactly(i in 0u32..6, r in 0u32..4, k in 0u32..4) {
        prop_assert!(rewrite_I(i, r, k).series_residual(14).is_zero());
        prop_assert!(rewrite_J(i, r + 1, k).unwrap().series_residual(14).is_zero());
    }

    #[test]
    fn reduction_preserves_the_series(p in prop_oneof![smooth(), piecewise()]) {
        let c = p.assemble();
        prop_assume!(!c.is_empty());
        match reduce_to_canonical(&c) {
            Ok(form) => {
                let base = c.params.base_half_exponent();
                prop_assert_eq!(form.series_window(base, base + 30), c.series_window(base, base + 30));
            }
            // Several blocks with n = 0 have no canonical form; the block
            // coefficients themselves are the free parameters.
            Err(_) => prop_assert_eq!(p.n(), 0),
        }
    }

    #[test]
    fn smooth_assembly_has_only_odd_powers(p in smooth()) {
        for t in &p.assemble().terms {
            prop_assert!(t.element.kind == BasisKind::I && t.element.j % 2 == 1);
        }
    }

    #[test]
    fn series_matches_quadrature_near_the_center(p in prop_oneof![smooth(), piecewise()]) {
        let c = p.assemble();
        let series = c.expand(25);
        for h in [0.01, 0.05] {
            let q = quad_melnikov(&p, h, 1e-13).unwrap();
            match series.series() {
                Some(s) => {
                    let v = s.eval_f64(h);
                    prop_assert!((v - q.value).abs() <= 1e-6 * v.abs().max(1e-300) + 10.0 * q.abs_error_estimate,
                        "h={} series {} quad {}", h, v, q.value);
                }
                None => prop_assert!(q.value.abs() <= q.abs_error_estimate),
            }
        }
    }

    #[test]
    fn basis_integrals_are_positive_and_increasing(i in 0u32..5, j in 1u32..8) {
        let mut last = 0.0;
        for h in [0.05, 0.2, 0.5, 1.0, 1.5, 1.9] {
            let v = if j % 2 == 1 { quad_I(i, j, h, 1e-12) } else { quad_J(i, j, h, 1e-12) }.unwrap().value;
            prop_assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn doubling_the_panels_stays_within_the_estimate(a in 1u32..6, b in 1u32..6, top in 0.5f64..1.5) {
        let f = |t: f64| t.sin().powi(a as i32) * t.cos().powi(b as i32) / (1.0 - 0.4 * t.sin().powi(2)).sqrt();
        let coarse = integrate_split(f, 0.0, top, 1, 1e-12, 0.0);
        let fine = integrate_split(f, 0.0, top, 2, 1e-12, 0.0);
        prop_assert!(coarse.converged && fine.converged);
        prop_assert!((coarse.value - fine.value).abs() <= coarse.abs_error_estimate + fine.abs_error_estimate);
    }

    #[test]
    fn unperturbed_flow_conserves_energy(h in 0.05f64..1.5) {
        let p = Perturbation::from_json(r#"{"kind":"smooth","n":0,"s1":1,"s2":1,"a":[["1"]]}"#).unwrap();
        let opts = SimOptions::default();
        let r = return_map(&SystemSpec::new(0.0, p).unwrap(), h, &opts).unwrap();
        prop_assert!((r.h_out - h).abs() <= 10.0 * opts.tol);
        prop_assert_eq!(r.crossings, 2);
    }

    #[test]
    fn piecewise_orbits_cross_twice(p in piecewise(), h in 0.05f64..1.5) {
        let r = return_map(&SystemSpec::new(1e-4, p).unwrap(), h, &SimOptions::default()).unwrap();
        prop_assert_eq!(r.crossings, 2);
    }

    #[test]
    fn sign_changes_find_planted_roots(r1 in 0.01f64..0.1, gap in 1.5f64..4.0) {
        let r2 = r1 * gap;
        let f = |h: f64| -> melkit::Result<QuadResult> {
            Ok(QuadResult { value: (h - r1) * (h - r2), abs_error_estimate: 0.0, evaluations: 1, converged: true })
        };
        let report = count_sign_changes(f, 1e-3, 1.0, 64).unwrap();
        prop_assert_eq!(report.count, 2);
        prop_assert!((report.brackets[0].mid() - r1).abs() <= 1e-6 * r1);
        prop_assert!((report.brackets[1].mid() - r2).abs() <= 1e-6 * r2);
    }
}

#[test]
fn odd_powers_on_both_sides_reduce_to_the_smooth_case() {
    let plus = r#"{"a":[["1","0","-2/3"],["5","0","1"]]}"#;
    let p = Perturbation::from_json(&format!(
        r#"{{"kind":"piecewise","n":1,"s1":1,"s2":3,"s3":3,"plus":{plus},"minus":{plus}}}"#
    ))
    .unwrap();
    let s = Perturbation::from_json(r#"{"kind":"smooth","n":1,"s1":1,"s2":3,"a":[["1","0","-2/3"],["5","0","1"]]}"#)
        .unwrap();
    let piecewise = p.assemble().to_i_basis();
    let smooth = s.assemble();
    assert_eq!(piecewise.terms, smooth.terms);
}

#[test]
fn bounds_leave_one_spare_parameter() {
    for n in 0..5 {
        for m in 1..6 {
            let q = BoundQuery::Smooth { n, m };
            let free: u32 = q.family_params().ladders().iter().map(|l| l.free_count() as u32).sum();
            assert_eq!(free, max_zero_bound(&q).unwrap() + 1, "{q:?}");
        }
    }
}
