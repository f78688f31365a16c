use proptest::prelude::*;
use tancurve::builtin;
use tancurve::expr::{eval_jet, parse_expr, BinOp, Domain, Expr, Func, SurfacePatch, SURFACE_VARS};
use tancurve::geometry::FormsBundle;
use tancurve::tangent::decompose_position;

fn surfaces() -> Vec<SurfacePatch> {
    vec![
        builtin::plane(),
        builtin::cone(),
        builtin::unit_sphere(),
        builtin::offset_sphere(),
        builtin::catenoid(),
        builtin::helicoid(),
        builtin::cylinder(),
        builtin::paraboloid(),
    ]
}

/// A point of `surface` mapped from the unit square.
fn point_in(patch: &SurfacePatch, a: f64, b: f64) -> (f64, f64) {
    let d = patch.domain();
    (d.u.lo + a * d.u.width(), d.v.lo + b * d.v.width())
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0.0f64..10.0).prop_map(Expr::Const),
        (0usize..2).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)];
        let func = proptest::sample::select(Func::ALL.to_vec());
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (func, inner.clone()).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Binary(o, Box::new(a), Box::new(b))),
            (inner, 0u8..4).prop_map(|(a, p)| Expr::Pow(Box::new(a), Box::new(Expr::Const(f64::from(p))))),
        ]
    })
}

fn central_difference(patch: &SurfacePatch, u: f64, v: f64, du: f64, dv: f64) -> tancurve::Vec3 {
    let h = 1e-5;
    let p = patch.position(u + h * du, v + h * dv).unwrap();
    let m = patch.position(u - h * du, v - h * dv).unwrap();
    (p - m) / (2.0 * h)
}

fn relative_gap(a: tancurve::Vec3, b: tancurve::Vec3) -> f64 {
    (a - b).norm() / a.norm().max(1.0)
}

proptest! {
    #[test]
    fn printed_expressions_parse_back(e in expr_strategy()) {
        let text = e.to_string_with(&SURFACE_VARS);
        let back = parse_expr(&text, &SURFACE_VARS).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn parser_is_total(text in "[uvt0-9+*/^().,a-z -]{0,24}") {
        if let Err(e) = parse_expr(&text, &SURFACE_VARS) {
            prop_assert!(!e.to_string().is_empty());
        }
    }

    #[test]
    fn partials_agree_with_finite_differences(k in 0usize..8, a in 0.02f64..0.98, b in 0.02f64..0.98) {
        let patch = &surfaces()[k];
        let (u, v) = point_in(patch, a, b);
        let jet = eval_jet(patch, u, v).unwrap();
        prop_assert!(relative_gap(jet.d_u, central_difference(patch, u, v, 1.0, 0.0)) < 1e-6);
        prop_assert!(relative_gap(jet.d_v, central_difference(patch, u, v, 0.0, 1.0)) < 1e-6);
        // second partials from differences of exact first partials
        let h = 1e-5;
        let fwd = eval_jet(patch, u + h, v).unwrap();
        let back = eval_jet(patch, u - h, v).unwrap();
        prop_assert!(relative_gap(jet.d_uu, (fwd.d_u - back.d_u) / (2.0 * h)) < 1e-6);
        prop_assert!(relative_gap(jet.d_uv, (fwd.d_v - back.d_v) / (2.0 * h)) < 1e-6);
        prop_assert!(relative_gap(jet.d_uuv, (fwd.d_uv - back.d_uv) / (2.0 * h)) < 1e-6);
    }

    #[test]
    fn mixed_partials_do_not_depend_on_order(k in 0usize..8, a in 0.02f64..0.98, b in 0.02f64..0.98) {
        let patch = &surfaces()[k];
        let (u, v) = point_in(patch, a, b);
        // the same formulas with u and v bound in the other order
        let swapped = SurfacePatch::parse(
            &patch.canonical_text().replace('u', "#").replace('v', "u").replace('#', "v"),
            Domain::new(patch.domain().v, patch.domain().u),
        ).unwrap();
        let x = patch.jet(u, v).unwrap();
        let y = swapped.jet(v, u).unwrap();
        for c in 0..3 {
            prop_assert!((x[c].partial(1, 1) - y[c].partial(1, 1)).abs() < 1e-13);
            prop_assert!((x[c].partial(2, 1) - y[c].partial(1, 2)).abs() < 1e-13);
        }
    }

    #[test]
    fn gauss_equation_holds(k in 0usize..8, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let patch = &surfaces()[k];
        let (u, v) = point_in(patch, a, b);
        let bundle = FormsBundle::at(patch, u, v).unwrap();
        prop_assert!(bundle.gauss_residual() < 1e-8);
    }

    #[test]
    fn decomposition_reconstructs_position(k in 0usize..8, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let patch = &surfaces()[k];
        let (u, v) = point_in(patch, a, b);
        prop_assert!(decompose_position(patch, u, v).unwrap().residual < 1e-10);
    }

    #[test]
    fn translation_leaves_intrinsic_and_second_forms(
        k in 0usize..8,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
        shift in proptest::array::uniform3(-3.0f64..3.0),
    ) {
        let patch = &surfaces()[k];
        let (u, v) = point_in(patch, a, b);
        let parts: Vec<String> = patch.components().iter().map(|e| e.to_string_with(&SURFACE_VARS)).collect();
        let moved = format!(
            "({} + {:?}, {} + {:?}, {} + {:?})",
            parts[0], shift[0], parts[1], shift[1], parts[2], shift[2]
        );
        let moved = SurfacePatch::parse(&moved, *patch.domain()).unwrap();
        let x = FormsBundle::at(patch, u, v).unwrap();
        let y = FormsBundle::at(&moved, u, v).unwrap();
        let pairs = [
            (x.first.e.value, y.first.e.value),
            (x.first.f.value, y.first.f.value),
            (x.first.g.value, y.first.g.value),
            (x.second.l, y.second.l),
            (x.second.m, y.second.m),
            (x.second.n, y.second.n),
        ];
        for (p, q) in pairs {
            prop_assert!((p - q).abs() < 1e-10);
        }
        let (cx, cy) = (x.christoffel.values(), y.christoffel.values());
        for kk in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((cx[kk][i][j] - cy[kk][i][j]).abs() < 1e-10);
                }
            }
        }
    }
}
