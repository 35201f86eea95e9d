use proptest::prelude::*;
use rotsurf::exterior::BASIS_PAIRS;
use rotsurf::numeric::LAPLACIAN_STEP;
use rotsurf::report::Envelope;
use rotsurf::{
    flat_family, frame_biv_to_fixed, laplacian_numeric, parse_bicomplex, parse_profile_spec,
    pluecker_residual, second_kind_fit, wedge, Bicomplex, FrameBivector, GaussSampleSet, Kind,
    LaplacianSource, RotationSurface, Thresholds,
};

fn surface(spec: &str) -> RotationSurface {
    RotationSurface::new(parse_profile_spec(spec).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // every flat-family member is first kind with f = 4 b0²
    #[test]
    fn flat_family_first_kind(lambda in 0.5f64..3.0, d in -1.0f64..1.0) {
        let surf = flat_family(lambda, 1.0 / lambda, d).unwrap();
        let set = GaussSampleSet::from_grid(&surf, 4, 4, LaplacianSource::Closed).unwrap();
        let fit = second_kind_fit(&set, &Thresholds::default()).unwrap();
        prop_assert_eq!(fit.kind, Kind::First);
        let expected = 4.0 / (lambda * lambda);
        for f in &fit.f_samples {
            prop_assert!((f - expected).abs() <= 1e-9 * expected);
        }
    }

    #[test]
    fn gauss_map_is_unit_and_decomposable(mu in 0.1f64..3.0, s in 0.01f64..1.99, t in -4.0f64..4.0) {
        let surf = surface(&format!("family:logspiral(mu={mu})"));
        let f = surf.closed_frame(s, t).unwrap();
        prop_assert!(f.gram_deviation() <= 1e-12);
        prop_assert!((f.orientation() - 1.0).abs() <= 1e-12);
        let g = wedge(&f.e(0), &f.e(1));
        prop_assert!((g.norm() - 1.0).abs() <= 1e-12);
        prop_assert!(pluecker_residual(&g) <= 1e-12);
    }

    // the frame-to-fixed conversion is an isometry
    #[test]
    fn frame_conversion_isometry(c in prop::array::uniform6(-5.0f64..5.0), s in 0.6f64..1.9, t in 0.0f64..6.3) {
        let surf = surface("family:line(p=0.3,q=1,u=0.6,v=0.8)");
        let fixed = frame_biv_to_fixed(&FrameBivector(c), &surf.closed_frame(s, t).unwrap()).unwrap();
        let n: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((fixed.norm() - n).abs() <= 1e-12 * (1.0 + n));
    }

    // ΔG is invariant under rotation in t up to the rotation itself
    #[test]
    fn laplacian_norm_independent_of_t(s in 0.2f64..1.8, t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
        let surf = surface("family:logspiral(mu=0.7)");
        let a = surf.laplacian_gauss_closed_fixed(s, t1).unwrap().norm();
        let b = surf.laplacian_gauss_closed_fixed(s, t2).unwrap().norm();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn bicomplex_display_round_trip(x in prop::array::uniform4(-1e3f64..1e3)) {
        let v = Bicomplex::from_array(x);
        let back = parse_bicomplex(&v.to_string()).unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn bicomplex_inverse(x in prop::array::uniform4(-2.0f64..2.0)) {
        let v = Bicomplex::from_array(x);
        match v.inverse() {
            Ok(inv) => {
                let one = v * inv;
                let err = (one - Bicomplex::ONE).to_array().iter().fold(0.0f64, |m, e| m.max(e.abs()));
                prop_assert!(err <= 1e-8, "{} {}", v, err);
            }
            Err(_) => {
                let det = v.to_matrix().determinant().abs();
                prop_assert!(det <= 1e-9);
            }
        }
    }
}

#[test]
fn numeric_laplacian_agrees_on_vranceanu_reparametrized() {
    let profile = parse_profile_spec("family:vranceanu(k=0.3)").unwrap();
    let unit = rotsurf::arclength_reparametrize(&profile, profile.domain()).unwrap();
    let surf = RotationSurface::new(unit).unwrap();
    let r = surf.s_range();
    for s in [r.lo + 0.2, 0.5 * (r.lo + r.hi), r.hi - 0.2] {
        let num = laplacian_numeric(&surf, s, 0.8, LAPLACIAN_STEP).unwrap();
        let closed = surf.laplacian_gauss_closed_fixed(s, 0.8).unwrap();
        assert!((num - closed).norm() <= 1e-4, "s={s}: {}", (num - closed).norm());
    }
}

#[test]
fn closed_laplacian_has_no_mixed_normal_slots() {
    let surf = surface("family:logspiral(mu=1.5)");
    for s in surf.s_range().linspace(9) {
        let fb = surf.laplacian_gauss_closed(s).unwrap();
        assert_eq!(BASIS_PAIRS[2], (0, 3));
        assert_eq!((fb.0[2], fb.0[3]), (0.0, 0.0));
    }
}

#[test]
fn envelope_is_byte_stable() {
    let surf = surface("family:logspiral(mu=1)");
    let set = GaussSampleSet::from_grid(&surf, 6, 6, LaplacianSource::default()).unwrap();
    let a = Envelope::new("fit", second_kind_fit(&set, &Thresholds::default()).unwrap()).to_json().unwrap();
    let order: Vec<usize> = (0..set.len()).rev().collect();
    let shuffled = set.permuted(&order);
    let b = Envelope::new("fit", second_kind_fit(&set, &Thresholds::default()).unwrap()).to_json().unwrap();
    assert_eq!(a, b);
    let fit = second_kind_fit(&shuffled, &Thresholds::default()).unwrap();
    assert_eq!(fit.kind, Kind::None);
}
