use yamabe_core::families::*;
use yamabe_core::quadrature::build_profile;
use yamabe_core::reductions::b_nk;
use yamabe_core::sampling::DEFAULT_POINTS;
use yamabe_core::Signature;

#[test]
fn every_catalog_entry_solves_the_soliton_equation() {
    for id in CatalogId::ALL {
        let e = catalog(id, &CatalogParams::default()).unwrap();
        let pts = e.member.sample(DEFAULT_POINTS, 0).unwrap();
        assert_eq!(pts.len(), DEFAULT_POINTS);
        let r = e.member.max_soliton_residual(&pts).unwrap();
        assert!(r <= RESIDUAL_TOL, "{id}: {r:e}");
        assert!(e.member.sign_variant.as_ref().unwrap().used_residual <= RESIDUAL_TOL);
        assert!((e.k_range.0..=e.k_range.1).contains(&e.member.k()));
    }
}

#[test]
fn catalog_entries_across_dimensions_and_orders() {
    for n in 2..=6 {
        for k in 1..=n {
            let p = CatalogParams {
                n: Some(n),
                k: Some(k),
                ..Default::default()
            };
            for id in [CatalogId::Ex21, CatalogId::Ex22, CatalogId::Ex24, CatalogId::Ex25] {
                let Ok(e) = catalog(id, &p) else {
                    continue;
                };
                let pts = e.member.sample(16, 1).unwrap();
                let r = e.member.max_soliton_residual(&pts).unwrap();
                assert!(r <= RESIDUAL_TOL, "{id} n={n} k={k}: {r:e}");
            }
        }
    }
}

#[test]
fn cigar_soliton_constant() {
    for n in 2..=6 {
        let e = catalog(
            CatalogId::Ex26,
            &CatalogParams {
                n: Some(n),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(e.member.lambda(), (n as f64 - 2.0) / 2.0);
        let pts = e.member.sample(DEFAULT_POINTS, 3).unwrap();
        assert!(e.member.max_soliton_residual(&pts).unwrap() <= RESIDUAL_TOL);
    }
}

#[test]
fn critical_semi_space_in_dimension_six() {
    let e = catalog(
        CatalogId::Ex23,
        &CatalogParams {
            n: Some(6),
            c3: Some(0.5),
            c4: Some(1.0),
            ..Default::default()
        },
    )
    .unwrap();
    let pts = e.member.sample(32, 0).unwrap();
    assert!(e.member.max_soliton_residual(&pts).unwrap() <= RESIDUAL_TOL);
}

#[test]
fn implicit_members_solve_the_soliton_equation() {
    let cases = [
        (3usize, 1usize, 1.0),
        (5, 2, 1.0),
        (4, 2, 1.0),
        (6, 3, -1.0),
        (4, 1, 2.0),
    ];
    for (n, k, c) in cases {
        let sig = Signature::euclidean(n);
        let m = family_translation_implicit(&sig, k, c, 1.0, 0.0, 0.3, 1.0, 1.0).unwrap();
        let rel = m.relation.as_ref().unwrap();
        let t = build_profile(rel, m.domain, 257).unwrap();
        assert!(t.certified, "n={n} k={k}: {:e}", t.certified_residual);
        assert!(t.round_trip_error(rel).unwrap() <= 1e-9);
        let pts = m.sample(24, 0).unwrap();
        let r = m.max_soliton_residual(&pts).unwrap();
        assert!(r <= RESIDUAL_TOL, "n={n} k={k}: {r:e}");
        assert!(m.max_reduced_residual(32).unwrap() <= 1e-9);
    }
}

#[test]
fn time_like_direction_with_even_order() {
    let sig = Signature::lorentzian(5);
    let m = family_translation_implicit(&sig, 2, 1.0, 1.0, 0.0, 0.0, 1.0, -1.0).unwrap();
    let pts = m.sample(16, 0).unwrap();
    assert!(m.max_soliton_residual(&pts).unwrap() <= RESIDUAL_TOL);
}

#[test]
fn closed_form_limits_of_implicit_families() {
    for (n, k) in [(3usize, 1usize), (5, 2)] {
        let a = 0.8;
        let rel =
            family_translation_n_ne_2k(n, k, 0.0, 1.0, closed_form_offset_n_ne_2k(n, k, a, 1.0), 1.0, 1.0).unwrap();
        let m = 2.0 * k as f64 / (2.0 * k as f64 - n as f64);
        for i in 0..=20 {
            let xi = -0.5 + 0.1 * i as f64;
            let exact = (xi + a).powf(m);
            assert!((rel.invert(xi).unwrap() - exact).abs() <= 1e-9 * exact, "{xi}");
        }
    }
    for n in [4usize, 6] {
        let nf = n as f64;
        let c = b_nk(n, n / 2) * nf * nf;
        let c4 = 1.5;
        let rel = family_translation_n_eq_2k(n, c, 0.0, closed_form_offset_n_eq_2k(n, c4, 1.0), 1.0, 1.0).unwrap();
        for i in 0..=20 {
            let xi = -0.5 + 0.1 * i as f64;
            let exact = (nf / (nf - 1.0) * xi + c4).powf((nf - 1.0) / nf);
            assert!((rel.invert(xi).unwrap() - exact).abs() <= 1e-9 * exact, "{xi}");
        }
    }
}

#[test]
fn small_c_approaches_the_c_zero_branch() {
    let base = family_translation_n_ne_2k(3, 1, 0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
    let mut prev = f64::INFINITY;
    for c in [1e-2, 1e-4, 1e-6] {
        let rel = family_translation_n_ne_2k(3, 1, c, 1.0, 0.0, 1.0, 1.0).unwrap();
        let gap = (rel.invert(0.3).unwrap() - base.invert(0.3).unwrap()).abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 1e-6);
}

#[test]
fn null_curvature_members_annihilate_reduced_residuals() {
    for n in 2..=6 {
        let sig = Signature::euclidean(n);
        for k in 1..=n {
            for case in [NullCase::Gaussian, NullCase::LinearPhi] {
                let m = family_rotation_null_curvature(&sig, k, 0.9, case, 1.7, -0.4).unwrap();
                assert!(m.max_reduced_residual(200).unwrap() <= 1e-10, "n={n} k={k} {case:?}");
                let pts = m.sample(8, 0).unwrap();
                assert!(m.max_soliton_residual(&pts).unwrap() <= RESIDUAL_TOL);
            }
        }
    }
}

#[test]
fn lightlike_member_with_quadrature_potential() {
    let sig = Signature::lorentzian(4);
    let m = family_lightlike_steady(&sig, 2, 1, 0.5, 0.0, (-1.5, 1.5)).unwrap();
    let pts = m.sample(16, 0).unwrap();
    assert!(m.max_soliton_residual(&pts).unwrap() <= RESIDUAL_TOL);
    assert!(
        family_lightlike_steady(&Signature::euclidean(4), 2, 1, 0.5, 0.0, (-1.5, 1.5))
            .unwrap_err()
            .is_input()
    );
}

#[test]
fn family_tags_round_trip() {
    for t in FamilyTag::ALL {
        assert_eq!(t.as_str().parse::<FamilyTag>().unwrap(), t);
    }
    assert!("ROTATION".parse::<FamilyTag>().is_err());
}
