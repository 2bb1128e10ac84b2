use yamabe_core::families::{default_xi_range, family_translation_n_eq_2k, family_translation_n_ne_2k};
use yamabe_core::quadrature::{build_profile, ImplicitRelation, ProfileTable, CERT_TOL};
use yamabe_core::Profile;

const NOISE: f64 = 1e-7;

fn refine(rel: &ImplicitRelation) -> Vec<f64> {
    let range = default_xi_range(rel).unwrap();
    [33, 65, 129, 257, 513, 1025]
        .iter()
        .map(|&g| build_profile(rel, range, g).unwrap().certified_residual)
        .collect()
}

#[test]
fn certified_residual_does_not_grow_under_refinement() {
    let rels = [
        family_translation_n_ne_2k(3, 1, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
        family_translation_n_ne_2k(5, 2, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
        family_translation_n_eq_2k(4, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
        family_translation_n_eq_2k(6, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
    ];
    for rel in &rels {
        let res = refine(rel);
        for w in res.windows(2) {
            assert!(w[1] <= w[0] + NOISE, "{res:?}");
        }
        assert!(res[3] <= CERT_TOL, "{res:?}");
    }
}

#[test]
fn table_interpolation_reproduces_relation() {
    let rel = family_translation_n_ne_2k(5, 2, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
    let range = default_xi_range(&rel).unwrap();
    let t = build_profile(&rel, range, 257).unwrap();
    for i in 0..50 {
        let xi = range.0 + (range.1 - range.0) * (i as f64 + 0.37) / 50.0;
        let j = t.eval(xi).unwrap();
        let exact = rel.invert(xi).unwrap();
        let (d1, _) = rel.derivatives(exact);
        assert!((j.v - exact).abs() <= 1e-10 * exact);
        assert!((j.d1 - d1).abs() <= 1e-7 * d1.abs().max(1.0));
    }
}

#[test]
fn csv_table_reloads_identically() {
    let rel = family_translation_n_eq_2k(4, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
    let t = build_profile(&rel, default_xi_range(&rel).unwrap(), 65).unwrap();
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let back = ProfileTable::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, t);
}
