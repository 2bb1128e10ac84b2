use yamabe_core::families::{catalog, CatalogId, CatalogParams};
use yamabe_core::geodesic::*;
use yamabe_core::sampling::SampleBox;
use yamabe_core::Signature;

#[test]
fn speed_is_conserved_for_catalog_metrics() {
    for id in CatalogId::ALL {
        let e = catalog(id, &CatalogParams::default()).unwrap();
        let m = &e.member;
        let inits = random_initial_conditions(&m.sample_box, 4, 7, |x| m.admissible(x)).unwrap();
        for init in &inits {
            let tr = integrate(
                &m.spec.phi,
                &m.spec.signature,
                init,
                100.0,
                &IntegratorOptions::default(),
            )
            .unwrap();
            // Semi-space members are only measured before their first exit
            // from the admissible region.
            let inside = tr.states.iter().take_while(|s| m.admissible(&s.x)).count();
            let s0 = tr.speed[0];
            let d = tr.speed[..inside]
                .iter()
                .map(|s| (s - s0).abs() / s0.abs())
                .fold(0.0, f64::max);
            assert!(inside > 1, "{id}");
            assert!(d <= 1e-7, "{id}: drift {d:e} ({})", tr.termination);
            if m.whole_space && tr.termination == Termination::ReachedTmax {
                assert!(tr.speed_drift(&m.spec.phi).unwrap() <= 1e-7);
            }
        }
    }
}

#[test]
fn time_reversal_returns_to_start() {
    let n = 4;
    let sig = Signature::lorentzian(n);
    let phi = lightlike_bump_field(n, 1);
    let inits = random_initial_conditions(&SampleBox::cube(n, 1.5), 5, 2, |_| true).unwrap();
    for init in &inits {
        let fw = integrate(&phi, &sig, init, 10.0, &IntegratorOptions::default()).unwrap();
        let back = integrate(&phi, &sig, &fw.last().reversed(), 10.0, &IntegratorOptions::default()).unwrap();
        let end = back.last();
        let err = end
            .x
            .iter()
            .zip(&init.x)
            .chain(end.v.iter().zip(init.v.iter().map(|c| -c).collect::<Vec<_>>().iter()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "{err:e}");
    }
}

#[test]
fn lightlike_bump_invariants_are_conserved() {
    for theta in 1..=3 {
        for n in [3, 5] {
            let sig = Signature::lorentzian(n);
            let phi = lightlike_bump_field(n, theta);
            let inits = random_initial_conditions(&SampleBox::cube(n, 1.5), 20, theta as u64, |_| true).unwrap();
            for init in &inits {
                let tr = integrate(&phi, &sig, init, 100.0, &IntegratorOptions::default()).unwrap();
                assert_eq!(tr.termination, Termination::ReachedTmax);
                let inv = lightlike_bump_invariants(&tr, theta);
                assert_eq!(inv.names.len(), n - 1);
                let d = inv.max_drift();
                assert!(d <= 1e-6, "theta={theta}: {d:e}");
                let xi0 = init.x[0] + init.x[1];
                let k0 = (init.v[0] + init.v[1]) * (1.0 + xi0.powi(2 * theta as i32)).powi(2);
                assert_eq!(inv.values[0][n - 2], k0);
            }
        }
    }
}

#[test]
fn terminal_error_shrinks_with_tolerance() {
    let n = 3;
    let sig = Signature::lorentzian(n);
    let phi = lightlike_bump_field(n, 1);
    let init = GeodesicState::new(0.0, vec![0.3, -0.1, 0.2], vec![0.6, 0.2, -0.7]).unwrap();
    let end = |tol: f64| {
        let opts = IntegratorOptions {
            samples: 1,
            ..IntegratorOptions::default().with_tol(tol)
        };
        let tr = integrate(&phi, &sig, &init, 20.0, &opts).unwrap();
        let s = tr.last().clone();
        s.x.into_iter().chain(s.v).collect::<Vec<f64>>()
    };
    let reference = end(1e-12);
    let errs: Vec<f64> = (0..8)
        .map(|i| {
            let y = end(1e-5 / 2f64.powi(i));
            y.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] <= 4.0 * w[0], "{errs:?}");
    }
    assert!(errs[7] < errs[0] / 10.0, "{errs:?}");
}

#[test]
fn csv_has_invariant_columns() {
    let n = 4;
    let sig = Signature::lorentzian(n);
    let phi = lightlike_bump_field(n, 1);
    let init = GeodesicState::new(0.0, vec![0.1; n], vec![0.5, 0.1, 0.0, 0.3]).unwrap();
    let opts = IntegratorOptions {
        samples: 10,
        ..Default::default()
    };
    let tr = integrate(&phi, &sig, &init, 1.0, &opts).unwrap();
    let inv = lightlike_bump_invariants(&tr, 1);
    let mut buf = Vec::new();
    tr.write_csv(&mut buf, Some(&inv)).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,x1,x2,x3,x4,v1,v2,v3,v4,speed,J3,J4,K");
    assert_eq!(lines.count(), 11);
}
