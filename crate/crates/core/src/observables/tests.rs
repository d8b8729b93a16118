use approx::assert_abs_diff_eq;

use super::*;
use crate::ed1d::{expectation_of, ground_state, ChainSpec};
use crate::gutzwiller::{min_intensity, product_expectations, solve_gutzwiller, BoseHubbardParams};

fn line(m: usize) -> Vec<f64> {
    (0..m).map(|i| i as f64).collect()
}

#[test]
fn insulator_and_uncorrelated_limits() {
    let m = 6;
    let zero = vec![0.0; m * m];
    let mut diag = vec![0.0; m * m];
    for i in 0..m {
        diag[i * m + i] = 0.7;
    }
    for dk in [0.0, 0.3, 1.0, PI, 2.5] {
        assert_eq!(quantum_addition(&zero, &line(m), dk).unwrap(), 0.0);
        assert_abs_diff_eq!(
            quantum_addition(&diag, &line(m), dk).unwrap(),
            0.7 * m as f64,
            epsilon = 1e-12
        );
    }
}

#[test]
fn asymmetric_table_rejected() {
    let mut dd = vec![0.0; 9];
    dd[1] = 0.1;
    assert!(matches!(
        quantum_addition(&dd, &line(3), 0.5),
        Err(Error::NotSymmetric(_))
    ));
}

#[test]
fn free_ring_matches_double_sum() {
    let s = ground_state(&ChainSpec::new(8, 8, 0.0).periodic()).unwrap();
    let dd = &s.correlations.dd;
    let mut oracle = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            oracle += (PI * (i as f64 - j as f64)).cos() * dd[i * 8 + j];
        }
    }
    assert_abs_diff_eq!(quantum_addition(dd, &line(8), PI).unwrap(), oracle, epsilon = 1e-12);
}

#[test]
fn operator_route_equals_structure_factor() {
    for u in [0.0, 1.0, 5.0] {
        let s = ground_state(&ChainSpec::new(6, 6, u)).unwrap();
        for t1 in [-1.2, -0.3, 0.0, 0.4, 1.1] {
            let op = scan_operator(ScanGeometry::Density, 0.2, t1, PI, None, 6, 6).unwrap();
            let r_op = expectation_of(&s, &op, 0.0).unwrap().quantum_addition();
            let r_sf = quantum_addition(&s.correlations.dd, &line(6), PI * (t1.sin() - 0.2f64.sin())).unwrap();
            assert_abs_diff_eq!(r_op, r_sf, epsilon = 1e-10);
        }
    }
}

#[test]
fn fixed_number_dip_at_forward_direction() {
    let s = ground_state(&ChainSpec::new(6, 6, 1.5)).unwrap();
    let scan = density_scan(&s.correlations.dd, &line(6), 0.0, PI, &angular_grid(64)).unwrap();
    let centre = scan.theta1.iter().position(|t| t.abs() < 1e-12).unwrap();
    assert!(scan.r[centre].abs() < 1e-10);
    assert!(scan.classical_bragg[centre]);
    assert!(scan.r.iter().all(|&r| r >= -1e-10));
}

#[test]
fn flat_scan_has_no_dip() {
    let grid = angular_grid(32);
    let scan = AngularScan {
        theta0: 0.0,
        k: PI,
        geometry: ScanGeometry::Density,
        normalization: Normalization::Raw,
        r: vec![2.0; grid.len()],
        generalized_bragg: vec![false; grid.len()],
        classical_bragg: vec![false; grid.len()],
        theta1: grid,
    };
    assert!(matches!(
        extract_summary(&scan, SummaryOptions::default()),
        Err(Error::NoDip)
    ));
}

#[test]
fn lorentzian_dip_width() {
    let grid = angular_grid(POINTS_PER_PI);
    let w = 0.05;
    let r: Vec<f64> = grid.iter().map(|x| x * x / (x * x + w * w)).collect();
    let n = grid.len();
    let scan = AngularScan {
        theta0: 0.0,
        k: PI,
        geometry: ScanGeometry::Density,
        normalization: Normalization::Raw,
        r,
        generalized_bragg: vec![false; n],
        classical_bragg: vec![false; n],
        theta1: grid,
    };
    let s = extract_summary(&scan, SummaryOptions::default()).unwrap();
    assert!((s.w_r - 2.0 * w).abs() < PI / POINTS_PER_PI as f64);
    assert_abs_diff_eq!(s.dip_center, 0.0, epsilon = 1e-12);
}

#[test]
fn insulator_dip_wider_and_lower() {
    let grid = angular_grid(POINTS_PER_PI);
    let summary = |u: f64| {
        let s = ground_state(&ChainSpec::new(8, 8, u)).unwrap();
        let scan = density_scan(&s.correlations.dd, &line(8), 0.0, PI, &grid).unwrap();
        extract_summary(&scan, SummaryOptions::default()).unwrap()
    };
    let (sf, mi) = (summary(0.0), summary(10.0));
    assert!(sf.r_max / mi.r_max >= 5.0, "{} / {}", sf.r_max, mi.r_max);
    assert!(mi.w_r / sf.w_r >= 2.0, "{} / {}", mi.w_r, sf.w_r);
}

#[test]
fn sphere_map_background_and_peaks() {
    let (theta, phi) = sphere_grid(12);
    let probe = LightMode::travelling([PI * 0.48, PI * 0.6, PI * 0.64], 0.0).unwrap();
    let k = probe.magnitude();
    assert_abs_diff_eq!(k, PI, epsilon = 1e-2);
    let probe = LightMode::travelling(probe.k.map(|x| x * PI / k), 0.0).unwrap();
    let map0 = mf_angular_map_3d(1.0, 1.0, &probe, ModeKind::Standing, 0.0, 6, (&theta, &phi)).unwrap();
    let map1 = mf_angular_map_3d(1.0, 1.0, &probe, ModeKind::Standing, PI / 2.0, 6, (&theta, &phi)).unwrap();
    assert!((map0.background() - 0.5).abs() < 0.02);
    assert!((map1.background() - 0.5).abs() < 0.02);
    // the pole: 2 k1 = (0, 0, 2 pi) is a reciprocal lattice vector
    assert_abs_diff_eq!(map0.at(0, 0), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(map1.at(0, 0), 0.0, epsilon = 1e-12);
    let mi = mf_angular_map_3d(0.0, 1.0, &probe, ModeKind::Standing, 0.0, 4, (&theta, &phi)).unwrap();
    assert!(mi.r_over_nk.iter().all(|&r| r == 0.0));
}

#[test]
fn vacuum_shot_noise() {
    let s = ground_state(&ChainSpec::new(3, 0, 1.0)).unwrap();
    let op = scan_operator(ScanGeometry::Density, 0.0, 0.3, PI, None, 3, 3).unwrap();
    let ex = expectation_of(&s, &op, 0.4).unwrap();
    assert_abs_diff_eq!(light_quadrature_variance(&ex, 1.0), 0.25, epsilon = 1e-15);
}

#[test]
fn travelling_minimum_quadratures() {
    let p = BoseHubbardParams::in_zj_units(4.0, 1.5, 6).unwrap();
    let s = solve_gutzwiller(p, 1e-12, 200_000).unwrap();
    let (f0, f1) = (0.8, 0.3);
    let ring = 6;
    let alt = |m: usize| if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let density: Vec<_> = (0..ring).map(|m| (m, Complex64::new(f0 * alt(m), 0.0))).collect();
    let bonds: Vec<_> = (0..ring)
        .map(|m| (m, (m + 1) % ring, Complex64::new(0.0, -f1 * alt(m))))
        .collect();
    let op = LightOperator {
        density: density.clone(),
        bonds,
    };
    let x_half = product_expectations(&s, &op, PI / 2.0).quadrature_variance();
    assert_abs_diff_eq!(x_half, min_intensity(&s, ring + 1, 1.0, f1), epsilon = 1e-10);
    let x_zero = product_expectations(&s, &op, 0.0).quadrature_variance();
    let d_only = product_expectations(&s, &LightOperator { density, bonds: vec![] }, 0.0).quadrature_variance();
    assert_abs_diff_eq!(x_zero, d_only, epsilon = 1e-12);
}

#[test]
fn luttinger_estimator() {
    let kb = |m: usize, u: f64| {
        let s = ground_state(&ChainSpec::new(m, m, u).periodic()).unwrap();
        luttinger_parameter(&s.correlations.dd, &line(m)).unwrap()
    };
    let (a, b) = (kb(6, 0.0), kb(8, 0.0));
    assert_abs_diff_eq!(a.k_b, 3.0, epsilon = 1e-8);
    assert!(b.k_b > a.k_b && a.reliable && b.reliable);
    let mi = kb(8, 10.0);
    assert!(mi.k_b < 0.5 && !mi.in_regime);
}

#[test]
fn photon_rate_scaling() {
    let base = photon_rate(2.0, 100.0, 1.0, 10, 0.5).unwrap();
    assert!(base.off_resonant);
    let twice_omega = photon_rate(4.0, 100.0, 1.0, 10, 0.5).unwrap();
    let twice_k = photon_rate(2.0, 100.0, 1.0, 20, 0.5).unwrap();
    assert_abs_diff_eq!(twice_omega.rate / base.rate, 4.0, epsilon = 1e-12);
    assert_abs_diff_eq!(twice_k.rate / base.rate, 2.0, epsilon = 1e-12);
    assert_eq!(photon_rate(2.0, 100.0, 1.0, 10, 0.0).unwrap().rate, 0.0);
    assert!(!photon_rate(2.0, 5.0, 1.0, 10, 0.5).unwrap().off_resonant);
}

#[test]
fn correlation_length_of_exponential() {
    let c: Vec<f64> = (0..8).map(|r| (-(r as f64) / 0.7).exp()).collect();
    assert_abs_diff_eq!(correlation_length(&c, 5).unwrap(), 0.7, epsilon = 1e-12);
    assert!(correlation_length(&[1.0, 1.0, 1.0], 2).unwrap().is_infinite());
}
