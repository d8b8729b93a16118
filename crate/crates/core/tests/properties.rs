use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use latscat::cli_io::{parse_config, RunConfig};
use latscat::ed1d::{ground_state, hamiltonian, Basis, ChainSpec, DisorderSpec};
use latscat::format::g12;
use latscat::gutzwiller::{
    matter_quadrature_variance, matter_quadrature_variance_at, BoseHubbardParams, GutzwillerState,
};
use latscat::observables::quantum_addition;
use latscat::optics::CouplingCoefficients;
use latscat::phasemap::Axis;

fn psd(n: usize, entries: &[f64]) -> Vec<f64> {
    let mut dd = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dd[i * n + j] = (0..n).map(|k| entries[i * n + k] * entries[j * n + k]).sum();
        }
    }
    dd
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantum_addition_is_nonnegative_and_even(
        n in 2usize..7,
        entries in prop::collection::vec(-1.0f64..1.0, 36),
        dk in -3.0 * PI..3.0 * PI,
    ) {
        let dd = psd(n, &entries[..n * n]);
        let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let r = quantum_addition(&dd, &xs, dk).unwrap();
        let r_neg = quantum_addition(&dd, &xs, -dk).unwrap();
        let r_shift = quantum_addition(&dd, &xs, dk + 2.0 * PI).unwrap();
        let scale = dd.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!(r >= -1e-12 * scale);
        prop_assert!((r - r_neg).abs() <= 1e-12 * scale);
        prop_assert!((r - r_shift).abs() <= 1e-10 * scale);
    }

    #[test]
    fn gutzwiller_moments_are_consistent(
        amps in prop::collection::vec(0.0f64..1.0, 2..10),
        u in 0.1f64..30.0,
    ) {
        prop_assume!(amps.iter().any(|&a| a > 1e-3));
        let params = BoseHubbardParams::in_zj_units(u, 0.5 * u, 6).unwrap();
        let s = GutzwillerState::from_amplitudes(params, amps);
        let norm: f64 = s.amplitudes.iter().map(|f| f * f).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        prop_assert!(s.density >= 0.0);
        prop_assert!(s.phi * s.phi <= s.density + 1e-12);
        prop_assert!(s.number_variance() >= -1e-12);
        let (v0, vp) = (matter_quadrature_variance(&s, true), matter_quadrature_variance(&s, false));
        prop_assert!((v0 - matter_quadrature_variance_at(&s, 0.0)).abs() < 1e-10);
        prop_assert!((vp - matter_quadrature_variance_at(&s, PI / 2.0)).abs() < 1e-10);
        prop_assert!(v0 * vp >= 1.0 / 16.0 - 1e-12);
    }

    #[test]
    fn axis_values_hit_both_ends(start in -10.0f64..10.0, span in 0.1f64..20.0, count in 2usize..50) {
        let a = Axis::new("x", start, start + span, count).unwrap();
        let v = a.values();
        prop_assert_eq!(v.len(), count);
        prop_assert_eq!(v[0], start);
        prop_assert_eq!(v[count - 1], start + span);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn g12_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let back: f64 = g12(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs());
    }

    #[test]
    fn config_survives_toml_round_trip(
        depth in 0.0f64..30.0,
        sites in 2usize..10,
        u in 0.0f64..20.0,
        seed in 0u64..(1 << 62),
        periodic in any::<bool>(),
    ) {
        let mut cfg = RunConfig::default();
        cfg.lattice.depth = depth;
        cfg.chain.sites = sites;
        cfg.chain.u = u;
        cfg.seed = seed;
        if periodic {
            cfg.chain.boundary = latscat::ed1d::Boundary::Periodic;
        }
        let text = toml::to_string(&cfg).unwrap();
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }

    #[test]
    fn adjoint_is_an_involution(parts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..8)) {
        let z: Vec<Complex64> = parts.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let c = CouplingCoefficients::from_parts(12, 1, z.clone(), z[1..].to_vec()).unwrap();
        prop_assert_eq!(c.adjoint().adjoint(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_hamiltonian_is_symmetric_and_ground_state_obeys_sum_rule(
        sites in 2usize..7,
        fill in 0.3f64..1.3,
        u in 0.0f64..8.0,
        v in 0.0f64..3.0,
        periodic in any::<bool>(),
    ) {
        let bosons = ((sites as f64 * fill).round() as usize).max(1);
        let mut spec = ChainSpec::new(sites, bosons, u).with_disorder(DisorderSpec::new(2.0 * v));
        if periodic && sites > 2 {
            spec = spec.periodic();
        }
        let basis = Basis::new(sites, bosons, spec.n_cap).unwrap();
        prop_assert!(hamiltonian(&spec, &basis).max_asymmetry() < 1e-14);
        let s = ground_state(&spec).unwrap();
        let total: f64 = s.correlations.density.iter().sum();
        prop_assert!((total - bosons as f64).abs() < 1e-9);
        for i in 0..sites {
            let row: f64 = (0..sites).map(|j| s.correlations.dd(i, j)).sum();
            prop_assert!(row.abs() < 1e-8, "row {} sums to {}", i, row);
        }
    }
}
