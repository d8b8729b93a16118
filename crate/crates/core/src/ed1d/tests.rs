use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn lowest(h: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn two_site_dense_oracle() {
    for u in [0.0, 3.0] {
        let mut spec = ChainSpec::new(2, 2, 0.0);
        spec.interaction = u;
        spec.n_cap = 2;
        let s = ground_state(&spec).unwrap();
        let r2 = 2f64.sqrt();
        let h = DMatrix::from_row_slice(3, 3, &[u, -r2, 0.0, -r2, 0.0, -r2, 0.0, -r2, u]);
        assert_abs_diff_eq!(s.energy, lowest(h), epsilon = 1e-12);
        if u == 0.0 {
            assert_abs_diff_eq!(s.energy, -2.0, epsilon = 1e-12);
        }
        assert!(s.residual <= 1e-10);
    }
}

#[test]
fn hard_core_mott_limit() {
    let mut spec = ChainSpec::new(6, 6, 0.5e6);
    spec.n_cap = 6;
    let s = ground_state(&spec).unwrap();
    assert!(s.residual <= 1e-10, "residual {}", s.residual);
    let unit = s.basis.index(s.basis.key(&[1; 6])).unwrap();
    assert!(s.vector[unit] > 1.0 - 1e-6);
    for i in 0..6 {
        for j in 0..6 {
            assert!(s.correlations.dd(i, j).abs() < 1e-6);
        }
    }
}

#[test]
fn free_ring_condensate_fluctuations() {
    let m = 6;
    let s = ground_state(&ChainSpec::new(m, m, 0.0).periodic()).unwrap();
    assert!(s.residual <= 1e-10);
    for i in 0..m {
        assert_abs_diff_eq!(s.correlations.dd(i, i), 1.0 - 1.0 / m as f64, epsilon = 1e-8);
        assert_abs_diff_eq!(s.correlations.density[i], 1.0, epsilon = 1e-10);
    }
    // every off-diagonal coherence equals N/M in the k = 0 condensate
    for j in 1..m {
        assert_abs_diff_eq!(s.correlations.sp(0, j), 1.0, epsilon = 1e-8);
    }
}

#[test]
fn state_invariants() {
    let spec = ChainSpec::new(7, 5, 1.3).with_disorder(DisorderSpec::new(1.5));
    let s = ground_state(&spec).unwrap();
    let norm: f64 = s.vector.iter().map(|x| x * x).sum();
    assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    let c = &s.correlations;
    assert_abs_diff_eq!(c.density.iter().sum::<f64>(), 5.0, epsilon = 1e-10);
    for i in 0..7 {
        assert!(c.dd(i, i) >= 0.0);
        assert_abs_diff_eq!((0..7).map(|j| c.dd(i, j)).sum::<f64>(), 0.0, epsilon = 1e-10);
        for j in 0..7 {
            assert_abs_diff_eq!(c.dd(i, j), c.dd(j, i), epsilon = 1e-14);
            assert_abs_diff_eq!(c.sp(i, j), c.sp(j, i), epsilon = 1e-10);
        }
    }
}

#[test]
fn hamiltonian_is_symmetric() {
    let spec = ChainSpec::new(6, 6, 0.7).periodic().with_disorder(DisorderSpec {
        strength: 2.0,
        ratio: DEFAULT_RATIO,
        offset: 0.4,
    });
    let basis = Basis::new(6, 6, spec.n_cap).unwrap();
    assert!(hamiltonian(&spec, &basis).max_asymmetry() < 1e-12);
}

#[test]
fn hamiltonian_conserves_number() {
    let spec = ChainSpec::new(5, 4, 0.8)
        .periodic()
        .with_disorder(DisorderSpec::new(0.6));
    let basis = Basis::all_sectors(5, 4, 4).unwrap();
    let h = hamiltonian(&spec, &basis);
    let n_op: Vec<f64> = basis.keys().iter().map(|&k| basis.total(k) as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dim = basis.len();
    for _ in 0..50 {
        let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        let nv: Vec<f64> = v.iter().zip(&n_op).map(|(a, n)| a * n).collect();
        let (mut hnv, mut hv) = (vec![0.0; dim], vec![0.0; dim]);
        h.apply(&nv, &mut hnv);
        h.apply(&v, &mut hv);
        let comm: f64 = hnv
            .iter()
            .zip(&hv)
            .zip(&n_op)
            .map(|((a, b), n)| (a - n * b).powi(2))
            .sum();
        assert!(comm.sqrt() < 1e-10);
    }
}

#[test]
fn insulating_coherences_decay_exponentially() {
    let s = ground_state(&ChainSpec::new(8, 8, 10.0)).unwrap();
    let sp = s.correlations.by_distance(true);
    let pts: Vec<(f64, f64)> = (1..5).map(|r| (r as f64, sp[r].abs().ln())).collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let xi = -1.0 / slope;
    assert!(xi > 0.0 && xi < 1.0, "correlation length {xi}");
    for r in 1..5 {
        assert!(sp[r + 1].abs() < sp[r].abs());
    }
}

/// Dense `F` in the full tensor-product space `(cap+1)^M`.
fn dense_light(m: usize, cap: usize, op: &LightOperator) -> nalgebra::DMatrix<Complex64> {
    let d = cap + 1;
    let dim = d.pow(m as u32);
    let occ = |idx: usize, i: usize| (idx / d.pow((m - 1 - i) as u32)) % d;
    let stride = |i: usize| d.pow((m - 1 - i) as u32);
    let mut f = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        for &(i, a) in &op.density {
            f[(col, col)] += a * occ(col, i) as f64;
        }
        for &(i, j, c) in &op.bonds {
            for (to, from) in [(i, j), (j, i)] {
                let (nt, nf) = (occ(col, to), occ(col, from));
                if nf > 0 && nt < cap {
                    let row = col - stride(from) + stride(to);
                    f[(row, col)] += c * ((nf * (nt + 1)) as f64).sqrt();
                }
            }
        }
    }
    f
}

#[test]
fn light_operator_matches_dense_oracle() {
    let (m, n) = (4, 2);
    let s = ground_state(&ChainSpec::new(m, n, 0.6).with_disorder(DisorderSpec::new(0.3))).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cplx = || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let op = LightOperator {
        density: (0..m).map(|i| (i, cplx())).collect(),
        bonds: (0..m - 1).map(|i| (i, i + 1, cplx())).collect(),
    };
    let f = dense_light(m, n, &op);
    let d = n + 1;
    let mut psi = DVector::<Complex64>::zeros(d.pow(m as u32));
    for (k, &a) in s.vector.iter().enumerate() {
        let occ = s.basis.occupations(k);
        let idx = occ.iter().fold(0, |acc, &o| acc * d + o);
        psi[idx] = Complex64::new(a, 0.0);
    }
    let fpsi = &f * &psi;
    let mean = psi.dotc(&fpsi);
    let intensity = fpsi.norm_squared();
    let beta = 0.37;
    let x = (&f * Complex64::from_polar(0.5, -beta) + f.adjoint() * Complex64::from_polar(0.5, beta)) * &psi;
    let xm = psi.dotc(&x).re;
    let x2 = x.norm_squared();

    let ex = expectation_of(&s, &op, beta).unwrap();
    assert_abs_diff_eq!(ex.mean.re, mean.re, epsilon = 1e-10);
    assert_abs_diff_eq!(ex.mean.im, mean.im, epsilon = 1e-10);
    assert_abs_diff_eq!(ex.intensity, intensity, epsilon = 1e-10);
    assert_abs_diff_eq!(ex.quadrature_mean, xm, epsilon = 1e-10);
    assert_abs_diff_eq!(ex.quadrature_second, x2, epsilon = 1e-10);
}

#[test]
fn total_number_operator() {
    let s = ground_state(&ChainSpec::new(6, 5, 1.0)).unwrap();
    let c = CouplingCoefficients::from_parts(
        6,
        0,
        vec![Complex64::new(1.0, 0.0); 6],
        vec![Complex64::new(0.0, 0.0); 5],
    )
    .unwrap();
    let ex = expectation_F(&s, &c, 0.0).unwrap();
    assert_abs_diff_eq!(ex.mean.re, 5.0, epsilon = 1e-10);
    assert_abs_diff_eq!(ex.intensity, 25.0, epsilon = 1e-9);
    assert!(ex.quantum_addition().abs() < 1e-9);
}

#[test]
fn alternating_bonds_on_mott_insulator() {
    let s = ground_state(&ChainSpec::new(6, 6, 1e6)).unwrap();
    let bond = (0..5)
        .map(|m| Complex64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    let c = CouplingCoefficients::from_parts(6, 0, vec![Complex64::new(0.0, 0.0); 6], bond).unwrap();
    let ex = expectation_F(&s, &c, 0.0).unwrap();
    assert!(ex.mean.norm() < 1e-5);
    assert!(ex.intensity > 1.0);
    assert!(ex.intensity >= ex.mean.norm_sqr());
}

#[test]
fn window_mismatch_rejected() {
    let s = ground_state(&ChainSpec::new(4, 4, 1.0)).unwrap();
    let c = CouplingCoefficients::from_parts(
        6,
        0,
        vec![Complex64::new(1.0, 0.0); 6],
        vec![Complex64::new(0.0, 0.0); 5],
    )
    .unwrap();
    assert!(matches!(expectation_F(&s, &c, 0.0), Err(Error::SiteWindow(_))));
}

#[test]
fn grand_canonical_picks_mott_sector() {
    let mut spec = ChainSpec::new(5, 5, 10.0);
    spec.chemical_potential = 10.0;
    let s = grand_canonical_ground_state(&spec, 8).unwrap();
    assert_eq!(s.spec.bosons, 5);
    spec.chemical_potential = -5.0;
    assert_eq!(grand_canonical_ground_state(&spec, 8).unwrap().spec.bosons, 0);
}

#[test]
fn disorder_profile() {
    let d = DisorderSpec::new(2.0);
    assert_abs_diff_eq!(d.energy(0), 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(d.energy(3), 2.0 * (2.0 * PI * 0.77 * 3.0).cos(), epsilon = 1e-15);
}

#[test]
fn cutoff_rule() {
    assert_eq!(default_n_cap(8, 1.0, 2.0), 6);
    assert_eq!(default_n_cap(8, 1.0, 1.9), 8);
    assert_eq!(default_n_cap(4, 1.0, 20.0), 4);
}
