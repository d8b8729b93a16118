//! Light modes, coupling prefactors and the lattice coupling coefficients `J_{i,j}`.
//!
//! The atomic operator coupled to the detected light is
//! `F = D + B`, with `D = sum_i J_{i,i} n_i` and
//! `B = sum_<i,j> J_{i,j} b_i^+ b_j`. For real Wannier orbitals `J_{i,j} = J_{j,i}`,
//! so each bond enters as `J_{m,m+1} (b_m^+ b_{m+1} + b_{m+1}^+ b_m)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wannier::{trapezoid, Overlap, WannierBasis};

const HBAR: f64 = 1.054_571_817e-34;
const EPSILON_0: f64 = 8.854_187_812_8e-12;
const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    /// `exp(i k.r + i phi)`
    Travelling,
    /// `cos(k.r + phi)`
    Standing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightMode {
    pub kind: ModeKind,
    /// Wavevector in units of `1/d`.
    pub k: [f64; 3],
    pub phase: f64,
}

impl LightMode {
    pub fn travelling(k: [f64; 3], phase: f64) -> Result<Self> {
        if norm3(k) == 0.0 {
            return Err(Error::invalid("k", "travelling modes need a nonzero wavevector"));
        }
        Ok(Self {
            kind: ModeKind::Travelling,
            k,
            phase,
        })
    }

    pub fn standing(k: [f64; 3], phase: f64) -> Self {
        Self {
            kind: ModeKind::Standing,
            k,
            phase,
        }
    }

    /// Mode in the x-z plane at angle `theta` from the z axis, so `k_x = |k| sin(theta)`.
    pub fn at_angle(kind: ModeKind, magnitude: f64, theta: f64, phase: f64) -> Result<Self> {
        let k = [magnitude * theta.sin(), 0.0, magnitude * theta.cos()];
        match kind {
            ModeKind::Travelling => Self::travelling(k, phase),
            ModeKind::Standing => Ok(Self::standing(k, phase)),
        }
    }

    pub fn magnitude(&self) -> f64 {
        norm3(self.k)
    }

    /// Angle from the z axis in the x-z plane.
    pub fn theta(&self) -> f64 {
        self.k[0].atan2(self.k[2])
    }

    pub fn value(&self, r: [f64; 3]) -> Complex64 {
        let arg = self.k[0] * r[0] + self.k[1] * r[1] + self.k[2] * r[2] + self.phase;
        match self.kind {
            ModeKind::Travelling => Complex64::from_polar(1.0, arg),
            ModeKind::Standing => Complex64::new(arg.cos(), 0.0),
        }
    }

    /// Value along the lattice axis, using only `k_x`.
    pub fn value_1d(&self, x: f64) -> Complex64 {
        self.value([x, 0.0, 0.0])
    }
}

pub fn mode_value(mode: &LightMode, r: [f64; 3]) -> Complex64 {
    mode.value(r)
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Scale factor `C` between the atomic operator and the scattered field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum CouplingPrefactor {
    /// `a_1 = C F` with `C = U_10 a_0 / (Delta_p + i kappa)`, `U_10 = g_1 g_0 / Delta_a`.
    Cavity {
        g0: f64,
        g1: f64,
        delta_a: f64,
        delta_p: f64,
        kappa: f64,
        a0: f64,
    },
    /// Far-field `E_1 = C_E F` at distance `r_obs`, SI units.
    FreeSpace {
        dipole: f64,
        e0: f64,
        omega_a: f64,
        delta_a: f64,
        r_obs: f64,
    },
}

impl CouplingPrefactor {
    pub fn value(&self) -> Complex64 {
        match *self {
            CouplingPrefactor::Cavity {
                g0,
                g1,
                delta_a,
                delta_p,
                kappa,
                a0,
            } => {
                let u10 = g1 * g0 / delta_a;
                Complex64::new(u10 * a0, 0.0) / Complex64::new(delta_p, kappa)
            }
            CouplingPrefactor::FreeSpace {
                dipole,
                e0,
                omega_a,
                delta_a,
                r_obs,
            } => {
                let c = omega_a * omega_a * dipole * dipole * e0
                    / (8.0 * PI * HBAR * EPSILON_0 * SPEED_OF_LIGHT * SPEED_OF_LIGHT * delta_a * r_obs);
                Complex64::new(c, 0.0)
            }
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.value().norm()
    }

    /// Phase `phi_C`; the measured quadrature angle is `beta = phi - phi_C`.
    pub fn phase(&self) -> f64 {
        self.value().arg()
    }
}

/// `J_{i,i}` and `J_{i,i+1}` over the illuminated window of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingCoefficients {
    /// Total chain length `M`.
    pub chain_sites: usize,
    /// Chain index of every illuminated site (contiguous).
    pub sites: Vec<usize>,
    /// Site positions `r_i = i d`.
    pub positions: Vec<f64>,
    pub density: Vec<Complex64>,
    pub bond: Vec<Complex64>,
    /// Largest `|J_{i,i+2}|`, computed and then dropped.
    pub dropped_next_nearest: f64,
}

impl CouplingCoefficients {
    /// Coefficients built directly, e.g. for synthetic operators.
    pub fn from_parts(
        chain_sites: usize,
        first_site: usize,
        density: Vec<Complex64>,
        bond: Vec<Complex64>,
    ) -> Result<Self> {
        let k = density.len();
        if k == 0 || bond.len() + 1 != k {
            return Err(Error::SiteWindow(format!(
                "{} density and {} bond coefficients",
                k,
                bond.len()
            )));
        }
        if first_site + k > chain_sites {
            return Err(Error::SiteWindow(format!(
                "window {first_site}..{} exceeds chain of {chain_sites}",
                first_site + k
            )));
        }
        let sites: Vec<usize> = (first_site..first_site + k).collect();
        Ok(Self {
            chain_sites,
            positions: sites.iter().map(|&i| i as f64).collect(),
            sites,
            density,
            bond,
            dropped_next_nearest: 0.0,
        })
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn first_site(&self) -> usize {
        self.sites[0]
    }

    /// `J_{i,j}` as a dense `K x K` matrix over the window (nearest neighbours only).
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let k = self.site_count();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); k]; k];
        for (i, d) in self.density.iter().enumerate() {
            m[i][i] = *d;
        }
        for (i, b) in self.bond.iter().enumerate() {
            m[i][i + 1] = *b;
            m[i + 1][i] = *b;
        }
        m
    }

    /// Coefficients of `F^+`: the entry for `b_i^+ b_j` is `conj(J_{j,i})`.
    pub fn adjoint(&self) -> Self {
        Self {
            density: self.density.iter().map(|c| c.conj()).collect(),
            bond: self.bond.iter().map(|c| c.conj()).collect(),
            ..self.clone()
        }
    }

    /// All coefficients scaled by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            density: self.density.iter().map(|c| c * factor).collect(),
            bond: self.bond.iter().map(|c| c * factor).collect(),
            ..self.clone()
        }
    }
}

/// `int w(y) w(y - s d) g(x0 + y) dy` on the Wannier grid, i.e. `J_{i,i+s}` for `x0 = x_i`.
fn overlap_integral(basis: &WannierBasis, x0: f64, s: usize, g: &impl Fn(f64) -> Complex64) -> Result<Complex64> {
    let w = basis.orbital();
    let x = basis.positions();
    let shift = s * basis.grid().points_per_period;
    if shift >= w.len() {
        return Err(Error::SiteWindow(format!(
            "site offset {s} exceeds the Wannier grid of {} periods",
            basis.grid().periods
        )));
    }
    let h = basis.spacing();
    let re = trapezoid((shift..w.len()).map(|i| w[i] * w[i - shift] * g(x0 + x[i]).re), h);
    let im = trapezoid((shift..w.len()).map(|i| w[i] * w[i - shift] * g(x0 + x[i]).im), h);
    Ok(Complex64::new(re, im))
}

/// Numerically integrated coefficients for explicit site positions.
pub fn coefficients_at_positions(
    basis: &WannierBasis,
    probe: &LightMode,
    detected: &LightMode,
    positions: &[f64],
) -> Result<(Vec<Complex64>, Vec<Complex64>, f64)> {
    let g = |x: f64| detected.value_1d(x).conj() * probe.value_1d(x);
    let d = basis.period();
    let mut density = Vec::with_capacity(positions.len());
    let mut bond = Vec::with_capacity(positions.len().saturating_sub(1));
    let mut nnn: f64 = 0.0;
    for (i, &xi) in positions.iter().enumerate() {
        density.push(overlap_integral(basis, xi, 0, &g)?);
        if i + 1 < positions.len() {
            if ((positions[i + 1] - xi) - d).abs() > 1e-9 * d {
                return Err(Error::SiteWindow("sites must be contiguous".into()));
            }
            bond.push(overlap_integral(basis, xi, 1, &g)?);
        }
        if i + 2 < positions.len() {
            nnn = nnn.max(overlap_integral(basis, xi, 2, &g)?.norm());
        }
    }
    Ok((density, bond, nnn))
}

/// Coefficients for `K` illuminated sites centred in an `M`-site chain.
pub fn coupling_coefficients(
    basis: &WannierBasis,
    probe: &LightMode,
    detected: &LightMode,
    k_sites: usize,
    m_sites: usize,
) -> Result<CouplingCoefficients> {
    if k_sites == 0 || k_sites > m_sites {
        return Err(Error::SiteWindow(format!(
            "need 0 < K <= M, got K = {k_sites}, M = {m_sites}"
        )));
    }
    let first = (m_sites - k_sites) / 2;
    let sites: Vec<usize> = (first..first + k_sites).collect();
    let d = basis.period();
    let positions: Vec<f64> = sites.iter().map(|&i| i as f64 * d).collect();
    let (density, bond, nnn) = coefficients_at_positions(basis, probe, detected, &positions)?;
    if nnn > 0.0 {
        log::info!("dropping next-nearest coefficients, max |J_(i,i+2)| = {nnn:e}");
    }
    Ok(CouplingCoefficients {
        chain_sites: m_sites,
        sites,
        positions,
        density,
        bond,
        dropped_next_nearest: nnn,
    })
}

/// Real coefficients from the two-term Fourier expansion for standing waves.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormCoefficients {
    pub density: Vec<f64>,
    pub bond: Vec<f64>,
}

/// Density and bond coefficients from `F[W0](k±)` and `F[W1](k±)`.
///
/// With `k± = k0x ± k1x` and `phi± = phi0 ± phi1`:
/// `J_{m,m} = [F0(k-) cos(k- x_m + phi-) + F0(k+) cos(k+ x_m + phi+)] / 2`,
/// `J_{m,m+1} = [F1(k-) cos(k- x_m + k- d/2 + phi-) + F1(k+) cos(k+ x_m + k+ d/2 + phi+)] / 2`.
pub fn closed_form_db(
    basis: &WannierBasis,
    probe: &LightMode,
    detected: &LightMode,
    positions: &[f64],
) -> Result<ClosedFormCoefficients> {
    if probe.kind != ModeKind::Standing || detected.kind != ModeKind::Standing {
        return Err(Error::NotStanding);
    }
    let d = basis.period();
    let (k0, k1) = (probe.k[0], detected.k[0]);
    let (kp, km) = (k0 + k1, k0 - k1);
    let (pp, pm) = (probe.phase + detected.phase, probe.phase - detected.phase);
    let f0p = basis.fourier_overlap(Overlap::Density, kp)?;
    let f0m = basis.fourier_overlap(Overlap::Density, km)?;
    let f1p = basis.fourier_overlap(Overlap::Bond, kp)?;
    let f1m = basis.fourier_overlap(Overlap::Bond, km)?;
    let density = positions
        .iter()
        .map(|&x| 0.5 * (f0m * (km * x + pm).cos() + f0p * (kp * x + pp).cos()))
        .collect();
    let bond = positions
        .iter()
        .take(positions.len().saturating_sub(1))
        .map(|&x| 0.5 * (f1m * (km * x + km * d / 2.0 + pm).cos() + f1p * (kp * x + kp * d / 2.0 + pp).cos()))
        .collect();
    Ok(ClosedFormCoefficients { density, bond })
}

/// `arccos[-F[W0](2 pi/d) / F[W0](0)] / 2`, the phase that cancels the density
/// term in the diffraction-maximum geometry.
pub fn density_suppression_phase(basis: &WannierBasis) -> Result<f64> {
    let d = basis.period();
    let ratio =
        basis.fourier_overlap(Overlap::Density, 2.0 * PI / d)? / basis.fourier_overlap(Overlap::Density, 0.0)?;
    if !(ratio.abs() <= 1.0) {
        return Err(Error::invalid("depth", "no density-suppression phase exists"));
    }
    Ok((-ratio).acos() / 2.0)
}

/// Named mode arrangements along the lattice axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "lowercase")]
pub enum Geometry {
    /// Standing waves with `k0x = k1x = pi/d` and `phi0 = -phi1 = phase`.
    Max {
        phase: f64,
    },
    /// Standing waves with `k0x = 0`, `k1x = pi/d`.
    Min {
        phi0: f64,
        phi1: f64,
    },
    Custom {
        k0x: f64,
        k1x: f64,
        phi0: f64,
        phi1: f64,
    },
}

impl Geometry {
    /// Diffraction maximum with the density term cancelled.
    pub fn max_suppressed(basis: &WannierBasis) -> Result<Self> {
        Ok(Geometry::Max {
            phase: density_suppression_phase(basis)?,
        })
    }

    /// Diffraction minimum with the sites on the nodes of the detected mode.
    pub fn min_nodes() -> Self {
        Geometry::Min {
            phi0: 0.0,
            phi1: PI / 2.0,
        }
    }

    /// Standing probe and detected modes along the lattice axis.
    pub fn modes(&self, period: f64) -> (LightMode, LightMode) {
        let kl = PI / period;
        let (k0, k1, p0, p1) = match *self {
            Geometry::Max { phase } => (kl, kl, phase, -phase),
            Geometry::Min { phi0, phi1 } => (0.0, kl, phi0, phi1),
            Geometry::Custom { k0x, k1x, phi0, phi1 } => (k0x, k1x, phi0, phi1),
        };
        (
            LightMode::standing([k0, 0.0, 0.0], p0),
            LightMode::standing([k1, 0.0, 0.0], p1),
        )
    }
}

/// Detection angles `theta1` (x-z plane, from the z axis) for peaks along the lattice axis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BraggAngles {
    /// `(n, theta1)` with `2 dk_x = 2 pi n / d` (travelling) or `2 k1x = 2 pi n / d` (standing).
    pub generalized: Vec<(i64, f64)>,
    /// `(n, theta1)` with `dk_x = 2 pi n / d`; `n = 0` is forward scattering.
    pub classical: Vec<(i64, f64)>,
}

impl BraggAngles {
    pub fn classical_nonzero(&self) -> impl Iterator<Item = f64> + '_ {
        self.classical.iter().filter(|(n, _)| *n != 0).map(|(_, t)| *t)
    }
}

fn angles_for_kx(kx: f64, k: f64, out: &mut Vec<f64>) {
    let s = kx / k;
    if s.abs() > 1.0 + 1e-12 {
        return;
    }
    let a = s.clamp(-1.0, 1.0).asin();
    let mut b = PI - a;
    if b > PI {
        b -= 2.0 * PI;
    }
    for t in [a, b] {
        if !out.iter().any(|u| (u - t).abs() < 1e-12) {
            out.push(t);
        }
    }
}

/// Peak angles for an elastic scan of the detected mode over `theta1` at fixed probe.
pub fn bragg_peaks(probe: &LightMode, detected: ModeKind, period: f64) -> BraggAngles {
    let k = probe.magnitude();
    let k0x = probe.k[0];
    let g = 2.0 * PI / period;
    let n_max = ((2.0 * k) / (PI / period)).ceil() as i64 + 1;
    let mut res = BraggAngles::default();
    for n in -n_max..=n_max {
        let mut thetas = Vec::new();
        let k1x = match detected {
            ModeKind::Travelling => k0x - n as f64 * g / 2.0,
            ModeKind::Standing => n as f64 * g / 2.0,
        };
        angles_for_kx(k1x, k, &mut thetas);
        res.generalized.extend(thetas.into_iter().map(|t| (n, t)));

        let mut thetas = Vec::new();
        angles_for_kx(k0x - n as f64 * g, k, &mut thetas);
        if detected == ModeKind::Standing {
            angles_for_kx(-(k0x - n as f64 * g), k, &mut thetas);
        }
        res.classical.extend(thetas.into_iter().map(|t| (n, t)));
    }
    res.generalized.sort_by(|a, b| a.1.total_cmp(&b.1));
    res.classical.sort_by(|a, b| a.1.total_cmp(&b.1));
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wannier::{build_wannier, solve_bloch_band, LatticePotential};
    use std::sync::OnceLock;

    fn basis5() -> &'static WannierBasis {
        static B: OnceLock<WannierBasis> = OnceLock::new();
        B.get_or_init(|| {
            let pot = LatticePotential::new(5.0).unwrap();
            build_wannier(&solve_bloch_band(pot, 21, 64).unwrap()).unwrap()
        })
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn mode_values() {
        let s = LightMode::standing([PI, 0.0, 0.0], 0.0);
        assert!(close(s.value([0.0; 3]), Complex64::new(1.0, 0.0), 1e-15));
        let s = LightMode::standing([PI, 0.0, 0.0], PI / 2.0);
        for i in -3..4 {
            assert!(s.value([i as f64, 0.0, 0.0]).norm() < 1e-12);
        }
        let t = LightMode::travelling([PI, 0.0, 0.0], 0.0).unwrap();
        assert!(close(t.value([0.5, 0.0, 0.0]), Complex64::new(0.0, 1.0), 1e-15));
        assert!(LightMode::travelling([0.0; 3], 0.0).is_err());
    }

    #[test]
    fn uniform_modes_give_orthonormal_coefficients() {
        let u = LightMode::standing([0.0; 3], 0.0);
        let c = coupling_coefficients(basis5(), &u, &u, 6, 10).unwrap();
        assert_eq!(c.sites, vec![2, 3, 4, 5, 6, 7]);
        assert_eq!(c.density.len(), 6);
        assert_eq!(c.bond.len(), 5);
        for j in &c.density {
            assert!(close(*j, Complex64::new(1.0, 0.0), 1e-8));
        }
        for j in &c.bond {
            assert!(j.norm() < 1e-8);
        }
        let t = LightMode::travelling([0.3, 0.0, 1.0], 0.2).unwrap();
        let c = coupling_coefficients(basis5(), &t, &t, 4, 4).unwrap();
        assert!(c.density.iter().all(|j| close(*j, Complex64::new(1.0, 0.0), 1e-8)));
        assert!(c.bond.iter().all(|j| j.norm() < 1e-8));
    }

    #[test]
    fn diffraction_maximum_has_uniform_bonds() {
        let b = basis5();
        let (p, d) = Geometry::Max { phase: 0.0 }.modes(1.0);
        let c = coupling_coefficients(b, &p, &d, 7, 7).unwrap();
        let jb = c.bond[0];
        assert!(jb.re.abs() > 1e-3 && jb.im.abs() < 1e-14);
        assert!(c.bond.iter().all(|j| close(*j, jb, 1e-10)));
        // the bond integral weights W1 by sin^2(pi y); negative in the symmetric gauge
        let f1 = b.fourier_overlap(Overlap::Bond, 2.0 * PI).unwrap();
        assert!((jb.re + f1 / 2.0).abs() < 1e-8);
    }

    #[test]
    fn diffraction_minimum_suppresses_density() {
        let (p, d) = Geometry::min_nodes().modes(1.0);
        let c = coupling_coefficients(basis5(), &p, &d, 6, 6).unwrap();
        for j in &c.density {
            assert!(j.norm() < 1e-10);
        }
        for w in c.bond.windows(2) {
            assert!(w[0].re * w[1].re < 0.0);
            assert!((w[0].re + w[1].re).abs() < 1e-10);
        }
    }

    #[test]
    fn suppression_phase_cancels_density() {
        let b = basis5();
        let g = Geometry::max_suppressed(b).unwrap();
        let (p, d) = g.modes(1.0);
        let c = coupling_coefficients(b, &p, &d, 9, 9).unwrap();
        let jb = c.bond[0].norm();
        assert!(c.density.iter().all(|j| j.norm() < 1e-3 * jb));
        let cf = closed_form_db(b, &p, &d, &c.positions).unwrap();
        assert!(cf.density.iter().all(|j| j.abs() < 1e-6));
        assert!(cf.bond.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12));
    }

    #[test]
    fn closed_form_minimum_geometry() {
        let b = basis5();
        let f0 = b.fourier_overlap(Overlap::Density, PI).unwrap();
        let f1 = b.fourier_overlap(Overlap::Bond, PI).unwrap();
        for (phi0, phi1) in [(0.0, 0.0), (0.3, 0.9), (0.0, PI / 2.0), (-0.7, 1.2)] {
            let (p, d) = Geometry::Min { phi0, phi1 }.modes(1.0);
            let xs: Vec<f64> = (0..6).map(|i| i as f64).collect();
            let cf = closed_form_db(b, &p, &d, &xs).unwrap();
            for (m, j) in cf.density.iter().enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((j - f0 * sign * phi0.cos() * phi1.cos()).abs() < 1e-12);
            }
            for (m, j) in cf.bond.iter().enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((j + f1 * sign * phi0.cos() * phi1.sin()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_rejects_travelling_waves() {
        let t = LightMode::travelling([PI, 0.0, 0.0], 0.0).unwrap();
        let s = LightMode::standing([PI, 0.0, 0.0], 0.0);
        assert!(matches!(
            closed_form_db(basis5(), &t, &s, &[0.0, 1.0]),
            Err(Error::NotStanding)
        ));
    }

    #[test]
    fn closed_form_agrees_with_integrals() {
        let b = basis5();
        let geoms = [
            Geometry::Max { phase: 0.0 },
            Geometry::max_suppressed(b).unwrap(),
            Geometry::Min { phi0: 0.0, phi1: 0.4 },
            Geometry::Custom {
                k0x: 1.3,
                k1x: -0.4,
                phi0: 0.2,
                phi1: 1.1,
            },
        ];
        for g in geoms {
            let (p, d) = g.modes(1.0);
            let c = coupling_coefficients(b, &p, &d, 8, 8).unwrap();
            let cf = closed_form_db(b, &p, &d, &c.positions).unwrap();
            let scale = c.density.iter().chain(&c.bond).fold(0.0_f64, |m, j| m.max(j.norm()));
            for (a, e) in c.density.iter().zip(&cf.density).chain(c.bond.iter().zip(&cf.bond)) {
                assert!((a.re - e).abs() <= 0.02 * scale, "{g:?}: {a} vs {e}");
                assert!(a.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_conjugates_transposed_coefficients() {
        let p = LightMode::travelling([0.7, 0.0, 2.0], 0.3).unwrap();
        let d = LightMode::travelling([-1.9, 0.0, 1.0], -0.2).unwrap();
        let c = coupling_coefficients(basis5(), &p, &d, 5, 7).unwrap();
        let m = c.matrix();
        let a = c.adjoint().matrix();
        for i in 0..5 {
            for j in 0..5 {
                assert!(close(a[i][j], m[j][i].conj(), 1e-15));
            }
        }
    }

    #[test]
    fn translation_multiplies_by_mode_phase() {
        let b = basis5();
        let p = LightMode::travelling([0.7, 0.0, 2.0], 0.3).unwrap();
        let d = LightMode::travelling([-1.9, 0.0, 1.0], -0.2).unwrap();
        let xs: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x + 1.0).collect();
        let (d0, b0, _) = coefficients_at_positions(b, &p, &d, &xs).unwrap();
        let (d1, b1, _) = coefficients_at_positions(b, &p, &d, &ys).unwrap();
        let phase = Complex64::from_polar(1.0, p.k[0] - d.k[0]);
        for (a, e) in d0.iter().chain(&b0).zip(d1.iter().chain(&b1)) {
            assert!((a.norm() - e.norm()).abs() < 1e-10);
            assert!(close(a * phase, *e, 1e-10));
        }
    }

    #[test]
    fn window_errors() {
        let u = LightMode::standing([0.0; 3], 0.0);
        assert!(coupling_coefficients(basis5(), &u, &u, 5, 4).is_err());
        assert!(coupling_coefficients(basis5(), &u, &u, 0, 4).is_err());
    }

    #[test]
    fn cavity_prefactor() {
        let c = CouplingPrefactor::Cavity {
            g0: 2.0,
            g1: 3.0,
            delta_a: -6.0,
            delta_p: 1.0,
            kappa: 1.0,
            a0: 4.0,
        };
        let v = c.value();
        let expect = Complex64::new(-4.0, 0.0) / Complex64::new(1.0, 1.0);
        assert!(close(v, expect, 1e-14));
        assert!((c.magnitude() - 8.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn backscatter_generalized_peak() {
        // d = lambda/2, probe along the lattice axis
        let probe = LightMode::at_angle(ModeKind::Travelling, PI, PI / 2.0, 0.0).unwrap();
        let b = bragg_peaks(&probe, ModeKind::Travelling, 1.0);
        let (n, t) = b.generalized.iter().find(|(n, _)| *n == 1).copied().unwrap();
        let dk = probe.k[0] - PI * t.sin();
        assert_eq!(n, 1);
        assert!((2.0 * dk - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn standing_detection_peak_at_half_reciprocal_vector() {
        let probe = LightMode::at_angle(ModeKind::Travelling, PI, 0.3, 0.0).unwrap();
        let b = bragg_peaks(&probe, ModeKind::Standing, 1.0);
        assert!(b
            .generalized
            .iter()
            .any(|(n, t)| *n == 1 && (PI * t.sin() - PI).abs() < 1e-12));
    }

    #[test]
    fn generalized_peaks_survive_without_classical_diffraction() {
        let probe = LightMode::at_angle(ModeKind::Travelling, 1.2 * PI, 0.2, 0.0).unwrap();
        let b = bragg_peaks(&probe, ModeKind::Travelling, 1.0);
        assert_eq!(b.classical_nonzero().count(), 0);
        assert!(b.generalized.iter().any(|(n, _)| *n != 0));
    }
}
