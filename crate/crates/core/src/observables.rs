//! Measurable quantities: quantum addition, angular scans, 3D maps, dip summaries,
//! the Luttinger estimator and photon rates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{FExpectations, LightOperator};
use crate::optics::{bragg_peaks, coupling_coefficients, density_suppression_phase, LightMode, ModeKind};
use crate::wannier::WannierBasis;

/// Default angular resolution of scans.
pub const POINTS_PER_PI: usize = 512;

fn check_table(dd: &[f64], sites: usize) -> Result<()> {
    if dd.len() != sites * sites {
        return Err(Error::SiteWindow(format!(
            "table of {} entries for {sites} positions",
            dd.len()
        )));
    }
    let scale = dd.iter().fold(1e-300_f64, |m, x| m.max(x.abs()));
    let asym = (0..sites)
        .flat_map(|i| (0..sites).map(move |j| (i, j)))
        .map(|(i, j)| (dd[i * sites + j] - dd[j * sites + i]).abs())
        .fold(0.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// `R = sum_ij exp[i dk (r_i - r_j)] <dn_i dn_j>` with `dk = k1x - k0x`.
pub fn quantum_addition(dd: &[f64], positions: &[f64], dk: f64) -> Result<f64> {
    check_table(dd, positions.len())?;
    Ok(structure_sum(dd, positions, dk).re)
}

fn structure_sum(dd: &[f64], positions: &[f64], dk: f64) -> Complex64 {
    let m = positions.len();
    let phases: Vec<Complex64> = positions.iter().map(|&r| Complex64::from_polar(1.0, dk * r)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            acc += phases[i] * phases[j].conj() * dd[i * m + j];
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScanGeometry {
    /// Travelling probe and detected waves with atoms at intensity maxima: `F = D`.
    Density,
    /// Standing waves, detected wave phase `pi/2` (sites on its nodes).
    Min,
    /// Standing waves at the density-suppressing phase.
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Raw,
    /// Divided by the atom number `N_K` in the illuminated window.
    PerAtom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularScan {
    pub theta0: f64,
    /// Wavenumber of both modes in units of `1/d`.
    pub k: f64,
    pub geometry: ScanGeometry,
    pub normalization: Normalization,
    pub theta1: Vec<f64>,
    pub r: Vec<f64>,
    pub generalized_bragg: Vec<bool>,
    pub classical_bragg: Vec<bool>,
}

impl AngularScan {
    /// `dk_x d` at grid point `i`.
    pub fn delta_k(&self, i: usize) -> f64 {
        self.k * (self.theta1[i].sin() - self.theta0.sin())
    }

    pub fn normalized(mut self, atoms: f64) -> Self {
        if self.normalization == Normalization::Raw && atoms > 0.0 {
            self.r.iter_mut().for_each(|r| *r /= atoms);
            self.normalization = Normalization::PerAtom;
        }
        self
    }
}

/// `theta1` from `-pi/2` to `pi/2` inclusive.
pub fn angular_grid(points_per_pi: usize) -> Vec<f64> {
    let n = points_per_pi.max(2);
    (0..=n).map(|i| -PI / 2.0 + PI * i as f64 / n as f64).collect()
}

/// Probe and detected modes of a scan point.
pub fn scan_modes(
    geometry: ScanGeometry,
    theta0: f64,
    theta1: f64,
    k: f64,
    basis: Option<&WannierBasis>,
) -> Result<(LightMode, LightMode)> {
    Ok(match geometry {
        ScanGeometry::Density => (
            LightMode::at_angle(ModeKind::Travelling, k, theta0, 0.0)?,
            LightMode::at_angle(ModeKind::Travelling, k, theta1, 0.0)?,
        ),
        ScanGeometry::Min => (
            LightMode::at_angle(ModeKind::Standing, k, theta0, 0.0)?,
            LightMode::at_angle(ModeKind::Standing, k, theta1, PI / 2.0)?,
        ),
        ScanGeometry::Max => {
            let basis = basis.ok_or_else(|| Error::invalid("geometry", "max geometry needs a Wannier basis"))?;
            let phase = density_suppression_phase(basis)?;
            (
                LightMode::at_angle(ModeKind::Standing, k, theta0, phase)?,
                LightMode::at_angle(ModeKind::Standing, k, theta1, -phase)?,
            )
        }
    })
}

fn detected_kind(geometry: ScanGeometry) -> ModeKind {
    match geometry {
        ScanGeometry::Density => ModeKind::Travelling,
        _ => ModeKind::Standing,
    }
}

/// Marks the grid point nearest to each angle in `angles` that lies inside the grid.
fn mark(grid: &[f64], angles: impl Iterator<Item = f64>) -> Vec<bool> {
    let mut flags = vec![false; grid.len()];
    let step = if grid.len() > 1 { grid[1] - grid[0] } else { 1.0 };
    for a in angles {
        if a < grid[0] - 0.5 * step || a > grid[grid.len() - 1] + 0.5 * step {
            continue;
        }
        let (i, _) = grid
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - a).abs().total_cmp(&(y.1 - a).abs()))
            .expect("non-empty grid");
        flags[i] = true;
    }
    flags
}

fn bragg_flags(geometry: ScanGeometry, theta0: f64, k: f64, grid: &[f64]) -> Result<(Vec<bool>, Vec<bool>)> {
    let probe = LightMode::at_angle(detected_kind(geometry), k, theta0, 0.0)?;
    let b = bragg_peaks(&probe, detected_kind(geometry), 1.0);
    Ok((
        mark(grid, b.generalized.iter().map(|p| p.1)),
        mark(grid, b.classical.iter().map(|p| p.1)),
    ))
}

/// `R(theta1)` from a density-correlation table in the density geometry.
pub fn density_scan(dd: &[f64], positions: &[f64], theta0: f64, k: f64, grid: &[f64]) -> Result<AngularScan> {
    check_table(dd, positions.len())?;
    if grid.is_empty() {
        return Err(Error::invalid("grid", "empty angle grid"));
    }
    let r = grid
        .par_iter()
        .map(|&t1| structure_sum(dd, positions, k * (t1.sin() - theta0.sin())).re)
        .collect();
    let (generalized_bragg, classical_bragg) = bragg_flags(ScanGeometry::Density, theta0, k, grid)?;
    Ok(AngularScan {
        theta0,
        k,
        geometry: ScanGeometry::Density,
        normalization: Normalization::Raw,
        theta1: grid.to_vec(),
        r,
        generalized_bragg,
        classical_bragg,
    })
}

/// Operator for one scan point: point-like coefficients in the density geometry,
/// integrated Wannier coefficients otherwise.
pub fn scan_operator(
    geometry: ScanGeometry,
    theta0: f64,
    theta1: f64,
    k: f64,
    basis: Option<&WannierBasis>,
    k_sites: usize,
    m_sites: usize,
) -> Result<LightOperator> {
    let (probe, detected) = scan_modes(geometry, theta0, theta1, k, basis)?;
    match geometry {
        ScanGeometry::Density => {
            if k_sites == 0 || k_sites > m_sites {
                return Err(Error::SiteWindow(format!(
                    "need 0 < K <= M, got K = {k_sites}, M = {m_sites}"
                )));
            }
            let first = (m_sites - k_sites) / 2;
            let density = (first..first + k_sites)
                .map(|i| {
                    let x = i as f64;
                    (i, detected.value_1d(x).conj() * probe.value_1d(x))
                })
                .collect();
            Ok(LightOperator { density, bonds: vec![] })
        }
        _ => {
            let basis = basis.ok_or_else(|| Error::invalid("geometry", "standing-wave scans need a Wannier basis"))?;
            let c = coupling_coefficients(basis, &probe, &detected, k_sites, m_sites)?;
            Ok(LightOperator::from_coefficients(&c))
        }
    }
}

/// `R(theta1) = <F^+ F> - |<F>|^2` with `F` evaluated by `eval` at every grid point.
#[allow(clippy::too_many_arguments)]
pub fn operator_scan<E>(
    geometry: ScanGeometry,
    theta0: f64,
    k: f64,
    grid: &[f64],
    basis: Option<&WannierBasis>,
    k_sites: usize,
    m_sites: usize,
    eval: E,
) -> Result<AngularScan>
where
    E: Fn(&LightOperator) -> Result<FExpectations> + Sync,
{
    if grid.is_empty() {
        return Err(Error::invalid("grid", "empty angle grid"));
    }
    let r = grid
        .par_iter()
        .map(|&t1| {
            let op = scan_operator(geometry, theta0, t1, k, basis, k_sites, m_sites)?;
            eval(&op).map(|e| e.quantum_addition())
        })
        .collect::<Result<Vec<_>>>()?;
    let (generalized_bragg, classical_bragg) = bragg_flags(geometry, theta0, k, grid)?;
    Ok(AngularScan {
        theta0,
        k,
        geometry,
        normalization: Normalization::Raw,
        theta1: grid.to_vec(),
        r,
        generalized_bragg,
        classical_bragg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub r_max: f64,
    pub r_min: f64,
    /// Angle of the dip minimum.
    pub dip_center: f64,
    /// Full width at `(R_max + R_min) / 2`, in radians of `theta1`.
    pub w_r: f64,
    /// The same width in units of `dk d`.
    pub w_r_dk: f64,
    pub k_b: Option<f64>,
}

/// Excludes grid points within `half_width` (in `dk d`) of classical Bragg points
/// other than the dip itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SummaryOptions {
    pub mask_half_width: Option<f64>,
}

/// `R_max`, dip centre and dip width of a scan.
pub fn extract_summary(scan: &AngularScan, opts: SummaryOptions) -> Result<ScanSummary> {
    let n = scan.r.len();
    if n < 3 {
        return Err(Error::NoDip);
    }
    let keep: Vec<bool> = match opts.mask_half_width {
        None => vec![true; n],
        Some(w) => {
            let centres: Vec<f64> = (0..n)
                .filter(|&i| scan.classical_bragg[i])
                .map(|i| scan.delta_k(i))
                .collect();
            (0..n)
                .map(|i| {
                    !centres
                        .iter()
                        .any(|c| c.abs() > 1e-9 && (scan.delta_k(i) - c).abs() < w)
                })
                .collect()
        }
    };
    let idx: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    let (imin, imax) = idx.iter().fold((idx[0], idx[0]), |(a, b), &i| {
        (
            if scan.r[i] < scan.r[a] { i } else { a },
            if scan.r[i] > scan.r[b] { i } else { b },
        )
    });
    let (r_min, r_max) = (scan.r[imin], scan.r[imax]);
    let scale = r_max.abs().max(r_min.abs()).max(1e-300);
    if r_max - r_min <= 1e-10 * scale || imin == idx[0] || imin == idx[idx.len() - 1] {
        return Err(Error::NoDip);
    }
    let half = 0.5 * (r_max + r_min);
    let pos = idx.iter().position(|&i| i == imin).expect("minimum is kept");
    let crossing = |a: usize, b: usize| {
        // linear interpolation of the half level between grid points a and b
        let t = (half - scan.r[a]) / (scan.r[b] - scan.r[a]);
        (
            scan.theta1[a] + t * (scan.theta1[b] - scan.theta1[a]),
            scan.delta_k(a) + t * (scan.delta_k(b) - scan.delta_k(a)),
        )
    };
    let left = (1..=pos)
        .rev()
        .find(|&p| scan.r[idx[p - 1]] >= half)
        .map(|p| crossing(idx[p], idx[p - 1]))
        .ok_or(Error::NoDip)?;
    let right = (pos..idx.len() - 1)
        .find(|&p| scan.r[idx[p + 1]] >= half)
        .map(|p| crossing(idx[p], idx[p + 1]))
        .ok_or(Error::NoDip)?;
    Ok(ScanSummary {
        r_max,
        r_min,
        dip_center: scan.theta1[imin],
        w_r: right.0 - left.0,
        w_r_dk: (right.1 - left.1).abs(),
        k_b: None,
    })
}

/// Mean-field angular map on the sphere of detection directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereMap {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// `R / N_K`, row-major over `(theta, phi)`.
    pub r_over_nk: Vec<f64>,
}

impl SphereMap {
    pub fn at(&self, it: usize, ip: usize) -> f64 {
        self.r_over_nk[it * self.phi.len() + ip]
    }

    /// Median of `R / N_K` over the sample points.
    pub fn background(&self) -> f64 {
        let mut v = self.r_over_nk.clone();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }

    pub fn direction(&self, it: usize, ip: usize) -> [f64; 3] {
        let (t, p) = (self.theta[it], self.phi[ip]);
        [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
    }
}

/// Sample grid with `4 q` azimuths and `2 q + 1` polar angles, containing the poles
/// and every lattice axis.
pub fn sphere_grid(q: usize) -> (Vec<f64>, Vec<f64>) {
    let q = q.max(1);
    let theta = (0..=2 * q).map(|i| PI * i as f64 / (2 * q) as f64).collect();
    let phi = (0..4 * q).map(|i| 2.0 * PI * i as f64 / (4 * q) as f64).collect();
    (theta, phi)
}

/// `R = sigma^2 sum_i |u1*(r_i) u0(r_i)|^2` on an `L^3` cubic lattice, inter-site terms
/// dropped, normalised by `N_K = K n`.
pub fn mf_angular_map_3d(
    sigma2: f64,
    density: f64,
    probe: &LightMode,
    detected: ModeKind,
    detected_phase: f64,
    lattice: usize,
    grid: (&[f64], &[f64]),
) -> Result<SphereMap> {
    if lattice == 0 {
        return Err(Error::invalid("lattice", "need at least one site per axis"));
    }
    let k = probe.magnitude();
    let sites: Vec<[f64; 3]> = (0..lattice)
        .flat_map(|x| (0..lattice).flat_map(move |y| (0..lattice).map(move |z| [x as f64, y as f64, z as f64])))
        .collect();
    let probe_weight: Vec<f64> = sites.iter().map(|r| probe.value(*r).norm_sqr()).collect();
    let nk = density * sites.len() as f64;
    let (theta, phi) = grid;
    let r_over_nk = theta
        .par_iter()
        .flat_map_iter(|&t| {
            let sites = &sites;
            let probe_weight = &probe_weight;
            phi.iter().map(move |&p| {
                let kv = [k * t.sin() * p.cos(), k * t.sin() * p.sin(), k * t.cos()];
                let mode = LightMode {
                    kind: detected,
                    k: kv,
                    phase: detected_phase,
                };
                let s: f64 = sites
                    .iter()
                    .zip(probe_weight)
                    .map(|(r, w)| mode.value(*r).norm_sqr() * w)
                    .sum();
                if nk > 0.0 {
                    sigma2 * s / nk
                } else {
                    0.0
                }
            })
        })
        .collect();
    Ok(SphereMap {
        theta: theta.to_vec(),
        phi: phi.to_vec(),
        r_over_nk,
    })
}

/// `(dX_phi)^2 = 1/4 + |C|^2 (dX^F_beta)^2`.
pub fn light_quadrature_variance(ex: &FExpectations, c_abs: f64) -> f64 {
    0.25 + c_abs * c_abs * ex.quadrature_variance()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuttingerEstimate {
    pub k_b: f64,
    /// `S(k_min) > 0` and `S(2 k_min) >= S(k_min)`.
    pub reliable: bool,
    /// `K_b >= 1/2`, the superfluid side where the estimator applies.
    pub in_regime: bool,
}

/// `K_b = pi S(k_min) / k_min`, `S(k) = (1/M) sum_ij exp[i k (r_i - r_j)] dd_ij`, `k_min = 2 pi / M`.
pub fn luttinger_parameter(dd: &[f64], positions: &[f64]) -> Result<LuttingerEstimate> {
    check_table(dd, positions.len())?;
    let m = positions.len() as f64;
    let kmin = 2.0 * PI / m;
    let s = |k: f64| structure_sum(dd, positions, k).re / m;
    let (s1, s2) = (s(kmin), s(2.0 * kmin));
    let k_b = PI * s1 / kmin;
    Ok(LuttingerEstimate {
        k_b,
        reliable: s1 > 0.0 && s2 >= s1 - 1e-10 * s1.abs(),
        in_regime: k_b >= 0.5,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonRate {
    /// Scattered photons per second.
    pub rate: f64,
    /// `|Delta_a| > 10 Gamma`.
    pub off_resonant: bool,
}

/// `n_Phi = (Omega0 / Delta_a)^2 Gamma K sigma^2 / 8`.
pub fn photon_rate(omega0: f64, delta_a: f64, gamma: f64, k_sites: usize, sigma2: f64) -> Result<PhotonRate> {
    if delta_a == 0.0 || !delta_a.is_finite() {
        return Err(Error::invalid("delta_a", "detuning must be finite and nonzero"));
    }
    if !(gamma >= 0.0) || !(sigma2 >= 0.0) {
        return Err(Error::invalid("gamma", "linewidth and variance must be >= 0"));
    }
    let off_resonant = delta_a.abs() > 10.0 * gamma;
    if !off_resonant {
        log::warn!(
            "|Delta_a| = {} is not far from resonance (Gamma = {gamma})",
            delta_a.abs()
        );
    }
    let ratio = omega0 / delta_a;
    Ok(PhotonRate {
        rate: ratio * ratio * gamma * k_sites as f64 * sigma2 / 8.0,
        off_resonant,
    })
}

/// Correlation length from a least-squares fit of `ln|c(r)|` over `r = 1..=r_max`.
///
/// Returns infinity when the fitted slope is not negative.
pub fn correlation_length(by_distance: &[f64], r_max: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> = (1..=r_max.min(by_distance.len().saturating_sub(1)))
        .filter(|&r| by_distance[r] != 0.0)
        .map(|r| (r as f64, by_distance[r].abs().ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::invalid("r_max", "need at least two nonzero distances"));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(if slope < 0.0 { -1.0 / slope } else { f64::INFINITY })
}

#[cfg(test)]
mod tests;
