//! Lowest-band Wannier orbital of the 1D lattice `V0 sin^2(pi x / d)`.
//!
//! Energies are in recoil units `E_R = hbar^2 k_L^2 / 2m` with `k_L = pi / d`.
//! Positions are absolute (the usual convention is `d = 1`).

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tail amplitude allowed at the grid boundary.
pub const TAIL_LIMIT: f64 = 1e-6;
/// Band-energy drift above which the plane-wave cutoff is reported as too small.
pub const CUTOFF_DRIFT_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePotential {
    /// Lattice depth in recoil energies.
    pub depth: f64,
    /// Lattice period.
    pub period: f64,
}

impl LatticePotential {
    pub fn new(depth: f64) -> Result<Self> {
        Self::with_period(depth, 1.0)
    }

    pub fn with_period(depth: f64, period: f64) -> Result<Self> {
        if !(depth >= 0.0) || !depth.is_finite() {
            return Err(Error::invalid("depth", format!("depth >= 0 required, got {depth}")));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::invalid("period", format!("period > 0 required, got {period}")));
        }
        Ok(Self { depth, period })
    }

    /// Lattice wavevector `k_L = pi / d`.
    pub fn k_lattice(&self) -> f64 {
        PI / self.period
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = (PI * x / self.period).sin();
        self.depth * s * s
    }
}

/// Lowest-band Bloch states in a plane-wave basis, gauge fixed so `u_q(0) > 0`.
#[derive(Debug, Clone)]
pub struct BlochTable {
    pub potential: LatticePotential,
    /// Plane waves `q + 2 pi n / d`, `n = -cutoff/2 ..= cutoff/2`.
    pub cutoff: usize,
    /// Quasimomenta, absolute units, symmetric midpoint grid on `(-pi/d, pi/d)`.
    pub quasimomenta: Vec<f64>,
    /// Lowest-band energies in `E_R`.
    pub energies: Vec<f64>,
    /// Plane-wave coefficients per quasimomentum.
    pub coefficients: Vec<Vec<f64>>,
    /// Largest band-energy change when the cutoff is raised by 4.
    pub cutoff_drift: f64,
}

impl BlochTable {
    pub fn bandwidth(&self) -> f64 {
        let max = self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Nearest-neighbour hopping from the band, `-(1/N) sum_q E(q) cos(q d)`.
    pub fn band_hopping(&self) -> f64 {
        let d = self.potential.period;
        let n = self.quasimomenta.len() as f64;
        -self
            .quasimomenta
            .iter()
            .zip(&self.energies)
            .map(|(q, e)| e * (q * d).cos())
            .sum::<f64>()
            / n
    }
}

fn lowest_band(pot: &LatticePotential, cutoff: usize, q: f64) -> Result<(f64, Vec<f64>)> {
    let half = (cutoff / 2) as i64;
    let kl = pot.k_lattice();
    let qt = q / kl;
    let h = DMatrix::from_fn(cutoff, cutoff, |i, j| {
        if i == j {
            let g = qt + 2.0 * (i as i64 - half) as f64;
            g * g + pot.depth / 2.0
        } else if i.abs_diff(j) == 1 {
            -pot.depth / 4.0
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::try_new(h, 1e-14, 10_000).ok_or_else(|| Error::NotConverged {
        what: format!("plane-wave eigensolve at q = {q}"),
        residual: f64::NAN,
    })?;
    let (idx, &e0) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("cutoff > 0");
    let mut c: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    if c.iter().sum::<f64>() < 0.0 {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((e0, c))
}

/// Lowest band of `V0 sin^2(pi x/d)` on `nq` quasimomenta.
pub fn solve_bloch_band(pot: LatticePotential, cutoff: usize, nq: usize) -> Result<BlochTable> {
    if cutoff < 11 || cutoff.is_multiple_of(2) {
        return Err(Error::invalid(
            "cutoff",
            format!("odd cutoff >= 11 required, got {cutoff}"),
        ));
    }
    if nq < 32 {
        return Err(Error::invalid(
            "nq",
            format!("at least 32 quasimomenta required, got {nq}"),
        ));
    }
    let kl = pot.k_lattice();
    let quasimomenta: Vec<f64> = (0..nq)
        .map(|j| kl * (-1.0 + (2.0 * j as f64 + 1.0) / nq as f64))
        .collect();

    let mut energies = Vec::with_capacity(nq);
    let mut coefficients = Vec::with_capacity(nq);
    let mut cutoff_drift: f64 = 0.0;
    for &q in &quasimomenta {
        let (e, c) = lowest_band(&pot, cutoff, q)?;
        let (e_big, _) = lowest_band(&pot, cutoff + 4, q)?;
        cutoff_drift = cutoff_drift.max((e - e_big).abs());
        energies.push(e);
        coefficients.push(c);
    }
    if cutoff_drift > CUTOFF_DRIFT_LIMIT {
        log::warn!(
            "plane-wave cutoff {cutoff} too small at V0 = {}: band drift {cutoff_drift:e} E_R",
            pot.depth
        );
    }
    Ok(BlochTable {
        potential: pot,
        cutoff,
        quasimomenta,
        energies,
        coefficients,
        cutoff_drift,
    })
}

/// Real-space grid on which the orbital is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WannierGrid {
    /// Number of lattice periods spanned, odd so the grid is centred on a site.
    pub periods: usize,
    /// Samples per period, even so bond midpoints lie on the grid.
    pub points_per_period: usize,
}

impl Default for WannierGrid {
    fn default() -> Self {
        Self {
            periods: 13,
            points_per_period: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlap {
    /// `W0(x) = w(x)^2`
    Density,
    /// `W1(x) = w(x - d/2) w(x + d/2)`
    Bond,
}

/// Uniform table of a real, even Fourier transform.
#[derive(Debug, Clone)]
pub struct FourierTable {
    pub k_max: f64,
    pub values: Vec<f64>,
}

impl FourierTable {
    pub const POINTS: usize = 1024;

    fn spacing(&self) -> f64 {
        2.0 * self.k_max / (self.values.len() - 1) as f64
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.values.len()).map(move |i| -self.k_max + i as f64 * h)
    }

    /// Four-point Lagrange interpolation.
    pub fn interpolate(&self, k: f64) -> Result<f64> {
        let tol = 1e-12 * self.k_max;
        if !(k.abs() <= self.k_max + tol) {
            return Err(Error::OutOfRange {
                what: "k",
                value: k,
                min: -self.k_max,
                max: self.k_max,
            });
        }
        let n = self.values.len();
        let h = self.spacing();
        let t = ((k + self.k_max) / h).clamp(0.0, (n - 1) as f64);
        let base = (t.floor() as usize).saturating_sub(1).min(n - 4);
        let mut acc = 0.0;
        for a in 0..4 {
            let mut l = 1.0;
            for b in 0..4 {
                if a != b {
                    l *= (t - (base + b) as f64) / (a as f64 - b as f64);
                }
            }
            acc += l * self.values[base + a];
        }
        Ok(acc)
    }
}

/// Sampled Wannier orbital together with its overlap products and their transforms.
#[derive(Debug, Clone)]
pub struct WannierBasis {
    potential: LatticePotential,
    grid: WannierGrid,
    x: Vec<f64>,
    w: Vec<f64>,
    w0: Vec<f64>,
    w1: Vec<f64>,
    ft_w0: FourierTable,
    ft_w1: FourierTable,
}

/// Trapezoid rule on a uniform grid.
pub(crate) fn trapezoid(values: impl ExactSizeIterator<Item = f64>, h: f64) -> f64 {
    let n = values.len();
    let mut acc = 0.0;
    for (i, v) in values.enumerate() {
        acc += if i == 0 || i + 1 == n { 0.5 * v } else { v };
    }
    acc * h
}

/// Builds the real, even, normalised Wannier orbital on the default grid.
pub fn build_wannier(bloch: &BlochTable) -> Result<WannierBasis> {
    build_wannier_on(bloch, WannierGrid::default())
}

pub fn build_wannier_on(bloch: &BlochTable, grid: WannierGrid) -> Result<WannierBasis> {
    let pot = bloch.potential;
    let d = pot.period;
    let half = (bloch.cutoff / 2) as i64;
    let nq = bloch.quasimomenta.len() as f64;
    let x = grid_positions(grid, d)?;
    let w: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let mut acc = 0.0;
            for (q, c) in bloch.quasimomenta.iter().zip(&bloch.coefficients) {
                for (n, cn) in c.iter().enumerate() {
                    let g = q + 2.0 * PI * (n as i64 - half) as f64 / d;
                    acc += cn * (g * xi).cos();
                }
            }
            acc / nq
        })
        .collect();
    WannierBasis::from_orbital(pot, grid, w)
}

fn grid_positions(grid: WannierGrid, d: f64) -> Result<Vec<f64>> {
    if grid.periods < 3 || grid.periods.is_multiple_of(2) {
        return Err(Error::invalid("periods", "odd number of periods >= 3 required"));
    }
    if grid.points_per_period < 8 || grid.points_per_period % 2 == 1 {
        return Err(Error::invalid("points_per_period", "even count >= 8 required"));
    }
    let n = grid.periods * grid.points_per_period + 1;
    let h = d / grid.points_per_period as f64;
    let x0 = -(grid.periods as f64) * d / 2.0;
    Ok((0..n).map(|i| x0 + i as f64 * h).collect())
}

impl WannierBasis {
    /// Builds the overlap products and Fourier tables from orbital samples on `grid`.
    ///
    /// The samples are renormalised so the trapezoid integral of `w^2` is one.
    pub fn from_orbital(potential: LatticePotential, grid: WannierGrid, mut w: Vec<f64>) -> Result<Self> {
        let d = potential.period;
        let x = grid_positions(grid, d)?;
        if w.len() != x.len() {
            return Err(Error::invalid(
                "w",
                format!("expected {} samples, got {}", x.len(), w.len()),
            ));
        }
        let h = d / grid.points_per_period as f64;
        let peak = w.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(peak > 0.0) {
            return Err(Error::invalid("w", "orbital vanishes"));
        }
        let edge = w[0].abs().max(w[w.len() - 1].abs()) / peak;
        if edge > TAIL_LIMIT {
            return Err(Error::GridTooShort {
                ratio: edge,
                limit: TAIL_LIMIT,
            });
        }
        let norm = trapezoid(w.iter().map(|v| v * v), h).sqrt();
        w.iter_mut().for_each(|v| *v /= norm);

        let w0: Vec<f64> = w.iter().map(|v| v * v).collect();
        let shift = grid.points_per_period / 2;
        let n = w.len();
        let w1: Vec<f64> = (0..n)
            .map(|i| {
                if i >= shift && i + shift < n {
                    w[i - shift] * w[i + shift]
                } else {
                    0.0
                }
            })
            .collect();

        let k_max = 4.0 * PI / d;
        let table = |f: &[f64]| -> FourierTable {
            let dk = 2.0 * k_max / (FourierTable::POINTS - 1) as f64;
            let values = (0..FourierTable::POINTS)
                .map(|j| {
                    let k = -k_max + j as f64 * dk;
                    cosine_transform(&x, f, h, k)
                })
                .collect();
            FourierTable { k_max, values }
        };
        let ft_w0 = table(&w0);
        let ft_w1 = table(&w1);
        Ok(Self {
            potential,
            grid,
            x,
            w,
            w0,
            w1,
            ft_w0,
            ft_w1,
        })
    }

    pub fn potential(&self) -> LatticePotential {
        self.potential
    }

    pub fn grid(&self) -> WannierGrid {
        self.grid
    }

    pub fn period(&self) -> f64 {
        self.potential.period
    }

    pub fn spacing(&self) -> f64 {
        self.potential.period / self.grid.points_per_period as f64
    }

    pub fn positions(&self) -> &[f64] {
        &self.x
    }

    pub fn orbital(&self) -> &[f64] {
        &self.w
    }

    pub fn overlap(&self, which: Overlap) -> &[f64] {
        match which {
            Overlap::Density => &self.w0,
            Overlap::Bond => &self.w1,
        }
    }

    pub fn fourier_table(&self, which: Overlap) -> &FourierTable {
        match which {
            Overlap::Density => &self.ft_w0,
            Overlap::Bond => &self.ft_w1,
        }
    }

    /// `F[W](k) = int W(x) exp(-ikx) dx`, interpolated from the table.
    pub fn fourier_overlap(&self, which: Overlap, k: f64) -> Result<f64> {
        self.fourier_table(which).interpolate(k)
    }

    /// Same transform by direct quadrature on the stored grid, no range limit.
    pub fn fourier_overlap_direct(&self, which: Overlap, k: f64) -> f64 {
        cosine_transform(&self.x, self.overlap(which), self.spacing(), k)
    }

    /// `int w(x) w(x - s d) dx` for an integer site offset `s`.
    pub fn site_overlap(&self, s: usize) -> f64 {
        let shift = s * self.grid.points_per_period;
        if shift >= self.w.len() {
            return 0.0;
        }
        trapezoid(self.w[shift..].iter().zip(&self.w).map(|(a, b)| a * b), self.spacing())
    }

    /// Tunnelling `-int w(x) H w(x - d) dx` in `E_R`, with fourth-order finite differences.
    pub fn hopping_integral(&self) -> f64 {
        let h = self.spacing();
        let d = self.period();
        let kin = d * d / (PI * PI);
        let shift = self.grid.points_per_period;
        let n = self.w.len();
        let w = &self.w;
        let hw: Vec<f64> = (0..n)
            .map(|i| {
                let lap = if i >= 2 && i + 2 < n {
                    (-w[i - 2] + 16.0 * w[i - 1] - 30.0 * w[i] + 16.0 * w[i + 1] - w[i + 2]) / (12.0 * h * h)
                } else {
                    0.0
                };
                -kin * lap + self.potential.value(self.x[i]) * w[i]
            })
            .collect();
        // w(x - d) sampled at index i is w[i - shift]
        -trapezoid((shift..n).map(|i| w[i - shift] * hw[i]), h)
    }
}

fn cosine_transform(x: &[f64], f: &[f64], h: f64, k: f64) -> f64 {
    trapezoid(x.iter().zip(f).map(|(xi, fi)| fi * (k * xi).cos()), h)
}
