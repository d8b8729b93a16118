//! Exact ground states of the 1D Bose-Hubbard chain.

mod basis;
mod lanczos;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use basis::{capped_dimension, Basis, MAX_DIM, MAX_OCCUPATION, MAX_SITES};
pub use lanczos::{lowest_eigenpair, DiagonalInfo, Eigenpair, LanczosOptions};

use crate::error::{Error, Result};
use crate::operator::{FExpectations, LightOperator};
use crate::optics::CouplingCoefficients;

/// Default incommensurate ratio of the superlattice.
pub const DEFAULT_RATIO: f64 = 0.77;
/// Ground spaces with a gap below this are flagged degenerate.
pub const DEGENERACY_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// On-site energies `eps_i = V cos(2 pi r i + offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub strength: f64,
    pub ratio: f64,
    pub offset: f64,
}

impl DisorderSpec {
    pub fn new(strength: f64) -> Self {
        Self {
            strength,
            ratio: DEFAULT_RATIO,
            offset: 0.0,
        }
    }

    pub fn energy(&self, site: usize) -> f64 {
        self.strength * (2.0 * PI * self.ratio * site as f64 + self.offset).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub sites: usize,
    pub bosons: usize,
    pub hopping: f64,
    pub interaction: f64,
    pub chemical_potential: f64,
    pub boundary: Boundary,
    pub disorder: Option<DisorderSpec>,
    pub n_cap: usize,
}

/// `min(N, 6)` once `U/2J >= 1`, otherwise `N`.
pub fn default_n_cap(bosons: usize, hopping: f64, interaction: f64) -> usize {
    if interaction >= 2.0 * hopping {
        bosons.min(6)
    } else {
        bosons
    }
}

impl ChainSpec {
    /// Open, clean chain with `J = 1` and the default cutoff.
    pub fn new(sites: usize, bosons: usize, u_over_2j: f64) -> Self {
        let interaction = 2.0 * u_over_2j;
        Self {
            sites,
            bosons,
            hopping: 1.0,
            interaction,
            chemical_potential: 0.0,
            boundary: Boundary::Open,
            disorder: None,
            n_cap: default_n_cap(bosons, 1.0, interaction),
        }
    }

    pub fn periodic(mut self) -> Self {
        self.boundary = Boundary::Periodic;
        self
    }

    pub fn with_disorder(mut self, disorder: DisorderSpec) -> Self {
        self.disorder = Some(disorder);
        self
    }

    pub fn with_bosons(&self, bosons: usize) -> Self {
        let mut s = self.clone();
        s.bosons = bosons;
        s.n_cap = default_n_cap(bosons, s.hopping, s.interaction);
        s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hopping >= 0.0 && self.hopping.is_finite()) {
            return Err(Error::invalid("hopping", "must be finite and >= 0"));
        }
        if !(self.interaction >= 0.0 && self.interaction.is_finite()) {
            return Err(Error::invalid("interaction", "must be finite and >= 0"));
        }
        if self.n_cap > self.bosons {
            return Err(Error::invalid("n_cap", "must not exceed the boson number"));
        }
        if let Some(d) = &self.disorder {
            if !(d.strength >= 0.0) {
                return Err(Error::invalid("disorder.strength", "must be >= 0"));
            }
        }
        Ok(())
    }

    /// Nearest-neighbour bonds; a two-site ring keeps its single bond.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut b: Vec<_> = (0..self.sites.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && self.sites > 2 {
            b.push((self.sites - 1, 0));
        }
        b
    }

    pub fn onsite_energies(&self) -> Vec<f64> {
        (0..self.sites)
            .map(|i| self.disorder.map_or(0.0, |d| d.energy(i)))
            .collect()
    }
}

/// Row-compressed real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    /// `y = A x`; rows are independent so the result does not depend on the thread count.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            *out = self.cols[a..b]
                .iter()
                .zip(&self.vals[a..b])
                .map(|(c, v)| v * x[*c as usize])
                .sum();
        });
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.cols[a..b]
            .binary_search(&(c as u32))
            .map_or(0.0, |k| self.vals[a + k])
    }

    pub fn diagonal_info(&self) -> DiagonalInfo {
        let mut info = DiagonalInfo {
            diag: vec![0.0; self.dim()],
            off_sum: vec![0.0; self.dim()],
        };
        for r in 0..self.dim() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] as usize == r {
                    info.diag[r] = self.vals[k];
                } else {
                    info.off_sum[r] += self.vals[k].abs();
                }
            }
        }
        info
    }

    /// `max |A_rc - A_cr|`.
    pub fn max_asymmetry(&self) -> f64 {
        (0..self.dim())
            .flat_map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, k)))
            .map(|(r, k)| (self.vals[k] - self.get(self.cols[k] as usize, r)).abs())
            .fold(0.0, f64::max)
    }
}

/// `H = -J sum (b_i^+ b_j + h.c.) + U/2 sum n(n-1) + sum (eps_i - mu) n_i` on `basis`.
pub fn hamiltonian(spec: &ChainSpec, basis: &Basis) -> SparseMatrix {
    let bonds = spec.bonds();
    let eps = spec.onsite_energies();
    let rows: Vec<Vec<(u32, f64)>> = basis
        .keys()
        .par_iter()
        .map(|&key| {
            let mut row = Vec::with_capacity(1 + 2 * bonds.len());
            let mut diag = 0.0;
            for (i, e) in eps.iter().enumerate() {
                let n = basis.occupation(key, i) as f64;
                diag += 0.5 * spec.interaction * n * (n - 1.0) + (e - spec.chemical_potential) * n;
            }
            row.push((basis.index(key).expect("key in basis") as u32, diag));
            if spec.hopping != 0.0 {
                for &(i, j) in &bonds {
                    for (from, to) in [(i, j), (j, i)] {
                        if let Some(target) = basis.hop(key, from, to) {
                            if let Some(c) = basis.index(target) {
                                let nf = basis.occupation(key, from) as f64;
                                let nt = basis.occupation(key, to) as f64;
                                row.push((c as u32, -spec.hopping * (nf * (nt + 1.0)).sqrt()));
                            }
                        }
                    }
                }
            }
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(u32, f64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged
        })
        .collect();
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    row_ptr.push(0);
    let nnz: usize = rows.iter().map(Vec::len).sum();
    let mut cols = Vec::with_capacity(nnz);
    let mut vals = Vec::with_capacity(nnz);
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    SparseMatrix { row_ptr, cols, vals }
}

/// `dd_ij = <dn_i dn_j>` and `sp_ij = <b_i^+ b_j>`, row-major `M x M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTables {
    pub sites: usize,
    pub density: Vec<f64>,
    pub dd: Vec<f64>,
    pub sp: Vec<f64>,
}

impl CorrelationTables {
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.dd[i * self.sites + j]
    }

    pub fn sp(&self, i: usize, j: usize) -> f64 {
        self.sp[i * self.sites + j]
    }

    /// Mean of `table(i, i + r)` over all pairs at separation `r`, for `r = 0..M`.
    pub fn by_distance(&self, single_particle: bool) -> Vec<f64> {
        let m = self.sites;
        (0..m)
            .map(|r| {
                let vals: Vec<f64> = (0..m - r)
                    .map(|i| {
                        if single_particle {
                            self.sp(i, i + r)
                        } else {
                            self.dd(i, i + r)
                        }
                    })
                    .collect();
                vals.iter().sum::<f64>() / vals.len() as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct EDState {
    pub spec: ChainSpec,
    pub basis: Basis,
    pub vector: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
    /// Gap to the next level is below [`DEGENERACY_GAP`].
    pub degenerate: bool,
    pub correlations: CorrelationTables,
}

impl EDState {
    pub fn sites(&self) -> usize {
        self.spec.sites
    }
}

/// Lowest eigenpair in the fixed-`N` sector of `spec`.
pub fn ground_state(spec: &ChainSpec) -> Result<EDState> {
    ground_state_with(spec, LanczosOptions::default())
}

pub fn ground_state_with(spec: &ChainSpec, opts: LanczosOptions) -> Result<EDState> {
    spec.validate()?;
    let basis = Basis::new(spec.sites, spec.bosons, spec.n_cap)?;
    let h = hamiltonian(spec, &basis);
    let info = h.diagonal_info();
    let pair = lowest_eigenpair(|x, y| h.apply(x, y), basis.len(), Some(&info), opts)?;
    let correlations = correlations_of(&basis, &pair.vector);
    Ok(EDState {
        spec: spec.clone(),
        vector: pair.vector,
        energy: pair.value,
        residual: pair.residual,
        degenerate: pair.gap < DEGENERACY_GAP,
        correlations,
        basis,
    })
}

pub fn correlations(state: &EDState) -> CorrelationTables {
    state.correlations.clone()
}

fn correlations_of(basis: &Basis, psi: &[f64]) -> CorrelationTables {
    let m = basis.sites();
    let mut density = vec![0.0; m];
    let mut nn = vec![0.0; m * m];
    let mut sp = vec![0.0; m * m];
    for (&key, &a) in basis.keys().iter().zip(psi) {
        let w = a * a;
        let occ: Vec<f64> = (0..m).map(|i| basis.occupation(key, i) as f64).collect();
        for i in 0..m {
            density[i] += w * occ[i];
            for j in 0..m {
                nn[i * m + j] += w * occ[i] * occ[j];
            }
            sp[i * m + i] += w * occ[i];
        }
        // <b_i^+ b_j> for i != j: amplitude of the hopped state
        for j in 0..m {
            for i in 0..m {
                if i == j {
                    continue;
                }
                if let Some(t) = basis.hop(key, j, i).and_then(|t| basis.index(t)) {
                    let me = (occ[j] * (occ[i] + 1.0)).sqrt();
                    sp[i * m + j] += psi[t] * me * a;
                }
            }
        }
    }
    let dd = (0..m * m).map(|k| nn[k] - density[k / m] * density[k % m]).collect();
    CorrelationTables {
        sites: m,
        density,
        dd,
        sp,
    }
}

/// `F psi` in the basis of `basis`.
pub fn apply_light(basis: &Basis, op: &LightOperator, psi: &[f64]) -> Result<Vec<Complex64>> {
    if let Some(s) = op.max_site() {
        if s >= basis.sites() {
            return Err(Error::SiteWindow(format!(
                "operator touches site {s} of a {}-site chain",
                basis.sites()
            )));
        }
    }
    let out: Vec<Complex64> = basis
        .keys()
        .par_iter()
        .map(|&key| {
            // row of F: gather <key| F |psi>
            let mut acc = Complex64::new(0.0, 0.0);
            let here = basis.index(key).expect("key in basis");
            for &(i, a) in &op.density {
                acc += a * (basis.occupation(key, i) as f64 * psi[here]);
            }
            for &(i, j, c) in &op.bonds {
                for (to, from) in [(i, j), (j, i)] {
                    // source state has one more boson on `from`, one fewer on `to`
                    if let Some(src) = basis.hop(key, to, from).and_then(|s| basis.index(s)) {
                        let nt = basis.occupation(key, to) as f64;
                        let nf = basis.occupation(key, from) as f64 + 1.0;
                        acc += c * ((nf * nt).sqrt() * psi[src]);
                    }
                }
            }
            acc
        })
        .collect();
    Ok(out)
}

/// `<F>`, `<F^+ F>` and the quadrature moments at `beta`.
#[allow(non_snake_case)]
pub fn expectation_F(state: &EDState, coeffs: &CouplingCoefficients, beta: f64) -> Result<FExpectations> {
    if coeffs.chain_sites > state.sites() {
        return Err(Error::SiteWindow(format!(
            "coefficients for {} sites applied to a {}-site chain",
            coeffs.chain_sites,
            state.sites()
        )));
    }
    expectation_of(state, &LightOperator::from_coefficients(coeffs), beta)
}

pub fn expectation_of(state: &EDState, op: &LightOperator, beta: f64) -> Result<FExpectations> {
    let f = apply_light(&state.basis, op, &state.vector)?;
    let g = apply_light(&state.basis, &op.adjoint(), &state.vector)?;
    Ok(FExpectations::from_images(beta, &state.vector, &f, &g))
}

/// Per-sector ground energies at `mu = 0`, reusable for any chemical potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorEnergies {
    pub energies: Vec<f64>,
}

impl SectorEnergies {
    /// `E(N)` for `N = 0..=max_bosons`.
    pub fn compute(spec: &ChainSpec, max_bosons: usize) -> Result<Self> {
        Self::compute_with(spec, max_bosons, LanczosOptions::default())
    }

    pub fn compute_with(spec: &ChainSpec, max_bosons: usize, opts: LanczosOptions) -> Result<Self> {
        let mut base = spec.clone();
        base.chemical_potential = 0.0;
        let energies = (0..=max_bosons)
            .map(|n| {
                if n == 0 {
                    Ok(0.0)
                } else {
                    ground_state_with(&base.with_bosons(n), opts).map(|s| s.energy)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { energies })
    }

    /// `argmin_N E(N) - mu N`; ties go to the smaller `N`.
    pub fn best_sector(&self, mu: f64) -> usize {
        let mut best = 0;
        for (n, e) in self.energies.iter().enumerate() {
            let g = e - mu * n as f64;
            if g < self.energies[best] - mu * best as f64 - 1e-12 * g.abs().max(1.0) {
                best = n;
            }
        }
        best
    }
}

/// Ground state at fixed `spec.chemical_potential`, minimising over `N = 0..=max_bosons`.
pub fn grand_canonical_ground_state(spec: &ChainSpec, max_bosons: usize) -> Result<EDState> {
    let sectors = SectorEnergies::compute(spec, max_bosons)?;
    let n = sectors.best_sector(spec.chemical_potential);
    ground_state(&spec.with_bosons(n))
}

#[cfg(test)]
mod tests;
