//! Uniform site-decoupled mean field of the Bose-Hubbard model.
//!
//! Each site sees `h(Phi) = -zJ Phi (b + b^+) + U/2 n(n-1) - mu n + zJ Phi^2`;
//! the ground state of `h` must regenerate `Phi = <b>`.

mod product;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use product::{product_expectations, ProductState};

/// Largest weight allowed on the top Fock level.
pub const CUTOFF_WEIGHT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoseHubbardParams {
    pub hopping: f64,
    pub interaction: f64,
    pub chemical_potential: f64,
    pub coordination: usize,
    pub n_max: usize,
}

impl BoseHubbardParams {
    /// Parameters in units of `zJ`, the natural scale of the decoupled problem.
    pub fn in_zj_units(u_over_zj: f64, mu_over_zj: f64, coordination: usize) -> Result<Self> {
        let p = Self {
            hopping: 1.0 / coordination as f64,
            interaction: u_over_zj,
            chemical_potential: mu_over_zj,
            coordination,
            n_max: 12,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.interaction >= 0.0) {
            return Err(Error::invalid("interaction", "U >= 0 required"));
        }
        if !(self.hopping >= 0.0) {
            return Err(Error::invalid("hopping", "J >= 0 required"));
        }
        if self.n_max < 6 {
            return Err(Error::invalid("n_max", "Fock cutoff n_max >= 6 required"));
        }
        if ![2, 4, 6].contains(&self.coordination) {
            return Err(Error::invalid("coordination", "z must be 2, 4 or 6"));
        }
        if !self.chemical_potential.is_finite() {
            return Err(Error::invalid("chemical_potential", "must be finite"));
        }
        Ok(())
    }

    pub fn zj(&self) -> f64 {
        self.coordination as f64 * self.hopping
    }
}

/// Converged single-site Fock amplitudes and their moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GutzwillerState {
    pub params: BoseHubbardParams,
    /// `f_n`, `n = 0..=n_max`, real and nonnegative in the chosen gauge.
    pub amplitudes: Vec<f64>,
    /// `<b>`
    pub phi: f64,
    /// `<n>`
    pub density: f64,
    /// `<b^2>`
    pub b2: f64,
    /// `<n^2>`
    pub n2: f64,
    /// Energy per site.
    pub energy: f64,
    pub converged: bool,
    pub residual: f64,
    pub iterations: usize,
}

impl GutzwillerState {
    /// Builds moments from raw amplitudes (normalised here).
    pub fn from_amplitudes(params: BoseHubbardParams, mut amplitudes: Vec<f64>) -> Self {
        let norm = amplitudes.iter().map(|f| f * f).sum::<f64>().sqrt();
        amplitudes.iter_mut().for_each(|f| *f /= norm);
        if amplitudes.iter().sum::<f64>() < 0.0 {
            amplitudes.iter_mut().for_each(|f| *f = -*f);
        }
        let m = Moments::of(&amplitudes);
        let zj = params.zj();
        let onsite: f64 = amplitudes
            .iter()
            .enumerate()
            .map(|(n, f)| {
                let nf = n as f64;
                f * f * (0.5 * params.interaction * nf * (nf - 1.0) - params.chemical_potential * nf)
            })
            .sum();
        Self {
            params,
            phi: m.phi,
            density: m.n,
            b2: m.b2,
            n2: m.n2,
            energy: onsite - zj * m.phi * m.phi,
            amplitudes,
            converged: true,
            residual: 0.0,
            iterations: 0,
        }
    }

    /// On-site number variance `<n^2> - <n>^2`.
    pub fn number_variance(&self) -> f64 {
        self.n2 - self.density * self.density
    }

    pub fn top_weight(&self) -> f64 {
        let f = self.amplitudes[self.amplitudes.len() - 1];
        f * f
    }
}

struct Moments {
    phi: f64,
    n: f64,
    b2: f64,
    n2: f64,
}

impl Moments {
    fn of(f: &[f64]) -> Self {
        let mut m = Moments {
            phi: 0.0,
            n: 0.0,
            b2: 0.0,
            n2: 0.0,
        };
        for n in 0..f.len() {
            let nf = n as f64;
            m.n += f[n] * f[n] * nf;
            m.n2 += f[n] * f[n] * nf * nf;
            if n + 1 < f.len() {
                m.phi += f[n] * f[n + 1] * (nf + 1.0).sqrt();
            }
            if n + 2 < f.len() {
                m.b2 += f[n] * f[n + 2] * ((nf + 1.0) * (nf + 2.0)).sqrt();
            }
        }
        m
    }
}

/// Ground state of the site Hamiltonian at mean field `phi`; returns `(energy, amplitudes)`.
fn site_ground_state(p: &BoseHubbardParams, phi: f64) -> Result<(f64, Vec<f64>)> {
    let dim = p.n_max + 1;
    let zj = p.zj();
    let h = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let n = i as f64;
            0.5 * p.interaction * n * (n - 1.0) - p.chemical_potential * n + zj * phi * phi
        } else if i.abs_diff(j) == 1 {
            -zj * phi * (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::try_new(h, 1e-15, 10_000).ok_or_else(|| Error::NotConverged {
        what: format!("site Hamiltonian at Phi = {phi}"),
        residual: f64::NAN,
    })?;
    let (idx, &e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("dim > 0");
    let mut f: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    if f.iter().sum::<f64>() < 0.0 {
        f.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((e, f))
}

/// `<b>` in the ground state of `h(phi)`.
fn regenerated(p: &BoseHubbardParams, phi: f64) -> Result<f64> {
    let (_, f) = site_ground_state(p, phi)?;
    Ok(Moments::of(&f).phi)
}

const DAMPING: f64 = 0.5;
/// Damped steps before switching to a bracketed solve of `<b>(Phi) = Phi`.
const DAMPED_STEPS: usize = 2_000;

/// Fixed point on the `Phi > 0` branch starting from `phi0`.
fn condensed_branch(p: &BoseHubbardParams, phi0: f64, tol: f64, max_iter: usize) -> Result<(f64, usize, f64)> {
    let mut phi = phi0;
    let mut step = f64::INFINITY;
    let damped = DAMPED_STEPS.min(max_iter);
    for it in 0..damped {
        let next = DAMPING * phi + (1.0 - DAMPING) * regenerated(p, phi)?;
        step = (next - phi).abs();
        phi = next;
        if step <= tol {
            return Ok((phi, it + 1, step));
        }
    }
    if phi <= tol {
        // collapsing onto the normal branch; keep iterating to a clean zero
        for it in damped..max_iter {
            let next = DAMPING * phi + (1.0 - DAMPING) * regenerated(p, phi)?;
            step = (next - phi).abs();
            phi = next;
            if step <= tol {
                return Ok((phi, it + 1, step));
            }
        }
        return Err(Error::NotConverged {
            what: "Gutzwiller fixed point".into(),
            residual: step,
        });
    }

    // Near the lobe boundary and at vanishing U the contraction factor tends to 1;
    // finish on a sign-changing bracket of g(Phi) = <b>(Phi) - Phi.
    let g = |x: f64| regenerated(p, x).map(|b| b - x);
    let mut lo = phi;
    let mut hi = phi;
    let g0 = g(phi)?;
    if g0 == 0.0 {
        return Ok((phi, damped, 0.0));
    }
    let mut factor = 1.0 + 1e-6;
    let mut found = false;
    for _ in 0..200 {
        if g0 > 0.0 {
            hi = phi * factor;
        } else {
            lo = phi / factor;
        }
        let (glo, ghi) = (g(lo)?, g(hi)?);
        if glo >= 0.0 && ghi <= 0.0 {
            found = true;
            break;
        }
        if g0 < 0.0 && lo < 1e-12 {
            // g < 0 down to Phi -> 0: the normal state is the only fixed point
            return Ok((0.0, damped, 0.0));
        }
        factor = 1.0 + (factor - 1.0) * 2.0;
    }
    if !found {
        return Err(Error::NotConverged {
            what: "Gutzwiller fixed point (no bracket)".into(),
            residual: step,
        });
    }
    let mut iters = damped;
    let mut glo = g(lo)?;
    while hi - lo > tol && iters < max_iter {
        // bisection guarded secant
        let ghi = g(hi)?;
        let mut mid = if glo != ghi {
            lo - glo * (hi - lo) / (ghi - glo)
        } else {
            0.5 * (lo + hi)
        };
        if !(mid > lo && mid < hi) || iters.is_multiple_of(3) {
            mid = 0.5 * (lo + hi);
        }
        let gm = g(mid)?;
        if gm >= 0.0 {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    if hi - lo > tol {
        return Err(Error::NotConverged {
            what: "Gutzwiller fixed point".into(),
            residual: hi - lo,
        });
    }
    Ok((0.5 * (lo + hi), iters, hi - lo))
}

/// Self-consistent mean field from `phi0`, without the comparison against `Phi = 0`.
pub fn solve_gutzwiller_from(
    params: BoseHubbardParams,
    phi0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<GutzwillerState> {
    params.validate()?;
    let (phi, iterations, residual) = if phi0 == 0.0 || params.hopping == 0.0 {
        (0.0, 0, 0.0)
    } else {
        condensed_branch(&params, phi0, tol, max_iter)?
    };
    let (_, f) = site_ground_state(&params, phi)?;
    let mut state = GutzwillerState::from_amplitudes(params, f);
    state.iterations = iterations;
    state.residual = residual;
    if state.phi < tol {
        state.phi = state.phi.max(0.0);
    }
    Ok(state)
}

/// Lower-energy fixed point among the `Phi = 0` and `Phi > 0` branches.
///
/// The Fock cutoff is doubled until the top level carries less than [`CUTOFF_WEIGHT`].
pub fn solve_gutzwiller(params: BoseHubbardParams, tol: f64, max_iter: usize) -> Result<GutzwillerState> {
    if !(tol <= 1e-10) {
        return Err(Error::invalid("tol", "tolerance <= 1e-10 required"));
    }
    let mut params = params;
    loop {
        match solve_once(params, tol, max_iter) {
            Err(Error::FockCutoff { n_max, weight }) => {
                if n_max >= 96 {
                    return Err(Error::FockCutoff { n_max, weight });
                }
                log::debug!("doubling Fock cutoff from {n_max}");
                params.n_max = 2 * n_max;
            }
            other => return other,
        }
    }
}

fn solve_once(params: BoseHubbardParams, tol: f64, max_iter: usize) -> Result<GutzwillerState> {
    let normal = solve_gutzwiller_from(params, 0.0, tol, max_iter)?;
    let best = if params.hopping > 0.0 {
        let condensed = solve_gutzwiller_from(params, 0.5, tol, max_iter)?;
        let scale = normal.energy.abs().max(condensed.energy.abs()).max(1e-300);
        if condensed.phi > 0.0 && condensed.energy < normal.energy - 1e-12 * scale {
            condensed
        } else {
            normal
        }
    } else {
        normal
    };
    if best.top_weight() >= CUTOFF_WEIGHT {
        return Err(Error::FockCutoff {
            n_max: params.n_max,
            weight: best.top_weight(),
        });
    }
    Ok(best)
}

/// `(dX^b_alpha)^2` from the closed form, valid for `alpha` in `{0, pi/2}`.
///
/// `1/4 + [(n - Phi^2) ± (<b^2> - Phi^2)] / 2`, upper sign for `alpha = 0`.
pub fn matter_quadrature_variance(state: &GutzwillerState, amplitude_quadrature: bool) -> f64 {
    let p2 = state.phi * state.phi;
    let sign = if amplitude_quadrature { 1.0 } else { -1.0 };
    0.25 + ((state.density - p2) + sign * (state.b2 - p2)) / 2.0
}

/// `<X^2> - <X>^2` for `X = (b e^{-i alpha} + b^+ e^{i alpha}) / 2`, evaluated in the Fock basis.
pub fn matter_quadrature_variance_at(state: &GutzwillerState, alpha: f64) -> f64 {
    // pad by one level so b b^+ acts exactly on the truncated state
    let f = &state.amplitudes;
    let dim = f.len() + 1;
    let (c, s) = (alpha.cos(), alpha.sin());
    // X = (c (b + b^+) + i s (b^+ - b)) / 2 = Xr + i Xi with real symmetric Xr and antisymmetric Xi
    let mut xr = DMatrix::<f64>::zeros(dim, dim);
    let mut xi = DMatrix::<f64>::zeros(dim, dim);
    for n in 1..dim {
        let a = (n as f64).sqrt() / 2.0;
        xr[(n - 1, n)] = c * a;
        xr[(n, n - 1)] = c * a;
        xi[(n, n - 1)] = s * a;
        xi[(n - 1, n)] = -s * a;
    }
    let mut v = nalgebra::DVector::<f64>::zeros(dim);
    for (i, fi) in f.iter().enumerate() {
        v[i] = *fi;
    }
    let re = &xr * &v;
    let im = &xi * &v;
    let mean = v.dot(&re);
    let second = re.dot(&re) + im.dot(&im);
    second - mean * mean
}

/// `C~ = 2 |C|^2 (K - 1) F[W1](pi/d)^2`.
pub fn intensity_scale(k_sites: usize, c_abs: f64, ft_w1_pi: f64) -> f64 {
    2.0 * c_abs * c_abs * (k_sites as f64 - 1.0) * ft_w1_pi * ft_w1_pi
}

/// Photon number in the diffraction minimum:
/// `C~ [(<b^2> - Phi^2)^2 + (n - Phi^2)(1 + n - Phi^2)]`.
pub fn min_intensity(state: &GutzwillerState, k_sites: usize, c_abs: f64, ft_w1_pi: f64) -> f64 {
    let p2 = state.phi * state.phi;
    let a = state.b2 - p2;
    let b = state.density - p2;
    intensity_scale(k_sites, c_abs, ft_w1_pi) * (a * a + b * (1.0 + b))
}

/// `<X^F_0> = Phi^2 F[W1](2 pi/d) (K - 1)` in the diffraction maximum.
pub fn max_quadrature_mean(state: &GutzwillerState, k_sites: usize, ft_w1_2pi: f64) -> f64 {
    state.phi * state.phi * ft_w1_2pi * (k_sites as f64 - 1.0)
}

/// `mu/zJ` on the unit-density path at `U/zJ = u_over_zj`: the centre of the
/// interval where `n = 1`, which is a single point in the superfluid.
pub fn unit_density_mu(u_over_zj: f64, coordination: usize, tol: f64, max_iter: usize) -> Result<f64> {
    let solve = |mu: f64| -> Result<GutzwillerState> {
        let p = BoseHubbardParams::in_zj_units(u_over_zj, mu, coordination)?;
        solve_gutzwiller(p, tol, max_iter)
    };
    // lobe edges are the roots of x^2 + (t - 1) x + t = 0, x = mu/U, t = zJ/U; centre at x = (1 - t)/2
    let centre = (u_over_zj - 1.0) / 2.0;
    if u_over_zj > 3.0 + 8f64.sqrt() {
        let s = solve(centre)?;
        if s.phi == 0.0 && (s.density - 1.0).abs() < 1e-9 {
            return Ok(centre);
        }
    }
    // n(mu) - 1 is continuous and increasing off the lobe: Illinois false position
    let g = |mu: f64| solve(mu).map(|s| s.density - 1.0);
    let (mut a, mut b) = (-1.0, u_over_zj.max(1.0) + 1.0);
    let (mut ga, mut gb) = (g(a)?, g(b)?);
    while gb <= 0.0 {
        b = 2.0 * b + 1.0;
        gb = g(b)?;
    }
    if ga >= 0.0 {
        return Err(Error::NotConverged {
            what: "unit-density chemical potential (no bracket)".into(),
            residual: ga,
        });
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * gb - b * ga) / (gb - ga);
        let gc = g(c)?;
        if gc.abs() < 1e-12 || (b - a).abs() < 1e-12 * (1.0 + c.abs()) {
            return Ok(c);
        }
        if gc < 0.0 {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NotConverged {
        what: "unit-density chemical potential".into(),
        residual: b - a,
    })
}

/// Critical `zJ/U` of the decoupled model for the lobe with filling `n` at `mu/U`.
pub fn lobe_boundary_zj_over_u(n: usize, mu_over_u: f64) -> f64 {
    let n = n as f64;
    (n - mu_over_u) * (mu_over_u - n + 1.0) / (1.0 + mu_over_u)
}
