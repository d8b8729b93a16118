//! Explicit many-site product states built from one Gutzwiller site.
//!
//! Operators act in the full tensor-product Fock space, padded by one level so a
//! single application of `b_i^+ b_j` is exact on the truncated state.

use num_complex::Complex64;

use super::GutzwillerState;
use crate::error::{Error, Result};
use crate::operator::{FExpectations, LightOperator};

/// Largest tensor-product dimension handled.
pub const MAX_PRODUCT_DIM: usize = 4_000_000;

#[derive(Debug, Clone)]
pub struct ProductState {
    sites: usize,
    local_dim: usize,
    vector: Vec<f64>,
}

impl ProductState {
    /// `K` copies of the site state.
    pub fn uniform(state: &GutzwillerState, sites: usize) -> Result<Self> {
        let local_dim = state.amplitudes.len() + 1;
        let dim = (local_dim as u128).pow(sites as u32);
        if sites == 0 || dim > MAX_PRODUCT_DIM as u128 {
            return Err(Error::DimensionOverflow {
                dim,
                limit: MAX_PRODUCT_DIM as u128,
            });
        }
        let mut f = state.amplitudes.clone();
        f.push(0.0);
        let mut vector = vec![1.0];
        for _ in 0..sites {
            let mut next = Vec::with_capacity(vector.len() * local_dim);
            for a in &vector {
                next.extend(f.iter().map(|b| a * b));
            }
            vector = next;
        }
        Ok(Self {
            sites,
            local_dim,
            vector,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    /// Stride of site `i` in the mixed-radix index (site 0 most significant).
    fn stride(&self, i: usize) -> usize {
        self.local_dim.pow((self.sites - 1 - i) as u32)
    }

    fn occupation(&self, index: usize, i: usize) -> usize {
        (index / self.stride(i)) % self.local_dim
    }

    /// `F psi` for an operator on sites `0..K`.
    pub fn apply(&self, op: &LightOperator) -> Result<Vec<Complex64>> {
        if op.max_site().is_some_and(|m| m >= self.sites) {
            return Err(Error::SiteWindow(format!(
                "operator touches site {:?} of a {}-site product state",
                op.max_site(),
                self.sites
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.vector.len()];
        for (idx, &amp) in self.vector.iter().enumerate() {
            if amp == 0.0 {
                continue;
            }
            for &(i, a) in &op.density {
                out[idx] += a * (self.occupation(idx, i) as f64 * amp);
            }
            for &(i, j, c) in &op.bonds {
                for (to, from) in [(i, j), (j, i)] {
                    let nf = self.occupation(idx, from);
                    let nt = self.occupation(idx, to);
                    if nf == 0 || nt + 1 >= self.local_dim {
                        continue;
                    }
                    let target = idx - self.stride(from) + self.stride(to);
                    let me = ((nf * (nt + 1)) as f64).sqrt();
                    out[target] += c * (me * amp);
                }
            }
        }
        Ok(out)
    }

    pub fn expectations(&self, op: &LightOperator, beta: f64) -> Result<FExpectations> {
        let f = self.apply(op)?;
        let g = self.apply(&op.adjoint())?;
        Ok(FExpectations::from_images(beta, &self.vector, &f, &g))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Local {
    Id,
    N,
    B,
    Bd,
}

impl Local {
    fn adjoint(self) -> Self {
        match self {
            Local::B => Local::Bd,
            Local::Bd => Local::B,
            other => other,
        }
    }
}

/// Images `A f` of the padded site state under the four local operators.
struct SiteImages {
    id: Vec<f64>,
    n: Vec<f64>,
    b: Vec<f64>,
    bd: Vec<f64>,
}

impl SiteImages {
    fn new(state: &GutzwillerState) -> Self {
        let mut f = state.amplitudes.clone();
        f.push(0.0);
        let d = f.len();
        let n = (0..d).map(|k| k as f64 * f[k]).collect();
        let b = (0..d)
            .map(|k| {
                if k + 1 < d {
                    ((k + 1) as f64).sqrt() * f[k + 1]
                } else {
                    0.0
                }
            })
            .collect();
        let bd = (0..d)
            .map(|k| if k > 0 { (k as f64).sqrt() * f[k - 1] } else { 0.0 })
            .collect();
        Self { id: f, n, b, bd }
    }

    fn get(&self, op: Local) -> &[f64] {
        match op {
            Local::Id => &self.id,
            Local::N => &self.n,
            Local::B => &self.b,
            Local::Bd => &self.bd,
        }
    }

    /// `<f| A^+ B |f>`
    fn pair(&self, a: Local, b: Local) -> f64 {
        self.get(a).iter().zip(self.get(b)).map(|(x, y)| x * y).sum()
    }
}

type Term = (Complex64, Vec<(usize, Local)>);

fn terms_of(op: &LightOperator) -> Vec<Term> {
    let mut t: Vec<Term> = op.density.iter().map(|&(i, a)| (a, vec![(i, Local::N)])).collect();
    for &(i, j, c) in &op.bonds {
        t.push((c, vec![(i, Local::Bd), (j, Local::B)]));
        t.push((c, vec![(j, Local::Bd), (i, Local::B)]));
    }
    t
}

fn adjoint_terms(terms: &[Term]) -> Vec<Term> {
    terms
        .iter()
        .map(|(c, ops)| (c.conj(), ops.iter().map(|&(s, o)| (s, o.adjoint())).collect()))
        .collect()
}

fn local_at(ops: &[(usize, Local)], site: usize) -> Local {
    ops.iter().find(|(s, _)| *s == site).map_or(Local::Id, |p| p.1)
}

/// `<T_s^+ T_t>` for a uniform product state.
fn pair_expectation(img: &SiteImages, s: &[(usize, Local)], t: &[(usize, Local)]) -> f64 {
    let mut sites: Vec<usize> = s.iter().chain(t).map(|p| p.0).collect();
    sites.sort_unstable();
    sites.dedup();
    sites
        .into_iter()
        .map(|site| img.pair(local_at(s, site), local_at(t, site)))
        .product()
}

fn mean_of(img: &SiteImages, terms: &[Term]) -> Complex64 {
    terms.iter().map(|(c, ops)| c * pair_expectation(img, &[], ops)).sum()
}

fn second_of(img: &SiteImages, terms: &[Term]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (cs, s) in terms {
        for (ct, t) in terms {
            acc += cs.conj() * ct * pair_expectation(img, s, t);
        }
    }
    acc.re
}

/// Moments of `F` on an infinite uniform Gutzwiller product state, evaluated
/// site by site without building the tensor-product space.
pub fn product_expectations(state: &GutzwillerState, op: &LightOperator, beta: f64) -> FExpectations {
    let img = SiteImages::new(state);
    let f = terms_of(op);
    let fd = adjoint_terms(&f);
    let mean = mean_of(&img, &f);
    let intensity = second_of(&img, &f);
    let (em, ep) = (Complex64::from_polar(0.5, -beta), Complex64::from_polar(0.5, beta));
    let x: Vec<Term> = f
        .iter()
        .map(|(c, o)| (c * em, o.clone()))
        .chain(fd.iter().map(|(c, o)| (c * ep, o.clone())))
        .collect();
    FExpectations {
        beta,
        mean,
        intensity,
        quadrature_mean: mean_of(&img, &x).re,
        quadrature_second: second_of(&img, &x),
    }
}
