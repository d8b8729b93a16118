//! Site-resolved form of the light-coupled operator `F = D + B` and its moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::optics::CouplingCoefficients;

/// `F = sum_i a_i n_i + sum_(i,j) c_ij (b_i^+ b_j + b_j^+ b_i)` on chain indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LightOperator {
    pub density: Vec<(usize, Complex64)>,
    pub bonds: Vec<(usize, usize, Complex64)>,
}

impl LightOperator {
    pub fn from_coefficients(c: &CouplingCoefficients) -> Self {
        let density = c.sites.iter().copied().zip(c.density.iter().copied()).collect();
        let bonds = c.sites.windows(2).zip(&c.bond).map(|(w, j)| (w[0], w[1], *j)).collect();
        Self { density, bonds }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            density: self.density.iter().map(|(i, a)| (*i, a.conj())).collect(),
            bonds: self.bonds.iter().map(|(i, j, c)| (*i, *j, c.conj())).collect(),
        }
    }

    /// Largest site index touched.
    pub fn max_site(&self) -> Option<usize> {
        self.density
            .iter()
            .map(|(i, _)| *i)
            .chain(self.bonds.iter().flat_map(|(i, j, _)| [*i, *j]))
            .max()
    }
}

/// Expectation values of `F` and of the quadrature `X^F_beta = (F e^{-i beta} + F^+ e^{i beta}) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FExpectations {
    pub beta: f64,
    /// `<F>`
    pub mean: Complex64,
    /// `<F^+ F>`
    pub intensity: f64,
    /// `<X^F_beta>`
    pub quadrature_mean: f64,
    /// `<(X^F_beta)^2>`
    pub quadrature_second: f64,
}

impl FExpectations {
    /// Assembles the four scalars from a real state and the images `F psi`, `F^+ psi`.
    pub fn from_images(beta: f64, psi: &[f64], f_psi: &[Complex64], fdag_psi: &[Complex64]) -> Self {
        let mean: Complex64 = psi.iter().zip(f_psi).map(|(a, b)| b * a).sum();
        let intensity: f64 = f_psi.iter().map(|z| z.norm_sqr()).sum();
        let (em, ep) = (Complex64::from_polar(0.5, -beta), Complex64::from_polar(0.5, beta));
        let mut x_mean = 0.0;
        let mut x_sq = 0.0;
        for ((a, f), g) in psi.iter().zip(f_psi).zip(fdag_psi) {
            let x = em * f + ep * g;
            x_mean += a * x.re;
            x_sq += x.norm_sqr();
        }
        Self {
            beta,
            mean,
            intensity,
            quadrature_mean: x_mean,
            quadrature_second: x_sq,
        }
    }

    /// Quantum addition `R = <F^+ F> - |<F>|^2`.
    pub fn quantum_addition(&self) -> f64 {
        self.intensity - self.mean.norm_sqr()
    }

    /// `(dX^F_beta)^2`
    pub fn quadrature_variance(&self) -> f64 {
        self.quadrature_second - self.quadrature_mean * self.quadrature_mean
    }
}
