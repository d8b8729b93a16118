//! Gutzwiller states along the unit-density path and their light signals.

use std::f64::consts::PI;

use latscat::gutzwiller::{
    intensity_scale, matter_quadrature_variance, min_intensity, solve_gutzwiller, unit_density_mu, BoseHubbardParams,
};
use latscat::wannier::{build_wannier, solve_bloch_band, LatticePotential, Overlap};

fn main() -> latscat::Result<()> {
    let basis = build_wannier(&solve_bloch_band(LatticePotential::new(5.0)?, 21, 64)?)?;
    let f1 = basis.fourier_overlap(Overlap::Bond, PI)?;
    let k = 100;
    let ct = intensity_scale(k, 1.0, f1);
    println!(
        "{:>8} {:>8} {:>8} {:>10} {:>10} {:>10}",
        "U/zJ", "mu/zJ", "Phi", "var X0", "var Xpi/2", "I/C~"
    );
    for u in [0.5, 1.0, 2.0, 4.0, 5.0, 5.5, 6.0, 8.0, 15.0] {
        let mu = unit_density_mu(u, 6, 1e-12, 200_000)?;
        let s = solve_gutzwiller(BoseHubbardParams::in_zj_units(u, mu, 6)?, 1e-12, 200_000)?;
        println!(
            "{u:>8.2} {mu:>8.4} {:>8.4} {:>10.5} {:>10.5} {:>10.5}",
            s.phi,
            matter_quadrature_variance(&s, true),
            matter_quadrature_variance(&s, false),
            min_intensity(&s, k, 1.0, f1) / ct
        );
    }
    Ok(())
}
