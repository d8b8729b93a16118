//! Wannier orbital and its Fourier overlaps for a few lattice depths.

use std::f64::consts::PI;

use latscat::wannier::{build_wannier, solve_bloch_band, LatticePotential, Overlap};

fn main() -> latscat::Result<()> {
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12}",
        "V0", "J/E_R", "F[W0](2pi)", "F[W1](pi)", "F[W1](2pi)"
    );
    for depth in [5.0, 8.0, 12.0, 20.0] {
        let bloch = solve_bloch_band(LatticePotential::new(depth)?, 21, 64)?;
        let b = build_wannier(&bloch)?;
        println!(
            "{depth:>6} {:>12.5e} {:>12.6} {:>12.6} {:>12.6}",
            b.hopping_integral(),
            b.fourier_overlap(Overlap::Density, 2.0 * PI)?,
            b.fourier_overlap(Overlap::Bond, PI)?,
            b.fourier_overlap(Overlap::Bond, 2.0 * PI)?,
        );
    }
    Ok(())
}
