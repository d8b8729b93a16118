//! Coupling coefficients in the diffraction-maximum and -minimum geometries.

use latscat::optics::{coupling_coefficients, density_suppression_phase, Geometry};
use latscat::wannier::{build_wannier, solve_bloch_band, LatticePotential};

fn main() -> latscat::Result<()> {
    let basis = build_wannier(&solve_bloch_band(LatticePotential::new(5.0)?, 21, 64)?)?;
    let phase = density_suppression_phase(&basis)?;
    println!("density-suppression phase: {phase:.6} rad");
    for (name, g) in [
        ("max, suppressed", Geometry::Max { phase }),
        ("max, phase 0", Geometry::Max { phase: 0.0 }),
        ("min, nodes", Geometry::min_nodes()),
    ] {
        let (probe, detected) = g.modes(basis.period());
        let c = coupling_coefficients(&basis, &probe, &detected, 6, 6)?;
        println!("{name}:");
        for (i, j) in c.density.iter().enumerate() {
            let bond = c.bond.get(i).map_or(String::new(), |b| {
                format!("   J_{i}{} = {:+.4e}{:+.4e}i", i + 1, b.re, b.im)
            });
            println!("  J_{i}{i} = {:+.4e}{:+.4e}i{bond}", j.re, j.im);
        }
    }
    Ok(())
}
