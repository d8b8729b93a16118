//! Mean-field scattering over the sphere of detection directions.

use std::f64::consts::PI;

use latscat::gutzwiller::{solve_gutzwiller, BoseHubbardParams};
use latscat::observables::{mf_angular_map_3d, sphere_grid};
use latscat::optics::{LightMode, ModeKind};

fn main() -> latscat::Result<()> {
    let s = solve_gutzwiller(BoseHubbardParams::in_zj_units(1e-3, 1e-3 - 1.0, 6)?, 1e-12, 200_000)?;
    let dir: [f64; 3] = [0.48, 0.6, 0.64];
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let probe = LightMode::travelling(dir.map(|x| x * PI / norm), 0.0)?;
    let (theta, phi) = sphere_grid(12);
    for phase in [0.0, PI / 2.0] {
        let m = mf_angular_map_3d(
            s.number_variance(),
            s.density,
            &probe,
            ModeKind::Standing,
            phase,
            6,
            (&theta, &phi),
        )?;
        println!(
            "phi1 = {phase:.3}: background {:.4}, pole {:.4}, equator (x axis) {:.4}",
            m.background(),
            m.at(0, 0),
            m.at(12, 0)
        );
    }
    Ok(())
}
