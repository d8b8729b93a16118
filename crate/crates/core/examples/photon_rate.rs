//! Scattered photon rate for typical alkali parameters.

use latscat::observables::photon_rate;

fn main() -> latscat::Result<()> {
    let (omega0, delta_a, gamma) = (2.36e8, 6.283e9, 3.81e7);
    for k in [10, 50, 150, 500] {
        let r = photon_rate(omega0, delta_a, gamma, k, 1.0)?;
        println!(
            "K = {k:>3}: {:.3e} photons/s (off resonant: {})",
            r.rate, r.off_resonant
        );
    }
    Ok(())
}
