//! Luttinger parameter read off the small-angle slope of R on a ring.

use latscat::ed1d::{ground_state, ChainSpec};
use latscat::observables::luttinger_parameter;

fn main() -> latscat::Result<()> {
    let xs: Vec<f64> = (0..8).map(|i| i as f64).collect();
    for u in [0.5, 1.0, 2.0, 3.0, 4.0] {
        let s = ground_state(&ChainSpec::new(8, 8, u).periodic())?;
        let est = luttinger_parameter(&s.correlations.dd, &xs)?;
        println!(
            "U/2J = {u}: K_b = {:.4} (reliable {}, in regime {})",
            est.k_b, est.reliable, est.in_regime
        );
    }
    Ok(())
}
