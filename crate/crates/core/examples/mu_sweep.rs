//! Grand-canonical sweep in chemical potential at fixed interaction.

use std::f64::consts::PI;

use latscat::ed1d::{ground_state, ChainSpec, SectorEnergies};
use latscat::observables::{angular_grid, density_scan, extract_summary, SummaryOptions};

fn main() -> latscat::Result<()> {
    let spec = ChainSpec::new(6, 6, 3.0);
    let sectors = SectorEnergies::compute(&spec, 12)?;
    let xs: Vec<f64> = (0..6).map(|i| i as f64).collect();
    let grid = angular_grid(256);
    let mut last = usize::MAX;
    for i in 0..=40 {
        let mu = -1.0 + 5.0 * i as f64 / 40.0;
        let n = sectors.best_sector(mu * 2.0 * spec.hopping);
        if n == last {
            continue;
        }
        last = n;
        let s = ground_state(&spec.with_bosons(n))?;
        let scan = density_scan(&s.correlations.dd, &xs, 0.0, PI, &grid)?;
        let r_max = extract_summary(&scan, SummaryOptions::default()).map_or(0.0, |sm| sm.r_max);
        println!("from mu/2J = {mu:>5.2}: N = {n:>2}, R_max = {r_max:.4}");
    }
    Ok(())
}
