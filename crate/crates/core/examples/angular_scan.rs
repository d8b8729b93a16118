//! Angular scan of the quantum addition R for superfluid and Mott chains.

use std::f64::consts::PI;

use latscat::ed1d::{ground_state, ChainSpec};
use latscat::observables::{angular_grid, density_scan, extract_summary, SummaryOptions};

fn main() -> latscat::Result<()> {
    let xs: Vec<f64> = (0..8).map(|i| i as f64).collect();
    let grid = angular_grid(128);
    for u in [0.0, 1.0, 3.0, 10.0] {
        let s = ground_state(&ChainSpec::new(8, 8, u))?;
        let scan = density_scan(&s.correlations.dd, &xs, 0.0, PI, &grid)?;
        let sm = extract_summary(&scan, SummaryOptions::default())?;
        println!("U/2J = {u:>4}: R_max = {:.4}, W_R = {:.4} rad", sm.r_max, sm.w_r);
        let stride = grid.len() / 16;
        let bars: String = scan
            .r
            .iter()
            .step_by(stride)
            .map(|r| [' ', '.', ':', '-', '=', '+', '*', '#'][((r / sm.r_max) * 7.0).round() as usize])
            .collect();
        println!("  |{bars}|");
    }
    Ok(())
}
