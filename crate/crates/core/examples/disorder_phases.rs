//! Superfluid, Mott and Bose-glass classification on a small disorder grid.

use latscat::ed1d::ChainSpec;
use latscat::phasemap::{sweep_disorder, Axis, SweepSettings};

fn main() -> latscat::Result<()> {
    let u = Axis::new("U/2J", 0.5, 10.0, 6)?;
    let v = Axis::new("V/2J", 0.0, 5.0, 6)?;
    let grid = sweep_disorder(&ChainSpec::new(6, 6, 0.0), &u, &v, 0.77, 0.0, &SweepSettings::default())?;
    println!("rows: V/2J descending, columns: U/2J ascending");
    for j in (0..v.count).rev() {
        let row: Vec<String> = (0..u.count)
            .map(|i| grid.cell(i, j).label.map_or("??".into(), |p| format!("{p:>2}")))
            .collect();
        println!("{:>5.2}  {}", v.values()[j], row.join(" "));
    }
    Ok(())
}
