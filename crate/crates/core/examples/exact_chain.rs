//! Exact ground state of a short Bose-Hubbard chain and its correlations.

use latscat::ed1d::{ground_state, ChainSpec};

fn main() -> latscat::Result<()> {
    for u in [0.0, 2.0, 10.0] {
        let s = ground_state(&ChainSpec::new(8, 8, u))?;
        let c = &s.correlations;
        println!(
            "U/2J = {u}: E = {:.6}, dim = {}, residual {:.1e}",
            s.energy,
            s.basis.len(),
            s.residual
        );
        println!(
            "  <n_i>        {:?}",
            c.density.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>()
        );
        println!(
            "  dd(r) by r   {:?}",
            c.by_distance(false)
                .iter()
                .map(|x| (x * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        );
        println!(
            "  <b+b>(r)     {:?}",
            c.by_distance(true)
                .iter()
                .map(|x| (x * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        );
    }
    Ok(())
}
