//! The Rényi-3 onset lies above the Rényi-2 one at the same temperature.

use syk_replica::channels::{Diagram, Replicas};
use syk_replica::suite::{ssb_onset, threshold_phi_grid, uniform_grid};
use syk_replica::*;

fn main() -> Result<()> {
    let beta = 20.0;
    for n in [2, 3] {
        let reps = Replicas::new(beta, 100, ModelParams::syk(1.0), n, SolverConfig::default())?;
        let lq = reps.landscape(Diagram::Q, &threshold_phi_grid(21, 0.8))?;
        let (q_c, open) = ssb_onset(&lq, &uniform_grid(0.005, 80))?;
        println!("n = {n}: q_c = {q_c:.5}{}", if open { " (not reached)" } else { "" });
    }
    Ok(())
}
