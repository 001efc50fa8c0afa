//! Both channels at once: a small parity-breaking rate shifts the HS
//! landscape and removes the plateau.

use syk_replica::channels::{entropies_both, Replicas};
use syk_replica::suite::threshold_phi_grid;
use syk_replica::*;

fn main() -> Result<()> {
    let reps = Replicas::new(10.0, 50, ModelParams::syk(1.0), 2, SolverConfig::default())?;
    let phis = threshold_phi_grid(17, 1.0);
    println!("{:>6} {:>6} {:>10} {:>10} {:>9}", "p", "q", "ic/N", "phi*", "converged");
    for p in [0.0, 0.02, 0.05] {
        for q in [0.0, 0.05, 0.1, 0.2] {
            let r = entropies_both(&reps, p, q, &phis)?;
            println!("{p:>6.2} {q:>6.2} {:>10.5} {:>10.5} {:>9}", r.ic_density, r.phi_star, r.converged);
        }
    }
    Ok(())
}
