//! Parity-conserving noise: the HS minimizer of the strongly symmetric
//! landscape stays at zero up to q_c, and the coherent information holds
//! near its clean value until then.

use syk_replica::channels::{entropies_from_landscapes, Diagram, Replicas};
use syk_replica::suite::{fit_gamma, ssb_onset, threshold_phi_grid, uniform_grid};
use syk_replica::*;

fn main() -> Result<()> {
    let beta = 20.0;
    let reps = Replicas::new(beta, 100, ModelParams::syk(1.0), 2, SolverConfig::default())?;
    let phis = threshold_phi_grid(21, 0.8);
    let lq = reps.landscape(Diagram::Q, &phis)?;
    let lqr = reps.landscape(Diagram::Qr, &phis)?;
    let fit = fit_gamma(&lq, &lqr, beta)?;
    let (q_c, _) = ssb_onset(&lq, &uniform_grid(0.005, 80))?;
    println!("q_c = {q_c:.5}, 1/Gamma_phi = {:.5}", fit.predicted_qc());
    println!("{:>6} {:>10} {:>10} {:>10} {:>5}", "q", "ic/N", "phi*", "phi*_sym", "ssb");
    for k in 1..=16 {
        let q = 0.02 * k as f64;
        let r = entropies_from_landscapes(&lq, &lqr, 0.0, q)?;
        println!("{q:>6.2} {:>10.5} {:>10.5} {:>10.5} {:>5}", r.ic_density, r.phi_star, r.phi_star_sym, r.ssb);
    }
    Ok(())
}
