//! First and second order response of the two Rényi-2 diagrams to the
//! channel angle, compared against the thermal propagator.

use syk_replica::channels::{Diagram, Replicas};
use syk_replica::suite::{fit_gamma, threshold_phi_grid};
use syk_replica::*;

fn main() -> Result<()> {
    let (beta, dtau) = (20.0, 0.2);
    let m = (beta / dtau) as usize;
    let params = ModelParams::syk(1.0);
    let reps = Replicas::new(beta, m, params, 2, SolverConfig::default())?;
    let grid = threshold_phi_grid(7, 1.0);
    let lq = reps.landscape(Diagram::Q, &grid[..7])?;
    let lqr = reps.landscape(Diagram::Qr, &grid[..7])?;
    let fit = fit_gamma(&lq, &lqr, beta)?;
    let thermal = solve_thermal(2.0 * beta, 2 * m, &params, &SolverConfig::default(), None)?;
    println!("beta = {beta}, M = {m}");
    println!("d s_qr/dp = {:.2e}", fit.slope_qr);
    println!("d s_q/dp  = {:.6}   -4 G_2beta(beta) = {:.6}", fit.slope_q, -4.0 * thermal.at_offset(m));
    println!("Gamma_Q = {:.4}  Gamma_QR = {:.4}  (in phi: {:.4}, {:.4})", fit.gamma_q, fit.gamma_qr, fit.gamma_q_phi(), fit.gamma_qr_phi());
    println!("predicted onset 1/Gamma_phi = {:.4}", fit.predicted_qc());
    Ok(())
}
