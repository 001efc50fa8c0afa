//! Fitted conformal dimension of the thermal propagator. SYK approaches
//! 1/4 as betaJ grows; low-rank SYK follows its rank relation.

use syk_replica::analysis::fit_conformal;
use syk_replica::models::delta_of_gamma;
use syk_replica::*;

fn main() -> Result<()> {
    let cfg = SolverConfig::default();
    println!("SYK, J = 1, dtau = 0.025");
    for beta in [25.0, 50.0, 100.0, 200.0] {
        let m = (beta / 0.025) as usize;
        let t = solve_thermal(beta, m, &ModelParams::syk(1.0), &cfg, None)?;
        let fit = fit_conformal(&t.curve(), beta)?;
        println!("  betaJ={beta:>5}  M={m:>5}  delta={:.5}  0.25 - 0.69/betaJ = {:.5}", fit.delta, 0.25 - 0.69 / beta);
    }
    println!("low-rank, g = 1, beta = 50");
    for gamma in [0.5, 1.0, 4.236, 20.0] {
        let t = solve_thermal(50.0, 2000, &ModelParams::lowrank(1.0, gamma), &cfg, None)?;
        let fit = fit_conformal(&t.curve(), 50.0)?;
        println!("  gamma={gamma:>6}  delta={:.5}  rank relation {:.5}  iterations {}", fit.delta, delta_of_gamma(gamma)?, t.iterations);
    }
    Ok(())
}
