//! Epsilon thresholds across temperatures with the size mapping
//! beta = c N^alpha, and the large-N asymptotic forms.

use syk_replica::analysis::{beta_of_n, breaking_threshold_asymptotic, conserving_threshold_asymptotic};
use syk_replica::suite::{run_suite, threshold_phi_grid, uniform_grid, SuiteConfig};
use syk_replica::*;

fn main() -> Result<()> {
    let (c, alpha) = (1.0, 0.9);
    let cfg = SuiteConfig {
        renyi_n: 2,
        betas: vec![10.0, 15.0, 20.0],
        dtau: 0.25,
        params: ModelParams::syk(1.0),
        phis: threshold_phi_grid(17, 0.8),
        q_grid: uniform_grid(0.01, 40),
        p_grid: uniform_grid(0.01, 30),
        order: 2,
    };
    let res = run_suite(&cfg, &SolverConfig::default())?;
    println!("{:>6} {:>8} {:>8} {:>8} {:>8}", "beta", "N", "q_c", "q_th", "p_th");
    for p in &res.points {
        let n = (p.beta / c).powf(1.0 / alpha);
        assert!((beta_of_n(n, c, alpha) - p.beta).abs() < 1e-9);
        let ((q_th, _), (p_th, _)) = p.thresholds(0.05)?;
        println!("{:>6} {n:>8.1} {:>8.4} {:>8.4} {:>8.4}", p.beta, p.q_c, q_th, p_th);
    }
    println!("T -> 0: clean {:.4}, q_c {:.4}", res.clean_ic.value, res.q_c.value);
    let g = res.gamma_q_phi.value;
    for n in [1e2, 1e4, 1e6] {
        println!(
            "N={n:e}: breaking {:.3e}, conserving {:.4}",
            breaking_threshold_asymptotic(n, alpha, 0.25, 0.5, 5.0),
            conserving_threshold_asymptotic(n, alpha, 0.25, 0.5, g)
        );
    }
    Ok(())
}
