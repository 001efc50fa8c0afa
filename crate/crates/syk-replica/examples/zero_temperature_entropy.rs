//! Thermal entropy density and its quadratic T -> 0 extrapolation.

use syk_replica::analysis::extrapolate_zero_t;
use syk_replica::solver::entropy_density;
use syk_replica::*;

fn s0(params: ModelParams) -> Result<(Vec<(f64, f64)>, f64, f64)> {
    let cfg = SolverConfig::default();
    let pts = [20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0]
        .iter()
        .map(|&b| Ok((b, entropy_density(b, (b / 0.1) as usize, &params, &cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    let e = extrapolate_zero_t(&pts, 2)?;
    Ok((pts, e.value, e.sigma))
}

fn main() -> Result<()> {
    let (pts, v, s) = s0(ModelParams::syk(1.0))?;
    for (b, x) in &pts {
        println!("SYK beta={b:>4}  s={x:.6}");
    }
    println!("SYK s0 = {v:.5} +- {s:.1e}");
    for gamma in [0.5, 1.0, 4.236, 20.0] {
        let (_, v, s) = s0(ModelParams::lowrank(1.0, gamma))?;
        println!("low-rank gamma={gamma:>6}  s0 = {v:.5} +- {s:.1e}");
    }
    Ok(())
}
