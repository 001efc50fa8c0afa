//! Rényi-2 coherent information under parity-breaking noise: it drops
//! linearly from p = 0 with no plateau.

use syk_replica::channels::{baseline_no_encoding, entropies_breaking, Replicas};
use syk_replica::*;

fn main() -> Result<()> {
    let reps = Replicas::new(20.0, 100, ModelParams::syk(1.0), 2, SolverConfig::default())?;
    println!("{:>6} {:>12} {:>12} {:>12}", "p", "ic/N", "s_q", "bell pair");
    for k in 0..=10 {
        let p = 0.02 * k as f64;
        let r = entropies_breaking(&reps, p)?;
        println!("{p:>6.2} {:>12.6} {:>12.6} {:>12.6}", r.ic_density, r.s_q, baseline_no_encoding(p, 0.0)?);
    }
    Ok(())
}
