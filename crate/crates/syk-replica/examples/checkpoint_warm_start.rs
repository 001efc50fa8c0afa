//! Save a converged field, reload it, and use it to warm start a nearby
//! solve.

use syk_replica::cli::{read_checkpoint, write_checkpoint, CheckpointHeader};
use syk_replica::*;

fn main() -> Result<()> {
    let params = ModelParams::syk(1.0);
    let kind = ContourKind::Renyi2Q;
    let spec = build_contour(kind, 8.0, 64)?;
    let cold = solve(&spec, &params, 0.30, &SolverConfig::default())?;
    let path = std::env::temp_dir().join("syk_replica_example.sykgf");
    write_checkpoint(&path, &CheckpointHeader::new(kind, 8.0, 64, params, 0.30), &cold.g)?;
    let loaded = read_checkpoint(&path)?;
    println!("header: {}", serde_json::to_string(&loaded.header)?);
    println!("round trip exact: {}", loaded.g == cold.g);
    let cfg = SolverConfig { warm_start: Some(loaded.g), ..SolverConfig::default() };
    let warm = solve(&spec, &params, 0.32, &cfg)?;
    let fresh = solve(&spec, &params, 0.32, &SolverConfig::default())?;
    println!("theta 0.32: warm {} iterations, cold {} iterations, actions {:.12} / {:.12}", warm.iterations, fresh.iterations, warm.action, fresh.action);
    std::fs::remove_file(&path)?;
    Ok(())
}
