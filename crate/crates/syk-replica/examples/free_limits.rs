//! Free fermions on every contour: exact actions with and without noise.

use std::f64::consts::LN_2;

use syk_replica::*;

fn main() -> Result<()> {
    let free = ModelParams::syk(0.0);
    let cfg = SolverConfig::default();
    println!("{:<10} {:>6} {:>16} {:>16}", "contour", "theta", "action", "closed form");
    for kind in ContourKind::ALL {
        for theta in [0.0, 0.4] {
            let spec = build_contour(kind, 2.0, 32)?;
            let r = solve(&spec, &free, theta, &cfg)?;
            let exact = match kind {
                ContourKind::Thermal => -0.5 * LN_2,
                ContourKind::Renyi2Q => -0.5 * LN_2 - theta,
                ContourKind::Renyi2Qr => -LN_2 - theta.cosh().ln(),
                ContourKind::Renyi3Qr => -1.5 * LN_2 - (0.25 * (3.0 * theta).exp() + 0.75 * (-theta).exp()).ln(),
                ContourKind::Renyi3Q => -0.5 * LN_2 - 3.0 * theta,
            };
            println!("{:<10} {theta:>6} {:>16.12} {exact:>16.12}", kind.name(), r.action);
        }
    }
    let g = solve(&build_contour(ContourKind::Thermal, 2.0, 8)?, &free, 0.0, &cfg)?.g;
    println!("thermal G row 0 (1/2 sgn): {:?}", (0..8).map(|j| g[(0, j)]).collect::<Vec<_>>());
    Ok(())
}
