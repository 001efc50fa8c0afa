//! Exact small-N checks: channel Choi identities, a single encoded pair,
//! and disorder-averaged coherent information of a TFD code.

use syk_replica::edoracle::{self, Channel, ChannelFamily};
use syk_replica::*;

fn main() -> Result<()> {
    for n in [2, 4] {
        for (family, rate) in [(ChannelFamily::Single, 0.1), (ChannelFamily::Pair, 0.5)] {
            let c = edoracle::verify_channel_choi(family, rate, n)?;
            println!("N={n} {family:?} rate={rate}: deviation {:.1e}, pair coefficient {:.6}", c.deviation, c.coefficient);
        }
    }
    for p in [0.0, 0.1, 0.2] {
        println!("bell pair p={p}: I2 = {:.6}", edoracle::bell_pair_coherent_info(p, 0.0, 2)?);
    }
    let params = ModelParams::syk(1.0);
    let seeds: Vec<u64> = (1..=10).collect();
    for p in [0.0, 0.05, 0.1] {
        let (mean, se) = edoracle::disorder_average(8, &params, 2.0, Channel::single(p), 2, &seeds)?;
        println!("N=8 beta=2 p={p}: ic/N = {:.5} +- {:.5}", mean / 8.0, se / 8.0);
    }
    Ok(())
}
