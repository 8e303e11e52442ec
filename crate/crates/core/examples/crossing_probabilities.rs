//! Crossing probabilities of straight lines by Brownian motion and by a
//! Brownian bridge, over a range of horizons.

use blowup_lab::barrier::*;

fn main() -> blowup_lab::Result<()> {
    let free = LinearBarrier::plus(1.0, 1.0)?;
    println!("free motion, barrier 1 + t");
    for r in [0.25, 0.5, 1.0, 2.0, 8.0] {
        let p = bm_crossing_finite(&free, Horizon::new(r)?)?;
        println!("  r = {r:>5}: {:.12}", p.value());
    }
    println!("  r =   inf: {:.12}", bm_crossing_infinite(&free)?.value());

    // Bridge pinned at W_1 = 0.3 facing 1.5 - 0.2 t.
    let line = LinearBarrier::minus(1.5, 0.2)?;
    let pin = BridgePin::new(1.0, 0.3)?;
    println!("bridge pinned at (1, 0.3), barrier 1.5 - 0.2 t");
    for r in [0.2, 0.5, 0.9, 1.0, 1.5, 3.0] {
        let p = bridge_crossing(&line, Horizon::new(r)?, &pin)?;
        println!("  r = {r:>5}: {:.12}", p.value());
    }
    println!("  r =   inf: {:.12}", bridge_crossing(&line, Horizon::infinite(), &pin)?.value());
    Ok(())
}
