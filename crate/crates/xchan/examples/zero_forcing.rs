//! Noiseless separation: after alignment, zero-forcing at each receiver
//! returns the transmitted integers exactly.

use xchan::planner::plan;
use xchan::realmap::{realify_matrix, realify_vector, RVector};
use xchan::structcode::{decode, encode, ConstellationParam, ConstellationPoint};
use xchan::synth::{generate_channels, message_index, synthesize};
use xchan::verify::ZeroForcer;
use xchan::{AntennaConfig, TolerancePolicy};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = AntennaConfig::new(7, 6, 5, 4);
    let p = plan(&cfg)?;
    let ch = generate_channels(&cfg, 21);
    let pre = synthesize(&ch, &p, 22)?;
    let param = ConstellationParam::with_q(2)?;

    // Walk the constellation deterministically so every message gets
    // different symbols.
    let points: Vec<ConstellationPoint> = param.points().collect();
    let mut alphabet = points.iter().copied().cycle();
    let mut sent: [Vec<ConstellationPoint>; 4] = Default::default();
    for (i, m) in pre.messages.iter().enumerate() {
        sent[i] = alphabet.by_ref().take(m.len()).collect();
    }

    let pol = TolerancePolicy::default();
    let mut worst: f64 = 0.0;
    for r in [1usize, 2] {
        let mut y = RVector::zeros(2 * ch.h(r, 1).nrows());
        for t in [1usize, 2] {
            let h = realify_matrix(ch.h(r, t));
            for rr in [1usize, 2] {
                let idx = message_index(rr, t);
                for (v, pt) in pre.messages[idx].all().zip(&sent[idx]) {
                    y += &h * realify_vector(v) * encode(*pt, &param)? as f64;
                }
            }
        }
        let est = ZeroForcer::new(&ch, &pre, r, &pol)?.decode(&y)?;
        let mut row = 0;
        for t in [1usize, 2] {
            for pt in &sent[message_index(r, t)] {
                let s = encode(*pt, &param)? as f64;
                worst = worst.max((est[row] - s).abs());
                if decode(est[row].round() as i64, &param)? != *pt {
                    return Err(format!("receiver {r}: stream {row} decoded wrongly").into());
                }
                row += 1;
            }
        }
        println!("receiver {r}: {row} streams recovered");
    }
    println!("{cfg} worst |estimate - codeword| = {worst:.2e}");
    if worst > 1e-6 {
        return Err("noiseless estimate drifted".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
