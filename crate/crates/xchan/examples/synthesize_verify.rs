//! Draw channels, build precoders for a plan, and certify every condition;
//! then break one alignment on purpose and watch the report catch it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xchan::planner::plan;
use xchan::realmap::CVector;
use xchan::synth::{complex_gaussian, generate_channels, synthesize};
use xchan::verify::verify_all;
use xchan::{AntennaConfig, TolerancePolicy};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let pol = TolerancePolicy::default();
    for cfg in [
        AntennaConfig::new(4, 4, 3, 2),
        AntennaConfig::new(3, 2, 5, 4),
    ] {
        let p = plan(&cfg)?;
        let ch = generate_channels(&cfg, 11);
        let pre = synthesize(&ch, &p, 12)?;
        let rep = verify_all(&ch, &p, &pre, &pol)?;
        println!(
            "{cfg} case {}: achieved {} of planned {}, passed={}",
            p.tag.case.label(),
            rep.achieved_dof,
            p.dof,
            rep.passed()
        );
        for (name, c) in &rep.conditions {
            println!("  {name:<10} ok={:<5} residual={:.1e}", c.ok, c.residual);
        }
        if !rep.passed() || rep.achieved_dof != p.dof {
            return Err(format!("{cfg} failed: {:?}", rep.failures()).into());
        }
    }

    // Case A uses both receive budgets in full, so replacing the aligned
    // vector of message (2,2) overflows receiver 1.
    let cfg = AntennaConfig::new(2, 2, 2, 1);
    let p = plan(&cfg)?;
    let ch = generate_channels(&cfg, 5);
    let mut pre = synthesize(&ch, &p, 6)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let stray = CVector::from_fn(cfg.m2 as usize, |_, _| complex_gaussian(&mut rng)).normalize();
    pre.message_mut(2, 2).u[0] = stray;
    let rep = verify_all(&ch, &p, &pre, &pol)?;
    println!(
        "sabotaged {cfg}: alignment_ok={} budget_r1={}/{} failures={:?}",
        rep.alignment_ok(),
        rep.budget_r1.occupied,
        rep.budget_r1.available,
        rep.failures()
    );
    if rep.passed() {
        return Err("sabotage went unnoticed".into());
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
